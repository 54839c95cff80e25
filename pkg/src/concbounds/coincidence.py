"""Event-class simulation of the twofold-copy parity experiment.

Two consecutive pump pulses each emit a photon pair; the delayed photon
from pulse 1 meets the prompt photon from pulse 2 at BS3 (A photons) and
BS4 (B photons). A cross-port coincidence at one beamsplitter is the POVM

    E(m) = (I - m S) / 2 = m P- + (1 - m) I / 2

with ``m`` the two-photon mode overlap: ``m = 1`` at a perfect dip,
``m = 0`` with the stage moved out of the interference region.

Four-photon events come in three incoherent classes: one pair per pulse
(signal) or both pairs from pulse 1 or pulse 2 (background). Backgrounds
do not depend on the stage positions and are measured by two blocking
runs, b1 and b2, which are subtracted from every setting.

Settings are keyed ``dd``, ``do``, ``od``, ``oo`` (stage A first, ``d`` =
dip, ``o`` = out).
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import constants as tol
from .concurrence import (
    BoundEstimate,
    Observable,
    _lower,
    _upper,
    swap_operator,
    twofold_state,
)
from .errors import InsufficientDataError
from .qlinalg import DensityMatrix, kron

SETTING_KEYS = ("dd", "do", "od", "oo")
PULSE_PERIOD_S = 1 / 76e6


class Setting(NamedTuple):
    stage_a: str
    stage_b: str

    @property
    def key(self) -> str:
        return self.stage_a[0] + self.stage_b[0]


SETTINGS = tuple(Setting(a, b) for a in ("dip", "out") for b in ("dip", "out"))


@dataclass(frozen=True)
class SimConfig:
    mode_overlap: float = 1.0
    signal_strength: float = 5000.0
    class_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    mc_trials: int = 1000
    visibility_correction: bool = False
    # bench geometry, documentation only
    repetition_rate_hz: float = 76e6
    delay_arm_m: float = 3.947

    def __post_init__(self):
        if not 0.0 <= self.mode_overlap <= 1.0:
            raise ValueError(f"mode_overlap must lie in [0, 1], got {self.mode_overlap}")
        if self.signal_strength <= 0:
            raise ValueError("signal_strength must be positive")
        w = tuple(float(x) for x in self.class_weights)
        if len(w) != 3 or min(w) < 0 or sum(w) <= 0:
            raise ValueError(f"class_weights must be three non-negative numbers, got {w}")
        if w[0] <= 0:
            raise ValueError("signal class weight must be positive")
        if self.mc_trials < 1:
            raise ValueError("mc_trials must be positive")
        object.__setattr__(self, "class_weights", w)

    @property
    def background_ratio(self) -> float:
        """Total background rate relative to the (out, out) signal rate."""
        ws, w1, w2 = self.class_weights
        return (w1 + w2) / ws

    def to_dict(self) -> dict:
        d = asdict(self)
        d["class_weights"] = list(self.class_weights)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        d = dict(d)
        if "class_weights" in d:
            d["class_weights"] = tuple(d["class_weights"])
        return cls(**d)


def bs_povm(m: float) -> Observable:
    """Coincidence POVM element of one beamsplitter at mode overlap ``m``."""
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"mode overlap must lie in [0, 1], got {m}")
    return Observable((np.eye(4) - m * swap_operator(2)) / 2, (2, 2), "BS_POVM")


def expected_rates(rho: DensityMatrix, cfg: SimConfig) -> dict[str, tuple[float, float]]:
    """Expected (signal, background) fourfold counts per setting."""
    tw = twofold_state(rho).matrix
    scale = 4 * cfg.signal_strength
    bg = cfg.signal_strength * cfg.background_ratio
    out = {}
    for s in SETTINGS:
        ea = bs_povm(cfg.mode_overlap if s.stage_a == "dip" else 0.0).matrix
        eb = bs_povm(cfg.mode_overlap if s.stage_b == "dip" else 0.0).matrix
        sig = float(np.real(np.einsum("ij,ji->", tw, kron(ea, eb))))
        out[s.key] = (scale * sig, bg)
    return out


def expected_blocking(cfg: SimConfig) -> tuple[float, float]:
    """Expected (b1, b2).

    Blocking the reflection arm leaves only double pairs from pulse 2;
    blocking the transmission arm leaves only those from pulse 1.
    """
    ws, w1, w2 = cfg.class_weights
    s = cfg.signal_strength
    return s * w2 / ws, s * w1 / ws


def background_fraction(cfg: SimConfig) -> float:
    """Expected background share of raw (out, out) counts."""
    r = cfg.background_ratio
    return r / (1 + r)


@dataclass(frozen=True)
class CountRecord:
    raw: dict
    b1: float
    b2: float
    config: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if set(self.raw) != set(SETTING_KEYS):
            raise ValueError(f"raw counts must have keys {SETTING_KEYS}, got {sorted(self.raw)}")
        if min(self.raw.values()) < 0 or self.b1 < 0 or self.b2 < 0:
            raise ValueError("counts must be non-negative")

    @property
    def net(self) -> dict[str, float]:
        bg = self.b1 + self.b2
        return {k: self.raw[k] - bg for k in SETTING_KEYS}

    def to_dict(self) -> dict:
        return {
            "settings": {k: self.raw[k] for k in SETTING_KEYS},
            "b1": self.b1,
            "b2": self.b2,
            "net": self.net,
            "config": self.config,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "CountRecord":
        return cls(dict(doc["settings"]), doc["b1"], doc["b2"], doc.get("config", {}), doc.get("seed"))

    @classmethod
    def from_json(cls, text: str) -> "CountRecord":
        return cls.from_dict(json.loads(text))


def simulate_run(rho: DensityMatrix, cfg: SimConfig, seed: int) -> CountRecord:
    rng = np.random.default_rng(seed)
    rates = expected_rates(rho, cfg)
    raw = {k: int(rng.poisson(sum(rates[k]))) for k in SETTING_KEYS}
    e1, e2 = expected_blocking(cfg)
    b1, b2 = (int(x) for x in rng.poisson([e1, e2]))
    return CountRecord(raw, b1, b2, cfg.to_dict(), seed)


def expected_record(rho: DensityMatrix, cfg: SimConfig) -> CountRecord:
    """Noise-free record: every count equals its expectation."""
    rates = expected_rates(rho, cfg)
    e1, e2 = expected_blocking(cfg)
    return CountRecord({k: sum(rates[k]) for k in SETTING_KEYS}, e1, e2, cfg.to_dict(), None)


def _traces_from_net(net: np.ndarray, m: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Estimates of Tr[P-(x)P-], Tr[P-(x)I], Tr[I(x)P-] on the twofold copy.

    ``net`` has the four settings on its last axis. With ``m < 1`` the
    affine relation E(m) = m P- + (1 - m) I/2 is inverted per arm.
    """
    r = net[..., 0] / net[..., 3]
    ra = net[..., 1] / net[..., 3]
    rb = net[..., 2] / net[..., 3]
    tr_a = (ra - (1 - m)) / (2 * m)
    tr_b = (rb - (1 - m)) / (2 * m)
    tr_ab = (r / 4 - m * (1 - m) * (tr_a + tr_b) / 2 - (1 - m) ** 2 / 4) / m**2
    return tr_ab, tr_a, tr_b


def _squares(tr_ab, tr_a, tr_b) -> dict[str, np.ndarray]:
    return {
        "V1": 8 * tr_ab - 4 * tr_b,
        "V2": 8 * tr_ab - 4 * tr_a,
        "K1": 4 * tr_b,
        "K2": 4 * tr_a,
        "TIGHT": 4 * tr_ab,
    }


@dataclass(frozen=True)
class EstimateResult:
    lower: BoundEstimate
    upper: BoundEstimate
    components: dict
    traces: dict
    bootstrap_trials: int = 0

    def as_dict(self) -> dict:
        return {
            "lower": self.lower.as_dict(),
            "upper": self.upper.as_dict(),
            "components": self.components,
            "traces": self.traces,
            "bootstrap_trials": self.bootstrap_trials,
        }


def _effective_overlap(cfg: SimConfig) -> float:
    if not cfg.visibility_correction:
        return 1.0
    if cfg.mode_overlap <= 0:
        raise ValueError("visibility correction needs a positive mode overlap")
    return cfg.mode_overlap


def _bootstrap(rec: CountRecord, m: float, trials: int, seed) -> tuple[float, float, int]:
    rng = np.random.default_rng(np.random.SeedSequence([0 if seed is None else int(seed), 0xB0]))
    raw = np.array([rec.raw[k] for k in SETTING_KEYS], dtype=float)
    raw_s = rng.poisson(raw, size=(trials, 4)).astype(float)
    blk = rng.poisson([rec.b1, rec.b2], size=(trials, 2)).astype(float)
    net = raw_s - blk.sum(axis=1, keepdims=True)
    ok = net[:, 3] > 0
    sq = _squares(*_traces_from_net(net[ok], m))
    lower = np.sqrt(np.clip(np.maximum(sq["V1"], sq["V2"]), 0, None))
    upper = np.sqrt(np.clip(np.minimum(np.minimum(sq["K1"], sq["K2"]), sq["TIGHT"]), 0, None))
    n = int(ok.sum())
    if n < 2:
        return math.nan, math.nan, n
    return float(np.std(lower, ddof=1)), float(np.std(upper, ddof=1)), n


def estimate_bounds(rec: CountRecord, cfg: SimConfig, bootstrap: bool = True) -> EstimateResult:
    """Concurrence bounds from background-subtracted fourfold counts.

    Point estimates use the recorded net counts; errors are the sample
    standard deviation over ``cfg.mc_trials`` Poisson resamples of the six
    recorded counts.
    """
    net = rec.net
    if net["oo"] <= 0:
        raise InsufficientDataError(f"net (out, out) count is {net['oo']}; cannot normalize")
    m = _effective_overlap(cfg)
    arr = np.array([net[k] for k in SETTING_KEYS], dtype=float)
    tr_ab, tr_a, tr_b = (float(x) for x in _traces_from_net(arr, m))
    eps = tol.TRACE_RANGE_EPS
    flagged = any(not -eps <= t <= 1 + eps for t in (tr_ab, tr_a, tr_b))
    if flagged:
        warnings.warn("estimated twofold traces fall outside [0, 1]", RuntimeWarning, stacklevel=2)
    comps = {k: float(v) for k, v in _squares(tr_ab, tr_a, tr_b).items()}
    s_lo = s_up = 0.0
    n = 0
    if bootstrap:
        s_lo, s_up, n = _bootstrap(rec, m, cfg.mc_trials, rec.seed)
    return EstimateResult(
        _lower(comps, s_lo, flagged),
        _upper(comps, s_up, flagged),
        comps,
        {"P-P-": tr_ab, "P-I": tr_a, "IP-": tr_b},
        n,
    )


def run_trials(
    rho: DensityMatrix, cfg: SimConfig, seeds: Sequence[int], workers: int = 1
) -> list[tuple[int, CountRecord, EstimateResult]]:
    """Simulate and analyze one run per seed; output sorted by seed."""

    def one(seed):
        rec = simulate_run(rho, cfg, seed)
        return seed, rec, estimate_bounds(rec, cfg)

    seeds = sorted(int(s) for s in seeds)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    return sorted(results, key=lambda t: t[0])


def dip_curve(rho_pair: DensityMatrix, m: float, positions, width: float = 1.0) -> np.ndarray:
    """Two-photon coincidence probability at each stage position."""
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"mode overlap must lie in [0, 1], got {m}")
    x = np.asarray(positions, dtype=float)
    overlaps = m * np.exp(-(x**2) / (2 * width**2))
    return np.array([bs_povm(float(mx)).expectation(rho_pair) for mx in overlaps])


def dip_scan(rho_pair: DensityMatrix, m: float, positions, width: float = 1.0) -> float:
    """Signal-only dip visibility (max - min) / max over the scan."""
    c = dip_curve(rho_pair, m, positions, width)
    return float((c.max() - c.min()) / c.max()) if c.max() > 0 else 0.0


def pair_state(rho: DensityMatrix, arm: str = "A") -> DensityMatrix:
    """State of the two photons meeting at one beamsplitter: marginal (x) marginal."""
    r = rho.reduced([0 if arm == "A" else 1])
    return DensityMatrix(kron(r, r), (2, 2))
