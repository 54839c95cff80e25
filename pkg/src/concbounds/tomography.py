"""Simulated two-qubit polarization tomography.

Sixteen product projectors {H, V, D, R} x {H, V, D, R} are measured with a
known number of shots each. Frequencies are inverted linearly and the
estimate is pushed to the nearest physical state before evaluating the
concurrence and its bounds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .concurrence import BoundEstimate, lower_bound, upper_bound, wootters_concurrence
from .errors import InsufficientDataError
from .qlinalg import DensityMatrix, fidelity, project_to_density

_H = np.array([1, 0], dtype=complex)
_V = np.array([0, 1], dtype=complex)
BASIS_STATES = {
    "H": _H,
    "V": _V,
    "D": (_H + _V) / math.sqrt(2),
    "R": (_H + 1j * _V) / math.sqrt(2),
}
SETTING_NAMES = tuple(a + b for a in "HVDR" for b in "HVDR")


@dataclass(frozen=True, eq=False)
class TomoSetting:
    id: int
    name: str
    projector: np.ndarray


@lru_cache(maxsize=1)
def settings_16() -> tuple[TomoSetting, ...]:
    out = []
    for k, name in enumerate(SETTING_NAMES):
        psi = np.kron(BASIS_STATES[name[0]], BASIS_STATES[name[1]])
        proj = np.outer(psi, psi.conj())
        proj.setflags(write=False)
        out.append(TomoSetting(k, name, proj))
    return tuple(out)


@lru_cache(maxsize=1)
def design_matrix() -> np.ndarray:
    """Rows map vec(rho) (row-major) to Tr[rho Pi_k]."""
    m = np.array([s.projector.conj().ravel() for s in settings_16()])
    m.setflags(write=False)
    return m


def probabilities(rho: DensityMatrix) -> np.ndarray:
    return np.real(design_matrix() @ np.asarray(rho.matrix).ravel())


@dataclass(frozen=True)
class TomoCounts:
    counts: tuple[int, ...]
    shots: int
    seed: Optional[int] = None

    def __post_init__(self):
        if len(self.counts) != 16:
            raise ValueError(f"expected 16 counts, got {len(self.counts)}")
        if self.shots < 1:
            raise ValueError("shots per setting must be positive")

    def to_json(self) -> str:
        return json.dumps(
            {"settings": list(SETTING_NAMES), "N0": self.shots, "counts": list(self.counts), "seed": self.seed},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "TomoCounts":
        doc = json.loads(text)
        if list(doc.get("settings", SETTING_NAMES)) != list(SETTING_NAMES):
            raise ValueError("settings list does not match the HVDR x HVDR order")
        return cls(tuple(doc["counts"]), int(doc["N0"]), doc.get("seed"))


@dataclass(frozen=True)
class TomoResult:
    rho_hat: DensityMatrix
    concurrence: float
    lower: BoundEstimate
    upper: BoundEstimate
    fidelity_vs_truth: Optional[float] = None

    def as_dict(self) -> dict:
        m = np.asarray(self.rho_hat.matrix)
        return {
            "rho_real": m.real.tolist(),
            "rho_imag": m.imag.tolist(),
            "concurrence": self.concurrence,
            "lower": self.lower.as_dict(),
            "upper": self.upper.as_dict(),
            "fidelity_vs_truth": self.fidelity_vs_truth,
        }


def simulate_counts(rho: DensityMatrix, shots: int, seed: int) -> TomoCounts:
    if shots < 1:
        raise ValueError("shots per setting must be positive")
    rng = np.random.default_rng(seed)
    lam = shots * np.clip(probabilities(rho), 0.0, None)
    return TomoCounts(tuple(int(c) for c in rng.poisson(lam)), shots, seed)


def linear_inversion(freqs) -> np.ndarray:
    """Hermitian estimate of rho from per-setting frequencies."""
    vec = np.linalg.solve(design_matrix(), np.asarray(freqs, dtype=complex))
    m = vec.reshape(4, 4)
    return 0.5 * (m + m.conj().T)


def reconstruct_frequencies(freqs, truth: DensityMatrix | None = None) -> TomoResult:
    est = linear_inversion(freqs)
    tr = np.trace(est).real
    if tr <= 0:
        raise InsufficientDataError("H/V-basis settings recorded no events")
    # shot noise moves the trace off 1; rescale before the physical projection
    rho_hat = project_to_density(est / tr, (2, 2))
    return TomoResult(
        rho_hat,
        wootters_concurrence(rho_hat),
        lower_bound(rho_hat),
        upper_bound(rho_hat),
        None if truth is None else fidelity(truth, rho_hat),
    )


def reconstruct(counts: TomoCounts, truth: DensityMatrix | None = None) -> TomoResult:
    c = np.asarray(counts.counts, dtype=float)
    if np.any(c < 0):
        raise ValueError("counts must be non-negative")
    return reconstruct_frequencies(c / counts.shots, truth)


def run_tomography(rho: DensityMatrix, shots: int, seed: int) -> TomoResult:
    return reconstruct(simulate_counts(rho, shots, seed), truth=rho)
