"""Concurrence and its measurable bounds on the twofold copy.

The twofold copy of a two-qubit state is laid out as (A1, A2, B1, B2):
both copies of photon A first, then both copies of photon B. In this
frame an operator ``O_A (x) O_B`` acts on the A pair and the B pair, which
is how the two beamsplitter interferometers see the photons.

Bound observables (all 16x16):

* ``V1 = 4 (P- - P+) (x) P-`` and ``V2 = 4 P- (x) (P- - P+)``: lower bounds,
  ``C^2 >= Tr[rho (x) rho V_i]``.
* ``K1 = 4 (P- + P+) (x) P-`` and ``K2 = 4 P- (x) (P- + P+)``: upper bounds.
* ``TIGHT = 4 P- (x) P-``: the tighter two-qubit upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import constants as tol
from .qlinalg import DensityMatrix, kron, permute_systems, psd_factor

LABELS = ("P_minus", "P_plus", "V1", "V2", "K1", "K2", "TIGHT", "BS_POVM")
LOWER_LABELS = ("V1", "V2")
UPPER_LABELS = ("K1", "K2", "TIGHT")

# (A1, B1, A2, B2) -> (A1, A2, B1, B2)
COPY_PAIR_PERM = (0, 2, 1, 3)

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray
    dims: tuple[int, ...]
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown observable label {self.label!r}")
        m = np.array(self.matrix, dtype=complex)
        if np.max(np.abs(m - m.conj().T)) > tol.HERMITIAN_ATOL:
            raise ValueError(f"{self.label} is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", tuple(self.dims))

    def expectation(self, rho) -> float:
        r = getattr(rho, "matrix", rho)
        return float(np.real(np.einsum("ij,ji->", r, self.matrix)))


@dataclass(frozen=True)
class BoundEstimate:
    """A concurrence bound: ``value = sqrt(max(0, raw_square))``.

    ``raw_square`` keeps the unclamped estimate of C^2, which can go
    negative for lower bounds on weakly entangled states.
    """

    kind: str
    raw_square: float
    std_error: float = 0.0
    components: dict = field(default_factory=dict)
    flagged: bool = False

    @property
    def value(self) -> float:
        return math.sqrt(max(0.0, self.raw_square))

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "raw_square": self.raw_square,
            "std_error": self.std_error,
            "components": dict(self.components),
            "flagged": self.flagged,
        }


def _require_two_qubits(rho: DensityMatrix):
    if tuple(rho.dims) != (2, 2):
        raise ValueError(f"expected a two-qubit state, got dims {rho.dims}")


def wootters_concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence max(0, l1 - l2 - l3 - l4).

    The l_i are square roots of the eigenvalues of sqrt(rho) rho~ sqrt(rho),
    obtained here as singular values of ``W^T Y W`` where ``rho = W W^dagger``
    and ``Y = sy (x) sy``. Same numbers, without taking square roots of
    eigenvalues that should be zero.
    """
    _require_two_qubits(rho)
    w = psd_factor(rho.matrix)
    lam = np.linalg.svd(w.T @ SPIN_FLIP @ w, compute_uv=False)
    return float(min(1.0, max(0.0, lam[0] - lam[1:].sum())))


def swap_operator(d: int = 2) -> np.ndarray:
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


@lru_cache(maxsize=None)
def parity_projectors(d: int = 2) -> tuple[Observable, Observable]:
    """Antisymmetric and symmetric projectors on C_d (x) C_d."""
    if d < 2:
        raise ValueError("subsystem dimension must be >= 2")
    s = swap_operator(d)
    eye = np.eye(d * d)
    return (
        Observable((eye - s) / 2, (d, d), "P_minus"),
        Observable((eye + s) / 2, (d, d), "P_plus"),
    )


def twofold_state(rho: DensityMatrix) -> DensityMatrix:
    """rho (x) rho reordered to (A1, A2, B1, B2)."""
    _require_two_qubits(rho)
    both = kron(rho.matrix, rho.matrix)
    return DensityMatrix(permute_systems(both, (2, 2, 2, 2), COPY_PAIR_PERM), (2, 2, 2, 2))


@lru_cache(maxsize=None)
def bound_observable(label: str) -> Observable:
    pm, pp = (o.matrix for o in parity_projectors(2))
    pairs = {
        "V1": (4 * (pm - pp), pm),
        "V2": (4 * pm, pm - pp),
        "K1": (4 * (pm + pp), pm),
        "K2": (4 * pm, pm + pp),
        "TIGHT": (4 * pm, pm),
    }
    if label in ("P_minus", "P_plus"):
        return parity_projectors(2)[label == "P_plus"]
    if label not in pairs:
        raise ValueError(f"unknown observable label {label!r}")
    a, b = pairs[label]
    return Observable(kron(a, b), (2, 2, 2, 2), label)


def twofold_expectations(rho: DensityMatrix) -> dict[str, float]:
    """Tr[rho (x) rho O] for every bound observable, via 16x16 operators."""
    tw = twofold_state(rho)
    return {lab: bound_observable(lab).expectation(tw) for lab in LOWER_LABELS + UPPER_LABELS}


def _lower(values: dict[str, float], std_error: float = 0.0, flagged: bool = False) -> BoundEstimate:
    comps = {k: values[k] for k in LOWER_LABELS}
    return BoundEstimate("lower", max(comps.values()), std_error, comps, flagged)


def _upper(values: dict[str, float], std_error: float = 0.0, flagged: bool = False) -> BoundEstimate:
    comps = {k: values[k] for k in UPPER_LABELS}
    return BoundEstimate("upper", min(comps.values()), std_error, comps, flagged)


def lower_bound(rho: DensityMatrix) -> BoundEstimate:
    """Best of the two lower bounds, max_i Tr[rho (x) rho V_i]."""
    return _lower(twofold_expectations(rho))


def upper_bound(rho: DensityMatrix) -> BoundEstimate:
    """Best of K1, K2 and the tight observable (minimum squared value)."""
    return _upper(twofold_expectations(rho))


class PurityOracle(NamedTuple):
    purity: float
    purity_a: float
    purity_b: float
    lower_sq_1: float
    lower_sq_2: float
    upper_sq_k1: float
    upper_sq_k2: float
    upper_sq_tight: float

    def as_observables(self) -> dict[str, float]:
        return {
            "V1": self.lower_sq_1,
            "V2": self.lower_sq_2,
            "K1": self.upper_sq_k1,
            "K2": self.upper_sq_k2,
            "TIGHT": self.upper_sq_tight,
        }


def purity_oracle(rho: DensityMatrix) -> PurityOracle:
    """Closed forms of the bound traces from purities of rho and its marginals.

    Uses Tr[(rho (x) rho) S] = Tr rho^2 on each copy pair; touches only
    4x4 and 2x2 matrices.
    """
    _require_two_qubits(rho)
    p = rho.purity()
    ra, rb = rho.reduced([0]), rho.reduced([1])
    pa = float(np.real(np.vdot(ra, ra)))
    pb = float(np.real(np.vdot(rb, rb)))
    return PurityOracle(
        p, pa, pb,
        2 * (p - pa),
        2 * (p - pb),
        2 * (1 - pb),
        2 * (1 - pa),
        1 - pa - pb + p,
    )
