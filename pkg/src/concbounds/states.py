"""Two-qubit states and the quartz dephasing channel."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qlinalg import DensityMatrix, check_shape

SPEED_OF_LIGHT = 299_792_458.0  # m/s

H = np.array([1.0, 0.0], dtype=complex)
V = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class CalibrationParams:
    """Quartz birefringence and filter spectrum.

    Defaults describe a 780 nm / 3 nm interference filter and crystalline
    quartz; they are illustrative, not a fitted calibration.
    """

    birefringence: float = 0.00871
    center_wavelength_nm: float = 780.0
    bandwidth_nm: float = 3.0

    def __post_init__(self):
        if min(self.birefringence, self.center_wavelength_nm, self.bandwidth_nm) <= 0:
            raise ValueError("calibration parameters must be strictly positive")
        if self.bandwidth_nm >= self.center_wavelength_nm:
            raise ValueError("bandwidth must be smaller than the center wavelength")


def pure(psi) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()), (2,) * int(round(math.log2(len(psi)))))


def singlet_vector() -> np.ndarray:
    return (np.kron(H, V) - np.kron(V, H)) / math.sqrt(2)


def bell_singlet() -> DensityMatrix:
    """(|HV> - |VH>)/sqrt(2), the source state before dephasing."""
    return pure(singlet_vector())


def maximally_mixed(side: int = 4) -> DensityMatrix:
    return DensityMatrix(np.eye(side) / side, (2,) * int(round(math.log2(side))))


def phase_damp(rho: DensityMatrix, d: float, target: int = 0) -> DensityMatrix:
    """Dephase qubit ``target`` in the H/V basis.

    Every element whose row and column differ in the target qubit is
    multiplied by ``d``; populations are untouched.
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"coherence factor must lie in [0, 1], got {d}")
    dims = rho.dims
    if not 0 <= target < len(dims) or dims[target] != 2:
        raise ValueError(f"target {target} is not a qubit of dims {dims}")
    n = len(dims)
    t = np.array(rho.matrix).reshape(dims + dims)
    idx = np.indices(t.shape)
    mask = np.where(idx[target] != idx[n + target], d, 1.0)
    m = (t * mask).reshape(rho.matrix.shape)
    return DensityMatrix(m, dims)


def dephased_singlet(d: float) -> DensityMatrix:
    return phase_damp(bell_singlet(), d, target=0)


def quartz_to_coherence(thickness_mm: float, cal: CalibrationParams | None = None) -> float:
    """Coherence left after a quartz plate, Gaussian-spectrum model.

    d(L) = exp(-(sigma_w * dn * L / c)^2 / 2) with the angular-frequency
    standard deviation sigma_w taken from the filter FWHM.
    """
    if thickness_mm < 0:
        raise ValueError("thickness must be non-negative")
    cal = cal or CalibrationParams()
    lam0 = cal.center_wavelength_nm * 1e-9
    dlam = cal.bandwidth_nm * 1e-9
    sigma_w = 2 * math.pi * SPEED_OF_LIGHT * dlam / (lam0**2 * math.sqrt(8 * math.log(2)))
    delay = cal.birefringence * thickness_mm * 1e-3 / SPEED_OF_LIGHT
    return math.exp(-0.5 * (sigma_w * delay) ** 2)


def werner(p: float) -> DensityMatrix:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner weight must lie in [0, 1], got {p}")
    m = p * bell_singlet().matrix + (1 - p) * np.eye(4) / 4
    return DensityMatrix(m, (2, 2))


def random_density(seed: int, rank: int = 4) -> DensityMatrix:
    """Ginibre-induced random two-qubit state; rank 4 is Hilbert-Schmidt."""
    if not 1 <= rank <= 4:
        raise ValueError(f"rank must be in 1..4, got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    m = g @ g.conj().T
    m = 0.5 * (m + m.conj().T)
    return DensityMatrix(m / np.trace(m).real, (2, 2))


def random_pure(seed: int) -> DensityMatrix:
    return random_density(seed, rank=1)


def from_matrix(m, dims=(2, 2)) -> DensityMatrix:
    m = np.asarray(m, dtype=complex)
    check_shape(m, dims)
    return DensityMatrix(m, tuple(dims))
