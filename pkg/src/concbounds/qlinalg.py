"""Dense complex linear algebra for small multipartite operators.

Matrices are plain ``numpy`` complex arrays. Subsystems are ordered
big-endian: the first entry of ``dims`` is the most significant index
factor, so for dims ``[2, 2]`` the basis is ``|00>, |01>, |10>, |11>``
with ``0 = H`` and ``1 = V``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import constants as tol
from .errors import DimensionError, NotPSDError


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def check_shape(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise DimensionError(f"subsystem dimensions must all be >= 2, got {dims}")
    side = int(np.prod(dims))
    if m.shape != (side, side):
        raise DimensionError(f"matrix shape {m.shape} does not match dims {dims}")
    return dims


def max_abs_diff(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def allclose(a, b, atol: float) -> bool:
    """Entrywise comparison with a caller-supplied absolute tolerance."""
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and max_abs_diff(a, b) <= atol


def hermiticity_error(h) -> float:
    h = np.asarray(h)
    return max_abs_diff(h, h.conj().T)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original relative order.
    """
    m = as_matrix(m)
    dims = check_shape(m, dims)
    n = len(dims)
    keep = sorted({int(k) for k in np.atleast_1d(keep)})
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"keep={keep} is not a non-empty subset of range({n})")
    out = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    do = int(np.prod([dims[i] for i in out])) if out else 1
    t = m.reshape(dims + dims)
    order = keep + out
    t = t.transpose(order + [n + i for i in order]).reshape(dk, do, dk, do)
    return np.einsum("ijkj->ik", t)


def permute_systems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Relabel tensor factors: new subsystem ``k`` is old subsystem ``perm[k]``."""
    m = as_matrix(m)
    dims = check_shape(m, dims)
    n = len(dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of range({n})")
    side = m.shape[0]
    t = m.reshape(dims + dims).transpose(perm + [n + p for p in perm])
    return t.reshape(side, side)


def permuted_dims(dims: Sequence[int], perm: Sequence[int]) -> tuple[int, ...]:
    return tuple(dims[p] for p in perm)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for new, old in enumerate(perm):
        inv[old] = new
    return inv


def herm_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending."""
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"matrix must be square, got {h.shape}")
    if hermiticity_error(h) > tol.EIG_HERMITIAN_ATOL:
        raise ValueError("matrix is not Hermitian")
    w, u = np.linalg.eigh(0.5 * (h + h.conj().T))
    return w[::-1].copy(), u[:, ::-1].copy()


def psd_factor(h) -> np.ndarray:
    """Return ``W`` with ``h = W W^dagger``, columns scaled by sqrt eigenvalues."""
    w, u = herm_eig(h)
    if w.min() < -tol.SQRT_PSD_ATOL:
        raise NotPSDError(f"minimum eigenvalue {w.min():.3e} is negative")
    return u * np.sqrt(np.clip(w, 0.0, None))


def herm_sqrt(h) -> np.ndarray:
    w, u = herm_eig(h)
    if w.min() < -tol.SQRT_PSD_ATOL:
        raise NotPSDError(f"minimum eigenvalue {w.min():.3e} is negative")
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(u) + 1)
    rho = np.nonzero(u - (css - 1.0) / k > 0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1)
    return np.clip(v - theta, 0.0, None)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Trace-one positive semidefinite matrix over ``dims`` subsystems."""

    matrix: np.ndarray
    dims: tuple[int, ...] = (2, 2)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dims = check_shape(m, self.dims)
        herm = hermiticity_error(m)
        if herm > tol.HERMITIAN_ATOL:
            raise ValueError(f"density matrix not Hermitian (deviation {herm:.2e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > tol.TRACE_ATOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        lam = np.linalg.eigvalsh(m).min()
        if lam < -tol.PSD_ATOL:
            raise NotPSDError(f"density matrix has eigenvalue {lam:.3e}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def side(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def reduced(self, keep) -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep)

    def isclose(self, other: "DensityMatrix", atol: float) -> bool:
        return self.dims == other.dims and allclose(self.matrix, other.matrix, atol)


def project_to_density(h, dims: Sequence[int] = (2, 2)) -> DensityMatrix:
    """Frobenius-nearest trace-one PSD matrix to a Hermitian estimate.

    Eigenvalues are projected onto the probability simplex, which clips
    negative weight and redistributes the excess evenly over the rest.
    """
    h = as_matrix(h)
    dims = check_shape(h, dims)
    tr = np.trace(h).real
    if abs(tr - 1.0) > tol.TRACE_SANITY:
        raise ValueError(f"trace {tr:.3f} is too far from 1; input looks corrupted")
    w, u = herm_eig(h)
    p = project_simplex(w)
    rho = (u * p) @ u.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), dims)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr |sqrt(rho) sqrt(sigma)|)^2``."""
    a = psd_factor(np.asarray(getattr(rho, "matrix", rho)))
    b = psd_factor(np.asarray(getattr(sigma, "matrix", sigma)))
    s = np.linalg.svd(a.conj().T @ b, compute_uv=False)
    return float(min(1.0, s.sum() ** 2))


def trace_distance(rho, sigma) -> float:
    d = np.asarray(getattr(rho, "matrix", rho)) - np.asarray(getattr(sigma, "matrix", sigma))
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())
