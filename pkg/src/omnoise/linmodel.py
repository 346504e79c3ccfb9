"""Quadrature-space linear model: drift M, port coupling D, noise correlations C."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import eigsolve
from .errors import NumericalError
from .model import PhysicalParams
from .steady_state import MeanFields

SQRT2 = math.sqrt(2.0)


class QuadIndex(IntEnum):
    """Position of each quadrature fluctuation in R = (X_a, Y_a, X_b1, Y_b1, X_b2, Y_b2)."""

    X_a = 0
    Y_a = 1
    X_b1 = 2
    Y_b1 = 3
    X_b2 = 4
    Y_b2 = 5

    @classmethod
    def parse(cls, name) -> "QuadIndex":
        if isinstance(name, (int, np.integer)):
            return cls(int(name))
        key = str(name).strip().replace("-", "_")
        for member in cls:
            if member.name.lower() == key.lower() or member.name.replace("_", "").lower() == key.lower():
                return member
        raise ValueError(f"unknown quadrature {name!r}; expected one of {[m.name for m in cls]}")


#: Permutation exchanging the b1 and b2 quadrature blocks.
SWAP = np.eye(6)[[0, 1, 4, 5, 2, 3]]


@dataclass(frozen=True, eq=False)
class LinearModel:
    m: np.ndarray
    d: np.ndarray
    c: np.ndarray
    mean: MeanFields

    def as_dict(self) -> dict:
        def cpx(mat):
            return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat, complex)]
        return {"order": [q.name for q in QuadIndex], "M": self.m.tolist(),
                "D": self.d.tolist(), "C": cpx(self.c), "mean_fields": self.mean.as_dict()}


def mode_coefficients(p: PhysicalParams, mf: MeanFields) -> tuple[np.ndarray, np.ndarray]:
    """Matrices A, B of the complex fluctuation equations d(dz)/dt = A dz + B dz*.

    ``dz = (da, db1, db2)``.
    """
    a = mf.a_mean
    g1, g2, mu = p.g1, p.g2, p.mu
    A = np.array([
        [complex(-0.5 * p.kappa, -mf.delta_a), 1j * a * g1.conjugate(), 1j * a * g2.conjugate()],
        [1j * g1 * a.conjugate(), complex(-0.5 * p.gamma1, -p.omega_m), 1j * mu],
        [1j * g2 * a.conjugate(), 1j * mu.conjugate(), complex(-0.5 * p.gamma2, -p.omega_m)],
    ])
    B = np.array([
        [0.0, 1j * a * g1, 1j * a * g2],
        [1j * g1 * a, 0.0, 0.0],
        [1j * g2 * a, 0.0, 0.0],
    ])
    return A, B


def _quadrature_transform() -> np.ndarray:
    """Q with R = Q (dz, dz*) for the QuadIndex ordering."""
    q = np.zeros((6, 6), dtype=complex)
    for j in range(3):
        q[2 * j, j] = q[2 * j, j + 3] = 1.0 / SQRT2
        q[2 * j + 1, j] = -1j / SQRT2
        q[2 * j + 1, j + 3] = 1j / SQRT2
    return q


_Q = _quadrature_transform()
_Q_INV = np.linalg.inv(_Q)


def drift_from_coefficients(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Real quadrature drift matrix from the complex coefficient pair (A, B)."""
    big = np.block([[A, B], [B.conj(), A.conj()]])
    m = _Q @ big @ _Q_INV
    norm = np.linalg.norm(m)
    residue = np.max(np.abs(m.imag))
    if residue > 1e-14 * max(norm, 1e-300):
        raise NumericalError(f"quadrature drift matrix is not real (residue {residue:.3e})")
    return np.ascontiguousarray(m.real)


def damping_matrix(p: PhysicalParams) -> np.ndarray:
    return np.diag(np.sqrt([p.kappa, p.kappa, p.gamma1, p.gamma1, p.gamma2, p.gamma2]))


def noise_correlation(p: PhysicalParams) -> np.ndarray:
    """Two-time correlation matrix of the noise vector N = D R_in (delta-correlated)."""
    c = np.zeros((6, 6), dtype=complex)
    for k, (rate, n) in enumerate(((p.kappa, p.n_a), (p.gamma1, p.n_b1), (p.gamma2, p.n_b2))):
        i = 2 * k
        c[i, i] = c[i + 1, i + 1] = 0.5 * rate * (2.0 * n + 1.0)
        c[i, i + 1] = 0.5j * rate
        c[i + 1, i] = -0.5j * rate
    return c


def build_linear_model(p: PhysicalParams, mf: MeanFields) -> LinearModel:
    A, B = mode_coefficients(p, mf)
    return LinearModel(m=drift_from_coefficients(A, B), d=damping_matrix(p),
                       c=noise_correlation(p), mean=mf)


def fluctuation_rhs(p: PhysicalParams, mf: MeanFields, z: np.ndarray) -> np.ndarray:
    """Noise-free right-hand sides of the linearised mode equations, term by term.

    ``z`` has shape (..., 3) holding (da, db1, db2). Written out independently
    of :func:`mode_coefficients` so it can audit the quadrature collection.
    """
    da, db1, db2 = z[..., 0], z[..., 1], z[..., 2]
    a = mf.a_mean
    g1, g2, mu = p.g1, p.g2, p.mu
    rhs_a = (1j * (-mf.delta_a + 0.5j * p.kappa) * da
             + 1j * a * g1.conjugate() * db1 + 1j * a * g1 * np.conj(db1)
             + 1j * a * g2.conjugate() * db2 + 1j * a * g2 * np.conj(db2))
    rhs_b1 = (1j * (-p.omega_m + 0.5j * p.gamma1) * db1 + 1j * mu * db2
              + 1j * g1 * a.conjugate() * da + 1j * g1 * a * np.conj(da))
    rhs_b2 = (1j * (-p.omega_m + 0.5j * p.gamma2) * db2 + 1j * mu.conjugate() * db1
              + 1j * g2 * a.conjugate() * da + 1j * g2 * a * np.conj(da))
    return np.stack([rhs_a, rhs_b1, rhs_b2], axis=-1)


def to_quadratures(z: np.ndarray) -> np.ndarray:
    """(..., 3) complex mode amplitudes -> (..., 6) real quadratures."""
    out = np.empty(z.shape[:-1] + (6,))
    out[..., 0::2] = SQRT2 * z.real
    out[..., 1::2] = SQRT2 * z.imag
    return out


def verify_drift(p: PhysicalParams, mf: MeanFields, lm: LinearModel, samples: int = 100,
                 seed: int = 0) -> float:
    """Largest |M R - quad(rhs(z))| over random complex mode vectors of unit scale."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(samples, 3)) + 1j * rng.normal(size=(samples, 3))
    r = to_quadratures(z)
    expected = to_quadratures(fluctuation_rhs(p, mf, z))
    return float(np.max(np.abs(r @ lm.m.T - expected)))


def stability_check(lm_or_m) -> tuple[bool, float]:
    """(stable, spectral abscissa) of the drift matrix; stable iff max Re(lambda) < 0."""
    m = lm_or_m.m if isinstance(lm_or_m, LinearModel) else np.asarray(lm_or_m, dtype=float)
    abscissa = float(np.max(eigsolve.eigenvalues(m).real))
    return abscissa < 0.0, abscissa
