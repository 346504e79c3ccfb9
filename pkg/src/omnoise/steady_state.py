"""Self-consistent classical mean fields of the driven loop."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DegenerateSystemError, InvalidParameterError
from .model import PhysicalParams, drive_amplitude

DAMPING = 0.5


@dataclass(frozen=True)
class MeanFields:
    a_mean: complex
    b1_mean: complex
    b2_mean: complex
    delta_a: float
    iterations: int
    residual: float

    def as_dict(self) -> dict:
        return {
            "a_mean": [self.a_mean.real, self.a_mean.imag],
            "b1_mean": [self.b1_mean.real, self.b1_mean.imag],
            "b2_mean": [self.b2_mean.real, self.b2_mean.imag],
            "delta_a": self.delta_a,
            "iterations": self.iterations,
            "residual": self.residual,
        }


def _effective_detuning(p: PhysicalParams, b1: complex, b2: complex) -> float:
    # Re(g1 <b1>*) == Re(g1* <b1>); kept in the printed asymmetric form
    return p.delta - 2.0 * (p.g1 * b1.conjugate() + p.g2.conjugate() * b2).real


def _mechanical_response(p: PhysicalParams, n_photon: float) -> tuple[complex, complex]:
    """Exact solution of the 2x2 linear system for (<b1>, <b2>) at fixed |<a>|^2."""
    mu = p.mu
    m11 = complex(0.5 * p.gamma1, p.omega_m)
    m22 = complex(0.5 * p.gamma2, p.omega_m)
    m12 = -1j * mu
    m21 = -1j * mu.conjugate()
    det = m11 * m22 - m12 * m21
    scale = abs(m11 * m22) + abs(m12 * m21)
    if det == 0 or abs(det) <= 1e-14 * scale:
        raise DegenerateSystemError("mechanical mean-field system is singular")
    r1 = 1j * n_photon * p.g1
    r2 = 1j * n_photon * p.g2
    return (r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det


def solve_mean_fields(p: PhysicalParams, tol: float = 1e-12, max_iter: int = 10_000) -> MeanFields:
    """Damped fixed-point iteration for <a>, <b1>, <b2> and Delta_a.

    Each sweep computes ``<a>`` from the current effective detuning, solves the
    mechanical pair exactly, and relaxes ``Delta_a`` halfway towards its
    updated value. The residual is the largest update, with ``Delta_a``
    measured in units of ``omega_m`` and amplitudes relative to their size.
    """
    if not tol > 0:
        raise InvalidParameterError("tol must be > 0")
    if max_iter < 1:
        raise InvalidParameterError("max_iter must be >= 1")

    drive = math.sqrt(p.eta * p.kappa) * drive_amplitude(p)
    half_kappa = 0.5 * p.kappa

    def rel(new, old):
        return abs(new - old) / max(abs(new), abs(old), 1e-300)

    delta_a = p.delta
    a = b1 = b2 = 0j
    residual = math.inf
    for it in range(1, max_iter + 1):
        a_new = drive / complex(half_kappa, delta_a)
        b1_new, b2_new = _mechanical_response(p, abs(a_new) ** 2)
        target = _effective_detuning(p, b1_new, b2_new)
        residual = max(abs(target - delta_a) / p.omega_m,
                       rel(a_new, a) if a_new != a else 0.0,
                       rel(b1_new, b1) if b1_new != b1 else 0.0,
                       rel(b2_new, b2) if b2_new != b2 else 0.0)
        a, b1, b2 = a_new, b1_new, b2_new
        if residual < tol:
            return MeanFields(complex(a), complex(b1), complex(b2), float(target), it, float(residual))
        delta_a += DAMPING * (target - delta_a)
    raise ConvergenceError(
        f"mean fields did not converge in {max_iter} iterations (residual {residual:.3e})",
        residual=residual, iterations=max_iter)


def stationarity_residuals(p: PhysicalParams, mf: MeanFields) -> np.ndarray:
    """Scaled residuals of the three stationarity equations and the Delta_a definition.

    Each equation is divided by the magnitude of its largest term, so the
    entries are dimensionless and comparable with the solver tolerance.
    """
    drive = math.sqrt(p.eta * p.kappa) * drive_amplitude(p)
    a, b1, b2 = mf.a_mean, mf.b1_mean, mf.b2_mean
    delta_a = _effective_detuning(p, b1, b2)
    n = abs(a) ** 2
    mu = p.mu

    lhs_a = complex(0.5 * p.kappa, delta_a) * a
    r_a = abs(lhs_a - drive) / max(abs(lhs_a), abs(drive), 1e-300)

    t1 = (complex(0.5 * p.gamma1, p.omega_m) * b1, 1j * mu * b2, 1j * p.g1 * n)
    t2 = (complex(0.5 * p.gamma2, p.omega_m) * b2, 1j * mu.conjugate() * b1, 1j * p.g2 * n)
    r_b1 = abs(t1[0] - t1[1] - t1[2]) / max(max(abs(t) for t in t1), 1e-300)
    r_b2 = abs(t2[0] - t2[1] - t2[2]) / max(max(abs(t) for t in t2), 1e-300)
    r_d = abs(delta_a - mf.delta_a) / p.omega_m
    return np.array([r_a, r_b1, r_b2, r_d])
