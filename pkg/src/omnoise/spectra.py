"""Transfer matrices and power spectral densities of the quadrature fluctuations.

Conventions: the fluctuations obey dR/dt = M R + N with
<N(t) N^T(t')> = C delta(t - t'), so that [i w + M] R(w) = -N(w) and
T(w) = [i w + M]^-1. Every PSD carries the same 2 pi factor,
S(w) = 2 pi T(-w) C T^T(w). Frequencies are offsets in the frame rotating
at the pump, so the mechanical resonances sit near w = +omega_m.

The input-noise PSD is S_in = 2 pi C, and the output PSD is
S_out(w) = 2 pi P(-w) C P^T(w) with P = I + D T D, so a decoupled all-pass
port returns its input spectrum unchanged. Single-source contributions are
|X[i, j]|^2 S_in[j, j] with X = T' = T D or X = P.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import eigsolve
from .errors import InstabilityError, SingularityError
from .linmodel import LinearModel, QuadIndex, build_linear_model
from .model import PhysicalParams
from .steady_state import MeanFields, solve_mean_fields

TWO_PI = 2.0 * math.pi

#: cond(U) above which T is evaluated by direct inversion instead of the eigen-sum.
COND_FALLBACK = 1e8


class NearExceptionalPointWarning(RuntimeWarning):
    pass


@dataclass(frozen=True, eq=False)
class EigenSystem:
    lambdas: np.ndarray
    u: np.ndarray
    u_inv: np.ndarray
    cond: float
    m: np.ndarray
    near_ep: bool = False

    @property
    def abscissa(self) -> float:
        return float(np.max(self.lambdas.real))


def _order_key(lam: complex):
    return (int(np.sign(lam.imag)), abs(lam.imag), lam.real)


def eigensystem(lm, cond_ceiling: float = COND_FALLBACK, warn: bool = False) -> EigenSystem:
    """Eigen-decomposition M = U diag(lambda) U^-1 with deterministic ordering.

    Eigenvalues are sorted by the sign of their imaginary part, then by its
    magnitude, then by real part. A condition number of U above
    ``cond_ceiling`` (exceptional-point proximity) sets ``near_ep`` and, with
    ``warn=True``, emits :class:`NearExceptionalPointWarning`.
    """
    m = lm.m if isinstance(lm, LinearModel) else np.asarray(lm, dtype=float)
    lam, u = eigsolve.eig(m)
    order = sorted(range(len(lam)), key=lambda k: _order_key(lam[k]))
    lam = lam[order]
    u = u[:, order]
    cond = float(np.linalg.cond(u))
    if not math.isfinite(cond):
        cond = math.inf
        u_inv = np.linalg.pinv(u)
    else:
        u_inv = np.linalg.inv(u)
    near = cond > cond_ceiling
    if near and warn:
        warnings.warn(f"eigenvector matrix is ill-conditioned (cond {cond:.3e})",
                      NearExceptionalPointWarning, stacklevel=2)
    return EigenSystem(lambdas=lam, u=u, u_inv=u_inv, cond=cond, m=m, near_ep=near)


class System(NamedTuple):
    params: PhysicalParams
    mean: MeanFields
    model: LinearModel
    eigen: EigenSystem


def prepare(p: PhysicalParams, tol: float = 1e-12, max_iter: int = 10_000,
            require_stable: bool = True) -> System:
    """Steady state, linear model and eigensystem for one parameter point."""
    mf = solve_mean_fields(p, tol=tol, max_iter=max_iter)
    lm = build_linear_model(p, mf)
    es = eigensystem(lm)
    if require_stable and es.abscissa >= 0.0:
        raise InstabilityError(f"drift matrix is unstable (abscissa {es.abscissa:.3e})",
                               abscissa=es.abscissa)
    return System(p, mf, lm, es)


def _as_omega(omega):
    w = np.asarray(omega, dtype=float)
    return w, w.ndim == 0


def transfer_direct(m: np.ndarray, omega) -> np.ndarray:
    """T(w) = [i w I + M]^-1 by LU inversion (oracle and near-EP fallback)."""
    w, scalar = _as_omega(omega)
    mats = 1j * w.reshape(-1, 1, 1) * np.eye(m.shape[0]) + m
    try:
        t = np.linalg.inv(mats)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("i w I + M is singular") from exc
    return t[0] if scalar else t.reshape(w.shape + m.shape)


def transfer(es: EigenSystem, omega) -> np.ndarray:
    """T(w) = sum_k U[:, k] U^-1[k, :] / (i w + lambda_k); accepts scalar or array w."""
    if es.cond > COND_FALLBACK:
        return transfer_direct(es.m, omega)
    w, scalar = _as_omega(omega)
    denom = 1j * w.reshape(-1, 1) + es.lambdas
    if np.any(denom == 0):
        raise SingularityError("i w + lambda_k vanishes")
    t = np.einsum("ik,wk,kj->wij", es.u, 1.0 / denom, es.u_inv)
    return t[0] if scalar else t.reshape(w.shape + (6, 6))


def susceptibility_internal(es: EigenSystem, lm: LinearModel, omega) -> np.ndarray:
    """T'(w) = T(w) D: response of each quadrature to each unit input noise."""
    return transfer(es, omega) @ lm.d


def susceptibility_output(es: EigenSystem, lm: LinearModel, omega) -> np.ndarray:
    """P(w) = I + D T(w) D, mapping input to output quadratures."""
    return np.eye(6) + lm.d @ transfer(es, omega) @ lm.d


def input_psd(lm: LinearModel) -> np.ndarray:
    """S_in = 2 pi C (frequency independent)."""
    return TWO_PI * lm.c


def _quadratic(left: np.ndarray, core: np.ndarray, right: np.ndarray) -> np.ndarray:
    return left @ core @ np.swapaxes(right, -1, -2)


def psd_internal(es: EigenSystem, lm: LinearModel, omega) -> np.ndarray:
    """S(w) = 2 pi T(-w) C T^T(w)."""
    w, _ = _as_omega(omega)
    return TWO_PI * _quadratic(transfer(es, -w), lm.c, transfer(es, w))


def psd_output(es: EigenSystem, lm: LinearModel, omega) -> np.ndarray:
    """S_out(w) = 2 pi P(-w) C P^T(w)."""
    w, _ = _as_omega(omega)
    return TWO_PI * _quadratic(susceptibility_output(es, lm, -w), lm.c,
                               susceptibility_output(es, lm, w))


def contribution(kind: str, source, target, es: EigenSystem, lm: LinearModel, omega):
    """Share of the PSD of ``target`` driven by the input noise of ``source``.

    ``|X[target, source](w)|^2 S_in[source, source]`` with ``X = T'`` for
    ``kind="internal"`` and ``X = P`` for ``kind="output"``.
    """
    i = QuadIndex.parse(target)
    j = QuadIndex.parse(source)
    if kind == "internal":
        x = susceptibility_internal(es, lm, omega)
    elif kind == "output":
        x = susceptibility_output(es, lm, omega)
    else:
        raise ValueError(f"kind must be 'internal' or 'output', got {kind!r}")
    s_in = input_psd(lm)[j, j].real
    return np.abs(x[..., i, j]) ** 2 * s_in


def homodyne_output(es: EigenSystem, lm: LinearModel, omega, theta: float):
    """Output PSD of the rotated optical quadrature cos(theta) X_a + sin(theta) Y_a."""
    s = psd_output(es, lm, omega)
    c, sn = math.cos(theta), math.sin(theta)
    val = (c * c * s[..., 0, 0] + sn * sn * s[..., 1, 1]
           + c * sn * (s[..., 0, 1] + s[..., 1, 0]))
    return val.real


# --------------------------------------------------------------------------
# tabulation

QUANTITIES = ("internal", "output", "contribution", "contribution_output", "homodyne")


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    omegas: np.ndarray
    values: dict = field(default_factory=dict)
    params_hash: str = ""


def default_grid(p: PhysicalParams, points: int = 2001) -> np.ndarray:
    """Uniform grid over omega_m +- (4 |mu| + 40 max(gamma1, gamma2))."""
    half = 4.0 * p.mu_abs + 40.0 * max(p.gamma1, p.gamma2)
    return np.linspace(p.omega_m - half, p.omega_m + half, points)


def evaluate(system: System, quantity: str, omega, row=QuadIndex.Y_a, col=None,
             theta: float = 0.0) -> np.ndarray:
    """One named spectral quantity on a frequency grid (complex for full PSD entries).

    ``internal``/``output``: entry (row, col) of S or S_out (col defaults to row).
    ``contribution``/``contribution_output``: noise of ``col`` reaching ``row``.
    ``homodyne``: rotated optical output quadrature at angle ``theta``.
    """
    es, lm = system.eigen, system.model
    row = QuadIndex.parse(row)
    col = row if col is None else QuadIndex.parse(col)
    if quantity == "internal":
        return psd_internal(es, lm, omega)[..., row, col]
    if quantity == "output":
        return psd_output(es, lm, omega)[..., row, col]
    if quantity == "contribution":
        return np.asarray(contribution("internal", col, row, es, lm, omega), dtype=complex)
    if quantity == "contribution_output":
        return np.asarray(contribution("output", col, row, es, lm, omega), dtype=complex)
    if quantity == "homodyne":
        return np.asarray(homodyne_output(es, lm, omega, theta), dtype=complex)
    raise ValueError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")


def spectrum_table(p: PhysicalParams, quantities: dict, omegas=None) -> SpectrumTable:
    """Tabulate several labelled quantities on one grid.

    ``quantities`` maps a label to keyword arguments of :func:`evaluate`.
    """
    system = prepare(p)
    w = default_grid(p) if omegas is None else np.sort(np.asarray(omegas, dtype=float))
    values = {label: evaluate(system, omega=w, **kw) for label, kw in quantities.items()}
    return SpectrumTable(omegas=w, values=values, params_hash=p.fingerprint())
