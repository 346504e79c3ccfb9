"""Directional noise flow between the two resonators and its integrated asymmetry."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .linmodel import QuadIndex
from .model import PhysicalParams
from .quadrature import integrate
from .spectra import System, prepare, susceptibility_internal, input_psd

DIRECTIONS = ("2->1", "1->2")
DEFAULT_PAIR = ("Y_b1", "Y_b2")


@dataclass(frozen=True)
class NoiseFlow:
    phi: float
    flow_21: float
    flow_12: float
    i_delta: float
    quad_error: float

    def as_dict(self) -> dict:
        return asdict(self)


def _pair(pair) -> tuple[QuadIndex, QuadIndex]:
    return QuadIndex.parse(pair[0]), QuadIndex.parse(pair[1])


def _flows(system: System, omega, pair=DEFAULT_PAIR) -> tuple[np.ndarray, np.ndarray]:
    """(F_2->1, F_1->2) on ``omega`` for the quadrature pair (of b1, of b2)."""
    i1, i2 = _pair(pair)
    tp = susceptibility_internal(system.eigen, system.model, omega)
    s_in = np.diag(input_psd(system.model)).real
    return np.abs(tp[..., i1, i2]) ** 2 * s_in[i2], np.abs(tp[..., i2, i1]) ** 2 * s_in[i1]


def _system(p: PhysicalParams, phi) -> System:
    return prepare(p if phi is None else p.replace(phi_loop=float(phi)))


def flow_spectrum(direction: str, p: PhysicalParams, phi, omega, pair=DEFAULT_PAIR) -> np.ndarray:
    """|T'[to, from](w)|^2 S_in[from, from] for ``direction`` "2->1" or "1->2".

    ``phi=None`` keeps the loop phase stored in ``p``.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    f21, f12 = _flows(_system(p, phi), omega, pair)
    return f21 if direction == "2->1" else f12


def integration_window(p: PhysicalParams) -> tuple[float, float]:
    half = 8.0 * p.mu_abs + 200.0 * max(p.gamma1, p.gamma2)
    return p.omega_m - half, p.omega_m + half


def nonreciprocity_measure(p: PhysicalParams, phi=None, tol: float = 1e-8, pair=DEFAULT_PAIR,
                           window_scale: float = 1.0) -> NoiseFlow:
    """Integrated flows and I_delta = integral |F_2->1 - F_1->2| dw over the resonance band.

    The window is omega_m +- (8 |mu| + 200 max(gamma)), multiplied by
    ``window_scale``. Each flow is integrated to relative accuracy ``tol``;
    I_delta is integrated to ``tol`` relative to itself or to the total
    flow, whichever is looser, so reciprocal points (I_delta near 0)
    terminate. Non-convergence raises :class:`QuadratureError`.
    """
    system = _system(p, phi)
    q = system.params
    a, b = integration_window(q)
    if window_scale != 1.0:
        centre, half = q.omega_m, 0.5 * (b - a) * window_scale
        a, b = centre - half, centre + half
    peaks = [-lam.imag for lam in system.eigen.lambdas if a < -lam.imag < b]

    flow_21, _ = integrate(lambda w: _flows(system, w, pair)[0], a, b, rel_tol=tol, breakpoints=peaks)
    flow_12, _ = integrate(lambda w: _flows(system, w, pair)[1], a, b, rel_tol=tol, breakpoints=peaks)

    def diff(w):
        f21, f12 = _flows(system, w, pair)
        return np.abs(f21 - f12)

    i_delta, err = integrate(diff, a, b, rel_tol=tol, abs_tol=tol * (flow_21 + flow_12),
                             breakpoints=peaks)
    return NoiseFlow(phi=q.phi_loop, flow_21=flow_21, flow_12=flow_12,
                     i_delta=max(i_delta, 0.0), quad_error=err)


def _relative_deviation(x: np.ndarray, y: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(x))), float(np.max(np.abs(y))), 1e-300)
    return float(np.max(np.abs(x - y)) / scale)


def counterpart_check(p: PhysicalParams, phi=None, omegas=None, pair=DEFAULT_PAIR) -> float:
    """Max deviation between F_1->2(phi, w) and F_2->1(phi + pi, w), relative to their peak.

    Measures the shifted-phase counterpart relation on ``omegas`` (default 51
    points across the integration window); the value is reported, not judged.
    """
    phi = p.phi_loop if phi is None else float(phi)
    w = np.linspace(*integration_window(p), 51) if omegas is None else np.asarray(omegas, float)
    f12 = flow_spectrum("1->2", p, phi, w, pair)
    f21_shift = flow_spectrum("2->1", p, phi + math.pi, w, pair)
    return _relative_deviation(f12, f21_shift)


def swap_check(p: PhysicalParams, phi=None, omegas=None, pair=DEFAULT_PAIR) -> float:
    """Max relative deviation of F_1->2(phi) from F_2->1(-phi) for the swapped resonators.

    Exact (to rounding) whenever the loop is reversed together with the
    resonator labels.
    """
    phi = p.phi_loop if phi is None else float(phi)
    w = np.linspace(*integration_window(p), 51) if omegas is None else np.asarray(omegas, float)
    f12 = flow_spectrum("1->2", p, phi, w, pair)
    f21_mirror = flow_spectrum("2->1", p.replace(phi_loop=phi).swapped(), None, w, pair)
    return _relative_deviation(f12, f21_mirror)
