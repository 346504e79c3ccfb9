"""Exceptional-point search over the (|mu|, phi) plane.

An exceptional point needs both a vanishing eigenvalue gap and parallel
eigenvectors; an ordinary degeneracy (identical uncoupled resonators) has the
first but not the second and is rejected. In this two-parameter family the
coalescences are isolated points, so grid minima are refined jointly in
|mu| and phi.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidParameterError, NumericalError
from .linmodel import LinearModel, build_linear_model
from .model import TWO_PI, PhysicalParams
from .parallel import ordered_map
from .spectra import eigensystem
from .steady_state import solve_mean_fields

GAP_THRESHOLD = 1e-3
OVERLAP_THRESHOLD = 0.99
DEFAULT_MU_RANGE = (10.0, 60.0)
DEFAULT_GRID = (201, 73)


@dataclass(frozen=True)
class EPReport:
    mu_abs: float
    mu_over_gamma_sum: float
    phi: float
    gap: float
    vec_overlap: float
    cond_u: float

    def as_dict(self) -> dict:
        return asdict(self)


def coalescence_metric(lm) -> tuple[float, float, float]:
    """(gap, vec_overlap, cond_u) over the eigenvalues with positive imaginary part.

    ``gap`` is the smallest pairwise eigenvalue distance in that branch and
    ``vec_overlap`` the modulus of the inner product of the corresponding
    unit eigenvectors.
    """
    es = eigensystem(lm)
    upper = [k for k in range(len(es.lambdas)) if es.lambdas[k].imag > 0.0]
    best = (math.inf, 0.0)
    for i, k in enumerate(upper):
        for l in upper[i + 1:]:
            gap = abs(es.lambdas[k] - es.lambdas[l])
            if gap < best[0]:
                vk, vl = es.u[:, k], es.u[:, l]
                overlap = abs(np.vdot(vk, vl)) / (np.linalg.norm(vk) * np.linalg.norm(vl))
                best = (gap, float(overlap))
    return float(best[0]), best[1], es.cond


def metric_at(p: PhysicalParams, mu_abs: float, phi: float) -> tuple[float, float, float]:
    """Coalescence metric with the steady state rebuilt at (|mu|, phi)."""
    q = p.replace(mu_abs=float(mu_abs), phi_loop=float(phi))
    lm: LinearModel = build_linear_model(q, solve_mean_fields(q))
    return coalescence_metric(lm)


def _gap_row(args) -> np.ndarray:
    p, mus, phi = args
    row = np.empty(len(mus))
    for j, mu in enumerate(mus):
        try:
            row[j] = metric_at(p, mu, phi)[0]
        except NumericalError:
            row[j] = math.inf
    return row


def gap_map(p: PhysicalParams, mus: np.ndarray, phis: np.ndarray, jobs: int | None = 1) -> np.ndarray:
    """Eigenvalue gap on the grid, shape (len(phis), len(mus)); failed points are inf."""
    tasks = [(p, np.asarray(mus, float), float(phi)) for phi in phis]
    return np.vstack(ordered_map(_gap_row, tasks, jobs))


def _local_minima(gap: np.ndarray) -> list[tuple[int, int]]:
    """Grid indices (phi, mu) no larger than their 8 neighbours; periodic in phi."""
    n_phi, n_mu = gap.shape
    found = []
    for i in range(n_phi):
        for j in range(n_mu):
            v = gap[i, j]
            if not math.isfinite(v):
                continue
            ok = True
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if (di or dj) and 0 <= j + dj < n_mu and gap[(i + di) % n_phi, j + dj] < v:
                        ok = False
            if ok:
                found.append((i, j))
    return found


def _refine(p: PhysicalParams, mu0: float, phi0: float, scale: float, d_mu: float, d_phi: float):
    def objective(x):
        mu = x[0] * scale
        if mu <= 0.0:
            return math.inf
        try:
            return metric_at(p, mu, x[1])[0] / scale
        except NumericalError:
            return math.inf

    x0 = np.array([mu0 / scale, phi0])
    simplex = np.array([x0, x0 + [d_mu / scale, 0.0], x0 + [0.0, d_phi]])
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-12,
                            "maxiter": 4000, "maxfev": 8000})
    return float(res.x[0] * scale), float(math.fmod(res.x[1], TWO_PI) % TWO_PI)


def scan_eps(p: PhysicalParams, mu_range=None, phi_range=(0.0, TWO_PI), grid=DEFAULT_GRID,
             gap_threshold: float = GAP_THRESHOLD, overlap_threshold: float = OVERLAP_THRESHOLD,
             jobs: int | None = 1) -> list[EPReport]:
    """Locate exceptional points of the drift matrix.

    ``mu_range`` is in units of gamma1 + gamma2 (default 10 to 60) and
    ``grid`` is (mu points, phi points). The phi axis excludes its right end
    so that a full period is sampled once. Grid minima of the gap are refined
    by a deterministic Nelder-Mead search in (|mu|, phi) and kept when the
    refined gap is below ``gap_threshold * (gamma1 + gamma2)``, the overlap
    exceeds ``overlap_threshold`` and |mu| stays inside the range. Reports
    are sorted by |mu|, then phi.
    """
    lo, hi = DEFAULT_MU_RANGE if mu_range is None else mu_range
    if not (0.0 < lo < hi) or not math.isfinite(hi):
        raise InvalidParameterError("mu_range must satisfy 0 < min < max")
    if not phi_range[1] > phi_range[0]:
        raise InvalidParameterError("phi_range must be increasing")
    n_mu, n_phi = grid
    if n_mu < 3 or n_phi < 3:
        raise InvalidParameterError("grid needs at least 3 points per axis")
    scale = p.gamma_sum
    mus = np.linspace(lo, hi, n_mu) * scale
    periodic = math.isclose(phi_range[1] - phi_range[0], TWO_PI)
    phis = np.linspace(phi_range[0], phi_range[1], n_phi, endpoint=not periodic)
    gap = gap_map(p, mus, phis, jobs=jobs)
    if not periodic:
        # treat the phi axis as open by padding with +inf rows
        gap = np.vstack([np.full(n_mu, math.inf), gap, np.full(n_mu, math.inf)])
        phis = np.concatenate([[math.nan], phis, [math.nan]])

    d_mu = mus[1] - mus[0]
    d_phi = abs(phis[2] - phis[1]) if not periodic else phis[1] - phis[0]
    reports: list[EPReport] = []
    for i, j in _local_minima(gap):
        mu, phi = _refine(p, mus[j], phis[i], scale, d_mu, d_phi)
        if not (lo * scale <= mu <= hi * scale):
            continue
        g, ov, cond = metric_at(p, mu, phi)
        if g >= gap_threshold * scale or ov <= overlap_threshold:
            continue
        dup = any(abs(r.mu_abs - mu) <= 1e-6 * mu
                  and abs(math.remainder(r.phi - phi, TWO_PI)) <= 1e-5 for r in reports)
        if not dup:
            reports.append(EPReport(mu, mu / scale, phi, g, ov, cond))
    reports.sort(key=lambda r: (r.mu_abs, r.phi))
    return reports


def cluster_magnitudes(reports, rel_width: float = 0.05) -> list[float]:
    """Mean |mu| of each group of reports whose magnitudes agree within ``rel_width``."""
    clusters: list[list[float]] = []
    for r in sorted(reports, key=lambda r: r.mu_abs):
        if clusters and r.mu_abs <= clusters[-1][0] * (1.0 + rel_width):
            clusters[-1].append(r.mu_abs)
        else:
            clusters.append([r.mu_abs])
    return [float(np.mean(c)) for c in clusters]


_SCAN_CACHE: dict[PhysicalParams, tuple[EPReport, ...]] = {}


def default_scan(p: PhysicalParams, jobs: int | None = 1) -> tuple[EPReport, ...]:
    """Default-grid scan of ``p``, cached per parameter set.

    Only |mu| and phi are varied by the scan, so those two entries are
    normalised away before the lookup.
    """
    base = p.replace(mu_abs=p.gamma_sum, phi_loop=0.0)
    if base not in _SCAN_CACHE:
        _SCAN_CACHE[base] = tuple(scan_eps(base, jobs=jobs))
    return _SCAN_CACHE[base]


def resolve_ep_magnitudes(p: PhysicalParams, jobs: int | None = 1) -> tuple[float, float]:
    """(mu_EP1, mu_EP2) in rad/s: the two smallest EP magnitude clusters of the default scan."""
    mags = cluster_magnitudes(default_scan(p, jobs=jobs))
    if len(mags) < 2:
        raise NumericalError(f"expected two exceptional-point clusters, found {len(mags)}")
    return mags[0], mags[1]
