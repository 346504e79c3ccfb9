"""Independent reference computations used only by the test suite.

Each oracle re-derives its result by a different route from the package:
Newton iteration on the raw stationarity equations, characteristic
polynomial roots via Faddeev-LeVerrier and a companion matrix, dense LU
inverses, scipy's QUADPACK, and a Monte-Carlo simulation of the classical
Langevin process. Running this file rewrites ``frozen_oracles.json``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import scipy.integrate
import scipy.linalg

FROZEN_PATH = Path(__file__).with_name("frozen_oracles.json")

HBAR = 1.054571817e-34
C_LIGHT = 299792458.0


# --------------------------------------------------------------------------
# steady state


def newton_mean_fields(p, tol: float = 1e-13, max_iter: int = 100):
    """Mean fields by Newton's method on the real and imaginary parts of the
    three stationarity equations, with Delta_a substituted from its definition.

    Starts from the bare-cavity amplitude with zero mechanical displacement and
    uses a central-difference Jacobian.
    """
    w = C_LIGHT / p.lambda_laser if p.carrier == "cyclic" else 2.0 * math.pi * C_LIGHT / p.lambda_laser
    drive = math.sqrt(p.eta * p.kappa) * math.sqrt(2.0 * p.power / (HBAR * w))
    mu = p.mu_abs * complex(math.cos(p.phi_loop), math.sin(p.phi_loop))

    def unpack(x):
        return complex(x[0], x[1]), complex(x[2], x[3]), complex(x[4], x[5])

    def scaled(x):
        a, b1, b2 = unpack(x * scale)
        d_a = p.delta - 2.0 * (p.g1 * b1.conjugate() + p.g2.conjugate() * b2).real
        n = abs(a) ** 2
        ea = (complex(0.5 * p.kappa, d_a) * a - drive) / drive
        e1 = (complex(0.5 * p.gamma1, p.omega_m) * b1 - 1j * mu * b2 - 1j * p.g1 * n) / (p.omega_m * abs(x0b))
        e2 = (complex(0.5 * p.gamma2, p.omega_m) * b2 - 1j * mu.conjugate() * b1 - 1j * p.g2 * n) / (
            p.omega_m * abs(x0b))
        return np.array([ea.real, ea.imag, e1.real, e1.imag, e2.real, e2.imag])

    a0 = drive / complex(0.5 * p.kappa, p.delta)
    x0b = abs(p.g1) * abs(a0) ** 2 / p.omega_m + 1e-300
    scale = np.array([abs(a0)] * 2 + [x0b] * 4)
    x = np.array([a0.real, a0.imag, 0.0, 0.0, 0.0, 0.0]) / scale
    for _ in range(max_iter):
        f = scaled(x)
        jac = np.empty((6, 6))
        for k in range(6):
            h = 1e-7 * max(1.0, abs(x[k]))
            e = np.zeros(6)
            e[k] = h
            jac[:, k] = (scaled(x + e) - scaled(x - e)) / (2.0 * h)
        step = np.linalg.solve(jac, -f)
        x = x + step
        if np.max(np.abs(step)) < tol * max(1.0, np.max(np.abs(x))):
            break
    else:
        raise RuntimeError("Newton oracle did not converge")
    a, b1, b2 = unpack(x * scale)
    d_a = p.delta - 2.0 * (p.g1 * b1.conjugate() + p.g2.conjugate() * b2).real
    return a, b1, b2, d_a


# --------------------------------------------------------------------------
# eigenvalues


def characteristic_roots(m: np.ndarray) -> np.ndarray:
    """Roots of det(z I - M) from Faddeev-LeVerrier coefficients and a companion matrix.

    The matrix is scaled to unit norm first so the coefficients stay O(1).
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    s = np.linalg.norm(m, 2)
    a = m / s
    coeffs = [1.0]
    mk = np.zeros_like(a)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ mk) / k)
    companion = np.zeros((n, n))
    companion[0, :] = -np.array(coeffs[1:])
    companion[1:, :-1] = np.eye(n - 1)
    return scipy.linalg.eigvals(companion) * s


def match_roots(x: np.ndarray, y: np.ndarray) -> float:
    """Largest distance under the best greedy pairing of two root sets."""
    y = list(y)
    worst = 0.0
    for z in x:
        k = int(np.argmin([abs(z - w) for w in y]))
        worst = max(worst, abs(z - y.pop(k)))
    return worst


# --------------------------------------------------------------------------
# transfer matrices and PSDs


def transfer_lu(m: np.ndarray, omega: float) -> np.ndarray:
    n = m.shape[0]
    lu = scipy.linalg.lu_factor(1j * omega * np.eye(n) + m)
    return scipy.linalg.lu_solve(lu, np.eye(n, dtype=complex))


def psd_lu(m: np.ndarray, c: np.ndarray, omega: float) -> np.ndarray:
    return 2.0 * math.pi * transfer_lu(m, -omega) @ c @ transfer_lu(m, omega).T


def i_delta_quadpack(m: np.ndarray, d: np.ndarray, c: np.ndarray, a: float, b: float,
                     points=(), i1: int = 3, i2: int = 5) -> float:
    """Integral of |F_2->1 - F_1->2| with scipy.integrate.quad and per-point LU solves."""
    s1 = 2.0 * math.pi * c[i1, i1].real
    s2 = 2.0 * math.pi * c[i2, i2].real

    def integrand(w):
        tp = transfer_lu(m, w) @ d
        return abs(abs(tp[i1, i2]) ** 2 * s2 - abs(tp[i2, i1]) ** 2 * s1)

    pts = sorted(x for x in points if a < x < b)
    edges = [a, *pts, b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = scipy.integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-10, limit=2000)
        total += val
    return total


# --------------------------------------------------------------------------
# stochastic trajectories


def discretise(m: np.ndarray, q: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact one-step map and noise covariance of dR = M R dt + dW, <dW dW^T> = Q dt.

    Van Loan's block-exponential construction.
    """
    n = m.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -m
    block[:n, n:] = q
    block[n:, n:] = m.T
    e = scipy.linalg.expm(block * h)
    phi = e[n:, n:].T
    cov = phi @ e[:n, n:]
    return phi, 0.5 * (cov + cov.T)


def monte_carlo_psd(m: np.ndarray, q: np.ndarray, omegas, h: float, steps: int, batch: int,
                    seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Averaged periodogram of ``batch`` stationary trajectories, scaled like 2 pi T C T^T.

    Returns (mean, standard error of the mean), each shaped (len(omegas), n).
    Trajectories start from the stationary covariance (Lyapunov solution),
    so no burn-in is discarded.
    """
    rng = np.random.default_rng(seed)
    n = m.shape[0]
    phi, cov = discretise(m, q, h)
    stat = scipy.linalg.solve_continuous_lyapunov(m, -q)
    chol_s = np.linalg.cholesky(0.5 * (stat + stat.T))
    chol_w = np.linalg.cholesky(cov)
    omegas = np.asarray(omegas, dtype=float)
    x = rng.standard_normal((batch, n)) @ chol_s.T
    rot = np.exp(1j * omegas * h)
    phase = np.ones(len(omegas), dtype=complex)
    acc = np.zeros((batch, len(omegas), n), dtype=complex)
    for _ in range(steps):
        acc += phase[None, :, None] * x[:, None, :]
        phase *= rot
        x = x @ phi.T + rng.standard_normal((batch, n)) @ chol_w.T
    total_time = steps * h
    periodogram = 2.0 * math.pi * h * h / total_time * np.abs(acc) ** 2
    mean = periodogram.mean(axis=0)
    sem = periodogram.std(axis=0, ddof=1) / math.sqrt(batch)
    return mean, sem


# --------------------------------------------------------------------------
# freezing


def compute_frozen() -> dict:
    from omnoise.linmodel import build_linear_model
    from omnoise.model import paper_defaults
    from omnoise.nonreciprocity import integration_window
    from omnoise.steady_state import solve_mean_fields

    out = {"mean_fields": {}, "eigenvalues_phi_pi_2": None, "i_delta_quadpack": {}}
    base = paper_defaults()
    for label, phi in (("0", 0.0), ("pi_2", 0.5 * math.pi), ("pi", math.pi), ("3pi_2", 1.5 * math.pi)):
        a, b1, b2, d_a = newton_mean_fields(base.replace(phi_loop=phi))
        out["mean_fields"][label] = {"a": [a.real, a.imag], "b1": [b1.real, b1.imag],
                                     "b2": [b2.real, b2.imag], "delta_a": d_a}
    p = base.replace(phi_loop=0.5 * math.pi)
    lm = build_linear_model(p, solve_mean_fields(p))
    roots = characteristic_roots(lm.m)
    roots = sorted(roots, key=lambda z: (np.sign(z.imag), abs(z.imag), z.real))
    out["eigenvalues_phi_pi_2"] = [[z.real, z.imag] for z in roots]
    a, b = integration_window(p)
    peaks = [-z.imag for z in roots]
    for label, phi in (("pi_2", 0.5 * math.pi), ("3pi_2", 1.5 * math.pi)):
        q = base.replace(phi_loop=phi)
        lmq = build_linear_model(q, solve_mean_fields(q))
        out["i_delta_quadpack"][label] = i_delta_quadpack(lmq.m, lmq.d, lmq.c, a, b, peaks)
    return out


def load_frozen() -> dict:
    return json.loads(FROZEN_PATH.read_text())


if __name__ == "__main__":
    FROZEN_PATH.write_text(json.dumps(compute_frozen(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {FROZEN_PATH}")
