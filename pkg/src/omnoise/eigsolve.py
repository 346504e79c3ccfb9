"""Dense eigensolver for small real matrices.

Householder reduction to upper Hessenberg form, Francis double-shift QR for
the eigenvalues (complex pairs come out exactly conjugate), and inverse
iteration on the original matrix for the eigenvectors.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EigenSolverError

_EPS = np.finfo(float).eps


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Orthogonal similarity reduction of a real square matrix to upper Hessenberg form."""
    h = np.array(a, dtype=float, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(alpha, x[0])
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def hessenberg_eigenvalues(h: np.ndarray, max_iter: int = 60) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    Follows the classic ``hqr`` deflation scheme with exceptional shifts after
    10 and 20 stagnant sweeps. Raises :class:`EigenSolverError` if an
    eigenvalue needs more than ``max_iter`` sweeps.
    """
    a = [list(map(float, row)) for row in h]
    n = len(a)
    wr = [0.0] * n
    wi = [0.0] * n
    anorm = sum(abs(a[i][j]) for i in range(n) for j in range(max(i - 1, 0), n))
    nn = n - 1
    t = 0.0
    its = 0
    while nn >= 0:
        # locate a negligible subdiagonal element
        l = nn
        while l >= 1:
            s = abs(a[l - 1][l - 1]) + abs(a[l][l])
            if s == 0.0:
                s = anorm
            if abs(a[l][l - 1]) <= _EPS * s:
                a[l][l - 1] = 0.0
                break
            l -= 1
        x = a[nn][nn]
        if l == nn:
            wr[nn], wi[nn] = x + t, 0.0
            nn -= 1
            its = 0
            continue
        y = a[nn - 1][nn - 1]
        w = a[nn][nn - 1] * a[nn - 1][nn]
        if l == nn - 1:
            p = 0.5 * (y - x)
            q = p * p + w
            z = math.sqrt(abs(q))
            x += t
            if q >= 0.0:
                z = p + math.copysign(z, p)
                wr[nn - 1] = wr[nn] = x + z
                if z != 0.0:
                    wr[nn] = x - w / z
                wi[nn - 1] = wi[nn] = 0.0
            else:
                wr[nn - 1] = wr[nn] = x + p
                wi[nn - 1], wi[nn] = -z, z
            nn -= 2
            its = 0
            continue

        if its == max_iter:
            raise EigenSolverError("QR iteration failed to converge")
        if its in (10, 20):
            t += x
            for i in range(nn + 1):
                a[i][i] -= x
            s = abs(a[nn][nn - 1]) + abs(a[nn - 1][nn - 2])
            x = y = 0.75 * s
            w = -0.4375 * s * s
        its += 1

        m = nn - 2
        while m >= l:
            z = a[m][m]
            r = x - z
            s = y - z
            p = (r * s - w) / a[m + 1][m] + a[m][m + 1]
            q = a[m + 1][m + 1] - z - r - s
            r = a[m + 2][m + 1]
            s = abs(p) + abs(q) + abs(r)
            p /= s
            q /= s
            r /= s
            if m == l:
                break
            u = abs(a[m][m - 1]) * (abs(q) + abs(r))
            v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]))
            if u <= _EPS * v:
                break
            m -= 1
        for i in range(m + 2, nn + 1):
            a[i][i - 2] = 0.0
            if i != m + 2:
                a[i][i - 3] = 0.0

        for k in range(m, nn):
            if k != m:
                p = a[k][k - 1]
                q = a[k + 1][k - 1]
                r = a[k + 2][k - 1] if k != nn - 1 else 0.0
                x = abs(p) + abs(q) + abs(r)
                if x != 0.0:
                    p /= x
                    q /= x
                    r /= x
            s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
            if s == 0.0:
                continue
            if k == m:
                if l != m:
                    a[k][k - 1] = -a[k][k - 1]
            else:
                a[k][k - 1] = -s * x
            p += s
            x = p / s
            y = q / s
            z = r / s
            q /= p
            r /= p
            for j in range(k, nn + 1):
                p = a[k][j] + q * a[k + 1][j]
                if k != nn - 1:
                    p += r * a[k + 2][j]
                    a[k + 2][j] -= p * z
                a[k + 1][j] -= p * y
                a[k][j] -= p * x
            for i in range(l, min(nn, k + 3) + 1):
                p = x * a[i][k] + y * a[i][k + 1]
                if k != nn - 1:
                    p += z * a[i][k + 2]
                    a[i][k + 2] -= p * r
                a[i][k + 1] -= p * q
                a[i][k] -= p
    return np.array(wr) + 1j * np.array(wi)


def eigenvalues(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise EigenSolverError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise EigenSolverError("matrix has non-finite entries")
    return hessenberg_eigenvalues(hessenberg(a))


def _inverse_iteration(a: np.ndarray, lam: complex, known: list[np.ndarray], scale: float) -> np.ndarray:
    n = a.shape[0]
    # tiny shift keeps (A - lam I) numerically invertible at exact eigenvalues
    shift = lam + complex(1.0, 0.5) * 8.0 * _EPS * scale
    shifted = a.astype(complex) - shift * np.eye(n)
    v = np.ones(n, dtype=complex) + 0.1j * np.arange(1, n + 1)
    for _ in range(4):
        for u in known:
            v -= u * np.vdot(u, v)
        try:
            v = np.linalg.solve(shifted, v)
        except np.linalg.LinAlgError:
            shifted = shifted - 8.0 * _EPS * scale * np.eye(n)
            v = np.linalg.solve(shifted, v)
        v /= np.linalg.norm(v)
    for u in known:
        v -= u * np.vdot(u, v)
    v /= np.linalg.norm(v)
    return v


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def eig(a: np.ndarray, cluster_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and unit-norm eigenvectors (columns) of a real square matrix.

    Eigenvectors of conjugate eigenvalues are exact conjugates. Eigenvalues
    closer than ``cluster_tol * ||A||`` are treated as one degenerate cluster
    whose vectors are orthogonalised against each other, so semisimple
    degeneracies yield independent eigenvectors; an exceptional point (a
    defective matrix) still yields (nearly) parallel vectors.
    """
    a = np.asarray(a, dtype=float)
    lam = eigenvalues(a)
    n = a.shape[0]
    scale = max(np.linalg.norm(a, ord=1), 1e-300)
    vecs = np.zeros((n, n), dtype=complex)
    done = [False] * n
    order = sorted(range(n), key=lambda k: (-lam[k].imag, lam[k].real))
    for k in order:
        if done[k]:
            continue
        known = [vecs[:, j] for j in range(n)
                 if done[j] and abs(lam[j] - lam[k]) <= cluster_tol * scale]
        v = _inverse_iteration(a, lam[k], known, scale)
        if known and np.linalg.norm(a @ v - lam[k] * v) > math.sqrt(_EPS) * scale:
            # defective cluster: no independent eigenvector exists
            v = _inverse_iteration(a, lam[k], [], scale)
        v = _fix_phase(v)
        vecs[:, k] = v
        done[k] = True
        if lam[k].imag > 0.0:
            partner = [j for j in range(n) if not done[j] and lam[j] == lam[k].conjugate()]
            if partner:
                vecs[:, partner[0]] = v.conjugate()
                done[partner[0]] = True
    return lam, vecs
