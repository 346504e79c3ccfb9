import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from omnoise.eplocator import default_scan, resolve_ep_magnitudes  # noqa: E402
from omnoise.model import PhysicalParams, paper_defaults  # noqa: E402


@pytest.fixture
def defaults() -> PhysicalParams:
    return paper_defaults()


@pytest.fixture(scope="session")
def ep_reports():
    """Exceptional points of the default parameters on the default grid (one scan per session)."""
    return default_scan(paper_defaults())


@pytest.fixture(scope="session")
def ep_magnitudes(ep_reports):
    """(mu_EP1, mu_EP2) in rad/s at the default parameters, resolved once per session."""
    return resolve_ep_magnitudes(paper_defaults())


def random_params(rng: np.random.Generator, identical: bool = False) -> PhysicalParams:
    """A random valid parameter set scattered around the defaults (log-uniform factors)."""
    base = paper_defaults()

    def jitter(lo, hi):
        return math.exp(rng.uniform(math.log(lo), math.log(hi)))

    gamma1 = base.gamma1 * jitter(0.2, 5.0)
    gamma2 = gamma1 if identical else base.gamma2 * jitter(0.2, 5.0)
    g1 = base.g1.real * jitter(0.1, 2.0) * complex(math.cos(p1 := rng.uniform(-0.5, 0.5)), math.sin(p1))
    g2 = g1 if identical else base.g2.real * jitter(0.1, 2.0) * complex(
        math.cos(p2 := rng.uniform(-0.5, 0.5)), math.sin(p2))
    n = rng.uniform(0.0, 200.0)
    return base.replace(
        kappa=base.kappa * jitter(0.3, 3.0),
        gamma1=gamma1, gamma2=gamma2, g1=g1, g2=g2,
        mu_abs=(gamma1 + gamma2) * rng.uniform(0.0, 80.0),
        phi_loop=rng.uniform(0.0, 2.0 * math.pi),
        delta=base.omega_m * rng.uniform(0.7, 1.3),
        power=base.power * jitter(0.1, 2.0),
        n_a=rng.uniform(0.0, 1.0),
        n_b1=n, n_b2=n if identical else rng.uniform(0.0, 200.0),
    )


def local_maxima(y: np.ndarray, rel_prominence: float = 1e-3) -> list[int]:
    """Interior local maxima that rise above both neighbouring minima by ``rel_prominence``."""
    y = np.asarray(y, dtype=float)
    idx = [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] >= y[i + 1]]
    keep = []
    for i in idx:
        left = y[:i].min() if i else y[i]
        right = y[i + 1:].min()
        lo = [k for k in idx if k < i]
        hi = [k for k in idx if k > i]
        left = y[lo[-1]:i + 1].min() if lo else left
        right = y[i:hi[0] + 1].min() if hi else right
        if y[i] - max(left, right) > rel_prominence * y[i]:
            keep.append(i)
    return keep


ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {text}")
