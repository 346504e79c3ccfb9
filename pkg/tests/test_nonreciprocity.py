import math

import numpy as np
import pytest

from conftest import random_params
from oracles import load_frozen
from omnoise import nonreciprocity as nr
from omnoise.model import paper_defaults

PI_2 = 0.5 * math.pi


@pytest.fixture(scope="module")
def flow_pi_2():
    return nr.nonreciprocity_measure(paper_defaults(), phi=PI_2)


def test_no_path_no_flow():
    p = paper_defaults().replace(g1=0j, g2=0j, mu_abs=0.0)
    w = np.linspace(*nr.integration_window(paper_defaults()), 101)
    scale = np.max(nr.flow_spectrum("2->1", paper_defaults(), PI_2, w))
    for direction in nr.DIRECTIONS:
        assert np.max(nr.flow_spectrum(direction, p, 0.3, w)) <= 1e-20 * scale


def test_dominant_direction_near_resonance():
    p = paper_defaults()
    w = p.omega_m * np.linspace(0.999, 1.001, 5)
    assert np.all(nr.flow_spectrum("2->1", p, PI_2, w) > nr.flow_spectrum("1->2", p, PI_2, w))


def test_flow_spectrum_direction_validated():
    with pytest.raises(ValueError):
        nr.flow_spectrum("1<-2", paper_defaults(), 0.0, 1.0)


def test_swap_relation_identical_resonators():
    p = paper_defaults()
    for phi in (0.3, PI_2, 2.0, 4.4):
        w = np.linspace(*nr.integration_window(p), 51)
        f12 = nr.flow_spectrum("1->2", p, phi, w)
        f21 = nr.flow_spectrum("2->1", p, -phi, w)
        assert np.max(np.abs(f12 - f21)) <= 1e-9 * np.max(f12)


def test_swap_check_random_parameters():
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = random_params(rng)
        assert nr.swap_check(p) <= 1e-9


def test_counterpart_check_reported(flow_pi_2):
    # the shifted-phase relation is measured, not assumed; here it does not hold
    p = paper_defaults()
    w = np.linspace(*nr.integration_window(p), 51)
    f12 = nr.flow_spectrum("1->2", p, 0.0, w)
    f21 = nr.flow_spectrum("2->1", p, math.pi, w)
    expected = np.max(np.abs(f12 - f21)) / max(np.max(f12), np.max(f21))
    assert nr.counterpart_check(p, 0.0) == pytest.approx(expected, rel=1e-12)
    for phi in (0.0, PI_2):
        assert 0.0 <= nr.counterpart_check(p, phi) <= 1.0


def test_reciprocal_phases(flow_pi_2):
    for phi in (0.0, math.pi):
        f = nr.nonreciprocity_measure(paper_defaults(), phi=phi)
        assert f.i_delta < 1e-6 * flow_pi_2.i_delta
        assert f.flow_21 == pytest.approx(f.flow_12, rel=1e-6)


def test_dominance_flips(flow_pi_2):
    f = nr.nonreciprocity_measure(paper_defaults(), phi=1.5 * math.pi)
    assert flow_pi_2.flow_21 > flow_pi_2.flow_12
    assert f.flow_12 > f.flow_21
    assert f.i_delta == pytest.approx(flow_pi_2.i_delta, rel=1e-8)


def test_absolute_difference_symmetry(flow_pi_2):
    p = paper_defaults()
    swapped = nr.nonreciprocity_measure(p, phi=PI_2, pair=tuple(reversed(nr.DEFAULT_PAIR)))
    assert swapped.i_delta == pytest.approx(flow_pi_2.i_delta, rel=1e-12)
    assert swapped.flow_21 == pytest.approx(flow_pi_2.flow_12, rel=1e-12)


def test_matches_quadpack_oracle(flow_pi_2):
    frozen = load_frozen()["i_delta_quadpack"]
    assert flow_pi_2.i_delta == pytest.approx(frozen["pi_2"], rel=1e-7)
    f = nr.nonreciprocity_measure(paper_defaults(), phi=1.5 * math.pi)
    assert f.i_delta == pytest.approx(frozen["3pi_2"], rel=1e-7)


def test_invariants(flow_pi_2):
    assert flow_pi_2.flow_21 >= 0 and flow_pi_2.flow_12 >= 0 and flow_pi_2.i_delta >= 0
    assert flow_pi_2.quad_error < 1e-8 * flow_pi_2.i_delta
    assert flow_pi_2.phi == PI_2
    assert set(flow_pi_2.as_dict()) == {"phi", "flow_21", "flow_12", "i_delta", "quad_error"}


def test_halving_tolerance(flow_pi_2):
    tol = 1e-8
    f = nr.nonreciprocity_measure(paper_defaults(), phi=PI_2, tol=0.5 * tol)
    assert abs(f.i_delta - flow_pi_2.i_delta) < 10 * tol * flow_pi_2.i_delta


@pytest.mark.xfail(strict=True, reason="the cross susceptibility decays algebraically (1/w^4), so the part "
                   "beyond the window is ~1e-5 of I_delta, far above 10*tol")
def test_doubling_window(flow_pi_2):
    f = nr.nonreciprocity_measure(paper_defaults(), phi=PI_2, window_scale=2.0)
    assert abs(f.i_delta - flow_pi_2.i_delta) < 10 * 1e-8 * flow_pi_2.i_delta


def test_doubling_window_small_change(flow_pi_2):
    f = nr.nonreciprocity_measure(paper_defaults(), phi=PI_2, window_scale=2.0)
    assert abs(f.i_delta - flow_pi_2.i_delta) < 1e-4 * flow_pi_2.i_delta


def test_smaller_coupling_more_nonreciprocal(ep_magnitudes):
    mu1, mu2 = ep_magnitudes
    low = nr.nonreciprocity_measure(paper_defaults(mu_abs=0.5 * mu1), phi=PI_2)
    high = nr.nonreciprocity_measure(paper_defaults(mu_abs=mu2), phi=PI_2)
    assert low.i_delta > high.i_delta
