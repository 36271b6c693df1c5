import numpy as np
import pytest

from hamsing import autonomous_22
from hamsing.auxw import solve_betas
from hamsing.errors import GammaNonzero, ZeroCrossing
from hamsing.flow import continue_along_path, line_path
from hamsing.flow.approach import estimate_singularity
from hamsing.flow.integrate import ContinuationTrace, hamiltonian_along
from hamsing.flow.wtrace import summarize, w_approach, w_series_agreement, w_trace

from conftest import system


@pytest.fixture(scope="module")
def painleve_approach():
    spec, seed, target = system("p22")
    aux = solve_betas(spec)
    tr, summary, window = w_approach(spec, aux, seed, target)
    return spec, aux, tr, summary, window


def test_autonomous_W_is_the_hamiltonian():
    spec = autonomous_22()
    tol = 1e-11
    tr = continue_along_path(spec, (0j, 0.4 + 0.1j, -0.3 + 0.2j), line_path(0, 0.6 + 0.8j), tol=tol)
    summary = w_trace(spec, solve_betas(spec), tr)
    H = hamiltonian_along(spec, tr)
    assert np.max(np.abs(summary.values - H)) < 1e-12
    assert np.max(np.abs(summary.values - summary.values[0])) <= 10 * tol


class TestBoundedness:
    def test_bounded_on_painleve_approach(self, painleve_approach):
        _, _, tr, summary, window = painleve_approach
        assert window.sum() > 20
        assert np.abs(tr.y1[window]).max() >= 1e6 * (1 - 1e-9)
        assert summary.abs_max <= 10 * abs(summary.values[0])
        assert not summary.monotone_growth

    def test_bounded_on_branching_approach(self):
        spec, seed, target = system("p23")
        _, summary, _ = w_approach(spec, solve_betas(spec), seed, target)
        assert summary.abs_max <= 10 * abs(summary.values[0])

    def test_agrees_with_series(self, painleve_approach):
        spec, aux, tr, _, window = painleve_approach
        _, zl, a, b = tr.mp_samples[-1]
        z_inf = complex(estimate_singularity(spec, zl, a, b, 40))
        dev, w0, misfit = w_series_agreement(spec, aux, tr, z_inf, window=window)
        assert dev < 1e-4
        assert misfit < 1e-10
        assert abs(w0 - tr.W[-1]) < 1e-4 * abs(w0)


class TestViolatingSpec:
    def test_betas_refuse(self):
        spec, _, _ = system("violating")
        with pytest.raises(GammaNonzero):
            solve_betas(spec)

    def test_logarithmic_growth(self):
        spec, seed, target = system("violating")
        aux = solve_betas(spec, strict=False)
        _, summary, _ = w_approach(spec, aux, seed, target)
        assert summary.monotone_growth
        # |W| grows linearly in log(1 / |z - z_inf|)
        assert summary.growth_slope > 0.5


def test_zero_crossing():
    spec = autonomous_22()
    z = np.array([0, 0.1, 0.2], dtype=complex)
    tr = ContinuationTrace(np.real(z), z, np.array([1, 0, 1], dtype=complex), np.ones(3, dtype=complex), np.zeros(3))
    with pytest.raises(ZeroCrossing):
        w_trace(spec, solve_betas(spec), tr)


def test_summary_flags_growth_only_when_rising():
    z = 1e-1 * np.geomspace(1, 1e-5, 40).astype(complex)
    tr = ContinuationTrace(np.arange(40.0), z, np.ones(40, dtype=complex), np.ones(40, dtype=complex), np.zeros(40))
    logs = np.log(1 / np.abs(z))
    assert summarize(logs.astype(complex), tr, 0j).monotone_growth
    assert not summarize(np.full(40, 3 + 0j), tr, 0j).monotone_growth
    flat = summarize(np.full(40, 3 + 0j), tr, 0j)
    assert abs(flat.growth_slope) < 1e-12
    assert flat.to_json()["abs_max"] == 3
