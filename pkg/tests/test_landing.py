from fractions import Fraction

import numpy as np
import pytest

from hamsing import load_spec, painleve_22
from hamsing.errors import ChartInconsistency, InsufficientSpan
from hamsing.flow import (
    approach_singularity,
    estimate_singularity,
    land_on_singularity,
    local_puiseux_fit,
    make_chart,
)
from hamsing.flow.hunt import chart_samples, class_of_coefficient
from hamsing.flow.puiseux import match_series, series_flow_agreement

from conftest import landed, near_state, spec_path, system


def fit_for(name):
    spec, tr, landing = landed(name)
    ch = make_chart(spec)
    delta, tau, y1, y2 = chart_samples(ch, landing, slice(8, None))
    return spec, local_puiseux_fit(delta, y1, y2, spec.M, spec.N, tau=tau)


class TestApproach:
    def test_estimate_on_exact_pole(self):
        spec, *_ = system("autonomous")
        c = -1 / 3
        z = 0.02 + 0.01j
        assert abs(estimate_singularity(spec, z, c / z, 3 * c * c / z)) < 1e-15

    def test_reaches_switch_radius(self):
        _, tr, _ = landed("p22")
        assert abs(tr.blowup.y1) >= 1e3 * (1 - 1e-9)
        assert tr.stats["legs"] >= 2

    def test_no_singularity_on_short_path(self):
        spec, seed, _ = system("p22")
        tr = approach_singularity(spec, seed, 0.05 + 0.02j)
        assert tr.status == "end"


class TestLanding:
    def test_exact_pole(self):
        _, _, landing = landed("autonomous")
        assert abs(landing.z_inf) < 1e-8

    def test_switch_radius_stability(self):
        _, _, a = landed("p22", 1e3)
        _, _, b = landed("p22", 1e4)
        assert abs(a.z_inf - b.z_inf) < 1e-6

    def test_tolerance_convergence(self):
        spec, tr, landing = landed("p22")
        coarse = land_on_singularity(spec, tr.blowup, tol=1e-9)
        fine = land_on_singularity(spec, tr.blowup, tol=0.5e-9)
        assert abs(coarse.z_inf - fine.z_inf) <= max(abs(coarse.z_inf - landing.z_inf), 1e-12)

    def test_reconstruction_at_switch(self):
        spec, tr, landing = landed("p33")
        ch = make_chart(spec)
        st = landing.chart
        y1, y2 = ch.reconstruct(st.u[0], st.z[0], st.v[0], landing.omega)
        assert abs(y1 - tr.blowup.y1) < 1e-9 * abs(y1)
        assert abs(y2 - tr.blowup.y2) < 1e-9 * abs(y2)

    def test_chart_residue_diagnostics(self):
        for name in ("p22", "p23", "p33"):
            _, _, landing = landed(name)
            assert landing.chart.diagnostics["max_residue"] < 1e-6

    def test_violating_spec_needs_nonstrict_chart(self):
        spec = load_spec(spec_path("violating_2_2.json"))
        ch = make_chart(spec)
        assert ch.nonstrict
        tr = approach_singularity(spec, *system("violating")[1:], tol=1e-12)
        with pytest.raises(ChartInconsistency):
            land_on_singularity(spec, tr.blowup, tol=1e-12, chart=ch, strict=True)
        loose = land_on_singularity(spec, tr.blowup, tol=1e-12, chart=ch, strict=False)
        assert abs(loose.z_inf - tr.blowup.z) < 0.1


class TestPuiseuxFit:
    def test_exact_pole_samples(self):
        c = -1 / 3
        delta = np.geomspace(1e-5, 1e-2, 40) * np.exp(0.3j)
        fit = local_puiseux_fit(delta, c / delta, 3 * c * c / delta, 2, 2)
        assert abs(fit.y1.exponent + 1) < 1e-6 and abs(fit.y2.exponent + 1) < 1e-6
        assert abs(fit.y1.leading**3 + 1 / 27) < 1e-6

    def test_insufficient_span(self):
        delta = np.geomspace(1e-3, 1e-2, 40)
        with pytest.raises(InsufficientSpan):
            local_puiseux_fit(delta, 1 / delta, 1 / delta, 2, 2)
        with pytest.raises(InsufficientSpan):
            local_puiseux_fit(np.geomspace(1e-6, 1e-2, 10), np.ones(10), np.ones(10), 2, 2)

    def test_painleve_leading_coefficient(self):
        spec, fit = fit_for("p22")
        assert abs(fit.y1.leading**3 + 1) < 1e-4
        assert abs(fit.y2.leading - fit.y1.leading**2) < 1e-4
        assert class_of_coefficient(spec, fit.y1.leading)[1] < 1e-4

    def test_branching_exponents(self):
        _, fit = fit_for("p23")
        assert abs(fit.y1.exponent + 0.8) < 1e-3 and abs(fit.y2.exponent + 0.6) < 1e-3
        _, fit = fit_for("p33")
        assert abs(fit.y1.exponent + 0.5) < 1e-3 and abs(fit.y2.exponent + 0.5) < 1e-3
        assert abs(fit.y1.leading**8 + Fraction(1, 16)) < 1e-4

    @pytest.mark.parametrize("name", ["p22", "p23", "p33"])
    def test_exponent_ratio(self, name):
        spec, fit = fit_for(name)
        assert abs(fit.y2.exponent / fit.y1.exponent - (spec.M + 1) / (spec.N + 1)) < 1e-3


class TestSeriesMatch:
    def test_autonomous_match(self):
        spec = painleve_22(beta=0, gamma=0)
        c = 0.5 + 0.8660254037844386j
        from hamsing.series import numeric_series

        ser = numeric_series(spec, 0.3, K=10, root=c, free_params=[0.7])
        state = (0.3 + 0.01j, *ser.evaluate_t((0.01j) ** (1 / 3)))
        fitted, misfit = match_series(spec, 0.3, state, K=10)
        assert misfit < 1e-12
        assert abs(fitted.root - c) < 1e-12

    @pytest.mark.parametrize("name,limit", [("p22", 1e-10), ("p23", 1e-6), ("p33", 1e-4)])
    def test_series_flow_agreement(self, name, limit):
        spec, tr, landing = landed(name)
        dev, _, _ = series_flow_agreement(spec, landing.z_inf, near_state(tr, landing.z_inf, 1e-3), radius=1e-3)
        assert dev < limit
