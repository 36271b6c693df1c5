import json

import numpy as np
import pytest

from hamsing.errors import LoopBlowUp
from hamsing.flow import approach_singularity
from hamsing.flow.hunt import _default_radius, analyse_blowup
from hamsing.flow.monodromy import (
    closure_defect,
    defect_power_fit,
    monodromy_loop,
    sheets_from_defects,
)
from hamsing.model import structural_constants

from conftest import landed, near_state, system


def loop_report(name, loops, precision=None, closure_tol=1e-6):
    spec, tr, landing = landed(name)
    r = _default_radius(tr, landing.z_inf)
    tol = 1e-12 if precision is None else 10.0 ** (-precision + 2)
    return monodromy_loop(spec, landing.z_inf, r, loops, tol=tol, near_state=near_state(tr, landing.z_inf, r),
                          precision=precision, closure_tol=closure_tol)


def test_closure_defect_is_relative():
    assert closure_defect((1e6, 0), (1e6 + 1, 0)) == pytest.approx(1e-6)
    assert closure_defect((0.1, 0.2), (0.1, 0.3)) == pytest.approx(0.1)


def test_sheets_from_defects():
    assert sheets_from_defects([0.5, 0.3, 1e-9], 1e-6) == 3
    assert sheets_from_defects([0.5, 0.3], 1e-6) is None


class TestSheets:
    def test_pole_closes_after_one_loop(self):
        rep = loop_report("p22", 2)
        assert rep.sheets == 1
        assert rep.defects[0] < 1e-6

    def test_square_root_branch(self):
        rep = loop_report("p33", 3, precision=30)
        assert rep.defects[0] > 0.1
        assert rep.defects[1] < 1e-5
        assert rep.sheets == 2
        # the third loop is back on the first sheet's image
        assert abs(rep.defects[2] - rep.defects[0]) < 1e-6

    def test_fifth_root_branch(self):
        rep = loop_report("p23", 6)
        assert all(d > 0.1 for d in rep.defects[:4])
        assert rep.sheets == 5

    @pytest.mark.parametrize("name", ["p22", "p23", "p33"])
    def test_sheets_law(self, name):
        spec = landed(name)[0]
        sc = structural_constants(spec.M, spec.N)
        rep = loop_report(name, sc.R // sc.d + 1, precision=30 if name == "p33" else None)
        assert rep.sheets == sc.R // sc.d


@pytest.fixture(scope="module")
def blowup():
    spec, seed, target = system("violating")
    tr = approach_singularity(spec, seed, target, tol=1e-12)
    ev, _ = analyse_blowup(spec, tr, loops=1)
    return spec, tr, ev


class TestViolatingSpec:
    def test_no_return(self, blowup):
        _, _, ev = blowup
        assert ev.chart_mode == "nonstrict"
        assert ev.sheets is None
        assert ev.closure_defects[0] > 1e-6

    def test_defect_shrinks_as_a_power_of_radius(self, blowup):
        spec, tr, ev = blowup
        radii = 0.05 / 2.0 ** np.arange(5)
        defects = []
        for r in radii:
            rep = monodromy_loop(spec, ev.z_inf, r, 1, near_state=near_state(tr, ev.z_inf, r))
            defects.append(rep.defects[0])
        assert all(d > 1e-9 for d in defects)
        slope, misfit = defect_power_fit(radii, defects)
        assert abs(slope - 3) < 0.1 and misfit < 0.05


class TestLoopControl:
    def test_blowup_on_loop_halves_radius(self):
        spec, tr, landing = landed("p22")
        # a circle of radius 1 grazes a neighbouring pole
        rep = monodromy_loop(spec, landing.z_inf, 1.0, 1, near_state=near_state(tr, landing.z_inf, 1.0),
                             r_blowup=100)
        assert rep.retries == 1 and rep.radius == pytest.approx(0.5)
        assert rep.sheets == 1

    def test_gives_up_after_retries(self):
        spec, tr, landing = landed("p22")
        with pytest.raises(LoopBlowUp):
            monodromy_loop(spec, landing.z_inf, 0.05, 1, near_state=near_state(tr, landing.z_inf, 0.05),
                           r_blowup=1.0, max_retries=2)

    def test_needs_a_state(self):
        spec, _, landing = landed("p22")
        with pytest.raises(ValueError):
            monodromy_loop(spec, landing.z_inf, 0.05, 1)

    def test_report_json(self):
        rep = loop_report("p22", 1)
        js = json.loads(json.dumps(rep.to_json()))
        assert js["sheets"] == 1 and len(js["closure_defects"]) == 1
        assert len(js["endpoints"]) == 1 and len(js["endpoints"][0]) == 2
