import math
import random

import pytest

from hamsing.flow.hunt import SingularityEvent, dedupe_events, hunt_singularities, ray_exit

from conftest import PAINLEVE_SEED, system


@pytest.fixture(scope="module")
def painleve_hunt():
    spec, _, _ = system("p22")
    return hunt_singularities(spec, PAINLEVE_SEED, (0j, 1.0), rays=16)


def event(z, angle=0.0):
    return SingularityEvent(complex(z), 0, 1, {}, 0.0, [], ray_angle=angle)


def test_ray_exit():
    assert ray_exit(0j, 0j, 2.0, 0.7) == pytest.approx(2.0)
    assert ray_exit(0.5 + 0j, 0j, 1.0, 0.0) == pytest.approx(0.5)
    assert ray_exit(0.5 + 0j, 0j, 1.0, math.pi) == pytest.approx(1.5)
    assert ray_exit(3 + 0j, 0j, 1.0, math.pi / 2) == 0.0


def test_autonomous_pole_recovered_exactly():
    spec, seed, _ = system("autonomous")
    events, outcomes = hunt_singularities(spec, seed, (1 + 0j, 1.5), rays=16)
    assert len(events) == 1
    (ev,) = events
    assert abs(ev.z_inf) < 1e-8
    assert ev.sheets == 1
    assert abs(complex(*ev.leading["C1_power_R"]) + 1 / 27) < 1e-6
    assert sum(o.status == "event" for o in outcomes) >= 1


class TestPainleveDisc:
    def test_every_event_is_a_pole(self, painleve_hunt):
        events, _ = painleve_hunt
        assert events
        for ev in events:
            assert abs(ev.z_inf) <= 1.0
            assert ev.sheets == 1
            assert ev.closure_defects[0] < 1e-6
            assert abs(complex(*ev.leading["C1_power_R"]) + 1) < 1e-4

    def test_branch_classes_are_valid(self, painleve_hunt):
        events, _ = painleve_hunt
        assert {ev.branch_class for ev in events} <= {0, 1, 2}

    def test_exponent_ratio(self, painleve_hunt):
        for ev in painleve_hunt[0]:
            e1, e2 = ev.leading["exponents"]
            assert abs(e2 / e1 - 1) < 1e-3

    def test_outcomes_cover_all_rays(self, painleve_hunt):
        _, outcomes = painleve_hunt
        assert len(outcomes) == 16
        assert all(o.status in ("end", "event") for o in outcomes)

    def test_event_json(self, painleve_hunt):
        js = painleve_hunt[0][0].to_json()
        assert set(js) == {"z_inf", "branch_class", "sheets", "leading", "fit_residual", "closure_defects"}


def test_small_region_is_empty():
    spec, _, _ = system("p22")
    events, outcomes = hunt_singularities(spec, PAINLEVE_SEED, (0j, 0.1), rays=16)
    assert events == []
    assert all(o.status == "end" for o in outcomes)


def test_seed_outside_region():
    spec, _, _ = system("p22")
    with pytest.raises(ValueError):
        hunt_singularities(spec, PAINLEVE_SEED, (3 + 0j, 1.0))


def test_parallel_matches_serial(painleve_hunt):
    spec, _, _ = system("p22")
    events, _ = hunt_singularities(spec, PAINLEVE_SEED, (0j, 1.0), rays=16, workers=2)
    assert [e.z_inf for e in events] == [e.z_inf for e in painleve_hunt[0]]


class TestDedupe:
    def test_merges_close_events(self):
        evs = [event(0.5), event(0.5 + 1e-9, 1.0), event(-0.5, 2.0)]
        kept = dedupe_events(evs, 1e-6)
        assert [e.z_inf for e in kept] == [-0.5, 0.5]
        assert kept[1].ray_angle == 0.0

    def test_order_independent(self):
        evs = [event(complex(k % 3, k % 2) + 1e-10 * k, 0.1 * k) for k in range(12)]
        ref = [(e.z_inf, e.ray_angle) for e in dedupe_events(evs)]
        rng = random.Random(7)
        for _ in range(5):
            rng.shuffle(evs)
            assert [(e.z_inf, e.ray_angle) for e in dedupe_events(evs)] == ref
