import functools
from pathlib import Path

import pytest

from hamsing import autonomous_22, branching_23, branching_33, load_spec
from hamsing.flow import approach_singularity, land_on_singularity
from hamsing.flow.hunt import _nearest_sample

SPECS = Path(__file__).resolve().parents[1] / "specs"

# seeds and approach directions that reach a singularity within a few legs
PAINLEVE_SEED = (0j, 2.5 + 0.2j, -1.3 + 1.1j)
BRANCH_SEED = (0j, 1.1 + 0.3j, -0.7 + 0.4j)


def spec_path(name):
    return str(SPECS / name)


@functools.lru_cache(maxsize=None)
def system(name):
    if name == "p22":
        return load_spec(spec_path("generic_2_2.json")), PAINLEVE_SEED, 2 + 1j
    if name == "p33":
        return branching_33(), BRANCH_SEED, 6 + 0j
    if name == "p23":
        return branching_23(), BRANCH_SEED, 6 + 0j
    if name == "violating":
        return load_spec(spec_path("violating_2_2.json")), PAINLEVE_SEED, 3 + 0j
    if name == "autonomous":
        c = -1 / 3
        return autonomous_22(), (1.0 + 0j, c, 3 * c * c), -1.0 + 0.01j
    raise KeyError(name)


@functools.lru_cache(maxsize=None)
def landed(name, r_switch=1e3, strict=True):
    """(spec, approach trace, landing) for one of the reference systems."""
    spec, seed, target = system(name)
    tr = approach_singularity(spec, seed, target, tol=1e-12, r_switch=r_switch)
    assert tr.status == "blowup"
    landing = land_on_singularity(spec, tr.blowup, tol=1e-12, strict=strict)
    return spec, tr, landing


def near_state(trace, z_inf, radius):
    return _nearest_sample(trace, z_inf, radius)


@pytest.fixture
def specs_dir():
    return SPECS
