"""Monodromy of a solution around a movable singularity."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from ..errors import LoopBlowUp
from .integrate import continue_along_path
from .paths import Line, PathSpec, circle


@dataclass
class ClosureReport:
    z_inf: complex
    radius: float
    loops: int
    start: tuple                      # (z, y1, y2) on the circle
    endpoints: list                   # state after each loop
    defects: list                     # relative closure defect after each loop
    sheets: int | None                # first loop count returning within tol, None if none
    tol: float
    retries: int = 0
    precision: int | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "z_inf": [self.z_inf.real, self.z_inf.imag],
            "radius": self.radius,
            "loops": self.loops,
            "sheets": self.sheets,
            "closure_defects": [float(d) for d in self.defects],
            "tol": self.tol,
            "retries": self.retries,
            "precision": self.precision,
            "endpoints": [[[complex(v).real, complex(v).imag] for v in e[1:]] for e in self.endpoints],
        }


def closure_defect(a, b):
    """Relative distance between two (y1, y2) states."""
    num = max(abs(a[0] - b[0]), abs(a[1] - b[1]))
    den = max(abs(a[0]), abs(a[1]), 1.0)
    return float(num / den)


def start_on_circle(spec, z_inf, radius, near_state, tol=1e-12, precision=None):
    """Carry a state near z_inf radially onto the circle |z - z_inf| = radius."""
    z, y1, y2 = near_state
    zc = complex(z)
    rel = zc - complex(z_inf)
    theta = cmath.phase(rel) if rel != 0 else 0.0
    target = complex(z_inf) + radius * cmath.exp(1j * theta)
    if abs(target - zc) <= 1e-14 * max(1.0, abs(zc)):
        return (target, y1, y2), theta
    if precision:
        with mpmath.workdps(precision):
            zi = mpmath.mpc(z_inf)
            zm = mpmath.mpc(z)
            tm = zi + radius * mpmath.expj(theta)
        path = PathSpec([Line(zm, tm)])
    else:
        path = PathSpec([Line(zc, target)])
    tr = continue_along_path(spec, (z, y1, y2), path, tol=tol, r_switch=math.inf, precision=precision,
                             clearance=0.0)
    if tr.mp_samples:
        _, zz, a, b = tr.mp_samples[-1]
        return (zz, a, b), theta
    return (complex(tr.z[-1]), complex(tr.y1[-1]), complex(tr.y2[-1])), theta


def monodromy_loop(spec, z_inf, radius, loops, tol=1e-12, near_state=None, precision=None, closure_tol=None,
                   r_blowup=1e8, max_retries=4, orientation=1):
    """Integrate around |z - z_inf| = radius ``loops`` times.

    ``near_state`` is any (z, y1, y2) on the solution close to z_inf (e.g. a
    sample of the approach trace); it is first carried radially onto the
    circle.  A blow-up during a loop raises LoopBlowUp after ``max_retries``
    halvings of the radius.
    """
    if near_state is None:
        raise ValueError("a solution state near z_inf is required")
    closure_tol = closure_tol if closure_tol is not None else 1e3 * tol
    retries = 0
    while True:
        try:
            return _loops(spec, complex(z_inf), radius, loops, tol, near_state, precision, closure_tol,
                          r_blowup, orientation, retries)
        except LoopBlowUp:
            retries += 1
            if retries > max_retries:
                raise
            radius = radius / 2


def _loops(spec, z_inf, radius, loops, tol, near_state, precision, closure_tol, r_blowup, orientation, retries):
    start, theta = start_on_circle(spec, z_inf, radius, near_state, tol, precision)
    if abs(complex(start[1])) >= r_blowup:
        raise LoopBlowUp(f"|y1| already exceeds {r_blowup:g} on the circle of radius {radius:g}")
    state = start
    endpoints, defects = [], []
    sheets = None
    for k in range(1, loops + 1):
        arc = circle(z_inf, radius, theta, 1, orientation)
        tr = continue_along_path(spec, state, PathSpec([arc]), tol=tol, r_switch=r_blowup, precision=precision,
                                 clearance=0.0)
        if tr.status == "blowup":
            raise LoopBlowUp(f"|y1| exceeded {r_blowup:g} on loop {k} at radius {radius:g}")
        if tr.mp_samples:
            _, _, a, b = tr.mp_samples[-1]
            state = (start[0], a, b)
        else:
            state = (start[0], complex(tr.y1[-1]), complex(tr.y2[-1]))
        endpoints.append(state)
        dft = closure_defect((start[1], start[2]), (state[1], state[2]))
        defects.append(dft)
        if sheets is None and dft < closure_tol:
            sheets = k
    return ClosureReport(z_inf, radius, loops, start, endpoints, defects, sheets, closure_tol, retries, precision)


def sheets_from_defects(defects, tol):
    for k, d in enumerate(defects, start=1):
        if d < tol:
            return k
    return None


def defect_power_fit(radii, defects):
    """Slope of log defect against log radius (a power law gives a straight line)."""
    x = np.log(np.asarray(radii, dtype=float))
    y = np.log(np.asarray(defects, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    sol, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    fitted = A @ sol
    return float(sol[0]), float(np.max(np.abs(fitted - y)))
