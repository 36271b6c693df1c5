"""Batch search for movable singularities along rays from a seed point."""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ChartInconsistency, GammaNonzero, HamsingError, InsufficientSpan, LoopBlowUp
from ..model import structural_constants
from ..series import all_leading_roots, branch_class_of
from .approach import approach_singularity
from .chart import Chart, land_on_singularity
from .integrate import DEFAULT_R_SWITCH
from .monodromy import monodromy_loop
from .puiseux import local_puiseux_fit


@dataclass
class SingularityEvent:
    z_inf: complex
    branch_class: int | None
    sheets: int | None
    leading: dict
    fit_residual: float
    closure_defects: list
    chart_mode: str = "strict"
    ray_angle: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "z_inf": [self.z_inf.real, self.z_inf.imag],
            "branch_class": self.branch_class,
            "sheets": self.sheets,
            "leading": self.leading,
            "fit_residual": self.fit_residual,
            "closure_defects": [float(d) for d in self.closure_defects],
        }


@dataclass
class RayOutcome:
    angle: float
    status: str
    event: SingularityEvent | None = None
    message: str = ""


def class_of_coefficient(spec, c1):
    roots = all_leading_roots(spec.M, spec.N, spec.leading1, spec.leading2)
    k = int(np.argmin([abs(c1 - r) for r in roots]))
    return branch_class_of(k, spec.M, spec.N), abs(c1 - roots[k]) / abs(roots[k])


def ray_exit(seed, center, radius, angle):
    """Arclength at which the ray from ``seed`` leaves the disc."""
    e = cmath.exp(1j * angle)
    p = seed - center
    b = (p * e.conjugate()).real
    c = abs(p) ** 2 - radius**2
    disc = b * b - c
    if disc < 0:
        return 0.0
    return -b + math.sqrt(disc)


def chart_samples(chart: Chart, landing, keep=slice(None)):
    """(delta, tau, y1, y2) from the landing history, omitting u = 0."""
    st = landing.chart
    u = st.u[:-1][keep]
    delta = st.delta[:-1][keep]
    v = st.v[:-1][keep]
    y1 = np.empty(len(u), dtype=complex)
    y2 = np.empty(len(u), dtype=complex)
    for k in range(len(u)):
        y1[k], y2[k] = chart.reconstruct(u[k], landing.z_inf + delta[k], v[k], landing.omega)
    g = delta / u**chart.Rd
    tau = u * g ** (1.0 / chart.Rd)
    return delta, tau, y1, y2


def analyse_blowup(spec, trace, tol=1e-12, loops=None, loop_radius=None, loop_tol=1e-6, precision=None,
                   chart=None, aux=None, strict=True):
    """Land, fit and measure monodromy for one approach trace."""
    sc = structural_constants(spec.M, spec.N)
    ch = chart if chart is not None else make_chart(spec, aux)
    mode = "strict" if strict and not ch.nonstrict else "nonstrict"
    try:
        landing = land_on_singularity(spec, trace.blowup, tol=tol, strict=(mode == "strict"), chart=ch)
    except ChartInconsistency:
        if mode != "strict":
            raise
        mode = "nonstrict"
        landing = land_on_singularity(spec, trace.blowup, tol=tol, strict=False, chart=ch)
    leading, fit_res, cls = {}, float("nan"), None
    if mode == "strict":
        delta, tau, y1, y2 = chart_samples(ch, landing, slice(8, None))
        try:
            fit = local_puiseux_fit(delta, y1, y2, spec.M, spec.N, tau=tau)
            c1 = fit.y1.leading
            c2 = fit.y2.leading
            cls, _ = class_of_coefficient(spec, c1)
            leading = {
                "exponents": [fit.y1.exponent, fit.y2.exponent],
                "C1": _pair(c1),
                "C2": _pair(c2),
                "C1_power_R": _pair(c1**sc.R),
            }
            fit_res = fit.residual
        except InsufficientSpan:
            pass
    z_inf = landing.z_inf
    loops = loops if loops is not None else sc.R // sc.d + 1
    radius = loop_radius if loop_radius is not None else _default_radius(trace, z_inf)
    near = _nearest_sample(trace, z_inf, radius)
    defects, sheets = [], None
    try:
        rep = monodromy_loop(spec, z_inf, radius, loops, tol=tol if precision is None else 10.0 ** (-precision + 2),
                             near_state=near, precision=precision, closure_tol=loop_tol)
        defects, sheets = rep.defects, rep.sheets
    except LoopBlowUp:
        pass
    ev = SingularityEvent(z_inf, cls, sheets, leading, fit_res, defects, mode)
    ev.diagnostics = {"root_index": landing.root_index, "max_residue": float(landing.chart.diagnostics["max_residue"]),
                      "loop_radius": radius}
    return ev, landing


def make_chart(spec, aux=None):
    """Chart for ``spec``; systems with nonvanishing gammas get a non-strict chart."""
    from ..auxw import solve_betas

    nonstrict = False
    if aux is None:
        try:
            aux = solve_betas(spec, strict=True)
        except GammaNonzero:
            aux = solve_betas(spec, strict=False)
            nonstrict = True
    ch = Chart(spec, aux)
    ch.nonstrict = nonstrict or bool(aux.gamma_residues)
    return ch


def _pair(c):
    c = complex(c)
    return [c.real, c.imag]


def _default_radius(trace, z_inf):
    # a fraction of the distance already travelled toward the singularity
    dist = float(np.max(np.abs(trace.z - z_inf)))
    return min(0.05, 0.25 * dist)


def _nearest_sample(trace, z_inf, radius):
    k = int(np.argmin(np.abs(np.abs(trace.z - z_inf) - radius)))
    return complex(trace.z[k]), complex(trace.y1[k]), complex(trace.y2[k])


def _ray_job(args):
    spec, seed, angle, length, opts = args
    z0 = complex(seed[0])
    try:
        tr = approach_singularity(spec, seed, z0 + length * cmath.exp(1j * angle), tol=opts["tol"],
                                  r_switch=opts["r_switch"])
        if tr.status != "blowup":
            return RayOutcome(angle, tr.status)
        ev, _ = analyse_blowup(spec, tr, tol=opts["tol"], loops=opts["loops"], loop_radius=opts["radius"],
                               precision=opts["precision"])
        ev.ray_angle = angle
        return RayOutcome(angle, "event", ev)
    except HamsingError as exc:
        return RayOutcome(angle, "error", None, f"{type(exc).__name__}: {exc}")


def hunt_singularities(spec, seed, region=(0j, 1.0), rays=16, tol=1e-12, r_switch=DEFAULT_R_SWITCH, loops=None,
                       radius=None, precision=None, dedupe_tol=1e-6, workers=1):
    """Continue along ``rays`` evenly spaced rays from ``seed`` = (z0, y1, y2)
    to the boundary of the disc ``region`` = (center, radius); land on every
    blow-up inside the disc.  Returns (events, outcomes)."""
    center, rho = complex(region[0]), float(region[1])
    z0 = complex(seed[0])
    if abs(z0 - center) > rho:
        raise ValueError("seed point lies outside the region")
    opts = {"tol": tol, "r_switch": r_switch, "loops": loops, "radius": radius, "precision": precision}
    jobs = []
    for k in range(rays):
        ang = 2 * math.pi * k / rays
        length = ray_exit(z0, center, rho, ang)
        if length > 0:
            jobs.append((spec, seed, ang, length, opts))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_ray_job, jobs))
    else:
        outcomes = [_ray_job(j) for j in jobs]
    found = [o.event for o in outcomes if o.event is not None and abs(o.event.z_inf - center) <= rho]
    return dedupe_events(found, dedupe_tol), outcomes


def dedupe_events(events, tol=1e-6):
    """Deterministic merge of events closer than ``tol`` (first by sort order wins)."""
    ordered = sorted(events, key=lambda e: (round(e.z_inf.real, 9), round(e.z_inf.imag, 9), e.ray_angle or 0.0))
    kept = []
    for ev in ordered:
        if all(abs(ev.z_inf - k.z_inf) > tol for k in kept):
            kept.append(ev)
    return kept
