"""Numerical continuation along paths and the continuation trace."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from ..errors import StepUnderflow
from ..model import HamiltonianSpec, fixed_singularities, hamiltonian_value
from .paths import PathSpec
from .taylor import taylor_continue

DEFAULT_R_SWITCH = 1e3


@dataclass
class BlowUpSignal:
    """State at which |y1| first reached the switch radius."""

    s: float
    z: complex
    y1: complex
    y2: complex
    arg1: float  # continuously tracked argument of y1


@dataclass
class ContinuationTrace:
    s: np.ndarray
    z: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    arg1: np.ndarray
    W: np.ndarray = None
    status: str = "end"
    blowup: BlowUpSignal = None
    stats: dict = field(default_factory=dict)
    mp_samples: list = None  # extended-precision samples when integrated in mpmath

    def __len__(self):
        return len(self.s)

    def last_state(self):
        return self.z[-1], self.y1[-1], self.y2[-1]

    def to_csv(self, path):
        write_trace_csv(self, path)


def track_argument(values, start=None):
    """Continuous argument of a sampled complex function."""
    ang = np.unwrap(np.angle(np.asarray(values, dtype=complex)))
    if start is not None and len(ang):
        shift = round((start - ang[0]) / (2 * math.pi)) * 2 * math.pi
        ang = ang + shift
    return ang


def _segment_rhs(spec, seg):
    M, N = spec.M, spec.N
    L1, L2 = complex(spec.leading1), complex(spec.leading2)
    alphas = [(i, j, p.complex_coeffs()) for (i, j), p in spec.alphas.items() if (i, j) != (0, 0)]

    def fun(s, y):
        z = seg.point(s)
        dz = seg.tangent(s)
        y1, y2 = y[0], y[1]
        f1 = (N + 1) * L2 * y2**N
        f2 = -(M + 1) * L1 * y1**M
        for i, j, cs in alphas:
            a = 0j
            for c in reversed(cs):
                a = a * z + c
            if j:
                f1 += j * a * y1**i * y2 ** (j - 1)
            if i:
                f2 -= i * a * y1 ** (i - 1) * y2**j
        return np.array([dz * f1, dz * f2])

    return fun


def continue_along_path(spec: HamiltonianSpec, initial, path: PathSpec, tol=1e-10, r_switch=DEFAULT_R_SWITCH,
                        precision=None, clearance=1e-6, max_step=None, arg_start=None, dense=0):
    """Continue (y1, y2) from initial = (z0, y1, y2) along ``path``.

    Double precision uses an adaptive embedded Runge-Kutta pair of order 8
    (rtol = atol = tol).  With ``precision`` (digits) an mpmath Taylor
    integrator is used instead.  Integration stops early with a
    BlowUpSignal in ``trace.blowup`` once |y1| >= r_switch.
    """
    z0, y1, y2 = initial
    if abs(complex(z0) - path.start) > 1e-9 * max(1.0, abs(path.start)):
        raise ValueError("initial point is not the start of the path")
    fixed = fixed_singularities(spec)
    if fixed:
        path.check_clearance(fixed, clearance)
    if precision:
        return _continue_mp(spec, (y1, y2), path, tol, r_switch, precision, arg_start)
    ss, zs, y1s, y2s = [0.0], [complex(z0)], [complex(y1)], [complex(y2)]
    s_off = 0.0
    status = "end"
    nfev = 0
    nsteps = 0
    y = np.array([complex(y1), complex(y2)])
    for seg in path.segments:
        fun = _segment_rhs(spec, seg)

        def blow(s, yy):
            return abs(yy[0]) - r_switch

        blow.terminal = True
        blow.direction = 1
        ms = max_step if max_step is not None else max(seg.length / 64, 1e-12)
        sol = solve_ivp(fun, (0.0, seg.length), y, method="DOP853", rtol=tol, atol=tol, events=blow,
                        max_step=ms, dense_output=bool(dense))
        nfev += sol.nfev
        nsteps += len(sol.t) - 1
        if sol.status == -1:
            s_fail = sol.t[-1] if len(sol.t) else 0.0
            raise StepUnderflow(seg.point(s_fail), sol.message)
        ts = sol.t
        ys = sol.y
        if dense and sol.sol is not None:
            extra = np.linspace(0.0, ts[-1], dense + 2)[1:-1]
            ts = np.concatenate([ts, extra])
            order = np.argsort(ts, kind="mergesort")
            ts = ts[order]
            ys = np.concatenate([ys, sol.sol(extra)], axis=1)[:, order]
        for k in range(1, len(ts)):
            ss.append(s_off + ts[k])
            zs.append(seg.point(ts[k]))
            y1s.append(ys[0, k])
            y2s.append(ys[1, k])
        y = ys[:, -1]
        if sol.status == 1 and len(sol.t_events[0]):
            te = sol.t_events[0][0]
            ye = sol.y_events[0][0]
            ss.append(s_off + te)
            zs.append(seg.point(te))
            y1s.append(ye[0])
            y2s.append(ye[1])
            status = "blowup"
            break
        s_off += seg.length
    trace = ContinuationTrace(np.array(ss), np.array(zs), np.array(y1s), np.array(y2s),
                              track_argument(y1s, arg_start), status=status)
    trace.stats = {"nfev": int(nfev), "steps": int(nsteps), "method": "DOP853", "tol": tol}
    if status == "blowup":
        trace.blowup = BlowUpSignal(ss[-1], zs[-1], y1s[-1], y2s[-1], float(trace.arg1[-1]))
    return trace


def _continue_mp(spec, y0, path, tol, r_switch, precision, arg_start):
    samples, status = taylor_continue(spec, path.segments, y0[0], y0[1], tol=tol, dps=precision, r_switch=r_switch)
    ss = np.array([float(s) for s, *_ in samples])
    zs = np.array([complex(z) for _, z, _, _ in samples])
    y1s = np.array([complex(a) for _, _, a, _ in samples])
    y2s = np.array([complex(b) for _, _, _, b in samples])
    trace = ContinuationTrace(ss, zs, y1s, y2s, track_argument(y1s, arg_start), status=status)
    trace.mp_samples = samples
    trace.stats = {"steps": len(samples) - 1, "method": "taylor", "digits": precision, "tol": float(tol)}
    if status == "blowup":
        trace.blowup = BlowUpSignal(ss[-1], zs[-1], y1s[-1], y2s[-1], float(trace.arg1[-1]))
    return trace


def hamiltonian_along(spec, trace):
    return np.array([hamiltonian_value(spec, z, a, b) for z, a, b in zip(trace.z, trace.y1, trace.y2)])


def write_trace_csv(trace: ContinuationTrace, path):
    cols = ["s", "re_z", "im_z", "re_y1", "im_y1", "re_y2", "im_y2"]
    if trace.W is not None:
        cols += ["re_W", "im_W"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for k in range(len(trace.s)):
            vals = [trace.z[k], trace.y1[k], trace.y2[k]] + ([trace.W[k]] if trace.W is not None else [])
            row = [repr(float(trace.s[k]))]
            for v in vals:
                v = complex(v)
                row += [repr(v.real), repr(v.imag)]
            w.writerow(row)


def read_trace_csv(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    s = np.array([float(r["s"]) for r in rows])
    z = np.array([complex(float(r["re_z"]), float(r["im_z"])) for r in rows])
    y1 = np.array([complex(float(r["re_y1"]), float(r["im_y1"])) for r in rows])
    y2 = np.array([complex(float(r["re_y2"]), float(r["im_y2"])) for r in rows])
    W = None
    if rows and "re_W" in rows[0]:
        W = np.array([complex(float(r["re_W"]), float(r["im_W"])) for r in rows])
    return ContinuationTrace(s, z, y1, y2, track_argument(y1), W=W)


def mp_state(x, dps):
    with mpmath.workdps(dps):
        return mpmath.mpc(x)
