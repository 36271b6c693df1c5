"""Steering a continuation onto a movable singularity.

Near z_inf, y1 ~ C (z - z_inf)^p with p = -(N+1)/(MN-1), so
z_inf is estimated from the local logarithmic derivative as
z - p y1 / y1'.  A path is re-aimed through that estimate until |y1|
reaches the switch radius.
"""

from __future__ import annotations

import mpmath
import numpy as np

from ..model import rhs, structural_constants
from .integrate import DEFAULT_R_SWITCH, ContinuationTrace, continue_along_path
from .paths import Line, PathSpec


def leading_exponent(spec):
    sc = structural_constants(spec.M, spec.N)
    return -(spec.N + 1) / sc.R


def estimate_singularity(spec, z, y1, y2, precision=None):
    if precision:
        with mpmath.workdps(precision):
            d1 = rhs(spec, z, y1, y2, convert=mpmath.mpc)[0]
            if d1 == 0:
                return None
            sc = structural_constants(spec.M, spec.N)
            return z + mpmath.mpf(spec.N + 1) / sc.R * y1 / d1
    d1 = rhs(spec, z, y1, y2)[0]
    if d1 == 0:
        return None
    return z - leading_exponent(spec) * y1 / d1


def join_traces(traces):
    """Concatenate traces whose end and start states coincide."""
    s, z, y1, y2, arg = [], [], [], [], []
    off = 0.0
    stats = {"legs": len(traces), "nfev": 0, "steps": 0}
    mp = []
    for k, tr in enumerate(traces):
        sl = slice(0 if k == 0 else 1, None)
        s.append(tr.s[sl] + off)
        z.append(tr.z[sl])
        y1.append(tr.y1[sl])
        y2.append(tr.y2[sl])
        arg.append(tr.arg1[sl])
        off += float(tr.s[-1])
        stats["nfev"] += tr.stats.get("nfev", 0)
        stats["steps"] += tr.stats.get("steps", 0)
        if tr.mp_samples is not None:
            mp.extend(tr.mp_samples[0 if k == 0 else 1:])
    last = traces[-1]
    out = ContinuationTrace(np.concatenate(s), np.concatenate(z), np.concatenate(y1), np.concatenate(y2),
                            np.concatenate(arg), status=last.status, blowup=last.blowup, stats=stats)
    out.mp_samples = mp or None
    if out.blowup is not None:
        out.blowup.s = float(out.s[-1])
    return out


def approach_singularity(spec, initial, target, tol=1e-12, r_switch=DEFAULT_R_SWITCH, r_aim=10.0, max_legs=40,
                         precision=None, arg_start=None, overshoot=2.0):
    """Continue from ``initial`` toward ``target`` and, once |y1| >= r_aim,
    keep re-aiming at the estimated singularity until |y1| >= r_switch.

    Returns the joined ContinuationTrace; ``status`` is "blowup" on success
    and "end" when nothing was approached.
    """
    z0 = complex(initial[0])
    state = initial
    arg = arg_start
    legs = []
    first = PathSpec([Line(z0, complex(target))])
    tr = continue_along_path(spec, state, first, tol=tol, r_switch=min(r_aim, r_switch), precision=precision,
                             arg_start=arg)
    legs.append(tr)
    if tr.status != "blowup":
        return join_traces(legs)
    for _ in range(max_legs):
        b = legs[-1].blowup
        if abs(b.y1) >= r_switch:
            return join_traces(legs)
        state = _state_of(legs[-1])
        zc = state[0]
        zhat = estimate_singularity(spec, zc, state[1], state[2], precision)
        if zhat is None:
            break
        step = zhat - zc
        if abs(step) == 0:
            break
        end = zc + overshoot * step
        if not precision:
            zc, end = complex(zc), complex(end)
        tr = continue_along_path(spec, state, PathSpec([Line(zc, end)]), tol=tol, r_switch=r_switch,
                                 precision=precision, arg_start=float(legs[-1].arg1[-1]), clearance=0.0)
        if tr.status == "blowup":
            legs.append(tr)
            return join_traces(legs)
        # missed: restart from the point of largest |y1| on this leg
        k = int(np.argmax(np.abs(tr.y1)))
        if k == 0:
            tr.status = "stalled"
            legs.append(tr)
            break
        cut = _truncate(tr, k)
        legs.append(cut)
    out = join_traces(legs)
    if out.status == "blowup" and abs(out.blowup.y1) < r_switch:
        out.status = "stalled"
    return out


def _state_of(tr):
    if tr.mp_samples:
        _, z, a, b = tr.mp_samples[-1]
        return z, a, b
    return complex(tr.z[-1]), complex(tr.y1[-1]), complex(tr.y2[-1])


def _truncate(tr, k):
    from .integrate import BlowUpSignal

    out = ContinuationTrace(tr.s[: k + 1], tr.z[: k + 1], tr.y1[: k + 1], tr.y2[: k + 1], tr.arg1[: k + 1],
                            status="blowup", stats=tr.stats)
    if tr.mp_samples is not None:
        out.mp_samples = tr.mp_samples[: k + 1]
    out.blowup = BlowUpSignal(float(out.s[-1]), out.z[-1], out.y1[-1], out.y2[-1], float(out.arg1[-1]))
    return out


__all__ = ["approach_singularity", "estimate_singularity", "join_traces", "leading_exponent"]
