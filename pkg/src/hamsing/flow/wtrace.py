"""The auxiliary function W sampled along continuation traces."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from ..auxw import AuxiliaryW, eval_W
from ..errors import ZeroCrossing
from .approach import approach_singularity, estimate_singularity
from .integrate import ContinuationTrace
from .puiseux import continuous_t, match_series


@dataclass
class WSummary:
    values: np.ndarray
    abs_max: float
    abs_min: float
    at_start: complex
    growth_slope: float | None = None   # d|W| / d log(1/|z - z_inf|) over the tail
    monotone_growth: bool = False

    def to_json(self):
        return {
            "abs_max": self.abs_max,
            "abs_min": self.abs_min,
            "at_start": [self.at_start.real, self.at_start.imag],
            "growth_slope": self.growth_slope,
            "monotone_growth": self.monotone_growth,
        }


def w_trace(spec, aux: AuxiliaryW, trace: ContinuationTrace, precision=None, zero_eps=1e-300, z_inf=None):
    """W at every sample of ``trace``.

    Extended-precision samples of the trace are used when present, and W
    is then summed at ``precision`` digits (default 40).  ZeroCrossing is
    raised where y1 vanishes on the trace; ``paths.detour_around`` builds
    the re-routed path.
    """
    if np.any(np.abs(trace.y1) <= zero_eps):
        k = int(np.argmin(np.abs(trace.y1)))
        raise ZeroCrossing(f"y1 vanishes at z = {trace.z[k]}")
    if trace.mp_samples:
        digits = precision or max(40, mpmath.mp.dps)
        vals = [eval_W(aux, z, a, b, digits) for _, z, a, b in trace.mp_samples]
        values = np.array([complex(v) for v in vals])
    else:
        values = np.array([eval_W(aux, z, a, b, precision) for z, a, b in zip(trace.z, trace.y1, trace.y2)])
        values = np.array([complex(v) for v in values])
    trace.W = values
    return summarize(values, trace, z_inf)


def summarize(values, trace, z_inf=None, growth_rise=1e-2):
    """Magnitude summary; growth is flagged when |W| increases monotonically
    over the inner half (in log distance) by more than ``growth_rise`` relative."""
    mags = np.abs(values)
    out = WSummary(values, float(mags.max()), float(mags.min()), complex(values[0]))
    if z_inf is not None:
        dist = np.abs(trace.z - z_inf)
        keep = dist > 0
        x = np.log(1.0 / dist[keep])
        y = mags[keep]
        order = np.argsort(x)
        x, y = x[order], y[order]
        tail = x >= x[0] + 0.5 * (x[-1] - x[0])
        if tail.sum() >= 3:
            A = np.vstack([x[tail], np.ones(tail.sum())]).T
            slope = float(np.linalg.lstsq(A, y[tail], rcond=None)[0][0])
            out.growth_slope = slope
            scale = max(float(y[tail].max()), 1e-300)
            dy = np.diff(y[tail])
            rise = y[tail][-1] - y[tail][0]
            out.monotone_growth = bool(slope > 0 and np.all(dy >= -1e-6 * scale) and rise > growth_rise * scale)
    return out


def w_approach(spec, aux, initial, target, r_start=1e2, r_end=1e6, precision=40, tol=None):
    """Approach trace in extended precision from |y1| = r_start to r_end
    with W sampled along it.  Returns (trace, summary, window) where
    ``window`` selects the samples with |y1| >= r_start."""
    tol = tol if tol is not None else 10.0 ** (-(precision - 5))
    tr = approach_singularity(spec, initial, target, tol=tol, r_switch=r_end, r_aim=min(10.0, r_start),
                              precision=precision)
    if tr.status != "blowup":
        return tr, None, None
    _, zl, a, b = tr.mp_samples[-1]
    zhat = complex(estimate_singularity(spec, zl, a, b, precision))
    summary = w_trace(spec, aux, tr, precision, z_inf=zhat)
    window = np.abs(tr.y1) >= r_start
    vals = summary.values[window]
    sub = ContinuationTrace(tr.s[window], tr.z[window], tr.y1[window], tr.y2[window], tr.arg1[window])
    return tr, summarize(vals, sub, zhat), window


def w_series_agreement(spec, aux, trace, z_inf, r_fit=1e2, K=20, precision=40, window=None):
    """Compare W on an extended-precision trace with W on the local series.

    The series about ``z_inf`` is fitted at the trace sample whose |y1| is
    closest to ``r_fit`` and then evaluated at every sample selected by
    ``window`` (default: |y1| >= r_fit), on the branch continued from the
    fit point.  Returns (max relative deviation, limit value of W at z_inf,
    fit misfit).
    """
    if not trace.mp_samples:
        raise ValueError("trace carries no extended-precision samples")
    mags = np.abs(trace.y1)
    k = int(np.argmin(np.abs(np.log(mags / r_fit))))
    series, misfit = match_series(spec, z_inf, trace.mp_samples[k][1:], K=K, dps=precision)
    R = series.ramification
    sel = np.nonzero(mags >= r_fit if window is None else window)[0]
    zs = np.array([complex(trace.mp_samples[i][1]) for i in sel])
    t_ref = continuous_t(np.concatenate([[complex(trace.mp_samples[k][1])], zs]), z_inf, R)[1:]
    devs = []
    with mpmath.workdps(precision):
        zi = mpmath.mpc(z_inf)
        roots = [mpmath.exp(2j * mpmath.pi * j / R) for j in range(R)]
        for i, tv in zip(sel, t_ref):
            _, z, a, b = trace.mp_samples[i]
            t0 = (mpmath.mpc(z) - zi) ** (mpmath.mpf(1) / R)
            t = min((t0 * w for w in roots), key=lambda q: abs(complex(q) - tv))
            y1, y2 = series.evaluate_t(t)
            ws = eval_W(aux, z, y1, y2, precision)
            wf = eval_W(aux, z, a, b, precision)
            devs.append(float(abs(ws - wf) / abs(wf)))
        # limit at a distance where |y1|^(M+1) keeps half the working digits
        scale = mpmath.mpf(10) ** (-precision / (2.0 * spec.N * (spec.M + 1)))
        y1, y2 = series.evaluate_t(scale)
        w0 = complex(eval_W(aux, zi + scale**R, y1, y2, precision))
    return max(devs), w0, misfit
