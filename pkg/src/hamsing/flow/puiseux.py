"""Least-squares Puiseux fits to numerical samples near a singularity."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import cmath

import mpmath
import numpy as np

from ..errors import InsufficientSpan
from ..model import structural_constants
from ..series import all_leading_roots, derive_formal_series, instantiate_numeric


@dataclass
class ComponentFit:
    exponent: float          # fitted real exponent
    predicted: Fraction      # leading exponent of the class
    coefficients: list       # C_k for k = start, start+1, ... in tau = (z - z_inf)^(d/R)
    start: int               # index of the leading coefficient
    residual: float          # relative rms misfit of the coefficient fit

    @property
    def leading(self):
        return self.coefficients[0]

    def to_json(self):
        return {
            "exponent": self.exponent,
            "predicted": [self.predicted.numerator, self.predicted.denominator],
            "start": self.start,
            "coefficients": [[c.real, c.imag] for c in self.coefficients],
            "residual": self.residual,
        }


@dataclass
class PuiseuxFit:
    y1: ComponentFit
    y2: ComponentFit
    ramification: int

    @property
    def residual(self):
        return max(self.y1.residual, self.y2.residual)

    def to_json(self):
        return {"ramification": self.ramification, "y1": self.y1.to_json(), "y2": self.y2.to_json()}


def _check_span(delta, min_samples, min_decades):
    mags = np.abs(delta)
    if len(delta) < min_samples or np.any(mags == 0):
        raise InsufficientSpan(f"{len(delta)} samples (need {min_samples}, all off z_inf)")
    span = np.log10(mags.max() / mags.min())
    if span < min_decades:
        raise InsufficientSpan(f"samples span {span:.2f} decades (need {min_decades})")


def fit_slope(delta, values):
    """Real exponent p with values ~ a delta^p, fitted jointly on log-modulus
    and continuously unwrapped argument (samples sorted by |delta|)."""
    order = np.argsort(np.abs(delta))
    d = np.asarray(delta)[order]
    v = np.asarray(values)[order]
    ld = np.log(np.abs(d))
    ad = np.unwrap(np.angle(d))
    lv = np.log(np.abs(v))
    av = np.unwrap(np.angle(v))
    n = len(d)
    # unknowns: p, Re log a, Im log a, integer winding absorbed by unwrap
    A = np.zeros((2 * n, 3))
    A[:n, 0], A[:n, 1] = ld, 1.0
    A[n:, 0], A[n:, 2] = ad, 1.0
    b = np.concatenate([lv, av])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return float(sol[0])


def fit_coefficients(tau, values, start, nterms):
    """Complex least squares for values = sum_{k<nterms} C_k tau^(start + k)."""
    scaled = values * tau ** (-start)
    V = np.vander(tau, nterms, increasing=True)
    scale = np.max(np.abs(tau)) or 1.0
    Vs = V / scale ** np.arange(nterms)
    c, *_ = np.linalg.lstsq(Vs, scaled, rcond=None)
    c = c / scale ** np.arange(nterms)
    misfit = np.linalg.norm(V @ c - scaled) / max(np.linalg.norm(scaled), 1e-300)
    return list(c), float(misfit)


def local_puiseux_fit(delta, y1, y2, M, N, tau=None, nterms=4, min_samples=20, min_decades=2.0):
    """Fit exponents and leading Puiseux coefficients of (y1, y2).

    ``delta`` = z - z_inf at the samples.  ``tau`` is the local uniformizing
    variable (z - z_inf)^(d/R) on a consistent branch; when omitted it is
    taken from the principal logarithm unwrapped along the samples.
    """
    delta = np.asarray(delta, dtype=complex)
    y1 = np.asarray(y1, dtype=complex)
    y2 = np.asarray(y2, dtype=complex)
    _check_span(delta, min_samples, min_decades)
    sc = structural_constants(M, N)
    r = sc.R // sc.d
    n, m = (N + 1) // sc.d, (M + 1) // sc.d
    if tau is None:
        order = np.argsort(np.abs(delta))
        logd = np.log(np.abs(delta[order])) + 1j * np.unwrap(np.angle(delta[order]))
        tau = np.empty_like(delta)
        tau[order] = np.exp(logd / r)
    tau = np.asarray(tau, dtype=complex)
    p1 = fit_slope(delta, y1)
    p2 = fit_slope(delta, y2)
    c1, r1 = fit_coefficients(tau, y1, -n, nterms)
    c2, r2 = fit_coefficients(tau, y2, -m, nterms)
    f1 = ComponentFit(p1, Fraction(-(N + 1), sc.R), c1, -n, r1)
    f2 = ComponentFit(p2, Fraction(-(M + 1), sc.R), c2, -m, r2)
    return PuiseuxFit(f1, f2, r)


def match_series(spec, z_inf, state, K=10, dps=None, symbolic=None, sweeps=2):
    """Numeric series about ``z_inf`` through the solution state (z, y1, y2).

    The series variable is t = (z - z_inf)^(1/R) on the principal branch at
    ``state``.  Every leading root is tried and the resonance parameters are
    solved by linearization (``sweeps`` Newton passes).  Returns
    (series, relative misfit at the state).
    """
    sym = symbolic if symbolic is not None else derive_formal_series(spec, K=K)[0]
    nf = len(sym.free_parameters)
    R = sym.ramification
    conv = complex if dps is None else mpmath.mpc
    with mpmath.workdps(dps or 15):
        z, a, b = (conv(x) for x in state)
        zi = conv(z_inf)
        t = (z - zi) ** (mpmath.mpf(1) / R) if dps else cmath.exp(cmath.log(z - zi) / R)
        best = None
        for root in all_leading_roots(spec.M, spec.N, spec.leading1, spec.leading2):
            f = [conv(0)] * nf

            def at(params):
                ser = instantiate_numeric(sym, spec, zi, root, params, dps=dps, check=False)
                return ser, ser.evaluate_t(t)

            ser, y = at(f)
            for _ in range(sweeps if nf else 0):
                cols = []
                for k in range(nf):
                    g = list(f)
                    g[k] = g[k] + 1
                    cols.append(at(g)[1])
                A = np.array([[complex(c[0] - y[0]) / complex(a) for c in cols],
                              [complex(c[1] - y[1]) / complex(b) for c in cols]])
                rhs = np.array([complex(a - y[0]) / complex(a), complex(b - y[1]) / complex(b)])
                step, *_ = np.linalg.lstsq(A, rhs, rcond=None)
                f = [f[k] + conv(step[k]) for k in range(nf)]
                ser, y = at(f)
            misfit = max(abs(complex(y[0] - a)) / abs(complex(a)), abs(complex(y[1] - b)) / abs(complex(b)))
            if best is None or misfit < best[1]:
                best = (ser, misfit)
    return best


def continuous_t(z, z_inf, R):
    """(z - z_inf)^(1/R) along a sampled curve, continuous from the principal
    branch at the first sample."""
    dz = np.asarray(z, dtype=complex) - complex(z_inf)
    ang = np.unwrap(np.angle(dz))
    return np.abs(dz) ** (1.0 / R) * np.exp(1j * ang / R)


def series_flow_agreement(spec, z_inf, near_state, radius=1e-3, K=10, tol=1e-13, loops=1):
    """Largest relative deviation between the integrated solution on the
    circle |z - z_inf| = radius and the K-truncated series fitted at the
    circle's start point.  Returns (deviation, series, misfit at start)."""
    from .integrate import continue_along_path
    from .monodromy import start_on_circle
    from .paths import PathSpec, circle

    start, theta = start_on_circle(spec, z_inf, radius, near_state, tol)
    series, misfit = match_series(spec, z_inf, start, K=K)
    path = PathSpec([circle(z_inf, radius, theta, loops)])
    tr = continue_along_path(spec, start, path, tol=tol, r_switch=np.inf, clearance=0.0)
    t = continuous_t(tr.z, z_inf, series.ramification)
    y1s, y2s = series.evaluate_t(t)
    dev = max(np.max(np.abs(y1s - tr.y1) / np.abs(tr.y1)), np.max(np.abs(y2s - tr.y2) / np.abs(tr.y2)))
    return float(dev), series, misfit
