"""The regularizing chart (u, v) near a movable singularity and landing.

With y1 = u^(-n), n = (N+1)/d, and w = y2 u^m, m = (M+1)/d, the auxiliary
function satisfies W u^K0 = Pfun(z, u, w) where K0 = (M+1)(N+1)/d and

    Pfun = L2 w^(N+1) + L1 + sum alpha_ij u^(K0 - (i(N+1)+j(M+1))/d) w^j
                           + sum beta_kl u^(K0 + (l(N+1)-k(M+1))/d) w^k.

All exponents are positive integers.  With omega^(N+1) = -L1/L2 and
Fbar = w/omega for the root branch of Pfun = 0 truncated at u^K0,

    w = omega (Fbar(z, u) - u^K0 v / ((N+1) L1))

defines v, which agrees with W to leading order.  (z, v) as functions of u
satisfy a regular system:

    dz/du = -n u^(R/d - 1) / Phi1,
    dv/du = (N+1) L1 u^-K0 [Fbar_z dz/du + Fbar_u - (n Phi2/Phi1 + m w)/(omega u)] - K0 v/u,

where Phi1 = u^(mN) y1'-part and Phi2 the analogous y2' factor.  The
bracket vanishes to order u^(K0-1); it is formed as a truncated series in u
(z, v held fixed) so the cancelling low orders are removed exactly rather
than by floating-point subtraction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import ChartInconsistency, RootAmbiguity
from ..model import HamiltonianSpec, structural_constants
from . import series_ops as so


@dataclass
class ChartState:
    """Landing history: u samples with z(u), v(u); root index and omega."""

    u: np.ndarray
    z: np.ndarray
    v: np.ndarray
    delta: np.ndarray  # z - z_inf, integrated outward from u = 0 for relative accuracy
    root_index: int
    omega: complex
    u_switch: complex
    diagnostics: dict = field(default_factory=dict)


class Chart:
    def __init__(self, spec: HamiltonianSpec, aux=None, extra_order=24):
        self.spec = spec
        M, N = spec.M, spec.N
        sc = structural_constants(M, N)
        self.M, self.N, self.d, self.R = M, N, sc.d, sc.R
        d = sc.d
        self.n = (N + 1) // d
        self.m = (M + 1) // d
        self.K0 = (M + 1) * (N + 1) // d
        self.Rd = sc.R // d
        self.L1 = complex(spec.leading1)
        self.L2 = complex(spec.leading2)
        self.L = self.K0 + extra_order
        self.nonstrict = False
        self._warm = {}
        self.alpha_terms = []
        for (i, j), p in spec.alphas.items():
            if (i, j) == (0, 0):
                continue
            e = self.K0 - (i * (N + 1) + j * (M + 1)) // d
            self.alpha_terms.append((i, j, e, p.complex_coeffs(), p.derivative().complex_coeffs()))
        self.beta_terms = []
        if aux is not None:
            for (k, l), p in aux.betas.items():
                e = self.K0 + (l * (N + 1) - k * (M + 1)) // d
                self.beta_terms.append((k, l, e, p.complex_coeffs(), p.derivative().complex_coeffs()))
        base = (self.L1 / self.L2) ** (1.0 / (N + 1))
        self.omegas = [base * cmath.exp(1j * math.pi * (2 * r + 1) / (N + 1)) for r in range(N + 1)]

    # -- polynomial data ---------------------------------------------
    @staticmethod
    def _ev(cs, z):
        acc = 0j
        for c in reversed(cs):
            acc = acc * z + c
        return acc

    def pfun_coeffs(self, z, L, derivative=False):
        """Coefficient series c_j(u), j = 0..N+1, of Pfun in powers of w."""
        N = self.N
        cs = [np.zeros(L + 1, dtype=complex) for _ in range(N + 2)]
        if not derivative:
            cs[0][0] += self.L1
            cs[N + 1][0] += self.L2
        idx = 4 if derivative else 3
        for t in self.alpha_terms:
            j, e = t[1], t[2]
            if e <= L:
                cs[j][e] += self._ev(t[idx], z)
        for t in self.beta_terms:
            k, e = t[0], t[2]
            if e <= L:
                cs[k][e] += self._ev(t[idx], z)
        return cs

    def fbar(self, z, omega, L=None):
        """Truncated root series s(u) (w = omega s) of Pfun = 0 and its z-derivative."""
        L = self.K0 if L is None else L
        cs = self.pfun_coeffs(z, L)
        dcs = self.pfun_coeffs(z, L, derivative=True)
        key = (omega, L)
        s = self._warm.get(key)
        s = so.trunc([1.0], L) if s is None else s
        opow = [omega**j for j in range(self.N + 2)]
        iters = int(math.ceil(math.log2(L + 1))) + 3
        for _ in range(iters):
            P, Ps = self._p_and_ps(cs, s, opow, L)
            ds = so.div(P, Ps, L)
            s = s - ds
            if np.max(np.abs(ds)) <= 1e-15 * np.max(np.abs(s)):
                break
        self._warm[key] = s
        P, Ps = self._p_and_ps(cs, s, opow, L)
        sp = so.powers(s, self.N + 1, L)
        Pz = sum(so.mul(dcs[j] * opow[j], sp[j], L) for j in range(self.N + 2))
        s_z = -so.div(Pz, Ps, L)
        return s, s_z, P

    def _p_and_ps(self, cs, s, opow, L):
        sp = so.powers(s, self.N + 1, L)
        P = sum(so.mul(cs[j] * opow[j], sp[j], L) for j in range(self.N + 2))
        Ps = sum(so.mul(cs[j] * (j * opow[j]), sp[j - 1], L) for j in range(1, self.N + 2))
        return P, Ps

    # -- coordinates ---------------------------------------------------
    def u_from_y1(self, y1, arg1):
        """u = y1^(-d/(N+1)) on the branch fixed by the tracked argument."""
        r = abs(y1) ** (-self.d / (self.N + 1))
        return r * cmath.exp(-1j * self.d * arg1 / (self.N + 1))

    def select_root(self, z, u, w, ambiguity_factor=2.0):
        dists = []
        for r, om in enumerate(self.omegas):
            s, _, _ = self.fbar(z, om)
            dists.append(abs(w / om - so.evaluate(s, u)))
        order = np.argsort(dists)
        best, second = dists[order[0]], dists[order[1]]
        if second < ambiguity_factor * best:
            raise RootAmbiguity(f"roots {order[0]} and {order[1]} within factor {ambiguity_factor}")
        return int(order[0]), dists

    def v_from_state(self, z, u, w, omega):
        s, _, _ = self.fbar(z, omega)
        return (self.N + 1) * self.L1 * (so.evaluate(s, u) - w / omega) / u**self.K0

    def w_from_v(self, z, u, v, omega):
        s, _, _ = self.fbar(z, omega)
        return omega * (so.evaluate(s, u) - u**self.K0 * v / ((self.N + 1) * self.L1))

    def phi1(self, z, u, w):
        N = self.N
        acc = (N + 1) * self.L2 * w**N
        for i, j, e, cs, _ in self.alpha_terms:
            if j:
                acc += j * self._ev(cs, z) * w ** (j - 1) * u**e
        return acc

    def dz_du(self, z, u, v, omega):
        w = self.w_from_v(z, u, v, omega)
        return -self.n * u ** (self.Rd - 1) / self.phi1(z, u, w)

    def rhs(self, u, z, v, omega, strict=True, check_tol=1e-7):
        """(dz/du, dv/du) at a point of the chart."""
        N, M, K0, L = self.N, self.M, self.K0, self.L
        s, s_z, _ = self.fbar(z, omega)
        c = (N + 1) * self.L1
        wser = omega * (so.trunc(s, L) - so.shift(np.array([v / c]), K0, L))
        wp = so.powers(wser, N + 1, L)
        phi1 = (N + 1) * self.L2 * wp[N]
        phi2 = so.trunc([(M + 1) * self.L1], L)
        for i, j, e, cs, _ in self.alpha_terms:
            a = self._ev(cs, z)
            if j:
                phi1 = phi1 + so.shift(j * a * wp[j - 1], e, L)
            if i:
                phi2 = phi2 + so.shift(i * a * wp[j], e, L)
        inv1 = so.inv(phi1, L)
        dzdu_ser = so.shift(-self.n * inv1, self.Rd - 1, L)
        G = self.n * so.mul(phi2, inv1, L) + self.m * wser
        Gs = np.concatenate([G[1:], [0j]])
        B = so.mul(so.trunc(s_z, L), dzdu_ser, L) + so.trunc(so.deriv(s), L) - Gs / omega
        residue = c * B[K0 - 1] - K0 * v
        scale = max(1.0, abs(v), float(np.max(np.abs(B[: K0 + 1]))) * abs(c))
        low = float(np.max(np.abs(B[: K0 - 1]))) if K0 > 1 else 0.0
        bad = max(abs(G[0]), low * abs(c), abs(residue)) / scale
        if strict and bad > check_tol:
            raise ChartInconsistency(f"negative-power residue {bad:.3g} at u={u:.3g}")
        tail = c * B[K0:]
        dv = so.evaluate(tail, u)
        if not strict:
            dv = dv + residue / u
        w = omega * (so.evaluate(s, u) - u**K0 * v / c)
        dz = -self.n * u ** (self.Rd - 1) / self.phi1(z, u, w)
        return dz, dv, bad

    def reconstruct(self, u, z, v, omega):
        """(y1, y2) from chart coordinates."""
        w = self.w_from_v(z, u, v, omega)
        return u ** (-self.n), w * u ** (-self.m)

    def algebraic_residual(self, z, u, w, W):
        """|Pfun(z, u, w) - W u^K0| relative to the leading terms."""
        acc = self.L2 * w ** (self.N + 1) + self.L1
        for i, j, e, cs, _ in self.alpha_terms:
            acc += self._ev(cs, z) * u**e * w**j
        for k, l, e, cs, _ in self.beta_terms:
            acc += self._ev(cs, z) * u**e * w**k
        return abs(acc - W * u**self.K0) / max(abs(self.L1), abs(self.L2 * w ** (self.N + 1)))


@dataclass
class Landing:
    z_inf: complex
    v0: complex
    chart: ChartState
    root_index: int
    omega: complex
    u_switch: complex


def land_on_singularity(spec, blowup, aux=None, tol=1e-12, strict=True, chart=None, history=64,
                        u_stop=None):
    """Integrate the chart system from the switch point to u = 0.

    ``blowup`` is a BlowUpSignal (z, y1, y2, tracked argument of y1).  In
    non-strict mode (for systems violating their resonance conditions) the
    u^-1 residue is kept and integration stops at u_stop (default
    1e-6 |u_switch|), taking z there as the estimate of z_inf.
    """
    if chart is None:
        if aux is None:
            from ..auxw import solve_betas

            aux = solve_betas(spec, strict=strict)
        chart = Chart(spec, aux)
    us = chart.u_from_y1(blowup.y1, blowup.arg1)
    w = blowup.y2 * us**chart.m
    idx, dists = chart.select_root(blowup.z, us, w)
    omega = chart.omegas[idx]
    v_init = chart.v_from_state(blowup.z, us, w, omega)
    end = 1.0 if strict else 1.0 - (u_stop if u_stop is not None else 1e-6)
    worst = [0.0]

    def fun(sig, y):
        u = us * (1.0 - sig)
        if abs(u) == 0:
            u = us * 1e-300
        dz, dv, bad = chart.rhs(u, y[0], y[1], omega, strict=strict)
        worst[0] = max(worst[0], bad)
        return np.array([-us * dz, -us * dv])

    sol = solve_ivp(fun, (0.0, end), np.array([complex(blowup.z), v_init]), method="DOP853", rtol=tol,
                    atol=tol * 1e-2, dense_output=True)
    if sol.status != 0:
        raise ChartInconsistency(f"chart integration failed: {sol.message}")
    sig = 1.0 - np.geomspace(1.0, max(1e-12, 1.0 - end), history)
    sig = np.concatenate([sig, [end]])
    ys = sol.sol(sig)
    u_hist = us * (1.0 - sig)
    landing = Landing(complex(sol.y[0, -1]), complex(sol.y[1, -1]), None, idx, omega, us)
    if strict:
        delta, _, _, _ = near_samples(spec, landing, chart, u_hist[:-1], tol=tol, strict=strict)
        delta = np.concatenate([delta, [0j]])
    else:
        delta = ys[0] - landing.z_inf
    state = ChartState(u_hist, ys[0], ys[1], delta, idx, omega, us,
                       {"root_distances": [float(x) for x in dists], "max_residue": worst[0], "nfev": int(sol.nfev),
                        "v_switch": complex(v_init)})
    landing.chart = state
    return landing


def near_samples(spec, landing: Landing, chart: Chart, u_values, tol=1e-13, strict=True):
    """Integrate outward from u = 0 with (z - z_inf, v) to get accurate
    (z, y1, y2) close to the singularity.  ``u_values`` lie on one ray."""
    u_values = np.asarray(u_values, dtype=complex)
    direction = u_values[-1] / abs(u_values[-1])
    radii = np.abs(u_values)
    omega = landing.omega
    zi = landing.z_inf

    r0 = float(radii.min()) * 1e-3
    u0 = direction * r0
    w0 = chart.w_from_v(zi, 0j, landing.v0, omega)
    delta0 = -chart.n * u0**chart.Rd / (chart.Rd * chart.phi1(zi, 0j, w0))

    def fun(t, y):
        r = math.exp(t)
        u = direction * r
        dz, dv, _ = chart.rhs(u, zi + y[0], y[1], omega, strict=strict)
        return np.array([u * dz, u * dv])

    sol = solve_ivp(fun, (math.log(r0), math.log(float(radii.max()))), np.array([delta0, landing.v0]),
                    method="DOP853", rtol=tol, atol=1e-300, t_eval=np.log(np.sort(radii)))
    order = np.argsort(radii)
    delta = np.empty(len(radii), dtype=complex)
    v = np.empty(len(radii), dtype=complex)
    delta[order] = sol.y[0]
    v[order] = sol.y[1]
    y1 = np.empty(len(radii), dtype=complex)
    y2 = np.empty(len(radii), dtype=complex)
    for k, u in enumerate(u_values):
        y1[k], y2[k] = chart.reconstruct(u, zi + delta[k], v[k], omega)
    return delta, y1, y2, v
