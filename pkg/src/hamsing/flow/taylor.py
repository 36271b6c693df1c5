"""Taylor-series integration of the Hamiltonian system in mpmath.

The vector field is polynomial in (z, y1, y2), so Taylor coefficients of the
solution along a path segment follow from Cauchy products order by order.
Step sizes come from the decay of the last coefficients, which keeps the
method usable right up to the neighbourhood of a singularity.
"""

from __future__ import annotations

import mpmath

from ..algebra import to_number
from ..errors import StepUnderflow


class TaylorStepper:
    def __init__(self, spec, dps=30, order=None):
        self.spec = spec
        self.dps = dps
        self.order = order or max(20, int(0.9 * dps) + 8)
        M, N = spec.M, spec.N
        with mpmath.workdps(dps):
            self.L1 = to_number(spec.leading1, mpmath.mpc)
            self.L2 = to_number(spec.leading2, mpmath.mpc)
            self.alpha = {
                k: [to_number(c, mpmath.mpc) for c in p.coeffs] for k, p in spec.alphas.items() if k != (0, 0)
            }
        self.need = set()
        for (i, j) in self.alpha:
            if j:
                self.need.add((i, j - 1))
            if i:
                self.need.add((i - 1, j))
        self.need.add((0, N))
        self.need.add((M, 0))

    def _poly_series(self, coeffs, zser, order):
        """Taylor series of sum c_k z^k given the series of z."""
        out = [mpmath.mpc(0)] * (order + 1)
        for c in reversed(coeffs):
            # out = out * z + c
            new = [mpmath.mpc(0)] * (order + 1)
            for a in range(order + 1):
                oa = out[a]
                if oa:
                    for b in range(order + 1 - a):
                        zb = zser[b]
                        if zb:
                            new[a + b] += oa * zb
            new[0] += c
            out = new
        return out

    def coefficients(self, zser, y10, y20):
        """Taylor coefficients of (y1, y2) in the path parameter.

        ``zser`` are the Taylor coefficients of z along the path (length
        order+1); the derivative series dz/dh is formed internally.
        """
        M, N = self.spec.M, self.spec.N
        K = self.order
        zp = [(k + 1) * zser[k + 1] for k in range(K)] + [mpmath.mpc(0)]
        aser = {key: self._poly_series(c, zser, K) for key, c in self.alpha.items()}
        y1 = [y10]
        y2 = [y20]
        P1 = {0: [mpmath.mpc(1)], 1: y1}
        P2 = {0: [mpmath.mpc(1)], 1: y2}
        for e in range(2, M + 1):
            P1[e] = [P1[e - 1][0] * y10]
        for e in range(2, N + 1):
            P2[e] = [P2[e - 1][0] * y20]
        prods = {key: [P1[key[0]][0] * P2[key[1]][0]] for key in self.need}
        F1, F2 = [], []
        for k in range(K):
            f1 = (N + 1) * self.L2 * prods[(0, N)][k]
            f2 = -(M + 1) * self.L1 * prods[(M, 0)][k]
            for (i, j), a in aser.items():
                if j:
                    pr = prods[(i, j - 1)]
                    f1 += j * sum(a[r] * pr[k - r] for r in range(k + 1) if a[r])
                if i:
                    pr = prods[(i - 1, j)]
                    f2 -= i * sum(a[r] * pr[k - r] for r in range(k + 1) if a[r])
            F1.append(f1)
            F2.append(f2)
            g1 = sum(zp[r] * F1[k - r] for r in range(k + 1))
            g2 = sum(zp[r] * F2[k - r] for r in range(k + 1))
            y1.append(g1 / (k + 1))
            y2.append(g2 / (k + 1))
            n = k + 1
            P1[0].append(mpmath.mpc(0))
            P2[0].append(mpmath.mpc(0))
            for e in range(2, M + 1):
                P1[e].append(sum(P1[e - 1][r] * y1[n - r] for r in range(n + 1)))
            for e in range(2, N + 1):
                P2[e].append(sum(P2[e - 1][r] * y2[n - r] for r in range(n + 1)))
            for (a, b) in self.need:
                pa, pb = P1[a], P2[b]
                prods[(a, b)].append(sum(pa[r] * pb[n - r] for r in range(n + 1)))
        return y1, y2

    def step_size(self, y1, y2, tol):
        """Largest h for which the last two terms are below tol (relative)."""
        K = self.order
        scale = max(abs(y1[0]), abs(y2[0]), mpmath.mpf(1))
        h = mpmath.inf
        for ser in (y1, y2):
            for k in (K - 1, K):
                c = abs(ser[k])
                if c:
                    h = min(h, (tol * scale / c) ** (mpmath.mpf(1) / k))
        return h

    @staticmethod
    def evaluate(ser, h):
        acc = mpmath.mpc(0)
        for c in reversed(ser):
            acc = acc * h + c
        return acc


def taylor_continue(spec, segments, y1, y2, tol=None, dps=30, r_switch=None, order=None,
                    max_steps=100000, record=True):
    """Integrate along path segments in mpmath; stop when |y1| >= r_switch.

    Returns (samples, status) with samples a list of (s, z, y1, y2) in
    mpmath numbers and status "end" or "blowup".
    """
    with mpmath.workdps(dps):
        tol = mpmath.mpf(tol) if tol is not None else mpmath.mpf(10) ** (-(dps - 5))
        stepper = TaylorStepper(spec, dps, order)
        y1, y2 = mpmath.mpc(y1), mpmath.mpc(y2)
        s_glob = mpmath.mpf(0)
        z0 = segments[0].taylor(0, 0, ctx=True)[0]
        samples = [(s_glob, z0, y1, y2)]
        steps = 0
        for seg in segments:
            L = seg.mp_length()
            s = mpmath.mpf(0)
            while s < L:
                zser = seg.taylor(s, stepper.order, ctx=True)
                c1, c2 = stepper.coefficients(zser, y1, y2)
                h = min(stepper.step_size(c1, c2, tol), L - s)
                if h < mpmath.mpf(10) ** (-(dps - 2)) * max(1, L):
                    raise StepUnderflow(complex(zser[0]))
                y1n = stepper.evaluate(c1, h)
                y2n = stepper.evaluate(c2, h)
                s = s + h
                s_glob = s_glob + h
                y1, y2 = y1n, y2n
                steps += 1
                if record:
                    samples.append((s_glob, seg.taylor(s, 0, ctx=True)[0], y1, y2))
                if r_switch is not None and abs(y1) >= r_switch:
                    if not record:
                        samples.append((s_glob, seg.taylor(s, 0, ctx=True)[0], y1, y2))
                    return samples, "blowup"
                if steps > max_steps:
                    raise RuntimeError("too many Taylor steps")
        if not record:
            samples.append((s_glob, segments[-1].taylor(segments[-1].length, 0, ctx=True)[0], y1, y2))
        return samples, "end"
