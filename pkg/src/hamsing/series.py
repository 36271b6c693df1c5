"""Formal algebraic (Puiseux) series solutions and resonance conditions.

Write t = (z - z0)^(1/R) with R = MN - 1 and

    y1 = t^-(N+1) * sum_n A[n] t^n,      y2 = t^-(M+1) * sum_n B[n] t^n.

Substituting into the Hamiltonian equations and collecting powers of t
gives, at every offset n >= 1, a 2x2 linear system for (A[n], B[n]) whose
determinant ((n-N-1)(n-M-1) - MN(M+1)(N+1)) / R^2 vanishes only at
n = -R and n = (M+1)(N+1).  At the latter the system is singular and
solvability is a condition on the coefficient functions.

The leading coefficient c = A[0] is kept symbolic modulo its defining
relation c^R = kappa, so one run covers every branch; the coefficient of
each power of c in the compatibility expression is a separate condition.
The expansion point stays symbolic: a[i,j,r] stands for the r-th
derivative of alpha_ij at z0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath

from .algebra import (
    CQ,
    AlgebraicScalar,
    DPoly,
    PolyRing,
    Q,
    alpha_symbol,
    free_symbol,
    symbol_key,
    to_number,
)
from .errors import (
    BranchInconsistency,
    ConditionsViolated,
    NonRationalDeterminant,
    TruncationTooShort,
)
from .model import CoeffPoly, HamiltonianSpec, generic_symbols, rhs, structural_constants


# ---------------------------------------------------------------------------
# leading order


def relation_constant(M, N, leading1, leading2):
    """kappa in c^(MN-1) = kappa for the leading coefficient of y1."""
    R = M * N - 1
    L1, L2 = CQ.coerce(leading1), CQ.coerce(leading2)
    return -(L2 * L1**N * CQ(R) ** (N + 1)).inverse()


@dataclass
class LeadingClasses:
    """The d inequivalent leading behaviours.

    ``c1`` is the adjoined root (an AlgebraicScalar generator), ``c2`` the
    exact expression (MN-1) L1 c^M; ``roots`` holds one numeric
    representative (c1, c2) per class.
    """

    R: int
    kappa: CQ
    d: int
    c1: AlgebraicScalar
    c2: AlgebraicScalar
    roots: list

    def __len__(self):
        return self.d


def all_leading_roots(M, N, leading1, leading2):
    """All R numeric roots of c^R = kappa, ordered by k in exp(i(arg+2 pi k)/R)."""
    R = M * N - 1
    kappa = complex(relation_constant(M, N, leading1, leading2))
    mod = abs(kappa) ** (1.0 / R)
    arg = cmath.phase(kappa)
    return [mod * cmath.exp(1j * (arg + 2 * math.pi * k) / R) for k in range(R)]


def branch_class_of(k, M, N):
    """Class index of the k-th root: c ~ c * zeta^(N+1), zeta^R = 1."""
    return k % structural_constants(M, N).d


def leading_coefficients(spec: HamiltonianSpec) -> LeadingClasses:
    M, N = spec.M, spec.N
    sc = structural_constants(M, N)
    R = sc.R
    kappa = relation_constant(M, N, spec.leading1, spec.leading2)
    c1 = AlgebraicScalar.generator(R, kappa)
    c2 = (c1**M) * (CQ(R) * spec.leading1)
    L1 = complex(spec.leading1)
    roots = all_leading_roots(M, N, spec.leading1, spec.leading2)
    reps = [(roots[b], R * L1 * roots[b] ** M) for b in range(sc.d)]
    return LeadingClasses(R, kappa, sc.d, c1, c2, reps)


# ---------------------------------------------------------------------------
# linearized recursion


def recursion_matrix(spec: HamiltonianSpec, n: int):
    """Linear operator acting on (A[n], B[n]) at offset n, and its determinant.

    Entries involving c are AlgebraicScalars; the determinant must reduce to
    a constant of Q(i) (NonRationalDeterminant otherwise).  Offset n = -R
    corresponds to the Kovalevskaya exponent -1.
    """
    M, N = spec.M, spec.N
    lc = leading_coefficients(spec)
    R = lc.R
    a11 = AlgebraicScalar([Fraction(n - N - 1, R)], R, lc.kappa)
    a22 = AlgebraicScalar([Fraction(n - M - 1, R)], R, lc.kappa)
    a12 = (lc.c2 ** (N - 1)) * (-N * (N + 1) * spec.leading2)
    a21 = (lc.c1 ** (M - 1)) * (M * (M + 1) * spec.leading1)
    det = a11 * a22 - a12 * a21
    if not det.is_rational():
        raise NonRationalDeterminant(f"determinant at offset {n} depends on c: {det}")
    return [[a11, a12], [a21, a22]], det.coeffs[0]


def determinant_polynomial(M, N):
    """Coefficients (ascending in n) of R^2 * det at offset n."""
    # (n-N-1)(n-M-1) - MN(M+1)(N+1)
    return [(N + 1) * (M + 1) - M * N * (M + 1) * (N + 1), -(M + N + 2), 1]


def resonance_offsets(M, N):
    """Integer offsets where the recursion determinant vanishes."""
    R = M * N - 1
    return [-R, (M + 1) * (N + 1)]


# ---------------------------------------------------------------------------
# symbolic series


@dataclass
class ResonanceCondition:
    expression: DPoly
    order: int
    offset: int
    c_power: int = 0

    def text(self):
        return self.expression.to_text()

    def to_json(self):
        return {
            "order": self.order,
            "offset": self.offset,
            "c_power": self.c_power,
            "expression": self.expression.to_text(),
            "monomials": self.expression.monomial_list(),
        }


@dataclass
class PuiseuxSeries:
    """Formal series about z0 in t = (z - z0)^(1/ramification).

    coeffs1[n] multiplies t^(k1 + n), coeffs2[n] multiplies t^(k2 + n).
    Symbolic series hold DPoly coefficients; numeric ones complex (or mpc).
    """

    M: int
    N: int
    base_point: object
    ramification: int
    k1: int
    k2: int
    coeffs1: list
    coeffs2: list
    free_parameters: list = field(default_factory=list)
    numeric: bool = False
    branch: object = None
    ring: PolyRing = None
    root: complex = None

    @property
    def K(self):
        """Index of the last y1 coefficient."""
        return self.k1 + len(self.coeffs1) - 1

    def collapsed(self):
        """Coefficients (C1, C2) in powers of (z-z0)^(d/R), keyed by k."""
        d = structural_constants(self.M, self.N).d
        C1 = {(self.k1 + n) // d: a for n, a in enumerate(self.coeffs1) if (self.k1 + n) % d == 0}
        C2 = {(self.k2 + n) // d: b for n, b in enumerate(self.coeffs2) if (self.k2 + n) % d == 0}
        return C1, C2

    # numeric evaluation ---------------------------------------------------
    def _tpoly(self, coeffs, t):
        acc = 0 * t
        for a in reversed(coeffs):
            acc = acc * t + a
        return acc

    def _tpoly_deriv(self, coeffs, t, k0):
        # d/dt of t^k0 * sum a_n t^n = t^(k0-1) * sum (k0+n) a_n t^n
        acc = 0 * t
        for n in range(len(coeffs) - 1, -1, -1):
            acc = acc * t + (k0 + n) * coeffs[n]
        return acc

    def evaluate_t(self, t):
        """(y1, y2) at z = z0 + t^R."""
        if not self.numeric:
            raise TypeError("instantiate the series first")
        y1 = self._tpoly(self.coeffs1, t) * t**self.k1
        y2 = self._tpoly(self.coeffs2, t) * t**self.k2
        return y1, y2

    def derivative_t(self, t):
        """(dy1/dz, dy2/dz) at z = z0 + t^R."""
        R = self.ramification
        s = t ** (1 - R) / R
        d1 = self._tpoly_deriv(self.coeffs1, t, self.k1) * t ** (self.k1 - 1)
        d2 = self._tpoly_deriv(self.coeffs2, t, self.k2) * t ** (self.k2 - 1)
        return d1 * s, d2 * s

    def evaluate(self, z, t_branch=None):
        """Evaluate at z using the principal R-th root of z - z0 (or a
        supplied branch function)."""
        dz = z - self.base_point
        t = dz ** (1.0 / self.ramification) if t_branch is None else t_branch(dz)
        return self.evaluate_t(t)


class SeriesEngine:
    """Order-by-order solver for the formal series of one system template.

    The template is (M, N, L1, L2, keys); alpha_ij are represented by
    derivative symbols a[i,j,r].
    """

    def __init__(self, M, N, leading1=1, leading2=1, keys=None):
        self.M, self.N = M, N
        self.sc = structural_constants(M, N)
        self.R = self.sc.R
        self.L1, self.L2 = CQ.coerce(leading1), CQ.coerce(leading2)
        self.kappa = relation_constant(M, N, self.L1, self.L2)
        self.ring = PolyRing(self.R, self.kappa)
        if keys is None:
            keys = generic_symbols(M, N)
        self.keys = sorted(k for k in keys if k != (0, 0))
        self.nr = (M + 1) * (N + 1)

    @classmethod
    def for_spec(cls, spec: HamiltonianSpec):
        return cls(spec.M, spec.N, spec.leading1, spec.leading2, spec.alphas.keys())

    def const(self, x):
        return DPoly.const(x, self.ring)

    def _alpha_taylor(self, i, j, r):
        return DPoly.sym(alpha_symbol(i, j, r), self.ring).scale(Q(1, factorial(r)))

    def run(self, K, free_values=None):
        """Compute coefficients through y1 index K.

        Returns (coeffs1, coeffs2, conditions, free_parameters).  At the
        resonance the compatibility expression is recorded and A[nr] is set
        to the free parameter f[nr] (or to free_values[nr] if supplied).
        """
        M, N, R = self.M, self.N, self.R
        if K < -(N + 1):
            raise TruncationTooShort(f"K={K} < -(N+1)")
        n_max = K + N + 1
        ring = self.ring
        one = self.const(1)
        zero = DPoly({}, ring)
        c = DPoly.c_power(1, ring)
        A = [c]
        B = [c_pow(ring, M).__mul__(self.const(CQ(R) * self.L1))]
        # powers P1[e][n] = [t^n] Y1^e, P2 likewise
        P1 = {0: [one], 1: [A[0]]}
        P2 = {0: [one], 1: [B[0]]}
        for e in range(2, M + 1):
            P1[e] = [P1[e - 1][0] * A[0]]
        for e in range(2, N + 1):
            P2[e] = [P2[e - 1][0] * B[0]]
        # products needed: (i, j-1) and (i-1, j)
        needed = set()
        deltas = {}
        for (i, j) in self.keys:
            deltas[(i, j)] = self.nr - i * (N + 1) - j * (M + 1)
            if j >= 1:
                needed.add((i, j - 1))
            if i >= 1:
                needed.add((i - 1, j))
        for (a, b) in needed:
            if a > M or b > N:
                raise ValueError("product degree beyond power tables")
        prods = {key: [P1[key[0]][0] * P2[key[1]][0]] for key in needed}
        taylor = {}
        rmax = n_max // R + 1
        for (i, j) in self.keys:
            taylor[(i, j)] = [self._alpha_taylor(i, j, r) for r in range(rmax + 1)]

        g = (B[0] ** (N - 1)) * self.const(-N * (N + 1) * self.L2)  # coefficient of B[n] in eq1 (moved left)
        h = (A[0] ** (M - 1)) * self.const(M * (M + 1) * self.L1)  # coefficient of A[n] in eq2
        # eq1: (n-N-1)/R A + g B = S1 ; eq2: h A + (n-M-1)/R B = S2
        conditions = []
        free = []
        free_values = free_values or {}

        for n in range(1, n_max + 1):
            A.append(zero)
            B.append(zero)
            P1[0].append(zero)
            P2[0].append(zero)
            for e in range(1, max(M, N) + 1):
                if e <= M:
                    P1[e].append(_conv_last(P1[e - 1], A, n))
                if e <= N:
                    P2[e].append(_conv_last(P2[e - 1], B, n))
            S1 = P2[N][n] * self.const((N + 1) * self.L2)
            S2 = P1[M][n] * self.const(-(M + 1) * self.L1)
            for (i, j) in self.keys:
                delta = deltas[(i, j)]
                for r, ar in enumerate(taylor[(i, j)]):
                    m = n - delta - r * R
                    if m < 0:
                        break
                    if j >= 1:
                        S1 = S1 + ar * prods[(i, j - 1)][m] * self.const(j)
                    if i >= 1:
                        S2 = S2 - ar * prods[(i - 1, j)][m] * self.const(i)
            a11 = Fraction(n - N - 1, R)
            a22 = Fraction(n - M - 1, R)
            if n == self.nr:
                expr = S1.scale(Q(a22.numerator, a22.denominator)) - g * S2
                if expr:
                    conditions.append(expr)
                fsym = free_symbol(n)
                free.append((1, n - N - 1))
                An = free_values.get(n, DPoly.sym(fsym, ring))
                if not isinstance(An, DPoly):
                    An = self.const(An)
                Bn = (S2 - h * An).scale(1 / Q(a22.numerator, a22.denominator))
            else:
                det = g * h
                det = self.const(CQ(a11 * a22)) - det
                det_val = _rational_value(det, n)
                An = (S1.scale(Q(a22.numerator, a22.denominator)) - g * S2).scale(1 / det_val)
                Bn = (S2.scale(Q(a11.numerator, a11.denominator)) - h * S1).scale(1 / det_val)
            A[n] = An
            B[n] = Bn
            for e in range(1, max(M, N) + 1):
                if e <= M:
                    P1[e][n] = P1[e][n] + (A[0] ** (e - 1)) * An * self.const(e)
                if e <= N:
                    P2[e][n] = P2[e][n] + (B[0] ** (e - 1)) * Bn * self.const(e)
            for (a, b) in needed:
                prods[(a, b)].append(_conv_pair(P1[a], P2[b], n))
        return A, B, conditions, free

    def compatibility(self):
        """The compatibility expression at the resonance (DPoly in c and a[...])."""
        K = self.nr - self.N - 1
        _, _, conds, _ = self.run(K)
        return conds[0] if conds else DPoly({}, self.ring)


def c_pow(ring, k):
    return DPoly.c_power(k, ring)


def _conv_last(prev, Y, n):
    # [t^n] of (sum prev) * Y where Y[n] is currently zero
    acc = DPoly({}, Y[0].ring)
    for k in range(0, n + 1):
        if k < len(Y) and n - k < len(prev):
            y = Y[k]
            p = prev[n - k]
            if y.terms and p.terms:
                acc = acc + y * p
    return acc


def _conv_pair(P, Qs, n):
    acc = DPoly({}, P[0].ring)
    for k in range(0, n + 1):
        a, b = P[k], Qs[n - k]
        if a.terms and b.terms:
            acc = acc + a * b
    return acc


def _rational_value(det, n):
    try:
        val = det.constant_value()
    except ValueError:
        raise NonRationalDeterminant(f"determinant at offset {n} depends on c or symbols") from None
    if val.im != 0:
        raise NonRationalDeterminant(f"determinant at offset {n} is not real: {val}")
    if val.re == 0:
        raise NonRationalDeterminant(f"unexpected singular determinant at offset {n}")
    return val.re


# ---------------------------------------------------------------------------
# public operations


def derive_formal_series(spec_or_engine, branch=None, K=None, free_values=None):
    """Symbolic series through y1 index K plus the resonance conditions.

    ``spec_or_engine`` is a HamiltonianSpec (its key set and leading
    constants define the template) or a SeriesEngine.  Conditions are the
    nonzero coefficients of the powers of c in the compatibility
    expression, canonicalized.
    """
    engine = spec_or_engine if isinstance(spec_or_engine, SeriesEngine) else SeriesEngine.for_spec(spec_or_engine)
    M, N = engine.M, engine.N
    if K is None:
        K = engine.nr - N - 1
    A, B, conds, free = engine.run(K, free_values)
    conditions = []
    for expr in conds:
        conditions.extend(split_conditions(expr, engine))
    series = PuiseuxSeries(
        M=M,
        N=N,
        base_point="z0",
        ramification=engine.R,
        k1=-(N + 1),
        k2=-(M + 1),
        coeffs1=A,
        coeffs2=B[: len(A)],
        free_parameters=free,
        numeric=False,
        branch=branch,
        ring=engine.ring,
    )
    return series, conditions


def split_conditions(expr: DPoly, engine: SeriesEngine):
    """Split a compatibility expression into per-power-of-c conditions.

    By the symmetry t -> zeta t (zeta^R = 1), which permutes the leading
    coefficient within its branch class, the nonzero powers of c must share
    one residue class modulo R/d; a violation signals an engine bug.  The d
    branch classes then see the d Vandermonde combinations of these
    coefficients, so the union over classes is the set of coefficients.
    """
    sc = engine.sc
    period = sc.R // sc.d
    powers = expr.c_exponents()
    if len({e % period for e in powers}) > 1:
        raise BranchInconsistency(f"compatibility expression mixes residues {powers} mod {period}")
    out = []
    k = engine.nr - engine.N - 1
    seen = set()
    for e in powers:
        cond = expr.c_coefficient(e).canonical()
        key = frozenset(cond.terms.items())
        if cond and key not in seen:
            seen.add(key)
            out.append(ResonanceCondition(cond, order=k, offset=engine.nr, c_power=e))
    return out


def per_branch_expressions(expr: DPoly, engine: SeriesEngine, values, digits=None):
    """Numeric compatibility value for every leading root, grouped by class.

    ``values`` maps symbol ids to numbers.  Returns {class: [values]}.
    """
    M, N = engine.M, engine.N
    roots = all_leading_roots(M, N, engine.L1, engine.L2)
    out = {}
    for k, c in enumerate(roots):
        out.setdefault(branch_class_of(k, M, N), []).append(expr.evaluate(values, c))
    return out


def resonance_conditions(M, N, leading1=1, leading2=1):
    """Canonical conditions for the generic system of class (M, N) with the
    given constant leading coefficients (normalized: both 1)."""
    if not 1 <= M <= N or M * N <= 1:
        raise ValueError("need 1 <= M <= N and MN > 1")
    engine = SeriesEngine(M, N, leading1, leading2, generic_symbols(M, N))
    expr = engine.compatibility()
    conds = split_conditions(expr, engine)
    return sorted(conds, key=lambda rc: rc.expression.to_text())


def conditions_for_spec(spec: HamiltonianSpec):
    """Conditions for the spec's own template (key set and leading constants)."""
    engine = SeriesEngine.for_spec(spec)
    return split_conditions(engine.compatibility(), engine)


# ---------------------------------------------------------------------------
# concrete coefficient functions


def alpha_jet_polys(spec: HamiltonianSpec, rmax):
    """Map a[i,j,r] symbol ids -> CoeffPoly alpha_ij^(r)(z)."""
    out = {}
    for (i, j), poly in spec.alphas.items():
        p = poly
        for r in range(rmax + 1):
            out[alpha_symbol(i, j, r)] = p
            p = p.derivative()
    return out


def to_coeffpoly(expr: DPoly, polys):
    """Substitute CoeffPoly values for symbols (missing symbols are 0)."""
    total = CoeffPoly()
    for (ce, ie, mono), v in expr.terms.items():
        if ce:
            raise ValueError("expression depends on c")
        term = CoeffPoly([CQ(0, v) if ie else CQ(v)])
        for sid in mono:
            p = polys.get(sid)
            if p is None or p.is_zero():
                term = CoeffPoly()
                break
            term = term * p
        total = total + term
    return total


def _max_derivative_order(exprs):
    r = 0
    for e in exprs:
        for sid in e.symbols():
            key = symbol_key(sid)
            if key[0] == "a":
                r = max(r, key[3])
    return r


def condition_residues(spec: HamiltonianSpec, conditions=None):
    """Each condition evaluated on the spec's coefficient functions, as a
    CoeffPoly in z (all zero iff the spec satisfies its conditions)."""
    if conditions is None:
        conditions = conditions_for_spec(spec)
    polys = alpha_jet_polys(spec, _max_derivative_order([c.expression for c in conditions]))
    return [(c, to_coeffpoly(c.expression, polys)) for c in conditions]


def check_conditions(spec: HamiltonianSpec):
    """Raise ConditionsViolated unless every condition vanishes identically."""
    bad = [(c.text(), res) for c, res in condition_residues(spec) if not res.is_zero()]
    if bad:
        raise ConditionsViolated(bad)
    return True


def instantiate_numeric(series: PuiseuxSeries, spec: HamiltonianSpec, z0, root, free_params=None,
                        dps=None, check=True):
    """Numeric series at z0 for the leading root ``root`` (c^R ~ kappa).

    free_params: values for the resonance parameters (default 0).  With
    ``dps`` the coefficients are mpmath numbers at that precision.
    """
    if check:
        check_conditions(spec)
    conv = complex if dps is None else mpmath.mpc
    ctx = mpmath.workdps(dps) if dps else _nullcontext()
    with ctx:
        z0c = conv(z0)
        rootc = conv(root)
        R = series.ramification
        kappa = complex(relation_constant(spec.M, spec.N, spec.leading1, spec.leading2))
        if abs(complex(rootc) ** R - kappa) > 1e-8 * max(1.0, abs(kappa)):
            raise ValueError(f"root {root} does not satisfy c^{R} = {kappa}")
        if dps:
            kappa_mp = to_number(relation_constant(spec.M, spec.N, spec.leading1, spec.leading2), mpmath.mpc)
            for _ in range(8):
                rootc = rootc - (rootc**R - kappa_mp) / (R * rootc ** (R - 1))
        rmax = _max_derivative_order(series.coeffs1 + series.coeffs2)
        values = {}
        for (i, j), poly in spec.alphas.items():
            p = poly
            for r in range(rmax + 1):
                values[alpha_symbol(i, j, r)] = p.evaluate(z0c, None if dps is None else mpmath.mpc)
                p = p.derivative()
        free_params = list(free_params or [])
        for idx, (_, k) in enumerate(series.free_parameters):
            n = k + spec.N + 1
            values[free_symbol(n)] = conv(free_params[idx]) if idx < len(free_params) else conv(0)
        c1 = [e.evaluate(values, rootc, convert=conv) for e in series.coeffs1]
        c2 = [e.evaluate(values, rootc, convert=conv) for e in series.coeffs2]
    return PuiseuxSeries(
        M=series.M,
        N=series.N,
        base_point=z0c,
        ramification=series.ramification,
        k1=series.k1,
        k2=series.k2,
        coeffs1=c1,
        coeffs2=c2,
        free_parameters=list(series.free_parameters),
        numeric=True,
        branch=series.branch,
        root=rootc,
    )


class _nullcontext:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def numeric_series(spec, z0, K=10, branch=0, root=None, free_params=None, dps=None, check=True):
    """Convenience: derive symbolically then instantiate at z0."""
    series, _ = derive_formal_series(spec, branch=branch, K=K)
    if root is None:
        root = all_leading_roots(spec.M, spec.N, spec.leading1, spec.leading2)[branch]
    return instantiate_numeric(series, spec, z0, root, free_params, dps=dps, check=check)


def series_residual(spec: HamiltonianSpec, series: PuiseuxSeries, t, dps=None):
    """(y1' - F1, y2' - F2) of the truncated series at z = z0 + t^R.

    Evaluated in mpmath at ``dps`` digits when given (the individual terms
    are of size |t|^(-N(M+1)) and cancel to the truncation order).
    """
    if dps is None:
        y1, y2 = series.evaluate_t(t)
        d1, d2 = series.derivative_t(t)
        z = series.base_point + t**series.ramification
        f1, f2 = rhs(spec, z, y1, y2)
        return d1 - f1, d2 - f2
    with mpmath.workdps(dps):
        t = mpmath.mpc(t)
        mp_series = PuiseuxSeries(**{**series.__dict__, "coeffs1": [mpmath.mpc(a) for a in series.coeffs1],
                                     "coeffs2": [mpmath.mpc(b) for b in series.coeffs2]})
        y1, y2 = mp_series.evaluate_t(t)
        d1, d2 = mp_series.derivative_t(t)
        z = mpmath.mpc(series.base_point) + t**series.ramification
        f1, f2 = rhs(spec, z, y1, y2, convert=mpmath.mpc)
        return d1 - f1, d2 - f2


def residual_scale(spec, t):
    """Magnitude of the leading terms, |t|^(-N(M+1))."""
    return abs(t) ** (-spec.N * (spec.M + 1))


def predicted_residual_exponent(spec, K):
    """Exponent e with |residual| ~ |t|^e for a series truncated at y1 index K.

    Only offsets divisible by d carry coefficients, so the first missing
    offset is the next multiple of d after K + N + 1.
    """
    d = structural_constants(spec.M, spec.N).d
    nK = K + spec.N + 1
    nstar = (nK // d + 1) * d
    return nstar - spec.N * (spec.M + 1)


def suggested_dps(spec, K, t, guard=20):
    """Working digits so that a residual of the predicted order survives
    cancellation among terms of size |t|^(-N(M+1)) (at t and t/2)."""
    lt = -math.log10(abs(t) / 2)
    span = spec.N * (spec.M + 1) + max(predicted_residual_exponent(spec, K), 0)
    return max(30, int(math.ceil(span * lt)) + guard)


def residual_exponent(spec, series, t, dps=None):
    """log2 ratio of residual norms at t and t/2 (the measured exponent).

    The series coefficients should carry at least ``dps`` digits.
    """
    if dps is None:
        dps = suggested_dps(spec, series.K, t)
    r1 = series_residual(spec, series, t, dps=dps)
    r2 = series_residual(spec, series, t / 2, dps=dps)
    with mpmath.workdps(dps):
        n1 = max(abs(r1[0]), abs(r1[1]))
        n2 = max(abs(r2[0]), abs(r2[1]))
        return float(mpmath.log(n1 / n2, 2))


# ---------------------------------------------------------------------------
# expected forms (formal differentiation helpers)


def a_sym(i, j, r=0):
    return DPoly.sym(alpha_symbol(i, j, r))


def nth_derivative(expr: DPoly, r):
    for _ in range(r):
        expr = expr.derivative()
    return expr


def same_condition_set(found, expected):
    """Compare two lists of DPoly up to nonzero constant multiples."""
    canon = lambda ps: sorted(p.canonical().to_text() for p in ps if p)
    return canon(found) == canon(expected)


__all__ = [
    "LeadingClasses",
    "PuiseuxSeries",
    "ResonanceCondition",
    "SeriesEngine",
    "leading_coefficients",
    "relation_constant",
    "all_leading_roots",
    "branch_class_of",
    "recursion_matrix",
    "determinant_polynomial",
    "resonance_offsets",
    "derive_formal_series",
    "split_conditions",
    "resonance_conditions",
    "conditions_for_spec",
    "condition_residues",
    "check_conditions",
    "instantiate_numeric",
    "numeric_series",
    "series_residual",
    "predicted_residual_exponent",
    "residual_exponent",
    "residual_scale",
    "suggested_dps",
    "a_sym",
    "nth_derivative",
    "same_condition_set",
]
