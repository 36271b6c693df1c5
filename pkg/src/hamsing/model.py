"""Polynomial Hamiltonian systems in two dependent variables.

A system is given by

    H(z, y1, y2) = L1 y1^(M+1) + L2 y2^(N+1) + sum_{(i,j) in I} alpha_ij(z) y1^i y2^j

with constant leading coefficients L1, L2, polynomial coefficient functions
alpha_ij and the index set I = {(i, j) : i(N+1) + j(M+1) < (N+1)(M+1)}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

import numpy as np

from .algebra import CQ, as_rational, exact_root, to_number
from .errors import (
    DegenerateClass,
    HamsingError,
    IndexOutsideClass,
    NonpositiveDegrees,
    NotNormalizable,
    ZeroLeadingCoefficient,
)


class RoleOrderError(HamsingError):
    """N < M; present the system with the roles of y1 and y2 swapped."""


class CoeffPoly:
    """Polynomial in z with exact complex-rational coefficients (ascending)."""

    __slots__ = ("coeffs", "_cplx")

    def __init__(self, coeffs=()):
        cs = [CQ.coerce(c) if not isinstance(c, dict) else CQ.from_json(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)
        self._cplx = None

    @classmethod
    def constant(cls, value):
        return cls([value])

    @classmethod
    def z(cls):
        return cls([0, 1])

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = other if isinstance(other, CoeffPoly) else CoeffPoly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (CQ(0),) * (n - len(self.coeffs))
        b = other.coeffs + (CQ(0),) * (n - len(other.coeffs))
        return CoeffPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CoeffPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = other if isinstance(other, CoeffPoly) else CoeffPoly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CoeffPoly):
            o = CQ.coerce(other)
            return CoeffPoly([c * o for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return CoeffPoly()
        out = [CQ(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return CoeffPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = CoeffPoly([1])
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, CoeffPoly):
            other = CoeffPoly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    # queries ----------------------------------------------------------
    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -1

    def is_constant(self):
        return len(self.coeffs) <= 1

    def derivative(self, r=1):
        cs = list(self.coeffs)
        for _ in range(r):
            cs = [c * k for k, c in enumerate(cs)][1:]
        return CoeffPoly(cs)

    def __call__(self, z):
        """Exact evaluation at a CQ / rational / int argument."""
        out = CQ(0)
        z = CQ.coerce(z)
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def complex_coeffs(self):
        if self._cplx is None:
            self._cplx = [complex(c) for c in self.coeffs]
        return self._cplx

    def evaluate(self, z, convert=None):
        """Numeric Horner evaluation (complex, or via ``convert`` e.g. mpmath)."""
        cs = self.complex_coeffs() if convert is None else [to_number(c, convert) for c in self.coeffs]
        out = 0 * z
        for c in reversed(cs):
            out = out * z + c
        return out

    def taylor(self, z0, order, convert=None):
        """Numeric Taylor coefficients alpha^(r)(z0)/r!, r = 0..order."""
        out = []
        p = self
        fact = 1
        for r in range(order + 1):
            if r:
                fact *= r
            out.append(p.evaluate(z0, convert) / fact if p.coeffs else 0 * z0)
            p = p.derivative()
        return out

    def roots(self):
        if self.degree < 1:
            return []
        return list(np.roots(self.complex_coeffs()[::-1]))

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, (int, float, str)) or (isinstance(obj, dict)):
            return cls([CQ.from_json(obj)])
        return cls([CQ.from_json(c) for c in obj])

    def __repr__(self):
        if not self.coeffs:
            return "CoeffPoly(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            terms.append(f"{c}" + ("" if k == 0 else "*z" if k == 1 else f"*z^{k}"))
        return "CoeffPoly(" + " + ".join(terms) + ")"


def build_index_set(M: int, N: int):
    """All (i, j) in N^2 with i(N+1) + j(M+1) < (N+1)(M+1)."""
    if M < 1 or N < 1:
        raise NonpositiveDegrees(f"M={M}, N={N} must be positive")
    bound = (N + 1) * (M + 1)
    return {(i, j) for i in range(M + 1) for j in range(N + 1) if i * (N + 1) + j * (M + 1) < bound}


def weight(i, j, M, N):
    return i * (N + 1) + j * (M + 1)


@dataclass(frozen=True)
class StructuralConstants:
    M: int
    N: int
    p: Fraction
    q: Fraction
    d: int
    ramification: int

    @property
    def R(self):
        """MN - 1, the denominator of the fractional exponents."""
        return self.M * self.N - 1

    @property
    def n(self):
        return (self.N + 1) // self.d

    @property
    def m(self):
        return (self.M + 1) // self.d

    @property
    def resonance_offset(self):
        return (self.M + 1) * (self.N + 1)


def structural_constants(M: int, N: int) -> StructuralConstants:
    if M < 1 or N < 1:
        raise NonpositiveDegrees(f"M={M}, N={N} must be positive")
    R = M * N - 1
    if R == 0:
        raise DegenerateClass("MN = 1: leading-order balance is degenerate")
    d = gcd(gcd(M + 1, N + 1), R)
    return StructuralConstants(
        M=M,
        N=N,
        p=Fraction(-(N + 1), R),
        q=Fraction(-(M + 1), R),
        d=d,
        ramification=R // d,
    )


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    M: int
    N: int
    leading1: CQ
    leading2: CQ
    alphas: dict = field(default_factory=dict)
    normalized: bool = False
    name: str = ""

    def alpha(self, i, j) -> CoeffPoly:
        return self.alphas.get((i, j), CoeffPoly())

    @property
    def keys(self):
        return sorted(self.alphas)

    @property
    def constants(self):
        return structural_constants(self.M, self.N)

    def is_autonomous(self):
        return all(p.is_constant() for p in self.alphas.values())

    def __eq__(self, other):
        if not isinstance(other, HamiltonianSpec):
            return NotImplemented
        return (
            (self.M, self.N, self.leading1, self.leading2) == (other.M, other.N, other.leading1, other.leading2)
            and self.alphas == other.alphas
        )

    # numerics ---------------------------------------------------------
    def alpha_values(self, z, convert=None):
        return {k: p.evaluate(z, convert) for k, p in self.alphas.items()}


def make_spec(M, N, leading1=1, leading2=1, alphas=None, name=""):
    """Build and validate a spec from loose inputs (numbers or CoeffPoly)."""
    alphas = alphas or {}
    polys = {}
    for key, val in alphas.items():
        if isinstance(key, str):
            key = tuple(int(x) for x in key.split(","))
        if not isinstance(val, CoeffPoly):
            val = CoeffPoly(val) if isinstance(val, (list, tuple)) else CoeffPoly([val])
        polys[tuple(key)] = val
    spec = HamiltonianSpec(M, N, CQ.coerce(leading1), CQ.coerce(leading2), polys, name=name)
    return validate_spec(spec)


def validate_spec(spec: HamiltonianSpec) -> HamiltonianSpec:
    """Check class membership and return a canonical copy with the
    normalized flag computed."""
    M, N = spec.M, spec.N
    if not isinstance(M, int) or not isinstance(N, int) or M < 1 or N < 1:
        raise NonpositiveDegrees(f"M={M}, N={N} must be positive integers")
    if N < M:
        raise RoleOrderError(f"N={N} < M={M}; swap the roles of y1 and y2 (see swap_roles)")
    if not spec.leading1 or not spec.leading2:
        raise ZeroLeadingCoefficient("leading coefficients must be nonzero")
    index = build_index_set(M, N)
    bad = [k for k in spec.alphas if tuple(k) not in index]
    if bad:
        raise IndexOutsideClass(bad, M, N)
    alphas = {tuple(k): CoeffPoly(p.coeffs) for k, p in spec.alphas.items() if not p.is_zero()}
    normalized = (
        spec.leading1 == CQ(1)
        and spec.leading2 == CQ(1)
        and (0, N) not in alphas
        and (M != N or (M, 0) not in alphas)
    )
    return HamiltonianSpec(M, N, spec.leading1, spec.leading2, alphas, normalized, spec.name)


def swap_roles(M, N, leading1, leading2, alphas):
    """Exchange y1 and y2: H~(y1, y2) = -H(y2, y1), so (M, N) -> (N, M)."""
    new_alphas = {(j, i): -(p if isinstance(p, CoeffPoly) else CoeffPoly([p])) for (i, j), p in alphas.items()}
    return make_spec(N, M, -CQ.coerce(leading2), -CQ.coerce(leading1), new_alphas)


# ---------------------------------------------------------------------------
# evaluation


def rhs(spec: HamiltonianSpec, z, y1, y2, convert=None):
    """(dH/dy2, -dH/dy1) at (z, y1, y2)."""
    M, N = spec.M, spec.N
    L1 = to_number(spec.leading1, convert)
    L2 = to_number(spec.leading2, convert)
    f1 = (N + 1) * L2 * y2**N
    f2 = -(M + 1) * L1 * y1**M
    for (i, j), poly in spec.alphas.items():
        a = poly.evaluate(z, convert)
        if j:
            f1 = f1 + j * a * y1**i * y2 ** (j - 1)
        if i:
            f2 = f2 - i * a * y1 ** (i - 1) * y2**j
    return f1, f2


def hamiltonian_value(spec: HamiltonianSpec, z, y1, y2, convert=None):
    L1 = to_number(spec.leading1, convert)
    L2 = to_number(spec.leading2, convert)
    h = L1 * y1 ** (spec.M + 1) + L2 * y2 ** (spec.N + 1)
    for (i, j), poly in spec.alphas.items():
        h = h + poly.evaluate(z, convert) * y1**i * y2**j
    return h


def hamiltonian_exact(spec: HamiltonianSpec, z, y1, y2):
    """Exact H, all arguments complex rationals."""
    z, y1, y2 = CQ.coerce(z), CQ.coerce(y1), CQ.coerce(y2)
    h = spec.leading1 * y1 ** (spec.M + 1) + spec.leading2 * y2 ** (spec.N + 1)
    for (i, j), poly in spec.alphas.items():
        h = h + poly(z) * y1**i * y2**j
    return h


def rhs_exact(spec: HamiltonianSpec, z, y1, y2):
    z, y1, y2 = CQ.coerce(z), CQ.coerce(y1), CQ.coerce(y2)
    M, N = spec.M, spec.N
    f1 = (N + 1) * spec.leading2 * y2**N
    f2 = -(M + 1) * spec.leading1 * y1**M
    for (i, j), poly in spec.alphas.items():
        a = poly(z)
        if j:
            f1 = f1 + j * a * y1**i * y2 ** (j - 1)
        if i:
            f2 = f2 - i * a * y1 ** (i - 1) * y2**j
    return f1, f2


def hamiltonian_gradient_exact(spec, z, y1, y2):
    """(dH/dy1, dH/dy2) exactly."""
    f1, f2 = rhs_exact(spec, z, y1, y2)
    return -f2, f1


def fixed_singularities(spec_or_leading, leading2=None):
    """Zeros of the leading coefficient functions.

    Accepts a spec (constant leading coefficients, so the set is empty) or a
    pair of leading coefficients given as CoeffPoly / constants.
    """
    if isinstance(spec_or_leading, HamiltonianSpec):
        leads = [spec_or_leading.leading1, spec_or_leading.leading2]
    else:
        leads = [spec_or_leading, leading2 if leading2 is not None else 1]
    roots = []
    for lead in leads:
        if isinstance(lead, CoeffPoly):
            roots.extend(lead.roots())
    out = []
    for r in roots:
        if all(abs(r - s) > 1e-12 for s in out):
            out.append(complex(r))
    return out


# ---------------------------------------------------------------------------
# normalization


@dataclass(frozen=True)
class NormalizationMap:
    """y1 = scale1 * (Y1 - shift1(z)), y2 = scale2 * (Y2 - shift2(z))."""

    scale1: CQ
    scale2: CQ
    shift1: CoeffPoly
    shift2: CoeffPoly

    def to_normalized(self, z, y1, y2):
        return (
            y1 / complex(self.scale1) + self.shift1.evaluate(z),
            y2 / complex(self.scale2) + self.shift2.evaluate(z),
        )

    def from_normalized(self, z, Y1, Y2):
        return (
            complex(self.scale1) * (Y1 - self.shift1.evaluate(z)),
            complex(self.scale2) * (Y2 - self.shift2.evaluate(z)),
        )


def _full_terms(spec):
    terms = {k: CoeffPoly(p.coeffs) for k, p in spec.alphas.items()}
    terms[(spec.M + 1, 0)] = CoeffPoly([spec.leading1])
    terms[(0, spec.N + 1)] = CoeffPoly([spec.leading2])
    return terms


def _shift_variable(terms, which, s: CoeffPoly):
    """Substitute y_which -> y_which - s(z) in a term dict."""
    out = {}
    neg_s = -s
    for (i, j), a in terms.items():
        e = i if which == 1 else j
        for k in range(e + 1):
            coeff = a * comb(e, k) * neg_s ** (e - k)
            key = (k, j) if which == 1 else (i, k)
            out[key] = out.get(key, CoeffPoly()) + coeff
    return {k: v for k, v in out.items() if not v.is_zero()}


def normalize(spec: HamiltonianSpec):
    """Transform to leading coefficients 1 with alpha_{0,N} = 0 (and
    alpha_{M,0} = 0 when M = N).

    The rescaling needs an exact (MN-1)-th root of 1/(L2 L1^N) in Q(i);
    NotNormalizable is raised otherwise.  The shifts are polynomial in z and
    are made canonical by adding -s'(z) y1 (resp. r'(z) y2) to H.
    Returns (normalized spec, NormalizationMap).
    """
    M, N = spec.M, spec.N
    R = M * N - 1
    if R == 0:
        raise DegenerateClass("MN = 1")
    target = (spec.leading2 * spec.leading1**N).inverse()
    lam1 = exact_root(target, R)
    if lam1 is None:
        raise NotNormalizable(f"no exact {R}-th root of {target} in Q(i)")
    lam2 = spec.leading1 * lam1**M
    denom = (lam1 * lam2).inverse()
    terms = {(i, j): a * (lam1**i * lam2**j * denom) for (i, j), a in _full_terms(spec).items()}
    # y2 shift removes the y2^N term
    shift2 = terms.get((0, N), CoeffPoly()) * Fraction(1, N + 1)
    if not shift2.is_zero():
        terms = _shift_variable(terms, 2, shift2)
        terms[(1, 0)] = terms.get((1, 0), CoeffPoly()) - shift2.derivative()
    shift1 = CoeffPoly()
    if M == N:
        shift1 = terms.get((M, 0), CoeffPoly()) * Fraction(1, M + 1)
        if not shift1.is_zero():
            terms = _shift_variable(terms, 1, shift1)
            terms[(0, 1)] = terms.get((0, 1), CoeffPoly()) + shift1.derivative()
    lead1 = terms.pop((M + 1, 0))
    lead2 = terms.pop((0, N + 1))
    assert lead1 == CoeffPoly([1]) and lead2 == CoeffPoly([1])
    terms.pop((0, 0), None)
    terms = {k: v for k, v in terms.items() if not v.is_zero()}
    new = validate_spec(HamiltonianSpec(M, N, CQ(1), CQ(1), terms, name=spec.name))
    return new, NormalizationMap(lam1, lam2, shift1, shift2)


# ---------------------------------------------------------------------------
# JSON


def spec_to_json(spec: HamiltonianSpec) -> dict:
    out = {
        "M": spec.M,
        "N": spec.N,
        "leading1": spec.leading1.to_json(),
        "leading2": spec.leading2.to_json(),
        "alpha": {f"{i},{j}": spec.alphas[(i, j)].to_json() for (i, j) in sorted(spec.alphas)},
    }
    if spec.name:
        out["name"] = spec.name
    return out


def spec_from_json(obj) -> HamiltonianSpec:
    if isinstance(obj, str):
        obj = json.loads(obj)
    alphas = {}
    for key, poly in obj.get("alpha", {}).items():
        i, j = (int(x) for x in key.split(","))
        alphas[(i, j)] = CoeffPoly.from_json(poly)
    spec = HamiltonianSpec(
        int(obj["M"]),
        int(obj["N"]),
        CQ.from_json(obj.get("leading1", 1)),
        CQ.from_json(obj.get("leading2", 1)),
        alphas,
        name=obj.get("name", ""),
    )
    return validate_spec(spec)


def load_spec(path) -> HamiltonianSpec:
    with open(path) as fh:
        return spec_from_json(json.load(fh))


def dump_spec(spec: HamiltonianSpec) -> str:
    return json.dumps(spec_to_json(spec), sort_keys=True)


# ---------------------------------------------------------------------------
# reference systems used throughout tests and demos


def autonomous_22():
    """y1' = 3 y2^2, y2' = -3 y1^2; exact poles y1 = c/t, y2 = 3c^2/t, c^3 = -1/27."""
    return make_spec(2, 2, 1, 1, {}, name="autonomous_22")


def painleve_22(alpha=None, beta=0, gamma=0):
    """H = y1^3/3 + y2^3/3 + alpha(z) y1 y2 + beta y1 + gamma y2 (alpha = z by default)."""
    alpha = CoeffPoly([0, 1]) if alpha is None else alpha
    alphas = {(1, 1): alpha, (1, 0): _as_poly(beta), (0, 1): _as_poly(gamma)}
    return make_spec(2, 2, Fraction(1, 3), Fraction(1, 3), alphas, name="painleve_22")


def branching_33():
    """(3,3) system in the quarter scaling satisfying its conditions: alpha_11,
    2 alpha_20 - alpha_12^2 and 2 alpha_02 - alpha_21^2 constant."""
    F = Fraction
    alphas = {(1, 1): CoeffPoly([F(1, 2)]), (2, 0): CoeffPoly([F(3, 10)]), (0, 2): CoeffPoly([F(-1, 5)]),
              (2, 1): CoeffPoly([F(1, 3)]), (1, 0): CoeffPoly([0, 1]), (0, 1): CoeffPoly([0, 0, 1])}
    return make_spec(3, 3, F(1, 4), F(1, 4), alphas, name="branching_33")


def branching_23():
    """(2,3) system with 3 alpha_12 - alpha_21^2 linear in z."""
    F = Fraction
    alphas = {(1, 2): CoeffPoly([0, 1]), (1, 1): CoeffPoly([F(1, 2)]), (1, 0): CoeffPoly([0, 1]),
              (0, 2): CoeffPoly([F(1, 3)])}
    return make_spec(2, 3, 1, 1, alphas, name="branching_23")


def _as_poly(x):
    if isinstance(x, CoeffPoly):
        return x
    if isinstance(x, (list, tuple)):
        return CoeffPoly.from_json(x)
    return CoeffPoly([x])


def generic_symbols(M, N):
    """Keys of the generic normalized Hamiltonian: I minus (0,0), (0,N) and,
    when M = N, (M,0)."""
    keys = build_index_set(M, N) - {(0, 0), (0, N)}
    if M == N:
        keys.discard((M, 0))
    return sorted(keys)


__all__ = [
    "CoeffPoly",
    "HamiltonianSpec",
    "StructuralConstants",
    "NormalizationMap",
    "RoleOrderError",
    "as_rational",
    "build_index_set",
    "structural_constants",
    "make_spec",
    "validate_spec",
    "swap_roles",
    "rhs",
    "rhs_exact",
    "hamiltonian_value",
    "hamiltonian_exact",
    "fixed_singularities",
    "normalize",
    "spec_to_json",
    "spec_from_json",
    "load_spec",
    "dump_spec",
    "autonomous_22",
    "painleve_22",
    "branching_33",
    "branching_23",
    "generic_symbols",
    "weight",
]
