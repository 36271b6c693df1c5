"""The auxiliary function W and its boundedness certificate.

W = H + sum_J beta_kl(z) y2^k / y1^l.  Along solutions, W' is rewritten
into

    W' = P W + sum gamma_ij y1^i y2^j + gamma_{-1,N} y2^N / y1 + Q + R',

with P, Q, R Laurent polynomials in (y1^-1, y2) whose monomials are
bounded near a movable singularity (weight a(N+1) + b(M+1) <= 0 for
y1^a y2^b).  The betas are chosen, from the heaviest gamma slot down, to
make every gamma vanish; at the resonance weight MN - 1 the beta drops out
and the gamma vanishes only if the resonance conditions hold.

Laurent polynomials are dicts {(a, b): DPoly} with (a, b) the exponents of
(y1, y2).  Coefficients are differential polynomials in a[i,j,r] (alpha
derivatives) and b[k,l,r] (beta derivatives).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import mpmath

from .algebra import CQ, DPoly, alpha_symbol, beta_symbol, symbol_key, to_number
from .errors import GammaNonzero, NonTermination
from .model import HamiltonianSpec, build_index_set, structural_constants
from .series import alpha_jet_polys, to_coeffpoly


# ---------------------------------------------------------------------------
# index sets


def build_J(M, N):
    """{(k, l): 1 <= k <= N+1, 1 - MN < k(M+1) - l(N+1) < M+N+2}, l >= 0."""
    structural_constants(M, N)  # rejects MN = 1 and nonpositive degrees
    out = set()
    for k in range(1, N + 2):
        # k(M+1) - l(N+1) > 1 - MN bounds l from above
        lmax = (k * (M + 1) + M * N - 2) // (N + 1) + 1
        for l in range(0, lmax + 1):
            w = k * (M + 1) - l * (N + 1)
            if 1 - M * N < w < M + N + 2:
                out.add((k, l))
    return out


def j_to_i(k, l, M):
    """(k, l) in J -> (i, j) = (M - l, k - 1); (N+1, M+1) maps to (-1, N)."""
    return (M - l, k - 1)


def i_to_j(i, j, M):
    return (j + 1, M - i)


def gamma_slots(M, N):
    """I minus (0,0), plus (-1, N)."""
    return sorted((build_index_set(M, N) - {(0, 0)}) | {(-1, N)})


def mono_weight(a, b, M, N):
    """Growth order of y1^a y2^b near a singularity (in powers of t^-1)."""
    return a * (N + 1) + b * (M + 1)


# ---------------------------------------------------------------------------
# Laurent polynomial helpers


def lp_add_term(lp, mono, coeff):
    if not coeff:
        return
    cur = lp.get(mono)
    if cur is None:
        lp[mono] = coeff
    else:
        s = cur + coeff
        if s:
            lp[mono] = s
        else:
            del lp[mono]


def lp_add(p, q, scale=None):
    out = dict(p)
    for m, c in q.items():
        lp_add_term(out, m, c if scale is None else c * scale)
    return out


def lp_mul(p, q):
    out = {}
    for (a1, b1), c1 in p.items():
        for (a2, b2), c2 in q.items():
            lp_add_term(out, (a1 + a2, b1 + b2), c1 * c2)
    return out


def lp_shift(p, a, b, coeff):
    """coeff * y1^a y2^b * p."""
    return {(m[0] + a, m[1] + b): c * coeff for m, c in p.items() if c}


def lp_is_zero(p):
    return all(not c for c in p.values())


def lp_text(p, M, N):
    parts = []
    for (a, b) in sorted(p, key=lambda m: (-mono_weight(m[0], m[1], M, N), -m[1])):
        parts.append(f"[{p[(a, b)].to_text()}]*y1^{a}*y2^{b}")
    return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# the rewriting engine


@dataclass
class Certificate:
    """W' = P W + sum gamma m + Q + R' (all Laurent dicts)."""

    P: dict = field(default_factory=dict)
    gamma: dict = field(default_factory=dict)
    Q: dict = field(default_factory=dict)
    R: dict = field(default_factory=dict)


class AuxEngine:
    """Symbolic W' reduction for a template (M, N, L1, L2, alpha keys)."""

    def __init__(self, M, N, leading1=1, leading2=1, keys=None, max_steps=200000):
        self.M, self.N = M, N
        self.sc = structural_constants(M, N)
        self.R = self.sc.R
        self.L1, self.L2 = CQ.coerce(leading1), CQ.coerce(leading2)
        index = build_index_set(M, N)
        if keys is None:
            keys = index
        self.keys = sorted(k for k in keys if k != (0, 0))
        self.J = sorted(build_J(M, N))
        self.slots = gamma_slots(M, N)
        self.max_steps = max_steps
        self.alpha = {k: DPoly.sym(alpha_symbol(*k)) for k in self.keys}
        self.beta = {kl: DPoly.sym(beta_symbol(*kl)) for kl in self.J}
        one = DPoly.const(1)
        M1, N1 = M + 1, N + 1
        # y1' = F1, y2' = F2 along the Hamiltonian flow
        self.F1 = {(0, N): DPoly.const(N1 * self.L2)}
        self.F2 = {(M, 0): DPoly.const(-M1 * self.L1)}
        for (i, j), a in self.alpha.items():
            if j:
                lp_add_term(self.F1, (i, j - 1), a.scale(j))
            if i:
                lp_add_term(self.F2, (i - 1, j), a.scale(-i))
        # W minus L2 y2^(N+1): used to eliminate y2^(N+1)
        self.W_rest = {(M1, 0): DPoly.const(self.L1)}
        for (i, j), a in self.alpha.items():
            lp_add_term(self.W_rest, (i, j), a)
        for (k, l), b in self.beta.items():
            lp_add_term(self.W_rest, (-l, k), b)
        self.W = dict(self.W_rest)
        lp_add_term(self.W, (0, N1), DPoly.const(self.L2))
        self.inv_L2 = self.L2.inverse()
        self._one = one

    # -- calculus along the flow --------------------------------------
    def flow_derivative(self, lp):
        """Total z-derivative of sum f_m(z) m(y1, y2) along solutions."""
        out = {}
        for (a, b), f in lp.items():
            lp_add_term(out, (a, b), f.derivative())
            if a:
                for m, c in lp_shift(self.F1, a - 1, b, f.scale(a)).items():
                    lp_add_term(out, m, c)
            if b:
                for m, c in lp_shift(self.F2, a, b - 1, f.scale(b)).items():
                    lp_add_term(out, m, c)
        return out

    def weight(self, m):
        return mono_weight(m[0], m[1], self.M, self.N)

    def bounded(self, m):
        return self.weight(m) <= 0

    def eliminate_top(self, f, a, b):
        """f y1^a y2^b with b >= N+1 -> (P contribution, remaining terms)."""
        N1 = self.N + 1
        g = f * DPoly.const(self.inv_L2)
        rest = lp_shift(self.W_rest, a, b - N1, -g)
        return {(a, b - N1): g}, rest

    def ratio_identity(self, a, b):
        """Solve X' = D L1 m + (rest) for m = y1^a y2^b, X = y2^(b+1) y1^(a-M).

        Returns (D L1, X, rest_lp, rest_P) where rest_P holds the
        W-coefficient produced by eliminating y2^(N+1).
        """
        M, N = self.M, self.N
        X = (a - M, b + 1)
        Xp = self.flow_derivative({X: self._one})
        P = {}
        out = {}
        for m, c in Xp.items():
            if m[1] >= N + 1 and self.weight(m) == self.weight((a, b)):
                p, rest = self.eliminate_top(c, *m)
                for mm, cc in p.items():
                    lp_add_term(P, mm, cc)
                for mm, cc in rest.items():
                    lp_add_term(out, mm, cc)
            else:
                lp_add_term(out, m, c)
        self_coeff = out.pop((a, b), DPoly({}))
        D = self.R - self.weight((a, b))
        expected = DPoly.const(self.L1 * D)
        if self_coeff != expected:
            raise NonTermination(f"unexpected self coefficient for y1^{a} y2^{b}: {self_coeff.to_text()}")
        return self.L1 * D, X, out, P

    def reduce(self, expr):
        """Rewrite a Laurent dict into a Certificate."""
        cert = Certificate()
        pending = {}
        heap = []

        def push(m, c):
            if not c:
                return
            if m in pending:
                s = pending[m] + c
                if s:
                    pending[m] = s
                else:
                    del pending[m]
            else:
                pending[m] = c
                heapq.heappush(heap, (-self.weight(m), -m[1], m))

        for m, c in expr.items():
            push(m, c)
        slots = set(self.slots)
        steps = 0
        last = None
        while heap:
            _, _, m = heapq.heappop(heap)
            c = pending.pop(m, None)
            if c is None or not c:
                continue
            steps += 1
            if steps > self.max_steps:
                raise NonTermination("rewriting did not terminate")
            key = (self.weight(m), m[1])
            if last is not None and key > last:
                raise NonTermination(f"weight increased at {m}")
            last = key
            a, b = m
            if self.bounded(m):
                lp_add_term(cert.Q, m, c)
            elif m in slots:
                lp_add_term(cert.gamma, m, c)
            elif b >= self.N + 1:
                p, rest = self.eliminate_top(c, a, b)
                for mm, cc in p.items():
                    lp_add_term(cert.P, mm, cc)
                for mm, cc in rest.items():
                    push(mm, cc)
            elif a < 0:
                DL1, X, rest, P = self.ratio_identity(a, b)
                g = c * DPoly.const(DL1.inverse())
                lp_add_term(cert.R, X, g)
                lp_add_term(cert.Q, X, -g.derivative())
                for mm, cc in P.items():
                    lp_add_term(cert.P, mm, -(g * cc))
                for mm, cc in rest.items():
                    push(mm, -(g * cc))
            else:
                raise NonTermination(f"no rewriting rule for y1^{a} y2^{b}")
        return cert

    def w_prime(self):
        return self.flow_derivative(self.W)

    def certificate(self):
        return self.reduce(self.w_prime())

    def check_identity(self, cert, expr=None):
        """W' - (P W + gamma + Q + R') as a Laurent dict (empty when exact)."""
        expr = self.w_prime() if expr is None else expr
        rhs = lp_mul(cert.P, self.W)
        rhs = lp_add(rhs, cert.gamma)
        rhs = lp_add(rhs, cert.Q)
        rhs = lp_add(rhs, self.flow_derivative(cert.R))
        return lp_add(expr, rhs, scale=DPoly.const(-1))


# ---------------------------------------------------------------------------
# solving for the betas


def _beta_substitution(expr, solution, cache):
    """Map b[k,l,r] -> r-th derivative of solution[(k,l)] for solved betas."""
    mapping = {}
    for sid in expr.symbols():
        key = symbol_key(sid)
        if key[0] != "b":
            continue
        kl, r = (key[1], key[2]), key[3]
        if kl not in solution:
            continue
        mapping[sid] = _nth(solution[kl], r, cache, kl)
    return expr.substitute(mapping) if mapping else expr


def _nth(expr, r, cache, kl):
    lst = cache.setdefault(kl, [expr])
    while len(lst) <= r:
        lst.append(lst[-1].derivative())
    return lst[r]


@dataclass
class BetaSolution:
    """Symbolic betas and resonance-level gammas for one template."""

    M: int
    N: int
    betas: dict  # (k, l) -> DPoly in a-symbols
    resonance_gammas: dict  # (i, j) -> DPoly (must vanish)
    order: list  # slots in processing order
    certificate: Certificate
    engine: AuxEngine


def solve_symbolic(engine: AuxEngine):
    cert = engine.certificate()
    M, N, R = engine.M, engine.N, engine.R
    order = sorted(engine.slots, key=lambda s: (-mono_weight(s[0], s[1], M, N), s))
    solution = {}
    cache = {}
    res = {}
    for (i, j) in order:
        k, l = i_to_j(i, j, M)
        g = cert.gamma.get((i, j), DPoly({}))
        g = _beta_substitution(g, solution, cache)
        bsym = beta_symbol(k, l, 0)
        unresolved = [s for s in g.symbols() if symbol_key(s)[0] == "b" and s != bsym]
        if unresolved:
            raise NonTermination(f"gamma{(i, j)} depends on unsolved betas")
        w = mono_weight(i, j, M, N)
        if w == R:
            coeff, rest = g.linear_coefficient(bsym)
            if coeff:
                raise NonTermination(f"beta{(k, l)} does not drop out at the resonance weight")
            solution[(k, l)] = DPoly({})
            res[(i, j)] = rest
        else:
            coeff, rest = g.linear_coefficient(bsym)
            try:
                cval = coeff.constant_value()
            except ValueError:
                raise NonTermination(f"coefficient of beta{(k, l)} is not constant") from None
            if not cval:
                raise NonTermination(f"zero coefficient for beta{(k, l)}")
            solution[(k, l)] = rest * DPoly.const(-cval.inverse())
    return BetaSolution(M, N, solution, res, order, cert, engine)


# ---------------------------------------------------------------------------
# concrete systems


@dataclass
class AuxiliaryW:
    """W for a concrete spec: beta_kl(z) as CoeffPoly plus evaluators."""

    spec: HamiltonianSpec
    betas: dict
    gamma_residues: dict
    symbolic: BetaSolution = None

    def value(self, z, y1, y2, precision=None):
        return eval_W(self, z, y1, y2, precision)

    def to_json(self):
        return {
            "M": self.spec.M,
            "N": self.spec.N,
            "betas": {f"{k},{l}": p.to_json() for (k, l), p in sorted(self.betas.items())},
            "gamma_residues": {f"{i},{j}": p.to_json() for (i, j), p in sorted(self.gamma_residues.items())},
        }

    def coefficient_polys(self):
        """Symbol id -> CoeffPoly for every a[...] and b[...] derivative used."""
        polys = alpha_jet_polys(self.spec, 8)
        for (k, l), p in self.betas.items():
            q = p
            for r in range(9):
                polys[beta_symbol(k, l, r)] = q
                q = q.derivative()
        return polys


def solve_betas(spec: HamiltonianSpec, strict=True):
    """Betas for a concrete spec.

    Resonance-level gammas must vanish identically (GammaNonzero otherwise,
    unless ``strict`` is False, in which case the residues are recorded and
    the corresponding betas are 0).
    """
    engine = AuxEngine(spec.M, spec.N, spec.leading1, spec.leading2, spec.alphas.keys())
    sol = solve_symbolic(engine)
    rmax = _max_order(list(sol.betas.values()) + list(sol.resonance_gammas.values()))
    polys = alpha_jet_polys(spec, rmax)
    betas = {}
    for kl, expr in sol.betas.items():
        p = to_coeffpoly(expr, polys)
        if not p.is_zero():
            betas[kl] = p
    residues = {}
    for ij, expr in sol.resonance_gammas.items():
        p = to_coeffpoly(expr, polys)
        if not p.is_zero():
            if strict:
                raise GammaNonzero(ij, p)
            residues[ij] = p
    return AuxiliaryW(spec, betas, residues, sol)


def _max_order(exprs):
    r = 0
    for e in exprs:
        for sid in e.symbols():
            key = symbol_key(sid)
            if key[0] in ("a", "b"):
                r = max(r, key[3])
    return r


def eval_W(aux: AuxiliaryW, z, y1, y2, precision=None):
    """W(z, y1, y2).  With ``precision`` (digits) the sum is done in mpmath;
    otherwise real and imaginary parts are summed with math.fsum."""
    if precision:
        with mpmath.workdps(precision):
            conv = mpmath.mpc
            z, y1, y2 = conv(z), conv(y1), conv(y2)
            terms = _w_terms(aux, z, y1, y2, conv)
            return mpmath.fsum(terms)
    z, y1, y2 = complex(z), complex(y1), complex(y2)
    terms = _w_terms(aux, z, y1, y2, None)
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def _w_terms(aux, z, y1, y2, conv):
    spec = aux.spec
    M, N = spec.M, spec.N
    terms = [to_number(spec.leading1, conv) * y1 ** (M + 1), to_number(spec.leading2, conv) * y2 ** (N + 1)]
    for (i, j), p in spec.alphas.items():
        if (i, j) != (0, 0):
            terms.append(p.evaluate(z, conv) * y1**i * y2**j)
    for (k, l), p in aux.betas.items():
        terms.append(p.evaluate(z, conv) * y2**k / y1**l)
    return terms


def eval_laurent(lp, polys, z, y1, y2, conv=None):
    """Numeric value of a Laurent dict with DPoly coefficients."""
    total = 0
    for (a, b), c in lp.items():
        p = to_coeffpoly(c, polys)
        total = total + p.evaluate(z, conv) * y1**a * y2**b
    return total


def certificate_terms(aux: AuxiliaryW, z, y1, y2, conv=None):
    """Numeric (W', P, gamma part, Q, R') of the certificate at a point."""
    eng = aux.symbolic.engine
    cert = aux.symbolic.certificate
    polys = aux.coefficient_polys()
    wp = eval_laurent(eng.w_prime(), polys, z, y1, y2, conv)
    P = eval_laurent(cert.P, polys, z, y1, y2, conv)
    G = eval_laurent(cert.gamma, polys, z, y1, y2, conv)
    Qv = eval_laurent(cert.Q, polys, z, y1, y2, conv)
    Rp = eval_laurent(eng.flow_derivative(cert.R), polys, z, y1, y2, conv)
    return wp, P, G, Qv, Rp


def w_to_json(aux: AuxiliaryW):
    return aux.to_json()


__all__ = [
    "build_J",
    "j_to_i",
    "i_to_j",
    "gamma_slots",
    "mono_weight",
    "AuxEngine",
    "Certificate",
    "BetaSolution",
    "AuxiliaryW",
    "solve_symbolic",
    "solve_betas",
    "eval_W",
    "certificate_terms",
    "lp_is_zero",
    "lp_text",
]
