"""Which polynomial Hamiltonians can have branch points but no worse?

Run with ``python demos/01_resonance_conditions.py``.
"""

# %%
# The class is fixed by the two degrees.  The index set lists the monomials
# y1^i y2^j allowed next to the leading terms, and the constants give the
# leading exponents of a solution near a movable singularity.
from fractions import Fraction

from hamsing import branching_23, make_spec, painleve_22, structural_constants
from hamsing.model import build_index_set
from hamsing.series import derive_formal_series, leading_coefficients, resonance_conditions

for M, N in [(2, 2), (2, 3), (3, 3)]:
    sc = structural_constants(M, N)
    print(f"(M, N) = ({M}, {N}):  y1 ~ t^{sc.p}, y2 ~ t^{sc.q}, gcd d = {sc.d}, sheets = {sc.R // sc.d}")
    print("   index set:", sorted(build_index_set(M, N)))

# %%
# Leading coefficients are exact algebraic numbers.  For the Painleve-type
# scaling of the (2,2) class every branch satisfies c1^3 = -1 and c2 = c1^2.
lc = leading_coefficients(painleve_22())
print("(2,2):  c1^3 =", lc.c1**3, "   c2 - c1^2 =", lc.c2 - lc.c1**2)
lc = leading_coefficients(make_spec(3, 3, Fraction(1, 4), Fraction(1, 4)))
print("(3,3):  c1^8 =", lc.c1**8, "   c2 =", lc.c2)

# %%
# Formal series only exist when the coefficient functions satisfy the
# resonance conditions.  a[i,j,k] stands for the k-th derivative of alpha_ij.
for M, N, lead in [(2, 2, 1), (2, 3, 1), (3, 3, Fraction(1, 4))]:
    print(f"conditions for ({M},{N}):")
    for cond in resonance_conditions(M, N, lead, lead):
        print("   ", cond.to_json()["expression"], "= 0")

# %%
# A concrete (2,3) system passes, and its series carries one free parameter
# at the resonance.
series, conds = derive_formal_series(branching_23(), K=12)
print("free parameters:", series.free_parameters)
print("first y1 coefficients:", [c.to_text() for c in series.coeffs1[:4]])
