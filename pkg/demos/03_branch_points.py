"""Algebraic branch points, and what happens when the conditions fail.

The (3,3) system has square-root branch points and the (2,3) system has
fifth-root ones.  A (2,2) system with alpha(z) = z^2 violates a resonance
condition; its auxiliary function W then grows like a logarithm.
"""

# %%
from pathlib import Path

from hamsing import branching_23, branching_33, load_spec
from hamsing.auxw import solve_betas
from hamsing.errors import GammaNonzero
from hamsing.flow import approach_singularity, land_on_singularity, monodromy_loop, w_approach

seed = (0j, 1.1 + 0.3j, -0.7 + 0.4j)

for spec, loops in [(branching_33(), 3), (branching_23(), 6)]:
    trace = approach_singularity(spec, seed, 6 + 0j, tol=1e-12)
    landing = land_on_singularity(spec, trace.blowup, tol=1e-12)
    k = abs(abs(trace.z - landing.z_inf) - 0.05).argmin()
    near = (trace.z[k], trace.y1[k], trace.y2[k])
    rep = monodromy_loop(spec, landing.z_inf, 0.05, loops, tol=1e-28, precision=30, near_state=near,
                         closure_tol=1e-5)
    print(f"({spec.M},{spec.N}) branch point at {landing.z_inf:.8f}: sheets = {rep.sheets}")
    print("   defect per loop:", " ".join(f"{d:.1e}" for d in rep.defects))

# %%
# The violating system: W cannot be made regular, and along an approach
# |W| climbs steadily as the singularity gets closer.
spec = load_spec(Path(__file__).resolve().parents[1] / "specs" / "violating_2_2.json")
try:
    solve_betas(spec)
except GammaNonzero as exc:
    print("GammaNonzero:", exc)
aux = solve_betas(spec, strict=False)
_, summary, _ = w_approach(spec, aux, (0j, 2.5 + 0.2j, -1.3 + 1.1j), 3 + 0j)
print(f"|W| from {abs(summary.values[0]):.2f} to {summary.abs_max:.2f}, "
      f"slope in log distance {summary.growth_slope:.2f}, monotone = {summary.monotone_growth}")

# %%
# For comparison, an admissible system keeps W flat over the same window.
spec = branching_23()
_, summary, _ = w_approach(spec, solve_betas(spec), seed, 6 + 0j)
print(f"(2,3): max|W| / |W at switch| = {summary.abs_max / abs(summary.values[0]):.4f}")
