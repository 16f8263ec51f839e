"""The bookkeeping paradox of an idealized spin measurement.

A spin-1/2 particle polarized along +x carries <Jx> = 1/2.  An ideal
z-measurement sends it into two macroscopic branches whose individual
<Jx> both vanish, so expectation-value conservation can only be saved by
off-diagonal matrix elements between the branches.  Matching the spinor
coefficients forces those cross terms to the fixed values (1/2, -i/2, 0),
independent of the input state, which is exactly the "cross-term
storage" that the violation classifier labels Type II.
"""

import numpy as np

import spinledger as sl

r = 1 / np.sqrt(2)
a, b = r, r

u = sl.bloch_vector(a, b)
print(f"input spinor a = b = 1/sqrt(2): polarization u_s = "
      f"({u.ux:+.3f}, {u.uy:+.3f}, {u.uz:+.3f})")
print(f"initial <J> = u_s / 2 = ({u.ux/2:+.3f}, {u.uy/2:+.3f}, {u.uz/2:+.3f})\n")

brackets = sl.ideal_forced_cross_terms(a, b)
print("forced cross terms <u|J_k|d> between the ideal outcome states:")
print(f"  x: {brackets.cross_x}")
print(f"  y: {brackets.cross_y}")
print(f"  z: {brackets.cross_z}")
print(f"  component equations verified to {brackets.max_residual:.2e}\n")

# the same values come out for any spinor with both components present
for a2, b2 in [(0.6, 0.8), (r, 1j * r)]:
    br2 = sl.ideal_forced_cross_terms(a2, b2)
    print(f"  spinor ({a2}, {b2}): cross_x = {br2.cross_x}, "
          f"residual {br2.max_residual:.2e}")

print("\nclassifying the ideal account of the Jx books:")
cross_contribution = np.conj(a) * b * brackets.cross()
report = sl.classify_violation(
    initial=[0.5, 0.0, 0.0],
    branches=[(a, brackets.diag_u), (b, brackets.diag_d)],
    cross_contribution=cross_contribution,
    labels=["up", "dn"],
)
print(f"  branch values: {[(lbl, list(v)) for lbl, v in report.per_branch_values]}")
print(f"  weighted branch average: {report.weighted_branch_average}")
print(f"  cross-term contribution: {report.required_cross_term_contribution}")
print(f"  verdict: {report.kind.value}")
print("\nThe transverse angular momentum would have to live between the")
print("branches, invisible to every observer.  The apparatus model in")
print("demo 02 shows how a real device avoids this.")
