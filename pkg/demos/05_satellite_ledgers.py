"""A satellite that seems to torque itself by measuring spins.

Feed a stream of +x-polarized particles into a z-measuring device and
keep the idealized books: each particle's transverse 1/2 simply
vanishes, so after N particles the satellite appears to have gained N/2
of angular momentum in the -x direction, for free, in a chosen
direction.  The full model keeps a second set of books alongside: the
unconditioned totals never move, and even the branch-conditional ledger
only performs an unbiased random walk.
"""

import spinledger as sl

# +x spinor at the last float ulp so 2 Re(a* b) is exactly 1
A, B = 0.7071067811865476, 0.7071067811865475

run = sl.satellite_run(n=2000, L=8, a=A, b=B, seed=2024)

print(f"{run.n_particles} particles, apparatus spin L = {run.L}, "
      f"seed {run.seed} ({run.metadata['prng']})")
ups = sum(1 for s in run.trajectory if s.outcome == "up")
print(f"outcomes: {ups} up / {run.n_particles - ups} dn "
      f"(Born weight up = {run.branch_info['up']['weight']:.6f})\n")

print("step   ideal ledger x   full ledger x     full ledger z    audit")
for k in (1, 10, 100, 500, 1000, 2000):
    s = run.trajectory[k - 1]
    print(f"{k:<6} {s.ideal_ledger_j[0]:<16.6f} {s.full_ledger_j[0]:<17.6f} "
          f"{s.full_ledger_j[2]:<16.6f} {s.audit_deviation:.1e}")

print("\nThe ideal ledger marches to -N/2 = -1000 with certainty; the full")
print("ledger's x-entry is a zero-mean walk (the up branch carries MORE")
print("than the incoming 1/2 of <Jx>, the dn branch none, and the Born")
print("weights balance them exactly):")
info = run.branch_info
for lbl in ("up", "dn"):
    print(f"  {lbl}: weight {info[lbl]['weight']:.6f}, "
          f"<Jx> = {info[lbl]['j'][0]:.6f}")
mean_step = sum(info[l]["weight"] * info[l]["j"][0] for l in ("up", "dn"))
print(f"  weighted <Jx> per shot: {mean_step:.12f} (incoming 0.5)")
