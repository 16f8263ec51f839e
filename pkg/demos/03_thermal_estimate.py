"""How sharp can a real device's orientation be?

A tabletop apparatus at room temperature has a thermal spread in its
angular momentum of sqrt(I k T), and the minimum orientation uncertainty
consistent with that spread is hbar divided by it.  The number is
absurdly small, but the point is that it is not zero: delta_L = hbar /
delta_theta stays finite, and that finite spread is what funds the error
amplitudes in the measurement model.
"""

import spinledger as sl

th = sl.thermal_orientation_uncertainty(moment_of_inertia=0.01, temperature=300.0)

print(f"I = {th.moment_of_inertia} kg m^2,  T = {th.temperature} K")
print(f"k = {th.boltzmann_k} J/K,  hbar = {th.hbar} J s\n")
print(f"I k T       = {th.ikt:.4e}  kg^2 m^4 / s^2")
print(f"delta_L     = {th.delta_l:.4e}  kg m^2 / s")
print(f"delta_theta = {th.delta_theta:.4e}  rad")
print(f"\nnote: {th.note}")

# colder and lighter devices are less sharp in L, more uncertain in angle
print("\nsweep:")
print("I (kg m^2)  T (K)   delta_L (kg m^2/s)  delta_theta (rad)")
for i_val in (1e-6, 0.01, 1.0):
    for t_val in (4.0, 300.0):
        row = sl.thermal_orientation_uncertainty(i_val, t_val)
        print(f"{i_val:<11g} {t_val:<7g} {row.delta_l:<19.3e} {row.delta_theta:.3e}")
