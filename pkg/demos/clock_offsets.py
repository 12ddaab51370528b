"""Fractional clock-rate offsets of orbiting clocks against a ground clock.

Prints the offset at a few circular altitudes, the radius where it changes
sign, and the sign change along a Molniya-like ellipse.
"""
from dsqlsim.constants import CONST
from dsqlsim.relorbit import (EARTH, OrbitSpec, cancellation_radius, epsilon_observatory,
                              epsilon_profile, epsilon_satellite_circular)

eps_ground = epsilon_observatory(EARTH)
print(f"ground clock offset: {eps_ground:.3e}")
print(f"{'altitude km':>12} {'satellite':>12} {'sat - ground':>13}")
for h_km in (400, 1000, 5000, 20200, 35786):
    eps = epsilon_satellite_circular(CONST.R_earth + h_km * 1e3)
    print(f"{h_km:12d} {eps:12.3e} {eps - eps_ground:13.3e}")

rc = cancellation_radius(EARTH)
print(f"offsets cancel at r = {rc / 1e3:.0f} km (altitude {(rc - CONST.R_earth) / 1e3:.0f} km)")

rp, ra = CONST.R_earth + 545e3, CONST.R_earth + 39913e3
orbit = OrbitSpec("elliptic", rp, 0.5 * (rp + ra), (ra - rp) / (ra + rp))
prof = epsilon_profile(orbit, 360)
print(f"ellipse 545 x 39913 km: net rate {prof.net_rate.min():.2e} .. {prof.net_rate.max():.2e}, "
      f"changes sign: {prof.changes_sign}")
