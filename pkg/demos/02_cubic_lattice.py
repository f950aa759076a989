# %% [markdown]
# # The cubic oscillator is solved by an elliptic function
#
# With V = i z^3 every trajectory is z(t) = 2i P(t + ia; 0, E/2).  The real
# period T1 is the orbital period; shifting a through the imaginary period
# sweeps the whole family of closed orbits between the vertical escape stem
# and the "smile" joining the two lower turning points.

# %%
import sys
from pathlib import Path

import numpy as np

from epdyn.cli import SvgScene
from epdyn.cpoly import ProblemSpec, turning_points
from epdyn.periods import Cycle, closed_form_cubic_T1, cycle_integral
from epdyn.trajectory import escape_orbit, family_member, point_names
from epdyn.weierstrass import cubic_setup, cubic_trajectory, imaginary_period

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

spec = ProblemSpec.pure_cubic(1.0)
pts = list(turning_points(spec).points)
names = point_names(pts)
_, lat = cubic_setup(1 + 0j)
T1 = lat.T1.real
Tt = imaginary_period(1.0)
print(f"closed form T1 = {closed_form_cubic_T1(1.0):.15g}")
print(f"quadrature  T1 = {cycle_integral(spec, Cycle(names.index('L0'), names.index('R0')), points=pts).real:.15g}")
print(f"lattice T2/T1 = {lat.T2 / lat.T1:.12g} (hexagonal), imaginary period {Tt:.12g}")

# %% [markdown]
# Integrate the family numerically from the escape stem and compare with
# the elliptic-function solution.  The a = 0 member runs into a pole at
# t = T1/2; the integrator goes round it in complex time.

# %%
stem = escape_orbit(spec, names.index("A0"), points=pts)
print(f"escape time {stem.escape_time:.10g} = T1/2 to {abs(stem.escape_time / (T1 / 2) - 1):.1e}")
scene = SvgScene.around(pts, margin=1.5)
for frac in (0.0, 1 / 16, 1 / 8, 3 / 16, 1 / 4):
    tr = family_member(spec, stem, frac * Tt, period=T1, n_samples=1201)
    ok = [abs(z) < 50 for z in tr.z]
    ref = np.array([cubic_trajectory(T1 / 2 + t, frac * Tt) for t in tr.t])
    print(f"a = {frac:5.4f} T~: max |z_ode - z_P| = {np.max(np.abs(tr.z - ref)[ok]):.1e}, "
          f"detours {len(tr.detours)}")
    scene.add_path(tr.z)
for p, n in zip(pts, names):
    scene.add_marker(p, n)
scene.write(out / "cubic_family.svg")
