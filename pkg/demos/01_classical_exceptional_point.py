# %% [markdown]
# # Turning points merge, stems rearrange
#
# For V = z^2/2 - i g z^5 at E = -1 there are five turning points.  Two of
# them lie on the imaginary axis above the others and approach each other
# as g decreases; at g* they merge, and below g* they split again, still on
# the axis.  The classical trajectories that join turning points (stems)
# change their connection pattern at exactly that coupling.

# %%
import sys
from pathlib import Path

from epdyn.cli import SvgScene
from epdyn.cpoly import (ProblemSpec, classical_exceptional_point, coalesced_turning_point,
                         imaginary_axis_count, turning_points)
from epdyn.trajectory import classify_topology, follow_from, point_names

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(exist_ok=True)

E = -1.0
g_star = classical_exceptional_point(E)
print(f"g* = {g_star:.12g}, merged point at {coalesced_turning_point(E):.6g}")

# %% [markdown]
# Count the axis turning points on each side: three below g*, one above.

# %%
for g in (0.02, 0.03, 0.04, 0.06):
    print(f"g = {g}: {imaginary_axis_count(E, g)} turning point(s) on the imaginary axis")

# %% [markdown]
# Draw every stem on both sides and print the discrete label.  Above g* the
# lowest axis point escapes to i infinity; below it joins its neighbour.

# %%
for g in (0.02, 0.06):
    spec = ProblemSpec("quintic", E=E, g=g)
    pts = list(turning_points(spec).points)
    names = point_names(pts)
    scene = SvgScene.around(pts)
    for k in range(len(pts)):
        tr, _ = follow_from(spec, k, points=pts)
        scene.add_path(tr.z)
    for p, n in zip(pts, names):
        scene.add_marker(p, n)
    scene.write(out / f"stems_g{g}.svg")
    print(f"g = {g}: {classify_topology(spec)}")
