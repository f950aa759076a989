# %% [markdown]
# # Periods of the pure quintic and their monodromy
#
# For V = -i z^5 the five turning points sit on a regular pentagon and
# all periods follow from one Beta-function constant scaled by E^(-3/10).
# Continuing E once around the origin permutes the cycles: the real period
# T1 comes back as a complex combination of T2 and an imaginary period.

# %%
from epdyn.cpoly import ProblemSpec
from epdyn.periods import Cycle, closed_form_quintic, monodromy_continue, quintic_periods_numeric
from epdyn.trajectory import escape_orbit
from epdyn.cpoly import turning_points

for E in (0.5, 1.0, 2.0):
    cf, num = closed_form_quintic(E), quintic_periods_numeric(E)
    print(f"E = {E}: T1 {num.T1:.12g} ({cf.T1:.12g})  T2 {num.T2:.12g}  T3 {num.T3:.12g}")

# %% [markdown]
# The vertical orbit from z = i reaches infinity in finite time, half the
# period T3.

# %%
spec = ProblemSpec.pure_quintic(1.0)
pts = list(turning_points(spec).points)
top = max(range(5), key=lambda k: pts[k].imag)
tr = escape_orbit(spec, top, points=pts)
print(f"escape time {tr.escape_time:.12g}, T3/2 = {closed_form_quintic(1.0).T3 / 2:.12g}")

# %% [markdown]
# Monodromy: continue E -> E exp(-2 pi i) along a circle.

# %%
cf, num = closed_form_quintic(1.0), quintic_periods_numeric(1.0)
m1 = monodromy_continue(spec, Cycle(*num.cycles["T1"]), 1)
m2 = monodromy_continue(spec, Cycle(*num.cycles["T2"]), 1)
print(f"T1 -> {m1:.12g}   (i Tt2 - T2)/2 = {(1j * cf.Tt2 - cf.T2) / 2:.12g}")
print(f"T2 -> {m2:.12g}   (i Tt3 - T3)/2 = {(1j * cf.Tt3 - cf.T3) / 2:.12g}")
