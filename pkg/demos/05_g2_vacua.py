# %% [markdown]
# # Coalescing vacua in a toy G2 model
#
# The vacua are roots of m u^4 (1 - lambda^2 u / m^2)^2 = Lambda^9.  As
# lambda grows two real vacua approach each other like sqrt(lambda*^2 - lambda^2),
# merge, and leave the real axis as a conjugate pair, the same way two
# turning points merge at a classical exceptional point.

# %%
import numpy as np

from epdyn.cpoly import G2Params, g2_coalescence, g2_vacua, min_root_separation

l2 = g2_coalescence(1.0, 1.0)
print(f"vacua merge at lambda^2 = {l2:.10g}  (2 / (3 sqrt 3) = {2 / (3 * np.sqrt(3)):.10g})")
for f in (0.9, 0.99, 0.999, 1.0, 1.001, 1.01):
    v = g2_vacua(G2Params(1.0, np.sqrt(f * l2), 1.0))
    print(f"lambda^2 = {f:5.3f} x: closest pair {min_root_separation(v):.3e}, "
          f"real vacua {sum(abs(z.imag) < 1e-9 for z in v)}")
