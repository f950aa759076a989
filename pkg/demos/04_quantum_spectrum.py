# %% [markdown]
# # Two spectral problems for one Hamiltonian
#
# H = (p^2 + z^2)/2 - i g z^5 has seven Stokes wedges.  Problem One imposes
# decay in the wedges that contain the real axis: its spectrum is real for
# every g.  Problem Two uses the two lower wedges: as g decreases, real
# levels meet and turn into complex-conjugate pairs, one pair at a time.

# %%
from epdyn.spectrum import complex_pair_count, eigenvalues, find_quantum_ep

for g in (0.01, 0.1, 0.5):
    print(f"One, g = {g}: " + "  ".join(f"{r.E.real:.8f}" for r in eigenvalues(g, "One", 6)))

# %%
for g in (0.06, 0.02, 0.004):
    n, _ = complex_pair_count(g, "Two")
    levels = "  ".join(f"{r.E:.5f}" for r in eigenvalues(g, "Two", 4))
    print(f"Two, g = {g}: {n} complex pair(s); lowest {levels}")

# %% [markdown]
# Locate the couplings where the first two pairs form, by bisection on
# the real/complex character.  A coarse tolerance keeps this quick.

# %%
for pair, bracket in ((1, (0.02, 0.06)), (2, (0.004, 0.02))):
    ep = find_quantum_ep("Two", pair, bracket, tol=1e-3)
    print(f"pair {pair}: g = {ep.value.real:.4f} +- {ep.uncertainty / 2:.1e}")
