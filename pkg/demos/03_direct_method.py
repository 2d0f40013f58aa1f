# %% [markdown]
# # The direct method: S_n = 2^n f(2^n x)
#
# We perturb 1/x by a seeded dyadic term of norm <= 2^-4, watch the
# rescaled iterates converge 2-adically, and compare |f - g| with Psi.

# %%
from fractions import Fraction

from reciprocal_stability import (SeededDyadic, ValuationSpec, check_eqt0, check_premise_on_orbit,
                                  detect_limit, exact_reciprocal, iterate_sequence, measure_mu,
                                  norm, orbit_pairs, perturb, psi, verify_bound)

p2 = ValuationSpec.padic(2)
f = perturb(exact_reciprocal(1, 0, value_at_zero=0), SeededDyadic(4, seed=7))
x = Fraction(3, 4)

profile = detect_limit(iterate_sequence(f, x, 64, p2), p2, M=30, W=8)
print("tail norms:", [str(t) for t in profile.tail_norms[:8]], "...")
print("stabilized at", profile.stabilized_at, "; |g(x) - 1/x| =", norm(p2, profile.limit - 1 / x))

# %% [markdown]
# A measured control function makes the premise hold with equality along
# the orbit (0, 2^(k+1) x). The decay hypothesis is a separate matter.

# %%
mu = measure_mu(f, orbit_pairs(x, 128), p2)
print("premise:", check_premise_on_orbit(f, mu, x, p2, 64).holds)
print("eqt0:", check_eqt0(mu, 0, x, p2, 64).holds)
pv = psi(mu, x, p2, 64)
print("Psi =", pv.value, "settled:", pv.settled)
print(verify_bound(f, profile, pv, p2))
