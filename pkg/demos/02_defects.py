# %% [markdown]
# # Defects of the reciprocal equation
#
# `defect_eq1(f, x, y)` is the left side minus the right side of
# f(2x+y) + f((x+y)/2) = 2f(x)f(y)/(f(x)+f(y)) + 2f(x+y)f(y-x)/(3f(y-x)-f(x+y)).

# %%
from fractions import Fraction

from reciprocal_stability import (ConstantShift, DegenerateDenominator, ValuationSpec,
                                  defect_basic, defect_eq1, exact_reciprocal, perturb)

p2 = ValuationSpec.padic(2)
for a, c in [(1, 0), (1, 1), (Fraction(-3, 2), 5)]:
    f = exact_reciprocal(a, c)
    print(f.describe(), [defect_eq1(f, x, y, p2).defect for x, y in [(1, 2), (3, 7), (Fraction(1, 3), 4)]])

# %% [markdown]
# The shifted family solves the main equation but not the basic one.

# %%
print(defect_basic(exact_reciprocal(1, 1), 1, 1, p2))

# %% [markdown]
# Some pairs make the equation itself undefined; they are skipped, not failed.

# %%
try:
    defect_eq1(exact_reciprocal(1, 0), 1, -1, p2)
except DegenerateDenominator as exc:
    print("skipped:", exc)

# %% [markdown]
# A perturbed solution has a small but nonzero defect.

# %%
g = perturb(exact_reciprocal(1, 0, value_at_zero=0), ConstantShift(Fraction(16)))
d = defect_eq1(g, 1, 2, p2)
print(d.defect, d.defect_norm)
