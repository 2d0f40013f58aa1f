# %% [markdown]
# # p-adic norms on exact rationals
#
# Every quantity below is a `Fraction`; nothing is rounded.

# %%
from fractions import Fraction

from reciprocal_stability import ValuationSpec, norm, ultrametric_check, valuation

p2 = ValuationSpec.padic(2)
for q in [Fraction(8), Fraction(3, 4), Fraction(0), Fraction(-12, 7)]:
    print(f"{str(q):>6}  v_2 = {valuation(q, 2)!s:>4}   |q|_2 = {norm(p2, q)}")

# %% [markdown]
# The strong triangle inequality: |x+y| <= max(|x|, |y|), with equality
# whenever the two norms differ.

# %%
for x, y in [(1, 1), (1, 2), (Fraction(1, 4), Fraction(3, 4))]:
    print(x, y, ultrametric_check(p2, x, y))

# %% [markdown]
# Integers never have norm above 1, and under the trivial valuation every
# nonzero element has norm 1, including 2. That is why the stability
# machinery needs a genuinely p-adic |2| < 1.

# %%
print([norm(p2, n) for n in range(1, 9)])
print(norm(ValuationSpec.trivial(), 2), norm(ValuationSpec.padic(3), 2))
