"""Trading the threshold for speed.

Valuations are grouped into geometric buckets.  The solver only has to
guess how many seats each bucket gets, and every course then reaches
(1 - eps) k instead of k.
"""

# %%
from fractions import Fraction

from mefe import solve_bruteforce, verify
from mefe.paramsolvers import bucket_base, bucket_count, solve_approx
from mefe.reductions import random_instance

# %%
for eps in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 10)):
    base = bucket_base(eps)
    print(f"eps={eps}: base {base}, buckets for values up to 16: {bucket_count(16, base)}")

# %%
eps = Fraction(1, 2)
shown = 0
for seed in range(200):
    inst = random_instance(seed, 3, 6, cap_max=2, val_max=16, structure="distinct")
    if not solve_bruteforce(inst).is_yes:
        continue
    out = solve_approx(inst, eps)
    rep = verify(inst, out.matching, (1 - eps) * inst.k)
    print(f"k={inst.k}: averages {[str(a) for a in rep.avg_utils.values()]}, clean {rep.is_mefe}")
    shown += 1
    if shown == 5:
        break
