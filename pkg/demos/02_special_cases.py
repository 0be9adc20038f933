"""Structured instances and the solvers that exploit them.

The dispatcher inspects an instance and hands it to the first solver whose
preconditions hold, falling back to exhaustive search.
"""

# %%
from collections import Counter

from mefe import dispatch, solve_bruteforce, verify
from mefe.polycases import AUTO_ORDER, profile
from mefe.reductions import random_instance

# %%
for structure in ("single", "tadeg1", "degcap1", "cap1", "twoval", "distinct"):
    inst = random_instance(3, 3, 6, structure=structure)
    out = dispatch(inst)
    p = profile(inst)
    print(f"{structure:9s} max capacity {p.max_capacity}, max TA degree {p.max_ta_degree}"
          f" -> {out.solver}: {out.verdict}")

# %%
# Which solver takes which instance, over a few hundred random draws.
usage = Counter()
for seed in range(300):
    inst = random_instance(seed, 1 + seed % 3, 6)
    out = dispatch(inst)
    usage[out.solver] += 1
    assert out.verdict == solve_bruteforce(inst).verdict
    if out.is_yes:
        assert verify(inst, out.matching).is_mefe
print({name: usage[name] for name in AUTO_ORDER if usage[name]})
