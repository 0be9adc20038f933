"""Two settings where a fair matching always exists, and how to build it."""

# %%
from mefe import verify
from mefe.existence import (
    check_binval_preconditions,
    exchange_steps,
    seat_covering_matching,
    solve_existence_hr,
)
from mefe.reductions import random_instance

# %%
# One common utility, valuations equal to grades, no tied grades, enough TAs for every seat.
inst = random_instance(1, 2, 6, structure="binval", k=0, density=0.9)
pre = check_binval_preconditions(inst)
print("preconditions hold:", pre.ok, " certified threshold:", pre.k_star)

# %%
# Start from any matching that fills every seat, then let unmatched TAs with a
# better grade swap in.  The potential counts outsiders ranked above a course's
# weakest member and drops with each swap.
steps = list(exchange_steps(inst, seat_covering_matching(inst)))
for step in steps:
    print(f"{step.envier} replaces {step.evicted} in {step.course}: potential {step.psi_before} -> {step.psi_after}")
final = steps[-1].matching
print("fair at the certified threshold:", verify(inst, final, pre.k_star).is_mefe)

# %%
# Everyone values everything and there are no ties: TA-proposing deferred
# acceptance is already fair at k = 1.
inst = random_instance(5, 3, 6, structure="allpos", k=1)
out = solve_existence_hr(inst)
print(out.verdict, out.matching.key())
