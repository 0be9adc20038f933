"""Hard instances built from three classic NP-complete problems.

Each source problem is decided by brute force on its own terms and compared
with the MEFE answer for the generated instance.
"""

# %%

from mefe import solve_bruteforce
from mefe.reductions import from_3dpm, from_partition, from_smti33, map_back_3dpm, map_back_partition
from mefe.reductions import SmtiInput, ThreeDMInput

# %%
# Equal-size, equal-sum partition.  The threshold is the mean value, so a
# course clears it exactly when its half sums to half the total.
values = [1, 2, 3, 4]
inst = from_partition(values)
out = solve_bruteforce(inst)
print("k =", inst.k, "->", out.verdict, map_back_partition(inst, out.matching))
print("[1,1,1,5] ->", solve_bruteforce(from_partition([1, 1, 1, 5])).verdict)

# %%
# Men become unit-capacity courses and women become TAs.
smti = SmtiInput({"m1": ["w1", "w2"], "m2": ["w2"]}, {"w1": [["m1"]], "w2": [["m1"], ["m2"]]})
inst = from_smti33(smti)
print("grades:", [(t, x, str(inst.grade(t, x))) for x in inst.course_ids for t in inst.neighbors_of_course(x)])
print(solve_bruteforce(inst).matching.key())

# %%
# Two of the three triples already form a perfect matching.
tdm = ThreeDMInput(("p1", "p2"), ("q1", "q2"), ("r1", "r2"),
                   (("p1", "q1", "r1"), ("p2", "q2", "r2"), ("p1", "q2", "r2")))
out = solve_bruteforce(from_3dpm(tdm))
print("perfect 3D matching:", map_back_3dpm(tdm, out.matching))
