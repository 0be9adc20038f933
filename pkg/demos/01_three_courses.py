"""Three courses, three TAs: why a high average is not enough.

Run with ``python3 demos/01_three_courses.py``.
"""

# %%
from mefe import Matching, enumerate_all_mefe, make_instance, solve_bruteforce, verify

# Each course ranks TAs by grade, and here the grade doubles as the course's valuation.
values = {"c1": (9, 8, 7), "c2": (8, 7, 9), "c3": (7, 7, 7)}
utilities = {"t1": (9, 8, 8), "t2": (8, 8, 8), "t3": (8, 8, 8)}
tas, courses = ["t1", "t2", "t3"], ["c1", "c2", "c3"]

inst = make_instance(
    [(c, 1, dict(zip(tas, values[c]))) for c in courses],
    [(t, dict(zip(courses, utilities[t])), {c: values[c][i] for c in courses}) for i, t in enumerate(tas)],
    k=7,
)

# %%
# t2 teaches c1 and t1 teaches c2.  Every course clears 7 on average...
unfair = Matching({"t2": "c1", "t1": "c2", "t3": "c3"})
report = verify(inst, unfair)
print("averages:", {x: str(a) for x, a in report.avg_utils.items()})

# %%
# ...but t1 has the better grade for c1 and would rather teach it.
print("envy pairs:", report.envy_pairs)
print("merit-based envy-free?", report.is_mefe)

# %%
# The exhaustive solver finds the fair assignment, and it is not the only one.
out = solve_bruteforce(inst)
print(out.verdict, out.matching.key())
for mu in enumerate_all_mefe(inst):
    print("  MEFE:", mu.key())
