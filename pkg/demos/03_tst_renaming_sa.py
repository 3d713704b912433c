# %% [markdown]
# # Test-and-set, tight renaming and safe agreement
#
# Test-and-set is built from rounds of cumulative set consensus with
# consensus objects shared by pairs.  A ladder of test-and-set objects gives
# tight renaming.  We also show what goes wrong with a cheaper narrowing
# scheme, and close with safe agreement.

# %%
from collections import Counter

from rmklab import Exhaustive, Fixed, RandomPolicy, sa_run, tight_rename
from rmklab.algos import RangeViolation
from rmklab.algos import test_and_set as run_tst
from rmklab.sim import ExecutionHistory

res = run_tst(range(3), Exhaustive(), keep_histories=False)
print(res.states, "states;", [(v.property, v.passed) for v in res.verdicts])
print("winners:", Counter(next(p for p, o in out.items() if o == "WIN") for out in res.outcomes))

# %%
res = tight_rename(range(2), Exhaustive())
print("ladder, p=2:", res.passed, sorted({tuple(sorted(o.items())) for o in res.outcomes}))
res = tight_rename(range(4), RandomPolicy(0, 500), keep_histories=False)
print("ladder, p=4 random:", res.passed)

# %% [markdown]
# The narrowing scheme can hand both processes the same small name.  The
# witness replays deterministically.

# %%
res = tight_rename(range(2), Exhaustive(), strategy="narrow")
v = res.verdict("tight_rename")
print("narrow, p=2:", v.passed, v.counterexample["outputs"])
steps = ExecutionHistory.from_json(v.counterexample["history"]).schedule
try:
    tight_rename(range(2), Fixed(steps), strategy="narrow")
except RangeViolation as exc:
    print("replayed:", exc)

# %%
res = sa_run({0: "a", 1: "b", 2: "c"}, Exhaustive())
print(res.states, "states;", [(v.property, v.passed) for v in res.verdicts])
print(Counter(tuple(sorted(o.items())) for o in res.outcomes).most_common(4))
