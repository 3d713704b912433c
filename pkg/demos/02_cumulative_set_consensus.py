# %% [markdown]
# # Set consensus from (m,k) objects
#
# `p` processes with access to `(m,k)`-set-consensus objects (any `m` of them
# may invoke, at most `k` values come back) can reach `bg_power(p, m, k)`-set
# consensus.  The layered algorithm here gets that bound; we check it on every
# interleaving of three processes and on seeded random runs of five.

# %%
from collections import Counter

from rmklab import Exhaustive, RandomPolicy, bg_power, cumulative_set_consensus

for p in range(1, 7):
    print(p, [bg_power(p, m, k) for m, k in [(2, 1), (3, 1), (3, 2)]])

# %%
res = cumulative_set_consensus({0: 0, 1: 1, 2: 2}, Exhaustive(), 2, 1, keep_histories=False)
print(res.states, "states explored")
for v in res.verdicts:
    print(f"  {v.property:18s} {v.passed}")
spread = Counter(len({x for x, _ in o.values()}) for o in res.outcomes)
print("distinct outputs per final state:", dict(spread))

# %% [markdown]
# Random runs with five processes; the bound is 3.

# %%
res = cumulative_set_consensus({i: i for i in range(5)}, RandomPolicy(seed=1, trials=2000), 2, 1,
                               keep_histories=False)
print(res.passed, Counter(len({x for x, _ in o.values()}) for o in res.outcomes))
print("return layers:", Counter(layer for o in res.outcomes for _, layer in o.values()))
