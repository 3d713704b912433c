# %% [markdown]
# # Chromatic subdivisions and purged two-round complexes
#
# A run of the iterated immediate-snapshot model on `n` processes is a facet
# of an iterated chromatic subdivision of the standard simplex.  This script
# builds those complexes, purges them down to the runs in which someone sees
# at most `k` processes, and checks that each vertex then points at a single
# smallest face.

# %%
from rmklab import (
    build_c_mmk,
    check_purity,
    check_unique_min_face,
    chr_iter,
    decide_set_consensus,
    facet_to_schedule,
    purge,
    standard_simplex,
)

for n in range(1, 5):
    print(f"Chr(s^{n - 1}) has {len(chr_iter(standard_simplex(n), 1).facets)} facets")

# %% [markdown]
# Each facet is a one-round schedule: an ordered partition of the processes.

# %%
for f in chr_iter(standard_simplex(2), 1).sorted_facets():
    print(facet_to_schedule(f, 2).to_json()["rounds"], [sorted(v.carrier) for v in f.ordered()])

# %% [markdown]
# Two rounds, three processes, agreement bound two.

# %%
t = build_c_mmk(3, 2)
print(t.name, "keeps", len(t.facets), "of", len(chr_iter(standard_simplex(3), 2).facets), "facets")
print(check_unique_min_face(t, 2))
print(check_purity(t, 2))

# %%
f = t.complex.sorted_facets()[0]
print("schedule:", facet_to_schedule(f, 3).to_json()["rounds"])
print("decisions:", {v.color: decide_set_consensus(t, f, v) for v in f})

# %% [markdown]
# With one subdivision instead of two the same purge does not work: some
# vertex sees two incomparable smallest faces.

# %%
bad = check_unique_min_face(purge(chr_iter(standard_simplex(3), 1), 1), 1)
print(bad.passed, bad.detail)
print("counterexample carriers:", sorted(sorted(v.carrier) for v in bad.counterexample))
