"""The property battery behind ``rmklab suite all``.

Every check is a named function returning a list of verdicts.  The report
is canonical (checks sorted by name, JSON with sorted keys) and carries no
timings, so two runs with the same flags are byte-identical; timings are
returned separately.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .affine import (
    Verdict,
    build_c_mmk,
    build_c_nmk,
    check_face_coherence,
    check_purity,
    check_task_solvable,
    check_unique_min_face,
    decide_combination,
    purge,
    set_consensus_protocol,
    set_consensus_task,
)
from .algos import (
    adaptive_rename,
    bg_power,
    cumulative_set_consensus,
    sa_run,
    test_and_set,
    tight_rename,
)
from .runs import enumerate_schedules, facet_to_schedule, rmk_runs, schedule_to_facet
from .sim import (
    Exhaustive,
    Invoke,
    RandomPolicy,
    Read,
    Write,
    check_register_atomicity,
    check_well_nested,
    explore,
    interleaving_count,
    run_protocol,
)
from .topology import chr_iter, standard_simplex

__all__ = ["PROFILES", "MUTATIONS", "CHECKS", "Profile", "suite_all", "fubini"]


@dataclass(frozen=True)
class Profile:
    name: str
    rename_exhaustive: int     # largest p checked on every interleaving
    random_sizes: tuple        # participant counts for seeded random runs
    random_trials: int
    extra_unique: bool         # also check (2,2) and (3,3)


PROFILES = {
    "small": Profile("small", 2, (4,), 1_000, False),
    "medium": Profile("medium", 3, (4, 5), 10_000, True),
}

MUTATIONS: dict[str, Callable] = {
    # the purge keeps facets touching a face of exactly k processes instead of at most k
    "purge-strict": lambda v, k: len(v.carrier) == k,
}


def fubini(n: int) -> int:
    """Number of ordered set partitions of an ``n``-set."""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(math.comb(m, i) * a[m - i] for i in range(1, m + 1)))
    return a[n]


def _cmmk(m: int, k: int, mutation: str | None):
    if mutation is None:
        return build_c_mmk(m, k)
    return build_c_mmk(m, k, keep=MUTATIONS[mutation])


def _brute_force_cmmk(m: int, k: int) -> frozenset:
    """Facets of C(m,m,k) straight from two-round schedules and carrier sizes."""
    out = set()
    for s in enumerate_schedules(m, 2):
        f = schedule_to_facet(s)
        if min(len(v.carrier) for v in f) <= k:
            out.add(f)
    return frozenset(out)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def check_subdivision(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []
    for n in range(1, 5):
        got = len(chr_iter(standard_simplex(n), 1).facets)
        out.append(Verdict("subdivision_counts", f"chr(s^{n - 1})", got == fubini(n),
                           None if got == fubini(n) else {"facets": got, "expected": fubini(n)}))
    got = len(chr_iter(standard_simplex(3), 2).facets)
    out.append(Verdict("subdivision_counts", "chr^2(s^2)", got == 169,
                       None if got == 169 else {"facets": got, "expected": 169}))
    return out


def check_purge(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []
    for m in range(1, 4):
        for k in range(1, m + 1):
            got = _cmmk(m, k, mutation).facets
            want = _brute_force_cmmk(m, k)
            diff = sorted(want ^ got, key=lambda f: sorted(v.sort_key for v in f))
            out.append(Verdict("purge_construction", f"C({m},{m},{k})", not diff, diff[0] if diff else None))
    two = len(_cmmk(2, 1, mutation).facets)
    out.append(Verdict("purge_construction", "C(2,2,1) has 2 facets", two == 2, None if two == 2 else {"facets": two}))
    for m in range(1, 4):
        full = chr_iter(standard_simplex(m), 2).facets
        same = _cmmk(m, m, mutation).facets == full
        out.append(Verdict("purge_construction", f"C({m},{m},{m}) is chr^2", same))
    return out


def check_unique(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    pairs = [(2, 1), (3, 1), (3, 2)] + ([(2, 2), (3, 3)] if profile.extra_unique else [])
    out = []
    for m, k in pairs:
        t = _cmmk(m, k, mutation)
        out.append(check_unique_min_face(t, k))
        out.append(check_purity(t, k))
    # negative control: the same purge on a single subdivision must fail
    one = purge(chr_iter(standard_simplex(3), 1), 1, name="chr^1(s^2) purged, k=1")
    v = check_unique_min_face(one, 1)
    out.append(Verdict("unique_min_face_control", v.instance, not v.passed and v.counterexample is not None,
                       v.counterexample, v.detail))
    return out


def _bad_face(t, k: int):
    """A face whose decisions exceed ``k`` values or leave its carrier, if any."""
    for f in t.complex.sorted_facets():
        for size in range(1, len(f) + 1):
            for face in itertools.combinations(f.ordered(), size):
                dec = {t.decisions[v] for v in face}
                carrier = frozenset().union(*(v.carrier for v in face))
                if len(dec) > k or not dec <= carrier:
                    return frozenset(face)
    return None


def check_set_consensus(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []
    for m in range(1, 4):
        for k in range(1, m + 1):
            t = _cmmk(m, k, mutation)
            try:
                bad = _bad_face(t, k)
            except ValueError as exc:
                out.append(Verdict("set_consensus_decisions", t.name, False, None, str(exc)))
                continue
            out.append(Verdict("set_consensus_decisions", t.name, bad is None, bad))
            runs = rmk_runs(m, k) if mutation is None else [facet_to_schedule(f, m) for f in t.complex.sorted_facets()]
            out.append(check_task_solvable(set_consensus_task(m, k), set_consensus_protocol(t), runs))
    return out


def check_combinations(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    t = build_c_nmk(3, 2, 1)
    out = [check_face_coherence(t)]
    for comb in sorted(t.installs):
        bad = None
        for f in t.complex.sorted_facets():
            vals = {decide_combination(t, f, comb, v) for v in f if v.color in comb}
            if len(vals) > 1 or not vals <= set(comb):
                bad = f
                break
        out.append(Verdict("combination_decisions", f"C(3,2,1) comb={list(comb)}", bad is None, bad))
    return out


def check_bg_power(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []
    ok = all(bg_power(j, 1, 1) == j for j in range(1, 17))
    out.append(Verdict("bg_power", "bg_power(j,1,1) = j, j <= 16", ok))
    bad = None
    for m in range(1, 6):
        for k in range(1, m + 1):
            vals = [bg_power(j, m, k) for j in range(1, 17)]
            if any(b < a for a, b in zip(vals, vals[1:])) or any(v > j for j, v in enumerate(vals, 1)) \
                    or bg_power(m, m, k) != k:
                bad = {"m": m, "k": k}
    out.append(Verdict("bg_power", "monotone, <= j, = k at j = m", bad is None, bad))
    return out


def check_sim(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []

    def flag(p):
        def prog():
            yield Write("flag", 1)
            return (yield Read(1 - p, "flag"))
        return prog

    hs = run_protocol({0: flag(0), 1: flag(1)}, Exhaustive())
    want = interleaving_count([2, 2])
    out.append(Verdict("interleavings", "two threads, two steps each", len(hs) == want,
                       None if len(hs) == want else {"histories": len(hs), "expected": want}))
    bad = next((h for h in hs if not (check_register_atomicity(h) and check_well_nested(h))), None)
    out.append(Verdict("register_atomicity", "flag protocol", bad is None, None if bad is None else bad.to_json()))
    ex = explore({p: (lambda p=p: _mk_client(p)) for p in range(3)}, 3, merge_locals=False)
    worst = max(len(set(o.values())) for o in ex.outputs())
    valid = all(set(o.values()) <= {10, 11, 12} for o in ex.outputs())
    out.append(Verdict("mk_object", "(3,2) object, three invokers", worst <= 2 and valid,
                       None if worst <= 2 else {"distinct": worst}))
    return out


def _mk_client(p: int):
    return (yield Invoke("o", 10 + p, 3, 2))


def check_cumulative(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []
    for m, k in [(2, 1), (2, 2), (3, 1), (3, 2)]:
        for n in range(1, 4):
            res = cumulative_set_consensus({i: i for i in range(n)}, Exhaustive(), m, k, keep_histories=False)
            out.extend(res.verdicts)
    for n in profile.random_sizes:
        res = cumulative_set_consensus({i: i for i in range(n)}, RandomPolicy(seed, profile.random_trials), 2, 1,
                                       keep_histories=False)
        out.extend(Verdict(v.property, v.instance + f",random({seed},{profile.random_trials})", v.passed,
                           v.counterexample, v.detail) for v in res.verdicts)
    return out


def check_tst(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []
    for n in range(1, 4):
        out.extend(test_and_set(range(n), Exhaustive(), keep_histories=False).verdicts)
    return out


def check_rename(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []
    for p in range(1, profile.rename_exhaustive + 1):
        out.extend(tight_rename(range(p), Exhaustive(), keep_histories=False).verdicts)
    for p in profile.random_sizes:
        for v in tight_rename(range(p), RandomPolicy(seed, profile.random_trials), keep_histories=False).verdicts:
            out.append(Verdict(v.property, v.instance + f",random({seed},{profile.random_trials})", v.passed,
                               v.counterexample, v.detail))
    for p, forb in [(1, ()), (2, ()), (2, (1,)), (3, ())]:
        out.extend(adaptive_rename(range(p), Exhaustive(), forbidden=forb, keep_histories=False).verdicts)
    return out


def check_sa(profile: Profile, seed: int, mutation: str | None) -> list[Verdict]:
    out = []
    for n in range(1, 4):
        out.extend(sa_run({i: f"v{i}" for i in range(n)}, Exhaustive()).verdicts)
    return out


CHECKS: dict[str, Callable[[Profile, int, str | None], list[Verdict]]] = {
    "bg_power": check_bg_power,
    "combination_decisions": check_combinations,
    "cumulative_set_consensus": check_cumulative,
    "purge_construction": check_purge,
    "safe_agreement": check_sa,
    "set_consensus_decisions": check_set_consensus,
    "sim_semantics": check_sim,
    "subdivision": check_subdivision,
    "test_and_set": check_tst,
    "tight_rename": check_rename,
    "unique_min_face": check_unique,
}


def _run_check(name: str, profile: str, seed: int, mutation: str | None) -> tuple[str, dict, float]:
    start = time.perf_counter()
    verdicts = CHECKS[name](PROFILES[profile], seed, mutation)
    failed = [v.to_json() for v in verdicts if not v.passed]
    item = {
        "pass": not failed,
        "instances": len(verdicts),
        "failures": failed,
    }
    return name, item, time.perf_counter() - start


def suite_all(profile: str = "small", seed: int = 0, mutation: str | None = None,
              only: list[str] | None = None, threads: int | None = None) -> tuple[dict, dict]:
    """Run the battery; returns ``(report, timings)``.

    ``threads`` (default: the ``RMK_LAB_THREADS`` environment variable, else
    1) caps the number of worker processes.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    names = sorted(only or CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}")
    if threads is None:
        threads = int(os.environ.get("RMK_LAB_THREADS", "1") or 1)
    threads = max(1, threads)
    if threads == 1:
        results = [_run_check(n, profile, seed, mutation) for n in names]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_check, n, profile, seed, mutation) for n in names]
            results = [f.result() for f in futures]
    items = {name: item for name, item, _ in sorted(results)}
    report = {
        "profile": profile,
        "seed": seed,
        "mutation": mutation,
        "pass": all(i["pass"] for i in items.values()),
        "checks": items,
    }
    timings = {name: round(t, 3) for name, _, t in sorted(results)}
    return report, timings
