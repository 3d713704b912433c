"""``rmklab`` command line.

JSON goes to stdout with sorted keys, so identical flags give identical
bytes.  Exit status is 0 when every verdict printed passes.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import affine, algos, export, runs, sim, suite
from .topology import chr_iter, standard_simplex


def _emit(obj: Any, out=None) -> None:
    out = out or sys.stdout
    out.write(export.dumps(obj))


def _policy(args: argparse.Namespace) -> Any:
    if args.policy == "exhaustive":
        return sim.Exhaustive(args.depth)
    if args.policy == "random":
        return sim.RandomPolicy(args.seed, args.trials)
    if args.policy == "fixed":
        if not args.steps:
            raise SystemExit("--policy fixed needs --steps, e.g. --steps 0,1,1,0")
        return sim.Fixed(tuple(int(x) for x in args.steps.split(",")))
    raise SystemExit(f"unknown policy {args.policy}")


def _add_policy(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", choices=["exhaustive", "random", "fixed"], default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--depth", type=int, default=10_000, help="step bound per run (exhaustive)")
    p.add_argument("--steps", default="", help="comma-separated pids (fixed)")
    p.add_argument("--histories", action="store_true", help="include full histories in the output")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_topo_chr(args) -> int:
    c = chr_iter(standard_simplex(args.n), args.q)
    if args.dot:
        sys.stdout.write(export.complex_to_dot(c, f"chr{args.q}_s{args.n - 1}"))
    else:
        _emit(export.complex_to_json(c))
    return 0


def cmd_affine_cmmk(args) -> int:
    t = affine.build_c_mmk(args.m, args.k)
    out: dict[str, Any] = {"name": t.name, "complex": export.complex_to_json(t.complex)}
    ok = True
    if args.check_unique:
        verdicts = [affine.check_unique_min_face(t, args.k), affine.check_purity(t, args.k)]
        out["verdicts"] = [v.to_json() for v in verdicts]
        ok = all(verdicts)
    if args.dot:
        sys.stdout.write(export.complex_to_dot(t.complex, "cmmk"))
    else:
        _emit(out)
    return 0 if ok else 1


def cmd_affine_cnmk(args) -> int:
    try:
        t = affine.build_c_nmk(args.n, args.m, args.k)
    except affine.TractabilityError as exc:
        _emit({"error": str(exc)})
        return 2
    verdicts = [affine.check_face_coherence(t)]
    for comb in sorted(t.installs):
        bad = None
        for f in t.complex.sorted_facets():
            vals = {affine.decide_combination(t, f, comb, v) for v in f if v.color in comb}
            if len(vals) > args.k or not vals <= set(comb):
                bad = f
                break
        verdicts.append(affine.Verdict("combination_decisions", f"{t.name} comb={list(comb)}", bad is None, bad))
    out: dict[str, Any] = {"name": t.name, "facets": len(t.facets), "verdicts": [v.to_json() for v in verdicts]}
    if args.json:
        out["complex"] = export.complex_to_json(t.complex)
    _emit(out)
    return 0 if all(verdicts) else 1


def cmd_runs_enum(args) -> int:
    gen = runs.enumerate_prefix_schedules(args.n, args.q) if args.prefixes else runs.enumerate_schedules(args.n, args.q)
    _emit({"n": args.n, "q": args.q, "schedules": [s.to_json() for s in gen]})
    return 0


def cmd_runs_rmk(args) -> int:
    rs = runs.rmk_runs(args.m, args.k)
    _emit({"m": args.m, "k": args.k, "count": len(rs), "schedules": [s.to_json() for s in rs]})
    return 0


def _flag_program(p: int):
    def prog():
        yield sim.Write("flag", 1)
        return (yield sim.Read(1 - p, "flag"))
    return prog


def _mk_program(p: int):
    def prog():
        return (yield sim.Invoke("o", p, 3, 2))
    return prog


def _write_read_program(p: int):
    def prog():
        yield sim.Write("x", p)
        return (yield sim.Read(p, "x"))
    return prog


PROGRAMS = {
    "flag": (2, _flag_program),
    "mk": (3, _mk_program),
    "write-read": (1, _write_read_program),
    "cumulative": (3, lambda p: (lambda: algos.cumulative_program(p, 3, 2, 1))),
    "tst": (2, lambda p: (lambda: algos.tst_program(p, 2))),
    "sa": (3, lambda p: (lambda: algos.sa_program(p, f"v{p}"))),
}


def cmd_sim_explore(args) -> int:
    if args.program not in PROGRAMS:
        raise SystemExit(f"unknown program {args.program}; choose from {sorted(PROGRAMS)}")
    default_n, factory = PROGRAMS[args.program]
    n = args.n or default_n
    threads = {p: factory(p) for p in range(n)}
    hs = sim.run_protocol(threads, _policy(args), n, label=args.program)
    outcomes: dict[str, int] = {}
    for h in hs:
        key = json.dumps(export.to_jsonable(h.outputs), sort_keys=True)
        outcomes[key] = outcomes.get(key, 0) + 1
    atomic = all(sim.check_register_atomicity(h) for h in hs)
    nested = all(sim.check_well_nested(h) for h in hs)
    out: dict[str, Any] = {
        "program": args.program,
        "n": n,
        "histories": len(hs),
        "outcomes": [{"outputs": json.loads(k), "count": c} for k, c in sorted(outcomes.items())],
        "register_atomicity": atomic,
        "well_nested": nested,
    }
    if args.histories:
        out["history_dumps"] = [h.to_json() for h in hs]
    _emit(out)
    return 0 if atomic and nested else 1


def _algo_out(res: algos.AlgoResult, args) -> int:
    out = res.to_json()
    if args.histories:
        out["history_dumps"] = [h.to_json() for h in res.histories]
    _emit(out)
    return 0 if res.passed else 1


def cmd_algo_cumulative(args) -> int:
    res = algos.cumulative_set_consensus({i: i for i in range(args.n)}, _policy(args), args.m, args.k,
                                         keep_histories=args.histories)
    return _algo_out(res, args)


def cmd_algo_tst(args) -> int:
    res = algos.test_and_set(range(args.n), _policy(args), args.m, args.k, keep_histories=args.histories)
    return _algo_out(res, args)


def cmd_algo_rename(args) -> int:
    if args.adaptive:
        forb = [int(x) for x in args.forbidden.split(",") if x]
        res = algos.adaptive_rename(range(args.n), _policy(args), forbidden=forb, keep_histories=args.histories)
    else:
        res = algos.tight_rename(range(args.n), _policy(args), args.m, args.k, strategy=args.strategy,
                                 keep_histories=args.histories)
    return _algo_out(res, args)


def cmd_algo_sa(args) -> int:
    res = algos.sa_run({i: f"v{i}" for i in range(args.n)}, _policy(args), keep_histories=args.histories)
    return _algo_out(res, args)


def cmd_suite_all(args) -> int:
    report, timings = suite.suite_all(args.profile, args.seed, args.mutate, args.only or None, args.threads)
    _emit(report)
    if args.timings:
        sys.stderr.write(export.dumps({"timings_seconds": timings}))
    return 0 if report["pass"] else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rmklab", description="Chromatic complexes, affine tasks and "
                                                            "shared-memory algorithms at desk scale.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    topo = sub.add_parser("topo").add_subparsers(dest="sub", required=True)
    p = topo.add_parser("chr", help="iterated chromatic subdivision of the standard simplex")
    p.add_argument("--n", type=int, required=True, help="number of colors")
    p.add_argument("--q", type=int, required=True, help="number of subdivisions")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", default=True)
    g.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_topo_chr)

    aff = sub.add_parser("affine").add_subparsers(dest="sub", required=True)
    p = aff.add_parser("cmmk", help="build C(m,m,k)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--check-unique", action="store_true")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_affine_cmmk)
    p = aff.add_parser("cnmk", help="build C(n,m,k) and check it")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--json", action="store_true", help="include the complex")
    p.set_defaults(func=cmd_affine_cnmk)

    rn = sub.add_parser("runs").add_subparsers(dest="sub", required=True)
    p = rn.add_parser("enum", help="enumerate schedules")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--prefixes", action="store_true", help="also schedules where processes stop")
    p.set_defaults(func=cmd_runs_enum)
    p = rn.add_parser("rmk", help="two-round schedules of C(m,m,k)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_runs_rmk)

    sm = sub.add_parser("sim").add_subparsers(dest="sub", required=True)
    p = sm.add_parser("explore", help="run a built-in program under a policy")
    p.add_argument("--program", required=True, help=f"one of {sorted(PROGRAMS)}")
    p.add_argument("--n", type=int, default=0, help="number of processes (program default if 0)")
    _add_policy(p)
    p.set_defaults(func=cmd_sim_explore)

    al = sub.add_parser("algo").add_subparsers(dest="sub", required=True)
    for name, func in [("cumulative", cmd_algo_cumulative), ("tst", cmd_algo_tst),
                       ("rename", cmd_algo_rename), ("sa", cmd_algo_sa)]:
        p = al.add_parser(name)
        p.add_argument("--n", type=int, required=True, help="number of participants")
        p.add_argument("--m", type=int, default=2)
        p.add_argument("--k", type=int, default=1)
        _add_policy(p)
        if name == "rename":
            p.add_argument("--strategy", choices=["ladder", "narrow"], default="ladder")
            p.add_argument("--adaptive", action="store_true", help="run adaptive (2p-1)-renaming instead")
            p.add_argument("--forbidden", default="", help="comma-separated claimed names (adaptive)")
        p.set_defaults(func=func)

    st = sub.add_parser("suite").add_subparsers(dest="sub", required=True)
    p = st.add_parser("all", help="run the property battery")
    p.add_argument("--profile", choices=sorted(suite.PROFILES), default="small")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutate", choices=sorted(suite.MUTATIONS), default=None,
                   help="inject a known bug to see the battery catch it")
    p.add_argument("--only", action="append", choices=sorted(suite.CHECKS), help="restrict to some checks")
    p.add_argument("--threads", type=int, default=None, help="worker processes (default RMK_LAB_THREADS or 1)")
    p.add_argument("--timings", action="store_true", help="print per-check timings to stderr")
    p.set_defaults(func=cmd_suite_all)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, sim.SingleWriterViolation, sim.SoftWiringViolation, sim.ExplorationLimit) as exc:
        sys.stderr.write(f"rmklab: error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
