"""Desk-scale toolkit for chromatic subdivisions, affine tasks built from
(m,k)-set-consensus objects, and the shared-memory algorithms that use them."""

from __future__ import annotations

from .affine import (
    AffineTask,
    TractabilityError,
    Verdict,
    build_c_mmk,
    build_c_nmk,
    check_face_coherence,
    check_purity,
    check_task_solvable,
    check_unique_min_face,
    decide_combination,
    decide_set_consensus,
    purge,
    set_consensus_protocol,
    set_consensus_task,
)
from .algos import (
    adaptive_rename,
    bg_power,
    check_layer_phases,
    cumulative_set_consensus,
    sa_run,
    test_and_set,
    tight_rename,
)
from .runs import (
    Adversary,
    ModelSpec,
    ObstructionFree,
    Resilient,
    Schedule,
    WaitFree,
    enumerate_schedules,
    facet_to_schedule,
    model_contains,
    rmk_runs,
    schedule_to_facet,
    view_of,
)
from .sim import (
    ExecutionHistory,
    Exhaustive,
    Fixed,
    Invoke,
    MKObject,
    RandomPolicy,
    Read,
    Snapshot,
    Write,
    check_tst_linearizable,
    explore,
    mk_invoke,
    run_protocol,
)
from .topology import (
    ChromaticComplex,
    Simplex,
    Vertex,
    chr,
    chr_iter,
    cone,
    ordered_partitions,
    restrict_to_face,
    standard_simplex,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
