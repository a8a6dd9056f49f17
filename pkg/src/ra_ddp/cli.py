"""Command line entry point: ``ra-ddp check|solve|play|audit TASKFILE``.

Exit status: 0 success, 1 audit or correctness failure, 2 input error,
3 unsolvable.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import _kernels
from .audit import fixpoint_implication_audit, hji_audit, invariant_set_audit, monotonicity_audit, vector_field_certificate
from .export import read_values, write_regions, write_trace, write_values
from .oracle import brute_force_value, reach_avoid_sets, tree_size
from .player import AdversaryModel, Termination, hybrid_play, play_correct, segment_game
from .scope import Unsolvable, hyper_policy_synthesize
from .solver import StageCostUnbounded, value, winning_mask
from .taskfile import TaskFileError, load
from .wellformed import well_formed

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNSOLVABLE = 0, 1, 2, 3
ORACLE_NODES = 200_000

log = logging.getLogger("ra_ddp")


def _segment_start(cfg, i: int):
    return cfg.start if i == 0 else cfg.space.lift_point(cfg.task.route[i])


def _synthesize(cfg, i: int, backend):
    g = segment_game(cfg, i, _segment_start(cfg, i))
    return hyper_policy_synthesize(cfg.hyper, g, _segment_start(cfg, i), cfg.space.ambient, backend=backend)


def cmd_check(args, cfg) -> int:
    rep = well_formed(cfg)
    print("\n".join(rep.lines()))
    return EXIT_OK if rep.overall else EXIT_FAIL


def _oracle_check(sol) -> int:
    """Mismatches between the table and the brute-force oracle on the computed rows.

    Full tree walks are used where they fit in the node budget; deeper
    stages share one memo across queries.
    """
    g = sol.game
    lo = sol.stages_computed[0]
    sets = reach_avoid_sets(g)
    shared: dict = {}
    bad = 0
    for k in range(lo, sol.N + 1):
        cache = shared if tree_size(g, k) > ORACLE_NODES else None
        win = winning_mask(sol, k)
        for i, x in enumerate(g.scope):
            ref = brute_force_value(g, x, k, node_budget=10 * ORACLE_NODES, cache=cache)
            if ref != value(sol, x, k) or (x in sets[k]) != bool(win[i]):
                bad += 1
                log.error("oracle mismatch at x=%s k=%d: table %s, oracle %s", x, k, value(sol, x, k), ref)
    return bad


def cmd_solve(args, cfg) -> int:
    syn = _synthesize(cfg, args.segment, args.backend)
    sol = syn.solution
    g = sol.game
    x0 = _segment_start(cfg, args.segment)
    print(f"segment={args.segment} N={g.N} scope={g.scope.lo}..{g.scope.hi} extensions={syn.extensions}")
    print(f"fixpoint_stage={sol.fixpoint_stage} computed={sol.stages_computed[0]}..{sol.stages_computed[1]}")
    print(f"winning_cells_k1={int(winning_mask(sol, 1).sum())} value_x0={value(sol, x0, 1)}")
    if args.dump_values:
        write_values(sol, args.dump_values)
    if args.dump_region:
        write_regions(sol, args.dump_region, cfg.space.position_axes)
    if args.oracle:
        bad = _oracle_check(sol)
        print(f"oracle_mismatches={bad}")
        if bad:
            return EXIT_FAIL
    return EXIT_OK


def cmd_play(args, cfg) -> int:
    model = AdversaryModel.parse(args.adversary or cfg.adversary, cfg.seed if args.seed is None else args.seed)
    trace = hybrid_play(cfg, model, backend=args.backend)
    if args.trace_out:
        write_trace(trace, args.trace_out)
    ok = play_correct(trace, cfg.task)
    print(f"termination={trace.termination.value} steps={len(trace.steps)} final={trace.final_state} correct={str(ok).lower()}")
    if trace.note:
        print(f"note={trace.note}")
    if ok:
        return EXIT_OK
    return EXIT_UNSOLVABLE if trace.termination is Termination.UNSOLVABLE_SEGMENT else EXIT_FAIL


def cmd_audit(args, cfg) -> int:
    if args.values:
        g = segment_game(cfg, args.segment, _segment_start(cfg, args.segment))
        sol = read_values(args.values, g)
    else:
        sol = _synthesize(cfg, args.segment, args.backend).solution
    inv = invariant_set_audit(sol, delta=cfg.hyper.delta)
    results = [monotonicity_audit(sol), hji_audit(sol), vector_field_certificate(sol),
               fixpoint_implication_audit(sol, _segment_start(cfg, args.segment)), inv.closure]
    for r in results + [inv.inclusion]:
        print(f"{r.name}={'pass' if r.ok else 'fail'} violations={len(r.violations)}")
    # inclusion in the dilated safe set is a premise, reported but not enforced
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ra-ddp", description="Reach-avoid game synthesis on integer lattices.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--threads", type=int, default=None, help="cap solver threads (RA_DDP_THREADS overrides)")
    p.add_argument("--backend", choices=("numba", "numpy"), default=None)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="evaluate the well-formedness side conditions")
    c.add_argument("taskfile")

    s = sub.add_parser("solve", help="synthesize one segment's controller")
    s.add_argument("taskfile")
    s.add_argument("--segment", type=int, default=0)
    s.add_argument("--dump-values", metavar="CSV")
    s.add_argument("--dump-region", metavar="DIR")
    s.add_argument("--oracle", action="store_true", help="cross-check against brute-force enumeration")

    pl = sub.add_parser("play", help="play the whole route against an adversary")
    pl.add_argument("taskfile")
    pl.add_argument("--adversary", choices=("zero", "random", "worst"))
    pl.add_argument("--seed", type=int)
    pl.add_argument("--trace-out", metavar="CSV")

    a = sub.add_parser("audit", help="run the certificate audits on a solved segment")
    a.add_argument("taskfile")
    a.add_argument("--segment", type=int, default=0)
    a.add_argument("--values", metavar="CSV", help="audit a dumped value table instead of solving")
    return p


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "play": cmd_play, "audit": cmd_audit}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    _kernels.set_threads(args.threads)
    try:
        cfg = load(args.taskfile)
        n_seg = max(len(cfg.task.route) - 1, 1)
        if getattr(args, "segment", 0) not in range(n_seg):
            raise TaskFileError(f"segment must be in 0..{n_seg - 1}")
        return COMMANDS[args.command](args, cfg)
    except TaskFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (Unsolvable, StageCostUnbounded) as exc:
        print(f"unsolvable: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
