"""Command-line interface: certify, tower, combine, export.

Exit codes: 0 all verdicts as asserted, 1 verification failure, 2 invalid
input, 3 size guard exceeded, 4 I/O failure.  Reports go to stdout (or
--out, written atomically) and are byte-identical across repeated runs.
"""

import argparse
import os
import sys
import tempfile
import time

from .exact_arith import Moduli, parse_rational
from .hitting import (
    ConditionFails,
    DEFAULT_SIZE_GUARD,
    NotFoundWithin,
    SizeGuardExceeded,
    build_certificate,
    hitting_check,
    level_condition,
    minimal_level,
    preimage_connected_check,
    preimage_equality_check,
    valuation_level,
)
from .exact_arith import NoDecomposition
from .lifting import PLLoop, WindingVector, image_set
from .loop_design import design_all_nonzero
from .reports import (
    EXIT_INVALID,
    EXIT_IO,
    EXIT_OK,
    EXIT_SIZE,
    EXIT_VERIFICATION,
    SCHEMA_VERSION,
    RunConfig,
    rat,
    render_report,
)
from .torus import write_segment_set_csv
from .tower import (
    TowerParams,
    build_tower,
    choose_params,
    coherent_base_sample,
    coherent_deep_sample,
    epsilon_bound_check,
    verify_tower,
)

SIZE_GUARD_ENV = "FUPCON_SIZE_GUARD"


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError as exc:
        raise ValueError(f"not a comma-separated integer list: {text!r}") from exc


def _parse_range(text: str) -> tuple[int, int]:
    text = str(text)
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
    else:
        lo = hi = int(text)
    if lo < 0 or hi < lo:
        raise ValueError(f"bad stage range: {text!r}")
    return lo, hi


def _parse_loops(text: str) -> tuple[tuple[int, ...], ...]:
    groups = [g for g in str(text).split(";") if g.strip()]
    if not groups:
        raise ValueError("empty loop family")
    return tuple(_parse_ints(g) for g in groups)


def _default_guard() -> int:
    env = os.environ.get(SIZE_GUARD_ENV)
    if env is None:
        return DEFAULT_SIZE_GUARD
    guard = int(env)
    if guard < 1:
        raise ValueError(f"{SIZE_GUARD_ENV} must be positive")
    return guard


def cmd_certify(cfg: RunConfig) -> tuple[dict, int]:
    moduli = Moduli(cfg.moduli)
    w = WindingVector(cfg.winding)
    try:
        val: int | None = valuation_level(w, moduli)
        val_note = None
    except NoDecomposition as exc:
        val, val_note = None, str(exc)
    try:
        mini: int | None = minimal_level(w, moduli)
    except NotFoundWithin:
        mini = None
    levels = []
    ok = True
    cert_stage = None
    for n in range(cfg.n_lo, cfg.n_hi + 1):
        condition = level_condition(w, moduli, n)
        hit = hitting_check(w, moduli, n, cfg.size_guard)
        eq = preimage_equality_check(w, moduli, n, cfg.size_guard)
        conn, count = preimage_connected_check(w, moduli, n, cfg.size_guard)
        if hit != condition:
            ok = False
        if hit and not (eq and conn):
            ok = False
        if mini is not None and hit != (n >= mini):
            ok = False
        if condition and cert_stage is None:
            cert_stage = n
        levels.append(
            {
                "stage": n,
                "gcd_condition": condition,
                "hitting": hit,
                "preimage_equality": eq,
                "preimage_connected": conn,
                "component_count": count,
            }
        )
    certificate = None
    if cert_stage is not None:
        cert = build_certificate(w, moduli, cert_stage, cfg.size_guard)
        verified = cert.verify()
        if not verified:
            ok = False
        recipe = None
        if cert.recipe is not None:
            recipe = {
                "alphas": list(cert.recipe.alphas),
                "units": list(cert.recipe.units),
                "betas": list(cert.recipe.betas),
                "cofactor": cert.recipe.cofactor,
                "cofactor_parts": list(cert.recipe.cofactor_parts),
            }
        certificate = {
            "stage": cert.stage,
            "witnesses": [
                {"target": list(t), "time": k} for t, k in cert.witnesses
            ],
            "recipe": recipe,
            "verified": verified,
        }
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "certify",
        "inputs": {
            "moduli": list(cfg.moduli),
            "winding": list(cfg.winding),
            "stage_range": [cfg.n_lo, cfg.n_hi],
            "size_guard": cfg.size_guard,
        },
        "results": {
            "valuation_level": val,
            "valuation_level_note": val_note,
            "minimal_level": mini,
            "levels": levels,
            "certificate": certificate,
            "verified": ok,
        },
    }
    return report, EXIT_OK if ok else EXIT_VERIFICATION


def cmd_tower(cfg: RunConfig) -> tuple[dict, int]:
    moduli = Moduli(cfg.moduli)
    w = WindingVector(cfg.winding)
    params = choose_params(cfg.epsilon, moduli, w, cfg.depth)
    clamped = params.epsilon != cfg.epsilon
    overridden = cfg.n1_override is not None
    if overridden:
        params = TowerParams(
            epsilon=params.epsilon,
            n0=params.n0,
            delta=params.delta,
            n1=cfg.n1_override,
            depth=params.depth,
            valuation=params.valuation,
            minimal=params.minimal,
        )
    tower = build_tower(PLLoop.straight(w), params, moduli, cfg.size_guard)
    report_levels = verify_tower(tower)
    bases = coherent_base_sample(tower)
    cands = coherent_deep_sample(tower, cfg.candidates)
    eps_check = epsilon_bound_check(tower, bases, cands)
    ok = report_levels.all_ok and eps_check.ok
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "tower",
        "inputs": {
            "moduli": list(cfg.moduli),
            "winding": list(cfg.winding),
            "epsilon": rat(cfg.epsilon),
            "depth": cfg.depth,
            "n1_override": cfg.n1_override,
            "candidates": cfg.candidates,
            "size_guard": cfg.size_guard,
        },
        "results": {
            "params": {
                "epsilon": rat(params.epsilon),
                "epsilon_clamped": clamped,
                "n0": params.n0,
                "delta": rat(params.delta),
                "n1": params.n1,
                "n1_overridden": overridden,
                "n1_exceeds_n0": params.n1_exceeds_n0,
                "depth": params.depth,
                "valuation_level": params.valuation,
                "minimal_level": params.minimal,
            },
            "levels": [
                {
                    "index": c.index,
                    "role": c.role,
                    "segment_count": c.segment_count,
                    "connected": c.connected,
                    "component_count": c.component_count,
                    "contains_base": c.contains_base,
                    "bonding_into_previous": c.bonding_into_previous,
                    "forward_equality": c.forward_equality,
                }
                for c in report_levels.checks
            ],
            "epsilon_check": {
                "ok": eps_check.ok,
                "candidates": eps_check.candidates,
                "matched": eps_check.matched,
                "base_samples": len(bases),
                "max_distance": None
                if eps_check.max_distance is None
                else rat(eps_check.max_distance),
                "max_distance_with_tail": None
                if eps_check.max_distance_with_tail is None
                else rat(eps_check.max_distance_with_tail),
            },
            "verified": ok,
        },
    }
    return report, EXIT_OK if ok else EXIT_VERIFICATION


def cmd_combine(cfg: RunConfig) -> tuple[dict, int]:
    design = design_all_nonzero(cfg.loops)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "combine",
        "inputs": {"loops": [list(l) for l in cfg.loops]},
        "results": {
            "coefficients": list(design.coefficients),
            "final_winding": list(design.final),
            "all_nonzero": design.final.admissible,
            "loop_breakpoints": len(design.loop.breakpoints),
            "steps": [
                {
                    "stage": s.stage,
                    "repetitions": s.repetitions,
                    "before": list(s.before),
                    "injected": list(s.injected),
                    "after": list(s.after),
                }
                for s in design.steps
            ],
        },
    }
    return report, EXIT_OK


def cmd_export(cfg: RunConfig) -> tuple[dict, int]:
    moduli = Moduli(cfg.moduli)
    w = WindingVector(cfg.winding)
    written: list[str] = []
    out_dir = cfg.out_dir or "."
    loop = PLLoop.straight(w)
    if cfg.image_stages or cfg.tower_levels:
        os.makedirs(out_dir, exist_ok=True)
    for n in sorted(set(cfg.image_stages)):
        target = os.path.join(out_dir, f"image_stage_{n}.csv")
        write_segment_set_csv(image_set(loop, n, moduli), target)
        written.append(target)
    if cfg.tower_levels:
        params = choose_params(cfg.epsilon, moduli, w, cfg.depth)
        tower = build_tower(loop, params, moduli, cfg.size_guard)
        for idx, lvl in enumerate(tower.levels, start=1):
            target = os.path.join(out_dir, f"tower_level_{idx:02d}.csv")
            write_segment_set_csv(lvl, target)
            written.append(target)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "export",
        "inputs": {
            "moduli": list(cfg.moduli),
            "winding": list(cfg.winding),
            "image_stages": sorted(set(cfg.image_stages)),
            "tower_levels": cfg.tower_levels,
            "epsilon": None if cfg.epsilon is None else rat(cfg.epsilon),
            "depth": cfg.depth,
            "out_dir": out_dir,
        },
        "results": {"files": written},
    }
    return report, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fupcon",
        description="Exact hitting certificates and small connected "
        "neighborhood towers for products of coprime solenoids.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--size-guard", type=int, default=None,
                        help=f"enumeration bound (default {DEFAULT_SIZE_GUARD}, "
                        f"env {SIZE_GUARD_ENV})")
    common.add_argument("--out", default=None, help="write the report here "
                        "instead of stdout (atomic)")
    common.add_argument("--timing", action="store_true",
                        help="print wall time to stderr (never in the report)")
    sub = parser.add_subparsers(dest="command", required=True)

    cert = sub.add_parser("certify", parents=[common],
                          help="hitting/equality/connectivity verdicts")
    cert.add_argument("--moduli", required=True)
    cert.add_argument("--winding", required=True)
    cert.add_argument("--range", dest="stage_range", default="0..3")

    tow = sub.add_parser("tower", parents=[common],
                        help="build and verify a neighborhood tower")
    tow.add_argument("--moduli", required=True)
    tow.add_argument("--winding", required=True)
    tow.add_argument("--epsilon", required=True)
    tow.add_argument("--depth", type=int, default=2)
    tow.add_argument("--n1", type=int, default=None,
                     help="override the certificate stage (negative control)")
    tow.add_argument("--candidates", type=int, default=20)

    comb = sub.add_parser("combine", parents=[common],
                         help="make every winding entry nonzero")
    comb.add_argument("--loops", required=True,
                      help="semicolon-separated windings, e.g. '3,0;-2,1'")

    exp = sub.add_parser("export", parents=[common],
                        help="write segment sets as CSV")
    exp.add_argument("--moduli", required=True)
    exp.add_argument("--winding", required=True)
    exp.add_argument("--image-n", dest="image_stages", type=int,
                     action="append", default=[])
    exp.add_argument("--tower-levels", action="store_true")
    exp.add_argument("--epsilon", default=None)
    exp.add_argument("--depth", type=int, default=2)
    exp.add_argument("--out-dir", default=".")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    guard = args.size_guard if args.size_guard is not None else _default_guard()
    if guard < 1:
        raise ValueError("size guard must be positive")
    common = dict(size_guard=guard, out=args.out, timing=args.timing)
    if args.command == "certify":
        lo, hi = _parse_range(args.stage_range)
        return RunConfig(
            command="certify",
            moduli=_parse_ints(args.moduli),
            winding=_parse_ints(args.winding),
            n_lo=lo,
            n_hi=hi,
            **common,
        )
    if args.command == "tower":
        return RunConfig(
            command="tower",
            moduli=_parse_ints(args.moduli),
            winding=_parse_ints(args.winding),
            epsilon=parse_rational(args.epsilon),
            depth=args.depth,
            n1_override=args.n1,
            candidates=args.candidates,
            **common,
        )
    if args.command == "combine":
        return RunConfig(command="combine", loops=_parse_loops(args.loops), **common)
    if args.command == "export":
        if args.tower_levels and args.epsilon is None:
            raise ValueError("--tower-levels requires --epsilon")
        return RunConfig(
            command="export",
            moduli=_parse_ints(args.moduli),
            winding=_parse_ints(args.winding),
            image_stages=tuple(args.image_stages),
            tower_levels=args.tower_levels,
            epsilon=None if args.epsilon is None else parse_rational(args.epsilon),
            depth=args.depth,
            out_dir=args.out_dir,
            **common,
        )
    raise ValueError(f"unknown command {args.command!r}")


_COMMANDS = {
    "certify": cmd_certify,
    "tower": cmd_tower,
    "combine": cmd_combine,
    "export": cmd_export,
}


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fupcon-report-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, matching the invalid-input code
        return EXIT_INVALID if exc.code not in (0,) else 0
    started = time.monotonic()
    try:
        cfg = _config_from_args(args)
        report, code = _COMMANDS[cfg.command](cfg)
    except (ValueError, ConditionFails) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except SizeGuardExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SIZE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    try:
        _emit(render_report(report), cfg.out)
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO
    if cfg.timing:
        sys.stderr.write(f"elapsed: {time.monotonic() - started:.3f}s\n")
    return code


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
