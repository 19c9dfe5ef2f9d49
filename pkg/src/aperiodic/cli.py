"""Command-line front end.

Seven command groups mirror the library layout: ``pattern`` (square block
construction and checking), ``game`` (coin redistribution search), ``hull``
and ``safe`` and ``geom`` (leveled obstacle geometry), ``cert`` (certificate
validation, construction, and use), ``glue`` (merging two certified
configurations across a region boundary).

Exit codes: 0 on success (including negative-but-well-posed answers such as
UNORIENTABLE), 1 when a check fails or a search gives up, 2 on bad usage or
unreadable input.  Every command that writes an output directory drops a
``manifest.json`` describing the invocation next to its artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional, Tuple

from . import game, io, patterns, profiles, svg
from .certificate import (
    CertificateError,
    ExtractError,
    Window,
    aperiodicity_extract,
    build_dense_certificate,
    choose_compatible_config,
    compatible,
    validate_certificate,
)
from .geometry import PathError, SafeSystem, build_hull, check_hypotheses
from .gluing import GlueError, glue
from .rationals import fmt, parse_fraction

# Acceptability parameter sets exposed on the command line.  "depth1" is the
# single-letter alphabet stage (side 9, modulus 1); "depth2" adds the second
# stage (side 33, modulus 11).
ACCEPT_PROFILES = {
    "depth1": patterns.AcceptabilityParams((1,), (9,)),
    "depth2": patterns.AcceptabilityParams((1, 11), (9, 33)),
}


class _UsageError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        return json.loads(io.read_text(path))
    except (OSError, json.JSONDecodeError) as e:
        raise _UsageError(f"cannot read {path}: {e}") from e


def _load_text(path: str) -> str:
    try:
        return io.read_text(path)
    except OSError as e:
        raise _UsageError(f"cannot read {path}: {e}") from e


def _need_out(args) -> str:
    if not args.out:
        raise _UsageError("this command requires --out")
    return args.out


def _manifest(args, subcommand: str, inputs: Tuple[str, ...],
              profile: Optional[str] = None, window: Optional[Window] = None,
              budget: Optional[int] = None) -> io.RunManifest:
    return io.RunManifest(subcommand=subcommand, inputs=inputs, profile=profile,
                          window=window, budget=budget, seed=args.seed,
                          out=args.out)


def _emit(args, text: str, report: dict) -> None:
    if args.json:
        sys.stdout.write(io.dumps(report))
    elif not args.quiet and text:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# pattern


def _cmd_pattern_check(args) -> int:
    p = io.pattern_from_text(_load_text(args.file))
    pair = patterns.aperiodic_pair(p, args.n)
    if pair is None:
        _emit(args, f"no aperiodic pair mod {args.n}", {"pair": None, "n": args.n})
        return 1
    (u, v) = pair
    _emit(args, f"aperiodic pair mod {args.n}: ({u[0]}, {u[1]}) and ({v[0]}, {v[1]})",
          {"pair": [list(u), list(v)], "n": args.n})
    return 0


def _cmd_pattern_acceptable(args) -> int:
    p = io.pattern_from_text(_load_text(args.file))
    params = ACCEPT_PROFILES[args.profile]
    level = args.level if args.level is not None else params.levels
    if not 1 <= level <= params.levels:
        raise _UsageError(f"--level must be in 1..{params.levels} for profile {args.profile}")
    ok, violation = patterns.is_acceptable(p, params, level)
    rep = {"acceptable": ok, "level": level}
    if ok:
        _emit(args, f"acceptable at level {level}", rep)
        return 0
    m, off = violation
    rep["violation"] = {"level": m, "offset": list(off)}
    _emit(args, f"not acceptable: level-{m} window at offset ({off[0]}, {off[1]}) "
          "has no aperiodic pair", rep)
    return 1


def _cmd_pattern_construct(args) -> int:
    out = _need_out(args)
    os.makedirs(out, exist_ok=True)
    try:
        con = patterns.construct_example(args.depth, budget=args.budget)
    except patterns.ConstructBudgetError as e:
        _emit(args, str(e), {"error": str(e), "stages_done": len(e.stages)})
        return 1
    lines: List[str] = []
    for st in con.stages:
        io.write_text(os.path.join(out, f"stage{st.k}_square.txt"), io.pattern_to_text(st.x))
        io.write_text(os.path.join(out, f"stage{st.k}_swapped.txt"), io.pattern_to_text(st.y))
        io.write_text(os.path.join(out, f"stage{st.k}_block.txt"), io.pattern_to_text(st.b))
        lines.append(f"stage {st.k}: n={st.n} r={st.r} g={st.g} "
                     f"candidates_tested={st.candidates_tested}")
    for cc in con.claim_checks:
        lines.append(f"tiled-variant check at level {cc.k}: "
                     f"{'no pair mod ' + str(cc.next_n) if cc.no_pair else 'UNEXPECTED pair found'}")
    text = "\n".join(lines)
    io.write_text(os.path.join(out, "report.txt"), text + "\n")
    _manifest(args, "pattern construct", (), budget=args.budget).save(out)
    _emit(args, text, {
        "stages": [{"k": s.k, "n": s.n, "r": s.r, "g": s.g,
                    "candidates_tested": s.candidates_tested} for s in con.stages],
        "claim_checks": [{"k": c.k, "next_n": c.next_n, "no_pair": c.no_pair}
                         for c in con.claim_checks],
    })
    return 0


# ---------------------------------------------------------------------------
# game


def _render_moves(moves) -> List[str]:
    out = []
    for m in moves:
        tie = f" (tie -> {m.tie_choice})" if m.tie_choice is not None else ""
        out.append(f"take {m.orientation} from bucket {m.source} to bucket {m.dest}{tie}")
    return out


def _cmd_game_solve(args) -> int:
    start = game.initial_ckn(args.buckets, args.coins)
    res = game.orientable(start, budget=args.budget,
                          allow_self_moves=not args.no_self_moves)
    lines = [res.verdict]
    if res.moves:
        lines += _render_moves(res.moves)
    lines.append(f"states explored: {res.states_explored}")
    rep = {"verdict": res.verdict, "states_explored": res.states_explored,
           "moves": [list(m) for m in res.moves] if res.moves else None}
    _emit(args, "\n".join(lines), rep)
    return 1 if res.verdict == game.BUDGET_EXCEEDED else 0


def _cmd_game_greedy(args) -> int:
    res = game.greedy_cascade(args.buckets, args.coins)
    lines = [f"{len(res.moves)} moves"]
    for i, (h, t) in enumerate(res.state):
        lines.append(f"bucket {i}: heads={h} tails={t}")
    lines.append("oriented" if res.success else "not oriented")
    rep = {"moves": len(res.moves), "success": res.success,
           "state": [list(b) for b in res.state]}
    _emit(args, "\n".join(lines), rep)
    return 0 if res.success else 1


def _cmd_game_table(args) -> int:
    t = game.threshold_table(args.kmax, args.nmax, budget=args.budget)
    text = game.render_threshold_table(t)
    rep = {"kmax": args.kmax, "nmax": args.nmax,
           "cells": [{"k": c.k, "n": c.n, "self_moves": c.self_moves,
                      "verdict": c.verdict} for c in t.cells]}
    _emit(args, text, rep)
    return 0


# ---------------------------------------------------------------------------
# geometry


def _load_family(path: str, expect_kind: str):
    kind, fams, dims = io.family_from_json(_load_json(path))
    if kind != expect_kind:
        raise _UsageError(f"{path}: expected a {expect_kind!r} family file, got {kind!r}")
    return fams, dims


def _cmd_hull_build(args) -> int:
    fams, dims = _load_family(args.file, "diamonds")
    hull = build_hull(fams, dims=dims)
    merges = sum(1 for ev in hull.log if ev.action == "merge")
    lines = [f"{len(hull.elements)} region(s) from {len(hull.log)} diamond(s) "
             f"({merges} merged)"]
    if args.svg:
        scene = svg.hull_scene(hull, families=fams)
        io.write_text(args.svg, svg.render_svg(scene))
        lines.append(f"wrote {args.svg}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _manifest(args, "hull build", (args.file,)).save(args.out)
    _emit(args, "\n".join(lines), {
        "regions": len(hull.elements), "diamonds": len(hull.log),
        "merges": merges})
    return 0


def _cmd_safe_query(args) -> int:
    fams, dims = _load_family(args.file, "rects")
    system = SafeSystem.build(fams, dims=dims)
    q = io.parse_point(args.point)
    inside = system.contains(q)
    _emit(args, "safe" if inside else "unsafe", {"safe": inside,
          "point": [io.rat_to_json(q.x), io.rat_to_json(q.y)]})
    return 0 if inside else 1


def _cmd_safe_path(args) -> int:
    fams, dims = _load_family(args.file, "rects")
    system = SafeSystem.build(fams, dims=dims)
    q = io.parse_point(args.point)
    try:
        extent = parse_fraction(args.extent)
    except (ValueError, ZeroDivisionError) as e:
        raise _UsageError(f"bad --extent: {e}") from e
    try:
        path = system.path(q, extent)
    except PathError as e:
        _emit(args, f"no path: {e}", {"path": None, "error": str(e)})
        return 1
    lines = [f"({fmt(v.x)}, {fmt(v.y)})" for v in path]
    if args.svg:
        scene = svg.path_scene(fams, path, start=q)
        io.write_text(args.svg, svg.render_svg(scene))
        lines.append(f"wrote {args.svg}")
    _emit(args, "\n".join(lines),
          {"path": [io.point_to_json(v) for v in path]})
    return 0


def _cmd_geom_check(args) -> int:
    fams, dims = _load_family(args.file, "diamonds")
    rep = check_hypotheses(fams, dims)
    lines = list(rep.messages) if rep.messages else []
    lines.append("hypotheses hold" if rep.ok else "hypotheses FAIL")
    _emit(args, "\n".join(lines), {
        "ok": rep.ok,
        "sparse_ok": list(rep.sparse_ok),
        "growth_ok": list(rep.growth_ok),
        "slope_ok": list(rep.slope_ok),
        "messages": list(rep.messages)})
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# cert


def _cmd_cert_validate(args) -> int:
    c = io.certificate_from_json(_load_json(args.cert))
    p = profiles.get_profile(args.profile)
    w = io.parse_window(args.window) if args.window else None
    rep = validate_certificate(c, p, window=w)
    jrep = {"ok": rep.ok,
            "checks": [{"name": ch.name, "ok": ch.ok, "detail": ch.detail}
                       for ch in rep.checks],
            "density": [{"level": d.level, "frames": d.frame_count,
                         "covered": d.covered} for d in rep.density]}
    _emit(args, rep.render(), jrep)
    return 0 if rep.ok and all(d.covered for d in rep.density) else 1


def _cmd_cert_build(args) -> int:
    out = _need_out(args)
    p = profiles.get_profile(args.profile)
    w = io.parse_window(args.window)
    c = build_dense_certificate(p, w)
    io.write_text(out, io.dumps(io.certificate_to_json(c)))
    out_dir = os.path.dirname(os.path.abspath(out))
    _manifest(args, "cert build", (), profile=args.profile, window=w).save(out_dir)
    _emit(args, f"wrote {out} ({len(c.frames)} frames)",
          {"frames": len(c.frames), "out": out})
    return 0


def _cmd_cert_config(args) -> int:
    out = _need_out(args)
    c = io.certificate_from_json(_load_json(args.cert))
    p = profiles.get_profile(args.profile)
    x = choose_compatible_config(c, p, budget=args.budget, swap=args.swap)
    io.write_text(out, io.dumps(io.configuration_to_json(x)))
    out_dir = os.path.dirname(os.path.abspath(out))
    _manifest(args, "cert config", (args.cert,), profile=args.profile,
              budget=args.budget).save(out_dir)
    _emit(args, f"wrote {out} ({len(x.entries)} entries)",
          {"entries": len(x.entries), "out": out})
    return 0


def _cmd_cert_compat(args) -> int:
    c = io.certificate_from_json(_load_json(args.cert))
    x = io.configuration_from_json(_load_json(args.config))
    p = profiles.get_profile(args.profile)
    rep = compatible(x, c, p, budget=args.budget)
    _emit(args, rep.render(), {
        "ok": rep.ok,
        "frames": [{"frame_id": r.frame_id, "level": r.level,
                    "verdict": r.verdict, "explored": r.explored}
                   for r in rep.rows]})
    return 0 if rep.ok else 1


def _cmd_cert_extract(args) -> int:
    c = io.certificate_from_json(_load_json(args.cert))
    x = io.configuration_from_json(_load_json(args.config))
    p = profiles.get_profile(args.profile)
    try:
        u, v = aperiodicity_extract(x, c, args.n, p)
    except ExtractError as e:
        _emit(args, f"no witness pair: {e}", {"pair": None, "error": str(e)})
        return 1
    _emit(args, f"sites ({u[0]}, {u[1]}) and ({v[0]}, {v[1]}) are congruent "
          f"mod {args.n} and carry different faces",
          {"pair": [list(u), list(v)], "n": args.n})
    return 0


# ---------------------------------------------------------------------------
# glue


def _cmd_glue_run(args) -> int:
    out = _need_out(args)
    os.makedirs(out, exist_ok=True)
    base_cfg = io.configuration_from_json(_load_json(args.x))
    base_cert = io.certificate_from_json(_load_json(args.cx))
    patch_cfg = io.configuration_from_json(_load_json(args.y))
    patch_cert = io.certificate_from_json(_load_json(args.cy))
    patch_sites = io.region_from_text(_load_text(args.region))
    p = profiles.get_profile(args.profile)
    w = io.parse_window(args.window)
    inputs = (args.x, args.cx, args.y, args.cy, args.region)
    _manifest(args, "glue run", inputs, profile=args.profile, window=w,
              budget=args.budget).save(out)
    try:
        res = glue(base_cfg, base_cert, patch_cfg, patch_cert, patch_sites,
                   p, w, budget=args.budget,
                   threshold_override=args.threshold)
    except GlueError as e:
        log = "\n".join(ev.render() for ev in e.events)
        io.write_text(os.path.join(out, "steps.log"), log + "\n" if log else "")
        io.write_text(os.path.join(out, "error.txt"), str(e) + "\n")
        _emit(args, f"glue failed: {e}", {"ok": False, "error": str(e)})
        return 1
    io.write_text(os.path.join(out, "merged.json"),
                  io.dumps(io.configuration_to_json(res.merged)))
    io.write_text(os.path.join(out, "certificate.json"),
                  io.dumps(io.certificate_to_json(res.certificate)))
    io.write_text(os.path.join(out, "steps.log"),
                  "\n".join(ev.render() for ev in res.events) + "\n")
    io.write_text(os.path.join(out, "report.txt"), res.report.render() + "\n")
    if args.svg:
        scene = svg.glue_scene(res, p, window=w)
        io.write_text(os.path.join(out, "glue.svg"), svg.render_svg(scene))
    rep = res.report
    _emit(args, res.render(), {
        "ok": rep.ok,
        "checks": [{"name": ch.name, "ok": ch.ok} for ch in rep.checks],
        "admitted": dict(rep.admitted),
        "skips": rep.skips,
        "relocations": rep.relocations,
        "writes": rep.writes,
        "double_writes": rep.double_writes})
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# parser


def _int_pos(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="64-bit seed for any randomized step (default 0)")
    common.add_argument("--out", default=None, help="output file or directory")
    common.add_argument("--quiet", action="store_true", help="suppress text output")
    common.add_argument("--json", action="store_true",
                        help="emit a machine-readable report on stdout")

    top = argparse.ArgumentParser(prog="aperiodic",
                                  description="aperiodic subshift toolkit")
    groups = top.add_subparsers(dest="group", required=True)

    # pattern
    g = groups.add_parser("pattern", help="square pattern construction and checks")
    sub = g.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("check", parents=[common], help="look for an aperiodic pair")
    s.add_argument("--file", required=True)
    s.add_argument("--n", type=_int_pos, required=True)
    s.set_defaults(fn=_cmd_pattern_check)
    s = sub.add_parser("acceptable", parents=[common],
                       help="test staged acceptability")
    s.add_argument("--file", required=True)
    s.add_argument("--profile", choices=sorted(ACCEPT_PROFILES), required=True)
    s.add_argument("--level", type=_int_pos, default=None)
    s.set_defaults(fn=_cmd_pattern_acceptable)
    s = sub.add_parser("construct", parents=[common],
                       help="run the staged construction")
    s.add_argument("--depth", type=_int_pos, required=True)
    s.add_argument("--budget", type=_int_pos, default=100_000)
    s.set_defaults(fn=_cmd_pattern_construct)

    # game
    g = groups.add_parser("game", help="coin redistribution game")
    sub = g.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("solve", parents=[common], help="decide orientability")
    s.add_argument("--buckets", type=_int_pos, required=True)
    s.add_argument("--coins", type=_int_pos, required=True)
    s.add_argument("--budget", type=_int_pos, default=game.DEFAULT_BUDGET)
    s.add_argument("--no-self-moves", action="store_true",
                   help="forbid returning a coin to its source bucket")
    s.set_defaults(fn=_cmd_game_solve)
    s = sub.add_parser("greedy", parents=[common], help="run the greedy cascade")
    s.add_argument("--buckets", type=_int_pos, required=True)
    s.add_argument("--coins", type=_int_pos, required=True)
    s.set_defaults(fn=_cmd_game_greedy)
    s = sub.add_parser("table", parents=[common], help="threshold table")
    s.add_argument("--kmax", type=_int_pos, required=True)
    s.add_argument("--nmax", type=_int_pos, required=True)
    s.add_argument("--budget", type=_int_pos, default=game.DEFAULT_BUDGET)
    s.set_defaults(fn=_cmd_game_table)

    # hull
    g = groups.add_parser("hull", help="diamond hull construction")
    sub = g.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("build", parents=[common], help="merge diamonds into regions")
    s.add_argument("--file", required=True)
    s.add_argument("--svg", default=None, help="write an SVG rendering here")
    s.set_defaults(fn=_cmd_hull_build)

    # safe
    g = groups.add_parser("safe", help="safe-region queries")
    sub = g.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("query", parents=[common], help="point membership")
    s.add_argument("--file", required=True)
    s.add_argument("--point", required=True, metavar="X,Y")
    s.set_defaults(fn=_cmd_safe_query)
    s = sub.add_parser("path", parents=[common], help="horizontal crossing path")
    s.add_argument("--file", required=True)
    s.add_argument("--point", required=True, metavar="X,Y")
    s.add_argument("--extent", required=True,
                   help="half-width of the strip to cross (rational)")
    s.add_argument("--svg", default=None)
    s.set_defaults(fn=_cmd_safe_path)

    # geom
    g = groups.add_parser("geom", help="geometry hypothesis checks")
    sub = g.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("check", parents=[common],
                       help="verify sparsity/growth/slope hypotheses")
    s.add_argument("--file", required=True)
    s.set_defaults(fn=_cmd_geom_check)

    # cert
    g = groups.add_parser("cert", help="certificates over configurations")
    sub = g.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("validate", parents=[common], help="run the validator")
    s.add_argument("--cert", required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("--window", default=None, metavar="X0,Y0,X1,Y1")
    s.set_defaults(fn=_cmd_cert_validate)
    s = sub.add_parser("build", parents=[common],
                       help="build a dense certificate on a window")
    s.add_argument("--profile", required=True)
    s.add_argument("--window", required=True, metavar="X0,Y0,X1,Y1")
    s.set_defaults(fn=_cmd_cert_build)
    s = sub.add_parser("config", parents=[common],
                       help="choose a compatible configuration")
    s.add_argument("--cert", required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("--budget", type=_int_pos, default=game.DEFAULT_BUDGET)
    s.add_argument("--swap", action="store_true",
                   help="flip the face convention on tie splits")
    s.set_defaults(fn=_cmd_cert_config)
    s = sub.add_parser("compat", parents=[common],
                       help="check configuration/certificate compatibility")
    s.add_argument("--cert", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("--budget", type=_int_pos, default=game.DEFAULT_BUDGET)
    s.set_defaults(fn=_cmd_cert_compat)
    s = sub.add_parser("extract", parents=[common],
                       help="extract an aperiodicity witness pair")
    s.add_argument("--cert", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--profile", required=True)
    s.add_argument("--n", type=_int_pos, required=True)
    s.set_defaults(fn=_cmd_cert_extract)

    # glue
    g = groups.add_parser("glue", help="merge two certified configurations")
    sub = g.add_subparsers(dest="cmd", required=True)
    s = sub.add_parser("run", parents=[common], help="run the four merge sweeps")
    s.add_argument("--x", required=True, help="base configuration (json)")
    s.add_argument("--cx", required=True, help="base certificate (json)")
    s.add_argument("--y", required=True, help="patch configuration (json)")
    s.add_argument("--cy", required=True, help="patch certificate (json)")
    s.add_argument("--region", required=True, help="patch sites, one 'x y' per line")
    s.add_argument("--profile", required=True)
    s.add_argument("--window", required=True, metavar="X0,Y0,X1,Y1")
    s.add_argument("--budget", type=_int_pos, default=game.DEFAULT_BUDGET)
    s.add_argument("--threshold", type=_int_pos, default=None,
                   help="override the coarse-level cutoff")
    s.add_argument("--svg", action="store_true", help="also write glue.svg")
    s.set_defaults(fn=_cmd_glue_run)

    return top


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help; pass both through
        return int(e.code or 0)
    try:
        return args.fn(args)
    except _UsageError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except (ValueError, KeyError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except CertificateError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
