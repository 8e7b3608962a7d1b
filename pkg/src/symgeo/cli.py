"""Command-line orchestration: encode, solve, enumerate, realize, verify,
stats, plot, and a full pipeline with a run manifest.

Exit codes: 0 success/certified, 10 unsat, 20 realization budget exhausted,
1 usage error, 2 I/O or solver error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

EXIT_OK = 0
EXIT_UNSAT = 10
EXIT_BUDGET = 20
EXIT_USAGE = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error reading config {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _problem(config):
    from .encoder import problem_from_config
    try:
        return problem_from_config(config)
    except (ValueError, TypeError) as exc:
        print(f"invalid problem config: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _encode(config):
    from .encoder import TrivialUnsatError, encode_problem
    spec = _problem(config)
    try:
        return spec, encode_problem(spec)
    except TrivialUnsatError:
        return spec, None


def _solver_cmd(config):
    cmd = config.get("solver")
    if cmd is None:
        return None
    return cmd.split() if isinstance(cmd, str) else list(cmd)


def _search_params(config, seed_override=None):
    from .localizer import SearchParams
    raw = dict(config.get("search", {}))
    if seed_override is not None:
        raw["seed"] = seed_override
    try:
        return SearchParams(**raw)
    except (TypeError, ValueError) as exc:
        print(f"invalid search params: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_encode(args):
    from .encoder import emit_dimacs
    config = _load_config(args.config)
    spec, formula = _encode(config)
    stem = Path(args.out)
    if formula is None:
        print("trivially unsat under the requested symmetry")
        stem.with_suffix(".cnf").write_text("p cnf 1 2\n1 0\n-1 0\n")
        return EXIT_OK
    emit_dimacs(formula, stem.with_suffix(".cnf"))
    print(f"wrote {stem.with_suffix('.cnf')} and {stem.with_suffix('.map')}")
    print(f"variables {formula.nvars} clauses {len(formula.clauses)}")
    for family, count in sorted(formula.family_counts.items()):
        print(f"  {family} {count}")
    return EXIT_OK


def cmd_solve(args):
    import tempfile

    from .encoder import emit_dimacs
    from .satbridge import SAT, UNSAT, decode_model, save_assignment, \
        solve_external
    config = _load_config(args.config)
    spec, formula = _encode(config)
    if formula is None:
        print("s UNSATISFIABLE (trivially, from the symmetry classes)")
        return EXIT_UNSAT
    with tempfile.TemporaryDirectory() as tmp:
        cnf = Path(tmp) / "problem.cnf"
        emit_dimacs(formula, cnf)
        try:
            result = solve_external(cnf, _solver_cmd(config),
                                    timeout=args.timeout)
        except Exception as exc:
            print(f"solver error: {exc}", file=sys.stderr)
            return EXIT_IO
    print(f"s {result.status.upper()}", flush=True)
    if result.status == SAT:
        tau = decode_model(result.model, formula.meta["encoder"])
        save_assignment(tau, args.out)
        print(f"wrote {args.out}")
        return EXIT_OK
    if result.status == UNSAT:
        return EXIT_UNSAT
    return EXIT_IO


def cmd_enumerate(args):
    from .satbridge import enumerate_all, save_assignment
    config = _load_config(args.config)
    spec, formula = _encode(config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    if formula is None:
        (outdir / "index.txt").write_text("count=0\nstatus=complete\n")
        print("0 assignments (trivially unsat)")
        return EXIT_UNSAT
    try:
        result = enumerate_all(formula, solver_cmd=_solver_cmd(config),
                               limit=args.limit, timeout=args.timeout)
    except Exception as exc:
        print(f"enumeration error: {exc}", file=sys.stderr)
        return EXIT_IO
    taus = result.assignments(formula.meta["encoder"])
    lines = [f"count={len(taus)}", f"status={result.status}",
             f"solver_calls={result.n_solves}"]
    for i, tau in enumerate(taus):
        name = f"solution_{i:04d}.txt"
        save_assignment(tau, outdir / name)
        lines.append(f"solution={name}")
    (outdir / "index.txt").write_text("\n".join(lines) + "\n")
    print(f"{len(taus)} assignments ({result.status}) -> {outdir}")
    return EXIT_OK if taus else EXIT_UNSAT


def _route_realize(tau, args, config):
    from .collinear import DEParams, realize_collinear
    from .localizer import realize
    from .symmetry import SFold
    if any(v == 0 for v in tau.values.values()):
        target = args.target if args.target is not None \
            else config.get("imbalance_at_least", 1)
        de_kw = {"seed": args.seed or 0}
        if args.budget is not None:
            de_kw["budget"] = args.budget
        return realize_collinear(tau, target, DEParams(**de_kw)), "collinear"
    sym = None
    if args.s:
        sym = SFold(tau.n, args.s, center=args.center)
    params = _search_params(config, seed_override=args.seed)
    if args.budget is not None:
        params.budget = args.budget
    return realize(tau, params, sym=sym), "localizer"


def cmd_realize(args):
    from .geom import save_points
    from .satbridge import load_assignment
    from .verify import certification_report, min_imbalance
    config = _load_config(args.config) if args.config else {}
    try:
        tau = load_assignment(args.assignment)
    except (OSError, ValueError) as exc:
        print(f"error reading assignment: {exc}", file=sys.stderr)
        return EXIT_IO
    result, route = _route_realize(tau, args, config)
    stem = Path(args.out)
    if route == "localizer" and result.float_points is not None \
            and len(result.float_points):
        save_points(stem.with_suffix(".float.txt"),
                    [(float(x), float(y)) for x, y in result.float_points])
    if not result.success:
        if result.points is not None:
            save_points(stem.with_suffix(".best.txt"), result.points)
        print(f"realization failed (route {route}); budget exhausted")
        return EXIT_BUDGET
    save_points(stem.with_suffix(".exact.txt"), result.points)
    if route == "localizer":
        report = certification_report(result.points, tau)
    else:
        delta, witness = min_imbalance(result.points)
        report = (f"status ok\npoints {len(result.points)}\n"
                  f"min_imbalance {delta}\n"
                  f"witness {','.join(map(str, witness))}\n")
    stem.with_suffix(".report.txt").write_text(report)
    print(report.splitlines()[0])
    print(f"wrote {stem.with_suffix('.exact.txt')}")
    return EXIT_OK


def _read_points(path):
    from .geom import load_points
    try:
        return load_points(path)
    except (OSError, ValueError) as exc:
        print(f"error reading pointset {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def cmd_verify(args):
    from .satbridge import load_assignment
    from .verify import certification_report, orientation_of
    points = _read_points(args.points)
    if args.assignment:
        try:
            tau = load_assignment(args.assignment)
        except (OSError, ValueError) as exc:
            print(f"error reading assignment: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        tau = orientation_of(points)
    report = certification_report(points, tau)
    sys.stdout.write(report)
    return EXIT_OK if report.startswith("status ok") else EXIT_IO


def cmd_stats(args):
    from .symmetry import SFold
    from .verify import format_summary, statistics_summary
    points = _read_points(args.points)
    sym = SFold(len(points), args.s, center=args.center) if args.s else None
    stats = statistics_summary(points, kgons=(4, 5, 6, 7), sym=sym)
    sys.stdout.write(format_summary(stats))
    return EXIT_OK


def render_svg(points, zero_lines=()):
    """Deterministic 600x600 SVG with a 5% margin."""
    size = 600
    margin = 0.05 * size
    floats = [(float(x), float(y)) for x, y in points]
    if floats:
        xs = [p[0] for p in floats]
        ys = [p[1] for p in floats]
        lo_x, hi_x = min(xs), max(xs)
        lo_y, hi_y = min(ys), max(ys)
        span = max(hi_x - lo_x, hi_y - lo_y) or 1.0
        scale = (size - 2 * margin) / span

        def to_svg(p):
            return (margin + (p[0] - lo_x) * scale,
                    size - margin - (p[1] - lo_y) * scale)
    else:
        def to_svg(p):  # pragma: no cover - empty canvas
            return p
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
             f'height="{size}" viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for line in zero_lines:
        member_pts = sorted(to_svg(floats[i - 1]) for i in line)
        x1, y1 = member_pts[0]
        x2, y2 = member_pts[-1]
        parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" '
                     f'y2="{y2:.2f}" stroke="#888" stroke-width="1"/>')
    for p in floats:
        x, y = to_svg(p)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args):
    points = _read_points(args.points)
    zero_lines = []
    if args.assignment:
        from .collinear import extract_lines
        from .satbridge import load_assignment
        try:
            tau = load_assignment(args.assignment)
            zero_lines = extract_lines(tau).lines
        except (OSError, ValueError) as exc:
            print(f"error reading assignment: {exc}", file=sys.stderr)
            return EXIT_IO
    Path(args.out).write_text(render_svg(points, zero_lines))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_pipeline(args):
    from .satbridge import enumerate_all, save_assignment
    from .geom import save_points
    from .verify import format_summary, orientation_of, statistics_summary
    config = _load_config(args.config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = [f"config={args.config}", f"seed={args.seed}",
                f"started={time.strftime('%Y-%m-%dT%H:%M:%S')}"]

    def finish(code):
        manifest.append(f"exit={code}")
        (outdir / "manifest.txt").write_text("\n".join(manifest) + "\n")
        return code

    t0 = time.monotonic()
    spec, formula = _encode(config)
    if formula is None:
        manifest.append("stage_encode=trivially_unsat")
        print("trivially unsat")
        return finish(EXIT_UNSAT)
    manifest.append(f"stage_encode=ok vars={formula.nvars} "
                    f"clauses={len(formula.clauses)}")
    try:
        enum = enumerate_all(formula, solver_cmd=_solver_cmd(config),
                             limit=args.limit, timeout=args.timeout)
    except Exception as exc:
        manifest.append(f"stage_enumerate=error {exc}")
        print(f"enumeration error: {exc}", file=sys.stderr)
        return finish(EXIT_IO)
    taus = enum.assignments(formula.meta["encoder"])
    manifest.append(f"stage_enumerate=ok count={len(taus)} "
                    f"status={enum.status}")
    if not taus:
        print("unsat: no assignments")
        return finish(EXIT_UNSAT)
    realized = 0
    for i, tau in enumerate(taus if args.all else taus[:1]):
        save_assignment(tau, outdir / f"solution_{i:04d}.txt")

        class _Args:
            target = None
            s = spec.s if spec.symmetry_breaking else 0
            center = bool(spec.s and spec.sym and spec.sym.center)
            seed = args.seed
            budget = args.budget
        try:
            result, route = _route_realize(tau, _Args, config)
        except ValueError as exc:
            manifest.append(f"stage_realize_{i}=error {exc}")
            continue
        if not result.success:
            manifest.append(f"stage_realize_{i}=budget_exhausted")
            continue
        realized += 1
        pfile = outdir / f"points_{i:04d}.txt"
        save_points(pfile, result.points)
        stats = statistics_summary(result.points)
        (outdir / f"stats_{i:04d}.txt").write_text(format_summary(stats))
        zero_lines = ()
        if route == "collinear":
            from .collinear import extract_lines
            zero_lines = extract_lines(orientation_of(result.points)).lines
        (outdir / f"plot_{i:04d}.svg").write_text(
            render_svg(result.points, zero_lines))
        manifest.append(f"stage_realize_{i}=ok route={route}")
    manifest.append(f"elapsed={time.monotonic() - t0:.2f}")
    manifest.append(f"realized={realized}")
    print(f"pipeline: {len(taus)} assignments, {realized} realized")
    return finish(EXIT_OK if realized else EXIT_BUDGET)


# ---------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="symgeo",
                description="SAT-driven symmetric pointset construction")
    sub = p.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="emit DIMACS + variable map")
    enc.add_argument("--config", required=True)
    enc.add_argument("--out", required=True)
    enc.set_defaults(func=cmd_encode)

    slv = sub.add_parser("solve", help="solve one instance")
    slv.add_argument("--config", required=True)
    slv.add_argument("--out", default="assignment.txt")
    slv.add_argument("--timeout", type=float, default=None)
    slv.set_defaults(func=cmd_solve)

    en = sub.add_parser("enumerate", help="enumerate all assignments")
    en.add_argument("--config", required=True)
    en.add_argument("--out", required=True)
    en.add_argument("--limit", type=int, default=None)
    en.add_argument("--timeout", type=float, default=None)
    en.set_defaults(func=cmd_enumerate)

    re = sub.add_parser("realize", help="realize an assignment as points")
    re.add_argument("--assignment", required=True)
    re.add_argument("--out", required=True)
    re.add_argument("--config", default=None)
    re.add_argument("--target", type=int, default=None,
                    help="imbalance target for collinear assignments")
    re.add_argument("--s", type=int, default=0, help="s-fold symmetry")
    re.add_argument("--center", action="store_true")
    re.add_argument("--seed", type=int, default=None)
    re.add_argument("--budget", type=float, default=None)
    re.set_defaults(func=cmd_realize)

    ver = sub.add_parser("verify", help="certify points against assignment")
    ver.add_argument("--points", required=True)
    ver.add_argument("--assignment", default=None)
    ver.set_defaults(func=cmd_verify)

    st = sub.add_parser("stats", help="k-gons, imbalance, layers, symmetry")
    st.add_argument("--points", required=True)
    st.add_argument("--s", type=int, default=0)
    st.add_argument("--center", action="store_true")
    st.set_defaults(func=cmd_stats)

    pl = sub.add_parser("plot", help="render a pointset to SVG")
    pl.add_argument("--points", required=True)
    pl.add_argument("--assignment", default=None)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)

    pp = sub.add_parser("pipeline", help="encode-solve-realize-verify-plot")
    pp.add_argument("--config", required=True)
    pp.add_argument("--out", required=True)
    pp.add_argument("--limit", type=int, default=None)
    pp.add_argument("--timeout", type=float, default=None)
    pp.add_argument("--all", action="store_true",
                    help="realize every enumerated assignment")
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--budget", type=float, default=None)
    pp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
