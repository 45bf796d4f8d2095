"""Command-line front end: ``padic-modelset <subcommand> ...``.

Exit status 0 on success, 2 for invalid input, 3 when a verification
fails (a diff artifact is written next to the report).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .jsonio import dumps, with_schema

log = logging.getLogger("padic_modelset")

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 2, 3
SYSTEMS = ("limitperiodic3", "chair", "limitquasi", "perioddoubling", "thuemorse", "recoded3", "variant3")


class UsageError(ValueError):
    pass


class VerificationFailed(Exception):
    def __init__(self, report: dict):
        super().__init__("verification failed")
        self.report = report


# ---------------------------------------------------------------------------
# argument helpers


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s}")
    return v


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _weights(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must be comma separated numbers, got {s!r}") from None


def _write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _emit(args, kind: str, payload: dict, summary: str) -> None:
    obj = with_schema(kind, payload)
    if getattr(args, "report", None):
        _write(args.report, dumps(obj))
    if args.json:
        sys.stdout.write(dumps(obj))
    else:
        print(summary)


def _check(args, kind: str, report: dict, ok: bool) -> None:
    if not ok:
        diff = Path(args.diff or (Path(args.report).with_suffix(".diff.json") if getattr(args, "report", None)
                                  else f"{kind}-diff.json"))
        _write(diff, dumps(with_schema(kind + "-diff", report)))
        print(f"verification failed; diff written to {diff}", file=sys.stderr)
        raise VerificationFailed(report)


def _system_and_rules(args):
    from .substitution import SubstitutionSystem, named_system

    if getattr(args, "rules", None):
        text = Path(args.rules).read_text()
        s = SubstitutionSystem.parse(text)
        if not args.seed or len(args.seed) != 2:
            raise UsageError("--rules needs --seed with two letters, e.g. --seed ba")
        return "custom", s, (args.seed[0], args.seed[1]), args.anchor or "left"
    if not args.system:
        raise UsageError("give --system or --rules")
    ns = named_system(args.system)
    seed = (args.seed[0], args.seed[1]) if getattr(args, "seed", None) else ns.seed
    return ns.name, ns.system, seed, getattr(args, "anchor", None) or ns.anchor


def _lengths(args, name, s):
    from .limitperiodic import LENGTHS

    if getattr(args, "lengths", None):
        out = {}
        for part in args.lengths.split(","):
            k, _, v = part.partition("=")
            out[k.strip()] = Fraction(v)
        return out
    if name in ("limitperiodic3", "variant3"):
        return LENGTHS
    if name == "limitquasi":
        from .exactnum import QuadInt
        return {"a": QuadInt(1, 0), "b": QuadInt(0, 1)}
    return {c: 1 for c in s.alphabet}


# ---------------------------------------------------------------------------
# subcommands


def cmd_seqgen(args) -> int:
    from .substitution import fixed_point_patch, geometric_points, pf_data

    name, s, seed, anchor = _system_and_rules(args)
    patch = fixed_point_patch(s, seed, args.steps)
    pts = geometric_points(patch, _lengths(args, name, s), anchor)
    lo = args.lo if args.lo is not None else pts.extent[0]
    hi = args.hi if args.hi is not None else pts.extent[1]
    pts = pts.restrict(lo, hi)
    if args.csv:
        _write(args.csv, pts.to_csv())
    if args.plot:
        from .plotting import plot_sequence
        plot_sequence(pts, args.plot, f"{name}: anchors on [{lo}, {hi}]")
    pf = pf_data(s)
    payload = {
        "system": name,
        "seed": "".join(seed),
        "steps": args.steps,
        "anchor": anchor,
        "range": [str(lo), str(hi)],
        "inflation": str(pf.inflation_exact) if pf.inflation_exact is not None else pf.inflation,
        "points": {k: [str(x) for x in xs] for k, xs in pts.per_letter.items()},
        "counts": {k: len(xs) for k, xs in pts.per_letter.items()},
    }
    if name == "limitperiodic3" and lo <= -23 <= hi:
        payload["note"] = ("negative side taken from the tile layout of the fixed point: the a tile on [-24, -23] "
                           "makes -23 an anchor, so a list that jumps from -21 to -24 is missing it")
    _emit(args, "seqgen", payload, " ".join(f"{k}:{len(v)}" for k, v in pts.per_letter.items()))
    return EXIT_OK


def cmd_verify(args) -> int:
    system = args.system
    if system == "limitperiodic3":
        from .limitperiodic import boundary_report, invariance_under_inflation, verify_against_substitution

        rep = verify_against_substitution(args.K, args.R, strict=args.strict)
        inv = invariance_under_inflation(args.K)
        payload = {"equivalence": rep, "invariance": inv, "boundary": boundary_report()}
        ok = rep["ok"] and inv["ok"]
        summary = f"K={args.K} R={args.R} mismatches={rep['mismatches']} invariance={'ok' if inv['ok'] else 'FAILED'}"
    elif system == "chair":
        from .chair import chair_recursion, chair_windows, check_invariants, oracle_compare

        if args.levels > 10:
            raise UsageError("chair verification supports --levels up to 10")
        state = chair_recursion(args.levels)
        inv = check_invariants(state)
        win = chair_windows(state)
        cmp = oracle_compare(win, state, min(args.levels, 3) if args.compare_level is None else args.compare_level)
        payload = {"invariants": inv, "oracle": cmp, "deficit": str(win.deficit()),
                   "measures": [str(m) for m in win.measures()]}
        ok = inv["ok"] and cmp["undecided"] == 0 and cmp["mismatches"] == 0
        summary = f"levels={args.levels} invariants={'ok' if inv['ok'] else 'FAILED'} mismatches={cmp['mismatches']}"
    elif system == "limitquasi":
        from .limitquasi import sandwich_check

        payload = sandwich_check(args.steps, args.depth)
        ok = payload["ok"]
        summary = f"steps={args.steps} depth={args.depth} sandwich={'ok' if ok else 'FAILED'}"
    else:
        raise UsageError(f"verify supports limitperiodic3, chair and limitquasi, not {system}")
    payload["ok"] = ok
    _emit(args, "verify", payload, summary)
    _check(args, "verify", payload, ok)
    return EXIT_OK


def cmd_windows(args) -> int:
    if args.system == "limitperiodic3":
        from .limitperiodic import limit_measure, safe_radius, truncated_measure, windows_abc

        fam = windows_abc(args.K)
        payload = {
            "K": args.K,
            "windows": {t: w.to_json_obj() for t, w in fam.items()},
            "measures": {t: str(w.haar_measure()) for t, w in fam.items()},
            "truncated_measure": str(truncated_measure(args.K)),
            "limit_measure": str(limit_measure()),
            "safe_radius": safe_radius(args.K),
        }
        if args.plot:
            from .plotting import plot_coset_windows
            plot_coset_windows(dict(fam.items()), 3, args.plot, f"3-adic windows, K={args.K}")
        summary = " ".join(f"{t}:{payload['measures'][t]}" for t in "abc")
    elif args.system == "chair":
        from .chair import chair_recursion, chair_windows, literal_windows

        if args.levels > 10:
            raise UsageError("chair windows support --levels up to 10")
        state = chair_recursion(args.levels)
        win = chair_windows(state)
        lit = literal_windows(state)
        payload = {
            "levels": args.levels,
            "windows": {str(k): w.to_json_obj() for k, w in enumerate(win.omega)},
            "measures": [str(m) for m in win.measures()],
            "deficit": str(win.deficit()),
            "literal_deficit": str(lit.deficit()),
        }
        summary = f"deficit={float(win.deficit()):.6g} literal={float(lit.deficit()):.6g}"
    elif args.system == "limitquasi":
        from .limitquasi import _to_q, ifs_windows

        win = ifs_windows(args.depth)
        payload = {
            "depth": args.depth,
            "outer": {t: {f"{r[0]},{r[1]}": [[str(_to_q(lo)), str(_to_q(hi))] for lo, hi in ivs]
                          for r, ivs in sorted(win.outer.cells[t].items())} for t in "ab"},
            "outer_measure": {t: str(win.outer_measure(t)) for t in "ab"},
            "counts": win.counts,
        }
        if args.plot:
            from .plotting import plot_quasi_windows
            plot_quasi_windows(win, args.plot, f"IFS windows, depth {args.depth}")
        summary = " ".join(f"{t}:{float(win.outer_measure(t)):.6g}" for t in "ab")
    else:
        raise UsageError(f"windows supports limitperiodic3, chair and limitquasi, not {args.system}")
    _emit(args, "windows", payload, summary)
    return EXIT_OK


def cmd_modelset(args) -> int:
    import json

    from .cutproject import Window, diagonal_scheme, model_set_points, scheme_from_config

    if args.config:
        scheme, windows = scheme_from_config(json.loads(Path(args.config).read_text()))
    elif args.system == "limitperiodic3":
        from .limitperiodic import windows_abc
        fam = windows_abc(args.K)
        scheme, windows = diagonal_scheme(3), {t: Window.single(w) for t, w in fam.items()}
    else:
        raise UsageError("modelset needs --config or --system limitperiodic3")
    pts = model_set_points(scheme, windows, args.lo, args.hi)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["type", "coordinates"])
    for x, lab in pts:
        w.writerow([lab, " ".join(str(c) for c in x) if isinstance(x, tuple) else str(x)])
    if args.csv:
        _write(args.csv, buf.getvalue())
    payload = {"lattice": scheme.name, "range": [args.lo, args.hi],
               "points": [[str(lab), str(x) if not isinstance(x, tuple) else [str(c) for c in x]] for x, lab in pts]}
    _emit(args, "modelset", payload, f"{len(pts)} points")
    return EXIT_OK


def cmd_chair_gen(args) -> int:
    from .chair import chair_recursion, chair_svg, check_invariants, state_to_json_obj

    if not 0 <= args.levels <= 10:
        raise UsageError("--levels must lie in [0, 10]")
    if isinstance(args.json, str):
        args.points, args.json = args.points or args.json, False
    state = chair_recursion(args.levels)
    if args.svg:
        _write(args.svg, chair_svg(state))
    obj = state_to_json_obj(state)
    if args.points:
        _write(args.points, dumps(obj))
    if args.plot:
        from .plotting import plot_chair
        plot_chair(state.labels(), args.plot, f"chair, level {args.levels}")
    inv = check_invariants(state)
    payload = {"level": args.levels, "counts": [len(state.pki[(k, args.levels)]) for k in range(4)], "invariants": inv}
    if args.json and not args.points:
        payload["sets"] = obj["sets"]
    _emit(args, "chair", payload, " ".join(str(c) for c in payload["counts"]))
    return EXIT_OK


def cmd_limitquasi_run(args) -> int:
    from .limitquasi import (FULL_STRIP, INNER_STRIP, VALID_STRIP, empirical_substrip, frequencies,
                             generate_sequence_exact, inner_strip_connectivity, point_density, sandwich_check,
                             strip_violations)

    if not 0 <= args.steps <= 12:
        raise UsageError("--steps must lie in [0, 12]")
    if not 0 <= args.depth <= 20:
        raise UsageError("--depth must lie in [0, 20]")
    seq = generate_sequence_exact(args.steps)
    viol = strip_violations(seq)
    inner = inner_strip_connectivity(args.steps)
    valid = inner_strip_connectivity(args.steps, strip=VALID_STRIP)
    sand = sandwich_check(args.steps, args.depth)

    def strip(s):
        return {"lo": str(s[0]), "hi": str(s[1]), "lo_open": s[2], "hi_open": s[3]}

    payload = {
        "steps": args.steps,
        "depth": args.depth,
        "counts": {"a": len(seq.lift_a), "b": len(seq.lift_b)},
        "frequencies": list(frequencies(seq)),
        "point_density": point_density(seq),
        "strips": {"full": strip(FULL_STRIP), "inner": strip(INNER_STRIP), "valid": strip(VALID_STRIP)},
        "full_strip_violations": [list(v) for v in viol],
        "inner_strip": {**inner, "not_sequence_points": inner["not_sequence_points"][:20],
                        "not_sequence_count": len(inner["not_sequence_points"])},
        "valid_strip": {k: v for k, v in valid.items() if k != "not_sequence_points"},
        "empirical_substrip": empirical_substrip(args.steps),
        "sandwich": sand,
    }
    if args.plot:
        from .plotting import plot_strip
        plot_strip(seq, [FULL_STRIP, INNER_STRIP, VALID_STRIP], args.plot, f"lifted sequence, n={args.steps}")
    ok = not viol and sand["ok"]
    payload["ok"] = ok
    _emit(args, "limitquasi", payload,
          f"strip violations={len(viol)} inner strip sequence-only={inner['strip_points_are_sequence_points']} "
          f"sandwich={'ok' if sand['ok'] else 'FAILED'}")
    _check(args, "limitquasi", payload, ok)
    return EXIT_OK


def cmd_diffract(args) -> int:
    from . import diffraction as dif

    threads = args.threads
    if args.system == "limitperiodic3":
        patch = dif.substitution_patch("limitperiodic3", args.r, args.weights)
        els = dif.fourier_module(args.nmax, 0, args.kmax)
        rep = dif.spectrum_compare(patch, args.weights, els, strongest=args.strongest, threads=threads)
        rows = rep["rows"]
        payload = {k: v for k, v in rep.items() if k not in ("rows", "schema")}
        payload["peaks"] = len(rows)
        summary = f"{len(rows)} peaks, max rel err over {rep['scored']} strongest = {rep['max_rel_err']:.3g}"
    else:
        if args.system == "thuemorse":
            print("warning: thuemorse is a negative control; it is not a model set and has no analytic spectrum",
                  file=sys.stderr)
        if args.system == "chair":
            patch = dif.chair_patch(args.levels, args.weights)
            ks = dif.dyadic_grid(args.nmax, args.kmax)
        else:
            patch = dif.substitution_patch(args.system, args.r, args.weights)
            q = 2**args.nmax if args.system != "limitquasi" else 3**args.nmax
            ks = [Fraction(i, q) for i in range(args.kmax * q + 1)]
        numeric = dif.numeric_spectrum(patch, ks, threads)
        rows = [dif.SpectrumEntry(k, None, None, v, None) for k, v in numeric]
        payload = {"weights": args.weights, "radius": patch.radius, "peaks": len(rows),
                   "strongest": [[str(k) if not isinstance(k, tuple) else [str(x) for x in k], v]
                                 for k, v in sorted(numeric, key=lambda t: -t[1])[: args.strongest]]}
        summary = f"{len(rows)} wave vectors (numeric only)"
    payload["system"] = args.system
    if args.csv:
        _write(args.csv, dif.rows_to_csv(rows))
    if args.plot and args.system != "chair":
        from .plotting import plot_spectrum
        plot_spectrum(rows, args.plot, f"{args.system} diffraction")
    _emit(args, "spectrum", payload, summary)
    return EXIT_OK


def cmd_render(args) -> int:
    """All figures for one system plus the delimited data behind them."""
    from . import plotting as pl

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    if args.system == "limitperiodic3":
        from .diffraction import fourier_module, rows_to_csv, spectrum_compare, substitution_patch
        from .limitperiodic import tail_measure, windows_abc
        from .substitution import fixed_point_patch, geometric_points, named_system

        ns = named_system("limitperiodic3")
        pts = geometric_points(fixed_point_patch(ns.system, ns.seed, 4), _lengths(args, ns.name, ns.system), "right")
        pts = pts.restrict(-27, 27)
        files.append(pl.plot_sequence(pts, out / "sequence.png", "limitperiodic3 anchors"))
        _write(out / "sequence.csv", pts.to_csv())
        fam = windows_abc(args.K)
        files.append(pl.plot_coset_windows(dict(fam.items()), 3, out / "windows.png", f"windows, K={args.K}"))
        ks = list(range(2, args.K + 1))
        files.append(pl.plot_convergence(ks, [tail_measure(k) for k in ks], out / "tail.png", "K", "tail measure"))
        patch = substitution_patch("limitperiodic3", 3**args.rexp)
        rep = spectrum_compare(patch, None, fourier_module(4, 0, 3))
        _write(out / "spectrum.csv", rows_to_csv(rep["rows"]))
        files.append(pl.plot_spectrum(rep["rows"], out / "spectrum.png", "limitperiodic3 diffraction"))
        files += [out / "sequence.csv", out / "spectrum.csv"]
    elif args.system == "chair":
        from .chair import chair_recursion, chair_svg, chair_windows, literal_windows

        state = chair_recursion(args.levels)
        files.append(pl.plot_chair(state.labels(), out / "chair.png", f"chair, level {args.levels}"))
        _write(out / "chair.svg", chair_svg(chair_recursion(min(args.levels, 5))))
        lv = list(range(1, args.levels + 1))
        cert = [chair_windows(chair_recursion(i)).deficit() for i in lv]
        lit = [literal_windows(chair_recursion(i)).deficit() for i in lv]
        files.append(pl.plot_convergence(lv, cert, out / "deficit.png", "i_max", "1 - sum of window measures"))
        _write(out / "deficit.csv", "i_max,certified,literal\n" + "".join(
            f"{i},{float(c):.17g},{float(l):.17g}\n" for i, c, l in zip(lv, cert, lit)))
        files += [out / "chair.svg", out / "deficit.csv"]
    elif args.system == "limitquasi":
        from .limitquasi import FULL_STRIP, INNER_STRIP, VALID_STRIP, generate_sequence_exact, ifs_windows

        seq = generate_sequence_exact(args.steps)
        files.append(pl.plot_strip(seq, [FULL_STRIP, INNER_STRIP, VALID_STRIP], out / "strip.png",
                                   f"lifted sequence, n={args.steps}"))
        win = ifs_windows(args.depth)
        files.append(pl.plot_quasi_windows(win, out / "windows.png", f"IFS windows, depth {args.depth}"))
        _write(out / "lifts.csv", "type,m,n\n" + "".join(
            f"{t},{m},{n}\n" for t, arr in (("a", seq.lift_a), ("b", seq.lift_b)) for m, n in arr))
        files.append(out / "lifts.csv")
    else:
        raise UsageError(f"render supports limitperiodic3, chair and limitquasi, not {args.system}")
    payload = {"system": args.system, "files": sorted(str(Path(f).name) for f in files)}
    _emit(args, "render", payload, "\n".join(str(f) for f in files))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, json_path: bool = False) -> None:
    if json_path:
        p.add_argument("--json", nargs="?", const=True, default=False, metavar="PATH",
                       help="bare: JSON on stdout; with PATH: write the point sets there")
    else:
        p.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    p.add_argument("--report", help="also write the JSON report to this file")
    p.add_argument("--diff", help="where to write the diff artifact if verification fails")
    p.add_argument("--threads", type=_positive, default=None, help="worker cap (default PADIC_MODELSET_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padic-modelset", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seqgen", help="anchors of a substitution fixed point")
    _common(p)
    p.add_argument("--system", choices=[s for s in SYSTEMS if s != "chair"])
    p.add_argument("--rules", help="rule file with lines like 'a -> ab'")
    p.add_argument("--seed", help="two-letter legal seed, left|right")
    p.add_argument("--anchor", choices=("left", "right"))
    p.add_argument("--lengths", help="tile lengths like a=1,b=2")
    p.add_argument("--steps", type=_nonneg, default=3)
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)
    p.add_argument("--csv")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_seqgen)

    def verify_args(p, default_system=None):
        _common(p)
        p.add_argument("--system", default=default_system, choices=("limitperiodic3", "chair", "limitquasi"),
                       required=default_system is None)
        p.add_argument("--K", type=_positive, default=8)
        p.add_argument("--R", type=_nonneg, default=100)
        p.add_argument("--strict", action="store_true", help="refuse R beyond the safe radius")
        p.add_argument("--levels", type=_nonneg, default=6)
        p.add_argument("--compare-level", type=_nonneg, default=None)
        p.add_argument("--steps", type=_nonneg, default=6)
        p.add_argument("--depth", type=_nonneg, default=10)
        p.set_defaults(func=cmd_verify)

    verify_args(sub.add_parser("verify", help="window constructions against substitution oracles"))

    p = sub.add_parser("windows", help="emit window approximations")
    _common(p)
    p.add_argument("--system", required=True, choices=("limitperiodic3", "chair", "limitquasi"))
    p.add_argument("--K", type=_positive, default=8)
    p.add_argument("--levels", type=_nonneg, default=6)
    p.add_argument("--depth", type=_nonneg, default=8)
    p.add_argument("--plot")
    p.set_defaults(func=cmd_windows)

    p = sub.add_parser("modelset", help="model set points from a scheme config")
    _common(p)
    p.add_argument("--config", help="JSON: lattice, physical_dim, windows")
    p.add_argument("--system", choices=("limitperiodic3",))
    p.add_argument("--K", type=_positive, default=8)
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_modelset)

    chair = sub.add_parser("chair", help="chair tiling").add_subparsers(dest="chair_cmd", required=True)
    p = chair.add_parser("gen", help="run the recursion to a level")
    _common(p, json_path=True)
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--svg")
    p.add_argument("--points", help="JSON file with the orientation classes")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_chair_gen)

    lq = sub.add_parser("limitquasi", help="limit-quasiperiodic example").add_subparsers(dest="lq_cmd", required=True)
    p = lq.add_parser("run", help="strip tests, IFS windows and sandwich check")
    _common(p)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--plot")
    p.set_defaults(func=cmd_limitquasi_run)

    lp = sub.add_parser("limitperiodic", help="3-adic example").add_subparsers(dest="lp_cmd", required=True)
    verify_args(lp.add_parser("verify", help="same as 'verify --system limitperiodic3'"), "limitperiodic3")

    p = sub.add_parser("diffract", help="Bragg spectrum, analytic and numeric")
    _common(p)
    p.add_argument("--system", required=True, choices=SYSTEMS)
    p.add_argument("--r", type=_positive, default=6561)
    p.add_argument("--nmax", type=_positive, default=5)
    p.add_argument("--kmax", type=_positive, default=10)
    p.add_argument("--levels", type=_nonneg, default=6, help="chair level")
    p.add_argument("--weights", type=_weights, default=None)
    p.add_argument("--strongest", type=_positive, default=20)
    p.add_argument("--csv")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_diffract)

    p = sub.add_parser("render", help="figures plus the CSV data behind them")
    _common(p)
    p.add_argument("--system", required=True, choices=("limitperiodic3", "chair", "limitquasi"))
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--K", type=_positive, default=6)
    p.add_argument("--rexp", type=_positive, default=6, help="diffraction patch radius 3^rexp")
    p.add_argument("--levels", type=_nonneg, default=6)
    p.add_argument("--steps", type=_nonneg, default=6)
    p.add_argument("--depth", type=_nonneg, default=8)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "threads", None) is None:
        env = os.environ.get("PADIC_MODELSET_THREADS")
        if env:
            try:
                args.threads = _positive(env)
            except (ValueError, argparse.ArgumentTypeError):
                print(f"error: PADIC_MODELSET_THREADS={env!r} is not a positive integer", file=sys.stderr)
                return EXIT_USAGE
    try:
        return args.func(args)
    except VerificationFailed:
        return EXIT_VERIFY
    except (UsageError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, TypeError) as exc:
        # malformed config or window files
        print(f"error: malformed input ({type(exc).__name__}: {exc})", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
