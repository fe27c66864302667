"""
Command-line interface.

    epchiral find-eps --model model.json --region -2 2 -2 2
    epchiral trace    --model model.json --loop loop.json --csv
    epchiral table    --k 2
    epchiral surface  --model model.json --grid 201 201
    epchiral verify   --seed 0
    epchiral project  --plane 2.9036 0.5372
    epchiral lift     --word ab

Every command writes its artifacts into ``--out`` (default: the current
directory).  Exit codes: 0 success, 2 bad configuration, 3 empty result,
4 numerical failure, 5 failed certificate.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import cover, sphere, words
from .errors import EmptyRegion, NoConvergence, NumericalFailure
from .io import ConfigError, canonical_json, loop_from_spec, model_from_spec, read_json, write_atomic
from .loops import lasso_loop
from .spectra import (
    NHDirac, SquareRoot, ep_charges, find_eps, loop_word, numerical_vorticity,
    predicted_vorticity, trace_loop,
)
from .surface import constraint_loci, spectrum_grid

EXIT_OK, EXIT_CONFIG, EXIT_EMPTY, EXIT_NUMERIC, EXIT_CERT = 0, 2, 3, 4, 5

DEFAULTS = {
    "model": None, "loop": None, "out": ".", "tol": None, "seed": 0, "samples": None,
    "config": None, "region": [-2.0, 2.0, -2.0, 2.0], "grid": None, "k": None,
    "csv": False, "word": None, "cover": None, "start_sheet": 0, "plane": None,
    "sphere_point": None, "input": None, "trials": 100, "homotopy_grid": 256,
}


class EmptyResult(Exception):
    pass


class CertificateFailure(Exception):
    pass


def _global_flags(p: argparse.ArgumentParser):
    s = argparse.SUPPRESS
    p.add_argument("--model", default=s, help="model JSON file (or inline JSON)")
    p.add_argument("--loop", default=s, help="loop JSON file (or inline JSON)")
    p.add_argument("--out", default=s, help="output directory")
    p.add_argument("--tol", type=float, default=s, help="tolerance of the main numerical step")
    p.add_argument("--seed", type=int, default=s, help="seed for randomized runs")
    p.add_argument("--samples", type=int, default=s, help="initial loop sample count")
    p.add_argument("--config", default=s, help="JSON file with default values for any flag")


def build_parser() -> argparse.ArgumentParser:
    s = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="epchiral", description=__doc__.split("\n\n")[0].strip())
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("find-eps", help="locate EPs of a model in a region")
    _global_flags(p)
    p.add_argument("--region", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"), default=s)
    p.add_argument("--grid", type=int, nargs="+", default=s, help="scan grid size")

    p = sub.add_parser("trace", help="trace eigenvalue branches around a loop")
    _global_flags(p)
    p.add_argument("--csv", action="store_true", default=s, help="also write trace.csv")

    p = sub.add_parser("table", help="standard-word table for degree k")
    _global_flags(p)
    p.add_argument("--k", type=int, default=s)

    p = sub.add_parser("surface", help="spectrum grids and EP constraint loci")
    _global_flags(p)
    p.add_argument("--region", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"), default=s)
    p.add_argument("--grid", type=int, nargs="+", default=s, help="NX [NY]")

    p = sub.add_parser("verify", help="run all certificates")
    _global_flags(p)
    p.add_argument("--trials", type=int, default=s, help="random loops in the cross-validation")
    p.add_argument("--homotopy-grid", dest="homotopy_grid", type=int, default=s)

    p = sub.add_parser("project", help="stereographic projection utilities")
    _global_flags(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--plane", type=float, nargs=2, metavar=("N", "CHI"), default=s)
    g.add_argument("--sphere", dest="sphere_point", type=float, nargs=3,
                   metavar=("NT", "CHIT", "XIT"), default=s)
    g.add_argument("--input", default=s, help="CSV with header n,chi or nt,chit,xit")

    p = sub.add_parser("lift", help="lift a word to a branched cover")
    _global_flags(p)
    p.add_argument("--word", default=s)
    p.add_argument("--cover", default=s, help="cover JSON file (default: two sheets over -i, i)")
    p.add_argument("--start-sheet", dest="start_sheet", type=int, default=s)
    return parser


def resolve(ns: argparse.Namespace) -> dict:
    """Command-line values, then ``--config`` values, then defaults."""
    given = vars(ns)
    cfg = {}
    if "config" in given:
        cfg = read_json(given["config"])
        if not isinstance(cfg, dict):
            raise ConfigError("the config file must hold a JSON object")
        unknown = set(cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = dict(DEFAULTS)
    out.update(cfg)
    out.update(given)
    return out


def _model(cfg, default=None):
    if cfg["model"] is None:
        if default is None:
            raise ConfigError("--model is required")
        return default
    spec = cfg["model"] if isinstance(cfg["model"], dict) else read_json(cfg["model"])
    return model_from_spec(spec)


def _grid(cfg, default):
    g = cfg["grid"]
    if g is None:
        return default
    g = [g] if isinstance(g, int) else list(g)
    if len(g) == 1:
        g = g * 2
    if len(g) != 2:
        raise ConfigError("--grid takes one or two integers")
    return int(g[0]), int(g[1])


def _emit(cfg, name, text) -> Path:
    return write_atomic(Path(cfg["out"]) / name, text)


# -- commands -----------------------------------------------------------------------

def cmd_find_eps(cfg) -> int:
    model = _model(cfg)
    nx, _ = _grid(cfg, (64, 64))
    tol = cfg["tol"] or 1e-10
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NoConvergence)
            eps = find_eps(model, cfg["region"], grid_n=nx, tol=tol)
    except EmptyRegion as exc:
        raise EmptyResult(str(exc)) from None
    _emit(cfg, "eps.json", canonical_json({
        "model": model.to_spec(), "region": list(cfg["region"]), "grid": nx, "tol": tol,
        "eps": [{"x": e.point.x, "y": e.point.y, "residual": e.residual} for e in eps],
    }))
    print(f"{len(eps)} EP(s): " + ", ".join(f"({e.point.x:.9g}, {e.point.y:.9g})" for e in eps))
    if not eps:
        raise EmptyResult("no EP in the region")
    return EXIT_OK


def trace_summary(model, loop, samples=None, tol=1e-3) -> tuple[dict, object]:
    x0, x1, y0, y1 = loop.bounding_box()
    pad = 0.1 * max(loop.diameter(), 1e-12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergence)
        eps = find_eps(model, (x0 - pad, x1 + pad, y0 - pad, y1 + pad))
    tr = trace_loop(model, loop, samples, eps=eps)
    nu = numerical_vorticity(tr, tol)
    ep_z = [e.z for e in eps]
    w = loop_word(loop, ep_z, n=tr.n) if ep_z else words.Word()
    charges = ep_charges(model, ep_z) if ep_z else []
    try:
        cls = str(words.classify(w))
    except ValueError:
        cls = None
    summary = {
        "model": model.to_spec(), "loop": loop.to_spec(),
        "eps": [{"x": e.point.x, "y": e.point.y, "residual": e.residual} for e in eps],
        "ep_charges": charges,
        "word": w.to_text(), "class": cls,
        "permutation": list(tr.permutation), "swapped": tr.swapped,
        "d_arg": tr.d_arg, "samples": tr.n,
        "vorticity": float(nu.value), "vorticity_residual": nu.residual,
        "word_vorticity": float(words.vorticity_of_word(w)),
        "predicted_vorticity": float(predicted_vorticity(w, charges)) if ep_z else 0.0,
    }
    return summary, tr


def cmd_trace(cfg) -> int:
    model = _model(cfg)
    if cfg["loop"] is None:
        raise ConfigError("--loop is required")
    spec = cfg["loop"] if isinstance(cfg["loop"], dict) else read_json(cfg["loop"])
    loop = loop_from_spec(spec)
    if cfg["samples"] is not None and cfg["samples"] < 64:
        raise ConfigError("--samples must be at least 64")
    summary, tr = trace_summary(model, loop, cfg["samples"], cfg["tol"] or 1e-3)
    _emit(cfg, "trace.json", canonical_json(summary))
    if cfg["csv"]:
        _emit(cfg, "trace.csv", tr.csv())
    print(f"word {summary['word']}  class {summary['class']}  permutation {tuple(tr.permutation)}  "
          f"vorticity {summary['vorticity']:g}")
    return EXIT_OK


def cmd_table(cfg) -> int:
    k = cfg["k"]
    if k is None:
        raise ConfigError("--k is required")
    if not 1 <= int(k) <= words.MAX_TABLE_K:
        raise ConfigError(f"k must be between 1 and {words.MAX_TABLE_K}")
    rows = words.enumerate_table(int(k))
    text = words.table_csv(rows)
    _emit(cfg, f"table_{k}.csv", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_surface(cfg) -> int:
    model = _model(cfg)
    nx, ny = _grid(cfg, (201, 201))
    try:
        grid = spectrum_grid(model, cfg["region"], nx, ny)
        loci = constraint_loci(model, cfg["region"], nx, ny)
    except EmptyRegion as exc:
        raise ConfigError(str(exc)) from None
    _emit(cfg, "surface_re.csv", grid.csv("re"))
    _emit(cfg, "surface_im.csv", grid.csv("im"))
    _emit(cfg, "locus_re.csv", loci.csv_real())
    _emit(cfg, "locus_im.csv", loci.csv_imag())
    _emit(cfg, "locus_intersections.csv", loci.csv_intersections())
    f_re = max((float(np.max(np.abs(model.conditions(c[:, 0], c[:, 1])[0]))) for c in loci.real), default=0.0)
    f_im = max((float(np.max(np.abs(model.conditions(c[:, 0], c[:, 1])[1]))) for c in loci.imag), default=0.0)
    _emit(cfg, "surface.json", canonical_json({
        "model": model.to_spec(), "region": list(cfg["region"]), "grid": [nx, ny],
        "locus_re_points": sum(len(c) for c in loci.real),
        "locus_im_points": sum(len(c) for c in loci.imag),
        "locus_re_max_residual": f_re, "locus_im_max_residual": f_im,
        "intersections": [{"x": e.point.x, "y": e.point.y, "residual": e.residual}
                          for e in loci.intersections],
    }))
    print(f"grid {nx}x{ny}; {len(loci.intersections)} locus intersection(s)")
    return EXIT_OK


def cmd_project(cfg) -> int:
    if cfg["plane"] is not None:
        p = sphere.unproject(cfg["plane"])
        result = {"plane": list(cfg["plane"]), "sphere": [p.nt, p.chit, p.xit]}
    elif cfg["sphere_point"] is not None:
        v = np.asarray(cfg["sphere_point"], float)
        if np.linalg.norm(v) == 0:
            raise ConfigError("the sphere point must be non-zero")
        q = sphere.project(v / np.linalg.norm(v))
        result = {"sphere": list(cfg["sphere_point"]),
                  "plane": "inf" if q is sphere.INFINITY else [q.n, q.chi]}
    elif cfg["input"] is not None:
        try:
            data = np.genfromtxt(cfg["input"], delimiter=",", names=True)
        except OSError as exc:
            raise ConfigError(str(exc)) from None
        names = data.dtype.names or ()
        data = np.atleast_1d(data)
        if names == ("n", "chi"):
            out = sphere.unproject_array(np.column_stack([data["n"], data["chi"]]))
            _emit(cfg, "projected.csv", sphere.sphere_csv(out))
        elif names == ("nt", "chit", "xit"):
            xyz = np.column_stack([data["nt"], data["chit"], data["xit"]])
            xyz /= np.linalg.norm(xyz, axis=1)[:, None]
            _emit(cfg, "projected.csv", sphere.plane_csv(sphere.project(p) for p in xyz))
        else:
            raise ConfigError("input header must be 'n,chi' or 'nt,chit,xit'")
        result = {"input": str(cfg["input"]), "rows": int(len(data)), "output": "projected.csv"}
    else:
        raise ConfigError("one of --plane, --sphere or --input is required")
    _emit(cfg, "project.json", canonical_json(result))
    print(canonical_json(result), end="")
    return EXIT_OK


def cmd_lift(cfg) -> int:
    if cfg["word"] is None:
        raise ConfigError("--word is required")
    w = words.reduce_free(words.word(cfg["word"]))
    if cfg["cover"] is None:
        cv = cover.standard_two_sheet(-1j, 1j)
    else:
        spec = cfg["cover"] if isinstance(cfg["cover"], dict) else read_json(cfg["cover"])
        cv = cover.CoveringSpec.from_spec(spec)
    r = cover.lift_word(cv, w, int(cfg["start_sheet"]))
    result = {"word": w.to_text(), "cover": cv.to_spec(), "start_sheet": int(cfg["start_sheet"]),
              "total_perm": list(r.total_perm), "closes": r.closes,
              "order_to_close": r.order_to_close, "sheets": list(r.sheets)}
    if cover.is_in_cover_subgroup(w):
        result["cover_word"] = cover.format_cover_word(cover.rewrite_over_cover_generators(w))
    _emit(cfg, "lift.json", canonical_json(result))
    print(f"{w.to_text()}: permutation {r.total_perm}, closes={r.closes}, order {r.order_to_close}")
    return EXIT_OK


# -- verify -------------------------------------------------------------------------

def _cert(ok, margin, **detail) -> dict:
    return {"pass": bool(ok), "margin": margin, **detail}


def _random_even_words(rng, count, max_len=20):
    out = []
    for _ in range(count):
        n = 2 * int(rng.integers(0, max_len // 2 + 1))
        out.append(words.word("".join(rng.choice(list("abAB"), size=n))))
    return out


def run_certificates(seed: int = 0, trials: int = 100, homotopy_grid: int = 256) -> dict:
    rng = np.random.default_rng(seed)
    certs = {}

    g = cover.verify_homotopy(homotopy_grid, homotopy_grid)
    g2 = cover.verify_homotopy(2 * homotopy_grid, 2 * homotopy_grid)
    res = max(g.endpoint_residuals.values())
    jump = max(g.continuity_jumps)
    certs["homotopy"] = _cert(g.valid and res < 1e-12 and jump < 1e-9 and g.min_puncture_distance > 0,
                              g.min_puncture_distance, endpoint_residual=res, continuity_jump=jump,
                              lipschitz_lower_bound=g.lipschitz_lower_bound, grid=homotopy_grid)
    rel = abs(g2.min_puncture_distance - g.min_puncture_distance) / g.min_puncture_distance
    certs["homotopy_grid_doubling"] = _cert(rel <= 0.05, 0.05 - rel, relative_change=rel,
                                            fine_min_distance=g2.min_puncture_distance)

    err = max(float(np.max(np.abs(sphere.unproject(q).as_array() - np.array(p))))
              for q, p in zip(sphere.MICROCAVITY_EPS_PLANE, sphere.MICROCAVITY_EPS_SPHERE))
    certs["sphere_published"] = _cert(err < 1e-3, 1e-3 - err, max_error=err)
    q = rng.uniform(-10, 10, size=(10_000, 2))
    xyz = sphere.unproject_array(q)
    rt = float(max(np.max(np.abs(sphere.project_array(xyz) - q)),
                   np.max(np.abs(np.sum(xyz ** 2, axis=1) - 1))))
    certs["sphere_roundtrip"] = _cert(rt < 1e-12, 1e-12 - rt, max_residual=rt, points=len(q))

    even = _random_even_words(rng, 10_000)
    bad = sum(cover.expand_cover_word(cover.rewrite_over_cover_generators(w)) != w for w in even)
    bad += cover.format_cover_word(cover.rewrite_over_cover_generators(words.word("ba"))) != "B C^-1 A"
    certs["rewrite_roundtrip"] = _cert(bad == 0, -bad, failures=bad, words=len(even))
    bad = sum(not words.capped_equal(w * words.parity(w), words.Word()) for w in even)
    certs["mirror_cancellation"] = _cert(bad == 0, -bad, failures=bad, words=len(even))

    published = {1: [(0, 1, 1, 1), (1, 2, 2, 0), (2, 1, 3, -1)],
                 2: [(0, 1, 2, 2), (1, 4, 3, 1), (2, 6, 4, 0), (3, 4, 5, -1), (4, 1, 6, -2)]}
    bad = sum([(r.r, r.count, r.linking_number, r.vorticity) for r in words.enumerate_table(k)] != rows
              for k, rows in published.items())
    certs["table"] = _cert(bad == 0, -bad, failures=bad)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoConvergence)
        got = [[e.z for e in find_eps(m)] for m in (NHDirac(1.0), SquareRoot(-1j, 1j))]
    err = max(max(abs(z - t) for z, t in zip(zs, (-1j, 1j))) if len(zs) == 2 else np.inf for zs in got)
    certs["ep_location"] = _cert(err < 1e-9, 1e-9 - err, max_error=err)

    loci = constraint_loci(NHDirac(1.0))
    f1 = max(float(np.max(np.abs(c[:, 0] ** 2 + c[:, 1] ** 2 - 1))) for c in loci.real)
    f2 = max(float(np.max(np.abs(c[:, 0]))) for c in loci.imag)
    zs = [e.z for e in loci.intersections]
    err = max(abs(z - t) for z, t in zip(zs, (-1j, 1j))) if len(zs) == 2 else np.inf
    certs["constraint_loci"] = _cert(f1 < 1e-9 and f2 < 1e-12 and err < 1e-6, 1e-6 - err,
                                     circle_residual=f1, line_residual=f2, intersection_error=err)

    eps = [-1j, 1j]
    model = SquareRoot(*eps)
    fails = {"parity": 0, "vorticity": 0, "word": 0}
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(0, 9))
        w = words.reduce_free(words.word("".join(rng.choice(list("abAB"), size=n))))
        loop = lasso_loop(w, eps, rng=rng)
        tr = trace_loop(model, loop, eps=eps)
        fails["parity"] += tr.swapped != (len(w) % 2 == 1)
        nu = -tr.d_arg / (4 * np.pi)
        dev = abs(nu - float(words.vorticity_of_word(w)))
        worst = max(worst, dev)
        fails["vorticity"] += dev >= 1e-3
        fails["word"] += loop_word(loop, eps, n=tr.n) != w
    total = sum(fails.values())
    certs["spectral_cross_validation"] = _cert(total == 0, 1e-3 - worst, failures=fails, trials=trials,
                                               max_vorticity_deviation=worst)
    return certs


def cmd_verify(cfg) -> int:
    trials = int(cfg["trials"])
    hg = int(cfg["homotopy_grid"])
    if trials < 1 or hg < 128:
        raise ConfigError("--trials must be positive and --homotopy-grid at least 128")
    certs = run_certificates(int(cfg["seed"]), trials, hg)
    ok = all(c["pass"] for c in certs.values())
    _emit(cfg, "certificates.json", canonical_json({"all_pass": ok, "seed": int(cfg["seed"]),
                                                    "certificates": certs}))
    for name, c in sorted(certs.items()):
        print(f"{'PASS' if c['pass'] else 'FAIL'}  {name}")
    if not ok:
        raise CertificateFailure("at least one certificate failed")
    return EXIT_OK


COMMANDS = {"find-eps": cmd_find_eps, "trace": cmd_trace, "table": cmd_table,
            "surface": cmd_surface, "verify": cmd_verify, "project": cmd_project, "lift": cmd_lift}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve(ns)
        return COMMANDS[cfg["command"]](cfg)
    except EmptyResult as exc:
        print(f"empty result: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except CertificateFailure as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERT
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, IndexError, TypeError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
