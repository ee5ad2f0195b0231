"""Command-line front end: ``equivcheck analyze|homdim|separation|fit|certify-normal``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import approximator as approx
from . import universality as uni
from .config import AnalysisConfig, load_config, parse_group, parse_rep, parse_subgroup
from .errors import ConfigError, EquivcheckError
from .exact_linalg import to_vector
from .representations import hom_dimension
from .universality import _jsonable

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_ANALYSIS = 0, 2, 3


class AnalysisFailed(Exception):
    def __init__(self, report: dict):
        super().__init__("analysis failed")
        self.report = report


# individual analyses


def _verdict_entry(kind, a, verdict):
    d = verdict.to_dict()
    return {"type": kind, "target": a["target"], "family": a["family"], "status": d["status"],
            "witness": d["witness"], "degrees_checked": d["degrees_checked"],
            "details": d["details"]}


def run_membership(a, cfg):
    f, F = cfg.targets[a["target"]], cfg.families[a["family"]]
    return _verdict_entry("membership", a, uni.decide_polynomial_in_class(f, F))


def run_failure_tests(a, cfg):
    f, F = cfg.targets[a["target"]], cfg.families[a["family"]]
    cap = int(a.get("cap", uni.DEFAULT_TUPLE_CAP))
    return _verdict_entry("failure_tests", a, uni.directional_failure_test(f, F, cap))


def _random_pairs(n, count, rng):
    """Pairs mixing permuted copies (always orbit-equivalent) and independent draws."""
    pairs = []
    for k in range(count):
        x = [rng.randint(-3, 3) for _ in range(n)]
        if k % 2 == 0:
            y = x[:]
            rng.shuffle(y)
        else:
            y = [rng.randint(-3, 3) for _ in range(n)]
        pairs.append((x, y))
    return pairs


def run_separation(a, cfg):
    F = cfg.families[a["family"]]
    try:
        pairs = [(to_vector(x), to_vector(y)) for x, y in a.get("pairs", [])]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid separation pair: {exc}") from exc
    if "random" in a:
        pairs += _random_pairs(F.source_dim, int(a["random"]), random.Random(cfg.seed))
    rows, consistent = [], True
    for x, y in pairs:
        sep = uni.separation_equivalent(x, y, F).equivalent
        orb = uni.orbit_equivalent(x, y, F.group) if F.group is not None else None
        if orb and not sep:
            consistent = False
        rows.append({"x": list(x), "y": list(y), "separation_equivalent": sep,
                     "orbit_equivalent": orb})
    return {"type": "separation", "family": a["family"], "pairs": len(rows),
            "separation_equivalent": sum(r["separation_equivalent"] for r in rows),
            "orbit_implies_separation": consistent, "results": rows}


def run_certificate(a, cfg):
    kind = a.get("kind", "normal")
    if kind == "normal":
        G = parse_group(a["group"])
        H = parse_subgroup(a["subgroup"], G)
        cert = uni.normal_subgroup_certificate(G, H)
        return {"type": "certificate", "kind": "normal", "group": a["group"],
                "subgroup": a["subgroup"], **cert.to_dict()}
    if kind == "monomial":
        F = cfg.families[a["family"]]
        cert = uni.monomial_certificate(F, a["s"], a["a"], a["c"])
        return {"type": "certificate", "kind": "monomial", "family": a["family"], **cert.to_dict()}
    raise ConfigError(f"unknown certificate kind {kind!r}")


def run_compare(a, cfg):
    F1, F2 = cfg.families[a["first"]], cfg.families[a["second"]]
    cmp = uni.compare_classes(F1, F2, int(a.get("degree_cap", 3)))
    return {"type": "compare", "first": a["first"], "second": a["second"],
            "degree_cap": int(a.get("degree_cap", 3)), **cmp.to_dict()}


def run_fit(a, cfg):
    f, F = cfg.targets[a["target"]], cfg.families[a["family"]]
    widths = [int(w) for w in a.get("widths", [a.get("width", 64)])]
    try:
        base = approx.FitConfig(
            width=widths[0], sample_count=int(a.get("samples", max(2000, 10 * max(widths)))),
            seed=int(a.get("seed", cfg.seed)), activation=a.get("activation", "relu"),
            inner_scale=float(a.get("inner_scale", 3.0)),
            ridge_lambda=float(a.get("ridge_lambda", 1e-10)),
            domain_box=tuple(a.get("domain_box", (-1.0, 1.0))))
    except ValueError as exc:
        raise ConfigError(f"invalid fit parameters: {exc}") from exc
    results = approx.error_curve(f, F, widths, base)
    return {"type": "fit", "target": a["target"], "family": a["family"],
            "activation": base.activation, "seed": base.seed,
            "results": [approx.result_to_dict(r) for r in results],
            "csv": approx.results_to_csv(results)}


RUNNERS = {"membership": run_membership, "failure_tests": run_failure_tests,
           "separation": run_separation, "certificate": run_certificate,
           "compare": run_compare, "fit": run_fit}


def _run_one(a, cfg, timings):
    start = time.perf_counter()
    try:
        out = RUNNERS[a["type"]](a, cfg)
    except ConfigError:
        raise
    except (EquivcheckError, ValueError, KeyError) as exc:
        out = {"type": a["type"], "error": f"{type(exc).__name__}: {exc}"}
    if timings:
        out["timings"] = {"seconds": round(time.perf_counter() - start, 6)}
    return _jsonable(out)


def run_analyses(cfg: AnalysisConfig, types=None, threads: int = 1, timings: bool = False) -> dict:
    """Run the config's analyses (optionally only some types); results keep config order."""
    todo = [a for a in cfg.analyses if types is None or a["type"] in types]
    if threads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda a: _run_one(a, cfg, timings), todo))
    else:
        results = [_run_one(a, cfg, timings) for a in todo]
    report = {"version": cfg.version, "config": cfg.name, "seed": cfg.seed, "results": results}
    if any("error" in r for r in results):
        raise AnalysisFailed(report)
    return report


# rendering


def render_json(report: dict) -> str:
    slim = {**report, "results": [{k: v for k, v in r.items() if k != "csv"}
                                  for r in report["results"]]}
    return json.dumps(slim, indent=2) + "\n"


def _summary(r: dict) -> str:
    t = r["type"]
    if "error" in r:
        return f"{t}: ERROR {r['error']}"
    if t in ("membership", "failure_tests"):
        return f"{t}: {r['target']} in {r['family']} -> {r['status']}"
    if t == "separation":
        return (f"separation: {r['family']} {r['separation_equivalent']}/{r['pairs']} pairs equivalent,"
                f" orbit implies separation: {r['orbit_implies_separation']}")
    if t == "certificate" and r["kind"] == "normal":
        verdict = "granted" if r["granted"] else f"refused ({r['failed_check']})"
        return f"certificate: normal {r['subgroup']} in {r['group']} -> {verdict}"
    if t == "certificate":
        return f"certificate: monomial on {r['family']} -> value {r['value']}"
    if t == "compare":
        w = r["witness_second_not_first"] or r["witness_first_not_second"]
        wtxt = f", witness {w['polynomial']}" if w else ""
        return f"compare: {r['first']} vs {r['second']} -> {r['relation']}{wtxt}"
    if t == "fit":
        errs = ", ".join(f"h={x['width']}: {x['rms_error']:.3e}" for x in r["results"])
        return f"fit: {r['target']} with {r['family']} -> {errs}"
    return t


def render_text(report: dict) -> str:
    lines = [f"# {report['config']} (seed {report['seed']})"]
    lines += [_summary(r) for r in report["results"]]
    return "\n".join(lines) + "\n"


def render_csv(report: dict) -> str:
    chunks = [r["csv"] for r in report["results"] if r.get("type") == "fit" and "csv" in r]
    if not chunks:
        return ""
    header = chunks[0].splitlines()[0]
    body = [line for c in chunks for line in c.splitlines()[1:]]
    return "\n".join([header, *body]) + "\n"


RENDERERS = {"json": render_json, "text": render_text, "csv": render_csv}


def emit(report: dict, args) -> None:
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(render_json(report))
        (out / "report.txt").write_text(render_text(report))
        csv_text = render_csv(report)
        if csv_text:
            (out / "fit.csv").write_text(csv_text)
    else:
        sys.stdout.write(RENDERERS[args.format](report))


# argument handling


def _threads(value) -> int:
    if value is None:
        value = os.environ.get("EQUIVCHECK_THREADS", "1")
    try:
        n = int(value)
    except ValueError as exc:
        raise ConfigError(f"thread count must be an integer, got {value!r}") from exc
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", help="write report.json, report.txt and fit.csv here")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--threads", help="worker threads (default: $EQUIVCHECK_THREADS or 1)")
    common.add_argument("--format", choices=sorted(RENDERERS), default="text")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="equivcheck", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("analyze", "run every analysis in a config"),
                           ("separation", "run only the separation analyses"),
                           ("fit", "run only the approximation experiments")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("config", nargs="?", help="config path or bundled config name")
        sp.add_argument("--config", dest="config_opt")
    hp = sub.add_parser("homdim", parents=[common], help="dimension of Hom_G(V, W)")
    hp.add_argument("group", help="e.g. symmetric:4, cyclic:6")
    hp.add_argument("V", help="natural | regular | trivial")
    hp.add_argument("W", help="natural | regular | trivial")
    cp = sub.add_parser("certify-normal", parents=[common], help="normal-subgroup certificate")
    cp.add_argument("group")
    cp.add_argument("subgroup", help="alternating | trivial | whole | JSON generator list")
    return p


def _config_path(args) -> str:
    path = args.config_opt or args.config
    if not path:
        raise ConfigError("no config given")
    return path


def _dispatch(args) -> int:
    threads = _threads(args.threads)
    if args.command == "homdim":
        G = parse_group(args.group)
        d = hom_dimension(parse_rep(args.V, G), parse_rep(args.W, G))
        if args.format == "json":
            print(json.dumps({"group": args.group, "V": args.V, "W": args.W, "dimension": d}))
        else:
            print(d)
        return EXIT_OK
    if args.command == "certify-normal":
        a = {"type": "certificate", "kind": "normal", "group": args.group, "subgroup": args.subgroup}
        cfg = AnalysisConfig(version=1, analyses=[a], name="certify-normal")
        report = run_analyses(cfg)
        emit(report, args)
        return EXIT_OK
    cfg = load_config(_config_path(args), seed=args.seed)
    types = {"separation": {"separation"}, "fit": {"fit"}}.get(args.command)
    report = run_analyses(cfg, types, threads, args.timings)
    emit(report, args)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AnalysisFailed as exc:
        emit(exc.report, args)
        failed = [r["error"] for r in exc.report["results"] if "error" in r]
        print(f"analysis error: {'; '.join(failed)}", file=sys.stderr)
        return EXIT_ANALYSIS
    except EquivcheckError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
