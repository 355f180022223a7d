"""Command-line entry point: ``causalab <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .dag import parse_dot, serialize_dot
from .data import read_csv, write_csv
from .discovery import run_pc
from .estimate import LinearMediation, estimate_effect
from .identify import identify_effect
from .phenomena import ohm, quantum, tides
from .pipeline import (
    SUMMARY_FIELDS,
    discover_graph,
    format_table,
    load_config,
    run_pipeline,
)
from .refute import REFUTERS, aggregate_confidence, run_refuter


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _names(s):
    return [x.strip() for x in s.split(",") if x.strip()] if s else []


def _model(args, parser, df=None):
    if bool(args.graph) == bool(args.discover):
        parser.error("give exactly one of --graph or --discover")
    if args.graph:
        return parse_dot(Path(args.graph).read_text(encoding="utf-8"))
    return discover_graph(df, args.discover)


def _estimand(args, parser, df):
    g = _model(args, parser, df)
    found = identify_effect(g, args.treatment, args.outcome, _names(args.unobserved),
                            mediation=args.estimator == "mediation" or None)
    e = found.get(args.estimator)
    if e is None:
        raise SystemExit(f"error: no {args.estimator} estimand: {found.missing.get(args.estimator, 'not applicable')}")
    return e


def cmd_discover(args, parser):
    df = read_csv(args.input)
    if args.algo == "lingam":
        text = serialize_dot(discover_graph(df, "lingam"))
    else:
        text = run_pc(df, alpha=args.alpha).to_dot()
    _emit(text, args.out)


def cmd_identify(args, parser):
    df = read_csv(args.input) if args.input else None
    if args.discover and df is None:
        parser.error("--discover needs --in")
    g = _model(args, parser, df)
    found = identify_effect(g, args.treatment, args.outcome, _names(args.unobserved))
    _emit(found.report(), args.out)


def cmd_estimate(args, parser):
    if not args.graph and not args.discover:
        parser.error("estimate needs --graph or --discover")
    df = read_csv(args.input)
    e = _estimand(args, parser, df)
    est = estimate_effect(df, e)
    text = e.report() + "\n\n" + est.report()
    if e.strategy == "mediation":
        d, ind = LinearMediation(e.treatment, e.outcome, e.mediators, e.adjustment).fit(df).decompose()
        text += f"Direct effect: {d.ate!r}\nIndirect effect: {ind.ate!r}\n"
    _emit(text, args.out)


def cmd_refute(args, parser):
    if not args.graph and not args.discover:
        parser.error("refute needs --graph or --discover")
    if args.seed is None:
        parser.error("refute needs --seed")
    df = read_csv(args.input)
    e = _estimand(args, parser, df)
    est = estimate_effect(df, e)
    methods = _names(args.refuters) or list(REFUTERS)
    results = [run_refuter(m, df, e, est, k=args.k, seed=args.seed, fraction=args.fraction) for m in methods]
    text = "".join(r.report() + "\n" for r in results)
    text += f"Aggregate confidence: {aggregate_confidence(results)!r}\n"
    _emit(text, args.out)


def cmd_simulate(args, parser):
    if args.kind == "ohm":
        df = ohm.generate_ohm_dataset(args.n, rng=args.seed)
    elif args.kind == "quantum":
        df = quantum.build_entanglement_dataset(args.states, args.shots, rng=args.seed)
    else:
        if not args.out:
            parser.error("simulate tides needs --out DIR")
        d = tides.write_synthetic_fixture(args.out, seed=args.seed)
        sys.stdout.write(f"wrote {d}\n")
        return
    _emit(write_csv(df), args.out)


def cmd_run(args, parser):
    rep = run_pipeline(load_config(args.config))
    if args.out:
        rep.save(args.out)
    sys.stdout.write(rep.text())
    return 0 if rep.ok else 1


def cmd_report(args, parser):
    rows = []
    for p in args.inputs:
        p = Path(p)
        if p.is_dir():
            p = p / "report.csv"
        with p.open(encoding="utf-8") as fh:
            rows += list(csv.DictReader(fh))
    if args.pivot:
        text = _pivot(rows, args.pivot)
    else:
        text = format_table(rows, [f for f in SUMMARY_FIELDS if any(r.get(f) for r in rows)])
    _emit(text, args.out)


def _pivot(rows, value):
    """Relations down, run labels across."""
    labels = list(dict.fromkeys(r["label"] for r in rows))
    rels = list(dict.fromkeys(f"{r['treatment']} -> {r['outcome']}" for r in rows))
    table = []
    for rel in rels:
        out = {"relation": rel}
        for r in rows:
            if f"{r['treatment']} -> {r['outcome']}" == rel:
                out[r["label"]] = r.get(value, "")
        table.append(out)
    return format_table(table, ["relation", *labels])


def build_parser():
    p = argparse.ArgumentParser(prog="causalab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def effect_args(sp, need_in=True):
        sp.add_argument("--in", dest="input", required=need_in, help="data CSV")
        sp.add_argument("--graph", help="causal model as a DOT file")
        sp.add_argument("--discover", choices=["pc", "lingam"], help="learn the model from --in")
        sp.add_argument("--treatment", required=True)
        sp.add_argument("--outcome", required=True)
        sp.add_argument("--unobserved", help="comma-separated latent variables")
        sp.add_argument("--out")

    sp = sub.add_parser("discover", help="learn a causal graph, print DOT")
    sp.add_argument("--algo", choices=["pc", "lingam"], default="lingam")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_discover)

    sp = sub.add_parser("identify", help="list estimands for an effect")
    effect_args(sp, need_in=False)
    sp.set_defaults(func=cmd_identify)

    for name, func in (("estimate", cmd_estimate), ("refute", cmd_refute)):
        sp = sub.add_parser(name, help=f"{name} an effect")
        effect_args(sp)
        sp.add_argument("--estimator", choices=["backdoor", "iv", "frontdoor", "mediation"], default="backdoor")
        if name == "refute":
            sp.add_argument("--refuters", help=f"comma-separated subset of {','.join(REFUTERS)}")
            sp.add_argument("--k", type=int, default=100)
            sp.add_argument("--fraction", type=float, default=0.8)
            sp.add_argument("--seed", type=int)
        sp.set_defaults(func=func)

    sp = sub.add_parser("simulate", help="generate a dataset")
    sp.add_argument("kind", choices=["ohm", "quantum", "tides"])
    sp.add_argument("--n", type=int, default=10000)
    sp.add_argument("--states", type=int, default=20)
    sp.add_argument("--shots", type=int, default=100)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("run", help="run the full pipeline from a config file")
    sp.add_argument("config")
    sp.add_argument("--out", help="directory for report.txt and report.csv")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("report", help="tabulate saved pipeline outputs")
    sp.add_argument("inputs", nargs="+", help="report.csv files or run directories")
    sp.add_argument("--pivot", choices=["ate", "confidence", "p_value"], help="relations x labels table of one field")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rc = args.func(args, parser)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
