"""Config-driven model → identify → estimate → refute runs.

A config is an INI file (``configparser``) with these sections::

    [run]       seed, label
    [data]      one of: generator (ohm | quantum | tides-synthetic),
                fixture (e.g. tides/synthetic), csv, tides (three paths);
                optional columns (subset to keep) and generator parameters
    [model]     one of: graph (DOT file), dot (inline), builtin, discover (pc | lingam);
                optional unobserved, alpha
    [effect]    treatment, outcome, estimator
    [refute]    methods, k, fraction

Every stochastic stage takes its randomness from ``[run] seed``; there is no
clock-based default.
"""

from __future__ import annotations

import configparser
import io
import csv
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from .dag import Dag, parse_dot, serialize_dot
from .data import check_table, read_csv
from .discovery import run_lingam, run_pc
from .estimate import Estimate, LinearMediation, estimate_effect
from .identify import IdentifiedEffect, identify_effect
from .phenomena import ldr, ohm, quantum, tides
from .refute import REFUTERS, RefutationResult, aggregate_confidence, run_refuter

__all__ = ["PipelineConfig", "Report", "StageError", "run_pipeline", "load_config", "SUMMARY_FIELDS"]

STAGES = ("data", "model", "identify", "estimate", "refute")

BUILTIN_MODELS = {
    "tides": tides.DOMAIN_MODEL,
    "ohm:A": ohm.MODEL_A,
    "ohm:B": ohm.MODEL_B,
    "ohm:C": ohm.MODEL_C,
    "ldr:data": ldr.MODEL_DATA,
    "ldr:domain": ldr.MODEL_DOMAIN,
    "quantum": quantum.DOMAIN_MODEL,
}

SUMMARY_FIELDS = [
    "label", "treatment", "outcome", "strategy", "adjustment", "ate", "ci_low", "ci_high",
    "p_value", "n", "random_common_cause", "placebo_treatment", "data_subset", "confidence",
]


class StageError(RuntimeError):
    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"stage '{stage}' failed: {message}")


@dataclass
class PipelineConfig:
    treatment: str
    outcome: str
    seed: int | None = None
    label: str = ""
    data: dict = field(default_factory=dict)
    model: dict = field(default_factory=dict)
    estimator: str = "backdoor"
    refuters: tuple[str, ...] = ()
    k: int = 100
    fraction: float = 0.8
    base_dir: Path = field(default_factory=Path.cwd)

    def __post_init__(self):
        if self.treatment == self.outcome:
            raise ValueError("treatment and outcome must differ")
        if self.estimator not in ("backdoor", "iv", "frontdoor", "mediation"):
            raise ValueError(f"unknown estimator {self.estimator!r}")
        for r in self.refuters:
            if r not in REFUTERS:
                raise ValueError(f"unknown refuter {r!r}")
        if self.seed is None and (self.refuters or "generator" in self.data):
            raise ValueError("a seed is required for stochastic stages")
        for key in ("csv", "graph"):
            src = self.data.get(key) if key == "csv" else self.model.get(key)
            if src and not (self.base_dir / src).exists():
                raise FileNotFoundError(f"{key} file not found: {src}")


def load_config(path) -> PipelineConfig:
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    if not cp.read(path, encoding="utf-8"):
        raise FileNotFoundError(path)
    return config_from_parser(cp, base_dir=path.parent)


def config_from_text(text, base_dir=".") -> PipelineConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    cp.read_string(text)
    return config_from_parser(cp, base_dir=Path(base_dir))


def config_from_parser(cp, base_dir) -> PipelineConfig:
    def sect(name):
        return dict(cp[name]) if cp.has_section(name) else {}

    run, eff, ref = sect("run"), sect("effect"), sect("refute")
    if "treatment" not in eff or "outcome" not in eff:
        raise ValueError("[effect] needs treatment and outcome")
    methods = tuple(m.strip() for m in ref.get("methods", "").split(",") if m.strip())
    return PipelineConfig(
        treatment=eff["treatment"],
        outcome=eff["outcome"],
        seed=int(run["seed"]) if "seed" in run else None,
        label=run.get("label", ""),
        data=sect("data"),
        model=sect("model"),
        estimator=eff.get("estimator", "backdoor"),
        refuters=methods,
        k=int(ref.get("k", 100)),
        fraction=float(ref.get("fraction", 0.8)),
        base_dir=Path(base_dir),
    )


@dataclass
class Report:
    config: PipelineConfig
    data: pd.DataFrame | None = None
    graph: Dag | None = None
    identified: IdentifiedEffect | None = None
    estimate: Estimate | None = None
    mediation: tuple[Estimate, Estimate] | None = None
    refutations: list[RefutationResult] = field(default_factory=list)
    error: StageError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def confidence(self) -> float | None:
        return aggregate_confidence(self.refutations) if self.refutations else None

    def summary_row(self) -> dict:
        c = self.config
        row = dict.fromkeys(SUMMARY_FIELDS, "")
        row.update(label=c.label, treatment=c.treatment, outcome=c.outcome)
        if self.estimate is not None:
            est = self.estimate
            strategy_est = self.identified.get(c.estimator) if self.identified else None
            row.update(
                strategy=est.strategy,
                adjustment=" ".join(strategy_est.adjustment) if strategy_est else "",
                ate=repr(est.ate),
                ci_low=repr(est.ci_low),
                ci_high=repr(est.ci_high),
                p_value=repr(est.p_value),
                n=str(est.n),
            )
        for r in self.refutations:
            row[r.method] = repr(r.p_value)
        if self.refutations:
            row["confidence"] = repr(self.confidence)
        return row

    def text(self) -> str:
        c = self.config
        out = [f"# Causal analysis: {c.label or c.treatment + ' -> ' + c.outcome}", ""]
        out.append(f"treatment: {c.treatment}\noutcome: {c.outcome}\nseed: {c.seed}\n")
        if self.data is not None:
            out.append(f"## Data\nrows: {len(self.data)}\ncolumns: {', '.join(self.data.columns)}\n")
        if self.graph is not None:
            out.append("## Model\n" + serialize_dot(self.graph))
        if self.identified is not None:
            out.append("## Identify\n" + self.identified.report())
        if self.estimate is not None:
            out.append(f"## Estimate ({self.estimate.strategy})\n" + self.estimate.report())
        if self.mediation is not None:
            d, ind = self.mediation
            out.append(f"Direct effect: {d.ate!r}\nIndirect effect: {ind.ate!r}\n")
        if self.refutations:
            out.append("## Refute")
            out += [r.report() for r in self.refutations]
            out.append(f"Aggregate confidence: {self.confidence!r}\n")
        out.append("## Summary")
        out.append(format_table([self.summary_row()]))
        if self.error is not None:
            out.append(f"ERROR: {self.error}")
        return "\n".join(out).rstrip() + "\n"

    def csv_text(self) -> str:
        return summary_csv([self.summary_row()])

    def save(self, directory) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "report.txt").write_text(self.text(), encoding="utf-8")
        (directory / "report.csv").write_text(self.csv_text(), encoding="utf-8")
        return directory


def summary_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def format_table(rows, fields=None) -> str:
    fields = fields or [f for f in SUMMARY_FIELDS if any(r.get(f, "") != "" for r in rows)]
    cells = [[_short(r.get(f, "")) for f in fields] for r in rows]
    widths = [max(len(f), *(len(c[i]) for c in cells)) if cells else len(f) for i, f in enumerate(fields)]
    line = lambda vals: "  ".join(v.ljust(w) for v, w in zip(vals, widths)).rstrip()  # noqa: E731
    out = [line(fields), line(["-" * w for w in widths])]
    out += [line(c) for c in cells]
    return "\n".join(out) + "\n"


def _short(v) -> str:
    try:
        x = float(v)
    except (TypeError, ValueError):
        return str(v)
    if str(v).isdigit():
        return str(v)
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# stages


def _load_data(c: PipelineConfig) -> pd.DataFrame:
    d = c.data
    sources = [k for k in ("generator", "fixture", "csv", "tides") if k in d]
    if len(sources) != 1:
        raise ValueError("[data] needs exactly one of generator, fixture, csv, tides")
    src = sources[0]
    if src == "generator":
        gen = d["generator"]
        if gen == "ohm":
            df = ohm.generate_ohm_dataset(int(d.get("n", 10000)), rng=c.seed)
        elif gen == "quantum":
            df = quantum.build_entanglement_dataset(int(d.get("states", 20)), int(d.get("shots", 100)), rng=c.seed)
        elif gen == "tides-synthetic":
            import tempfile

            with tempfile.TemporaryDirectory() as tmp:
                tides.write_synthetic_fixture(tmp, seed=c.seed)
                df = tides.load_tide_dataset(*(Path(tmp) / f for f in ("earth_sun.csv", "earth_moon.csv", "tide.csv")))
        else:
            raise ValueError(f"unknown generator {gen!r}")
    elif src == "fixture":
        name = d["fixture"]
        if name.startswith("tides/"):
            df = tides.load_fixture(name.split("/", 1)[1])
        elif name.startswith("ldr/"):
            df = ldr.load_ldr_dataset(tides.fixture_dir() / "ldr" / (name.split("/", 1)[1] + ".csv"))
        else:
            raise ValueError(f"unknown fixture {name!r}")
    elif src == "csv":
        df = read_csv(c.base_dir / d["csv"])
    else:
        paths = [c.base_dir / p.strip() for p in d["tides"].split(",")]
        if len(paths) != 3:
            raise ValueError("tides needs three comma-separated paths: earth-sun, earth-moon, tide")
        df = tides.load_tide_dataset(*paths)
    if "columns" in d:
        keep = [x.strip() for x in d["columns"].split(",")]
        df = df[keep]
    df = check_table(df)
    for name in (c.treatment, c.outcome):
        if name not in df.columns:
            raise KeyError(f"unknown variable {name!r}; data columns are {list(df.columns)}")
    return df


def _load_model(c: PipelineConfig, df) -> Dag:
    m = c.model
    sources = [k for k in ("graph", "dot", "builtin", "discover") if k in m]
    if len(sources) != 1:
        raise ValueError("[model] needs exactly one of graph, dot, builtin, discover")
    src = sources[0]
    if src == "graph":
        g = parse_dot((c.base_dir / m["graph"]).read_text(encoding="utf-8"))
    elif src == "dot":
        g = parse_dot(m["dot"])
    elif src == "builtin":
        if m["builtin"] not in BUILTIN_MODELS:
            raise ValueError(f"unknown builtin model {m['builtin']!r}; choose from {sorted(BUILTIN_MODELS)}")
        g = BUILTIN_MODELS[m["builtin"]]
    else:
        g = discover_graph(df, m["discover"], alpha=float(m.get("alpha", 0.05)))
    for name in (c.treatment, c.outcome):
        if name not in g:
            raise KeyError(f"variable {name!r} is not in the causal model")
    missing = [v for v in g.nodes if v not in df.columns and v not in _unobserved(c)]
    if missing:
        raise KeyError(f"model nodes without data columns (mark them unobserved?): {missing}")
    return g


def discover_graph(df, algo, alpha=0.05) -> Dag:
    if algo == "lingam":
        return run_lingam(df)
    if algo == "pc":
        res = run_pc(df, alpha=alpha)
        if res.undirected:
            pairs = sorted(tuple(sorted(e)) for e in res.undirected)
            raise ValueError(f"PC left edges unoriented, pick a DAG explicitly: {pairs}")
        return res.to_dag()
    raise ValueError(f"unknown discovery algorithm {algo!r}")


def _unobserved(c: PipelineConfig):
    return [v.strip() for v in c.model.get("unobserved", "").split(",") if v.strip()]


def run_pipeline(config: PipelineConfig) -> Report:
    """Run every stage in order; the first failure is recorded and later stages are skipped."""
    c = config
    rep = Report(c)
    stage = "data"
    try:
        rep.data = _load_data(c)
        stage = "model"
        rep.graph = _load_model(c, rep.data)
        stage = "identify"
        rep.identified = identify_effect(rep.graph, c.treatment, c.outcome, _unobserved(c), mediation=c.estimator == "mediation" or None)
        estimand = rep.identified.get(c.estimator)
        if estimand is None:
            reason = rep.identified.missing.get(c.estimator, "not applicable")
            raise ValueError(f"no {c.estimator} estimand: {reason}")
        stage = "estimate"
        rep.estimate = estimate_effect(rep.data, estimand)
        if estimand.strategy == "mediation":
            m = LinearMediation(estimand.treatment, estimand.outcome, estimand.mediators, estimand.adjustment)
            rep.mediation = m.fit(rep.data).decompose()
        stage = "refute"
        for name in c.refuters:
            rep.refutations.append(
                run_refuter(name, rep.data, estimand, rep.estimate, k=c.k, seed=c.seed, fraction=c.fraction)
            )
    except Exception as exc:  # noqa: BLE001 - reported per stage
        rep.error = StageError(stage, f"{type(exc).__name__}: {exc}")
    return rep
