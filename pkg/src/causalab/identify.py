"""Graphical identification of the effect of one treatment on one outcome.

Four strategies are tried in a fixed order: backdoor adjustment, instrumental
variables, frontdoor adjustment and (on request or when both a direct edge
and a mediated route exist) mediation.  Nodes listed as ``unobserved`` never
enter an adjustment, mediator or instrument set.

The frontdoor conditions used are the standard three: the set intercepts
every directed treatment→outcome path, no backdoor path from the treatment
to the set is open, and every backdoor path from the set to the outcome is
blocked by the treatment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .dag import Dag, _as_set, d_separated

__all__ = [
    "Estimand",
    "IdentifiedEffect",
    "check_backdoor",
    "check_frontdoor",
    "find_instruments",
    "identify_mediation",
    "identify_effect",
    "minimal_backdoor_set",
]

STRATEGIES = ("backdoor", "iv", "frontdoor", "mediation")


@dataclass(frozen=True)
class Estimand:
    strategy: str
    treatment: str
    outcome: str
    adjustment: tuple[str, ...] = ()
    mediators: tuple[str, ...] = ()
    instruments: tuple[str, ...] = ()
    direct: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.treatment == self.outcome:
            raise ValueError("treatment and outcome must differ")

    @property
    def expression(self) -> str:
        t, o = self.treatment, self.outcome
        given = ", ".join(self.adjustment)
        if self.strategy == "backdoor":
            cond = f" | {given}" if given else ""
            return f"d/d[{t}] E[{o}{cond}]"
        if self.strategy == "iv":
            z = self.instruments[0]
            return f"E[d{o}/d{z}] / E[d{t}/d{z}]"
        ms = ", ".join(self.mediators)
        if self.strategy == "frontdoor":
            return f"sum_{{{ms}}} E[d{{{ms}}}/d{t}] * E[d{o}/d{{{ms}}} | {t}]"
        cond = f", {given}" if given else ""
        return f"direct: d/d[{t}] E[{o} | {ms}{cond}]; indirect: total - direct"

    def assumptions(self) -> list[str]:
        t, o = self.treatment, self.outcome
        if self.strategy == "backdoor":
            z = ",".join(self.adjustment)
            return [
                f"Unconfoundedness: If U->{{{t}}} and U->{o} then P({o}|{t},{z},U) = P({o}|{t},{z})"
            ]
        if self.strategy == "iv":
            z = ",".join(self.instruments)
            return [
                f"As-if-random: If U->{o} then not U->{{{z}}}",
                f"Exclusion: If we remove {{{z}}}->{{{t}}}, then not {{{z}}}->{o}",
            ]
        ms = ",".join(self.mediators)
        if self.strategy == "frontdoor":
            return [
                f"Full-mediation: {{{ms}}} intercepts (blocks) all directed paths from {t} to {o}",
                f"First-stage-unconfoundedness: If U->{{{t}}} and U->{{{ms}}} then not so",
                f"Second-stage-unconfoundedness: If U->{{{ms}}} and U->{o} then not so",
            ]
        return [f"Sequential ignorability of {t} and {{{ms}}}"]

    def report(self, number: int | None = None) -> str:
        lines = []
        if number is not None:
            lines.append(f"### Estimand : {number}")
        lines.append(f"Estimand name: {self.strategy}")
        lines.append("Estimand expression:")
        lines.append(self.expression)
        if self.strategy == "backdoor":
            lines.append(f"Adjustment set: {{{', '.join(self.adjustment)}}}")
        elif self.strategy == "iv":
            lines.append(f"Instruments: {{{', '.join(self.instruments)}}}")
        else:
            lines.append(f"Mediators: {{{', '.join(self.mediators)}}}")
        for k, a in enumerate(self.assumptions(), 1):
            lines.append(f"Estimand assumption {k}, {a}")
        return "\n".join(lines)


class IdentifiedEffect(list):
    """List of estimands in report order; ``missing`` maps absent strategies to a reason."""

    def __init__(self, estimands=(), missing=None, treatment=None, outcome=None):
        super().__init__(estimands)
        self.missing = dict(missing or {})
        self.treatment = treatment
        self.outcome = outcome

    def get(self, strategy: str) -> Estimand | None:
        for e in self:
            if e.strategy == strategy:
                return e
        return None

    def report(self) -> str:
        blocks = ["Estimand type: nonparametric-ate"]
        k = 1
        for strategy in STRATEGIES:
            est = self.get(strategy)
            if est is not None:
                blocks.append(est.report(k))
            elif strategy in self.missing:
                blocks.append(f"### Estimand : {k}\nEstimand name: {strategy}\n{self.missing[strategy]}")
            else:
                continue
            k += 1
        return "\n\n".join(blocks) + "\n"


def _check_pair(g: Dag, t, o):
    g._check(t)
    g._check(o)
    if t == o:
        raise ValueError("treatment and outcome must differ")


def check_backdoor(g: Dag, t: str, o: str, zs=()) -> bool:
    """Whether ``zs`` satisfies the backdoor criterion for ``t -> o``.

    Raises ``ValueError`` if ``zs`` contains the treatment, the outcome or a
    descendant of the treatment.
    """
    _check_pair(g, t, o)
    zs = _as_set(zs)
    bad = zs & g.descendants(t)
    if bad or o in zs:
        raise ValueError(f"adjustment set contains treatment, outcome or descendants of {t}: {sorted(bad | (zs & {o}))}")
    return d_separated(g.without_edges_from(t), {t}, {o}, zs)


def _directed_paths_intercepted(g: Dag, t, o, ws) -> bool:
    # every directed t->o path passes through ws iff o is unreachable from t once ws is removed
    stack, seen = [t], {t}
    while stack:
        v = stack.pop()
        for c in g._children[v]:
            if c in ws or c in seen:
                continue
            if c == o:
                return False
            seen.add(c)
            stack.append(c)
    return True


def check_frontdoor(g: Dag, t: str, o: str, ws=()) -> bool:
    _check_pair(g, t, o)
    ws = _as_set(ws)
    if not ws or t in ws or o in ws:
        return False
    for w in ws:
        g._check(w)
    if not _directed_paths_intercepted(g, t, o, ws):
        return False
    if not d_separated(g.without_edges_from(t), {t}, ws, ()):
        return False
    return d_separated(g.without_edges_from(ws), ws, {o}, {t})


def find_instruments(g: Dag, t: str, o: str, unobserved=()) -> set[str]:
    """Nodes with a direct edge into ``t`` whose only route to ``o`` runs through ``t``.

    With the treatment's outgoing edges cut, an instrument must be d-separated
    from the outcome: that rules out a direct edge to the outcome and any
    shared cause with it.
    """
    _check_pair(g, t, o)
    hidden = _as_set(unobserved)
    cut = g.without_edges_from(t)
    out = set()
    for z in sorted(g.parents(t)):
        if z in hidden or z == o:
            continue
        if d_separated(cut, {z}, {o}, ()):
            out.add(z)
    return out


def identify_mediation(g: Dag, t: str, o: str) -> tuple[bool, set[str]]:
    _check_pair(g, t, o)
    mediators = (g.descendants(t) & g.ancestors(o)) - {t, o}
    return g.has_edge(t, o), mediators


def minimal_backdoor_set(g: Dag, t: str, o: str, unobserved=()):
    """Smallest valid adjustment set, ties broken by sorted name order; None if none exists."""
    _check_pair(g, t, o)
    hidden = _as_set(unobserved)
    pool = (g.ancestors({t, o}) - g.descendants(t)) - {o} - hidden
    pool = sorted(pool)
    cut = g.without_edges_from(t)
    for k in range(len(pool) + 1):
        for zs in combinations(pool, k):
            if d_separated(cut, {t}, {o}, set(zs)):
                return tuple(zs)
    return None


def _minimal_frontdoor_set(g: Dag, t, o, hidden):
    _, med = identify_mediation(g, t, o)
    pool = sorted(med - hidden)
    for k in range(1, len(pool) + 1):
        for ws in combinations(pool, k):
            if check_frontdoor(g, t, o, ws):
                return tuple(ws)
    return None


def identify_effect(g: Dag, t: str, o: str, unobserved=(), mediation=None) -> IdentifiedEffect:
    """All applicable estimands for ``t -> o``: backdoor, iv, frontdoor, mediation.

    ``mediation=None`` reports mediation only when a direct edge and a
    mediated path coexist; ``True``/``False`` force it on or off.
    """
    _check_pair(g, t, o)
    hidden = _as_set(unobserved)
    for v in hidden:
        g._check(v)
    if t in hidden or o in hidden:
        raise ValueError("treatment and outcome must be observed")
    found, missing = [], {}
    none = "No such variable found!"

    adj = minimal_backdoor_set(g, t, o, hidden)
    if adj is not None:
        found.append(Estimand("backdoor", t, o, adjustment=adj))
    else:
        missing["backdoor"] = "No valid adjustment set among observed variables!"

    ivs = find_instruments(g, t, o, hidden)
    if ivs:
        found.append(Estimand("iv", t, o, instruments=tuple(sorted(ivs))))
    else:
        missing["iv"] = none

    fd = _minimal_frontdoor_set(g, t, o, hidden)
    if fd is not None:
        found.append(Estimand("frontdoor", t, o, mediators=fd))
    else:
        missing["frontdoor"] = none

    direct, med = identify_mediation(g, t, o)
    med = med - hidden
    wanted = mediation if mediation is not None else (direct and bool(med))
    if wanted and med and adj is not None:
        found.append(Estimand("mediation", t, o, adjustment=adj, mediators=tuple(sorted(med)), direct=direct))
    elif mediation:
        missing["mediation"] = none
    return IdentifiedEffect(found, missing, t, o)
