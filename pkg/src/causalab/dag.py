"""Causal diagrams: the ``Dag`` value type, DOT round-trip, paths and d-separation.

The graph is immutable once built.  Adjacency maps are computed at construction
and cached, so the query functions below are cheap to call in tight loops.

The engine *documents* the usual causal-graph assumptions (acyclicity, the
causal Markov condition, causal sufficiency and faithfulness) but only
acyclicity is enforced; the others are properties of the data, not the graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Mapping

__all__ = [
    "Dag",
    "Path",
    "CycleError",
    "DotSyntaxError",
    "parse_dot",
    "serialize_dot",
    "all_paths",
    "backdoor_paths",
    "d_separated",
    "d_separated_by_paths",
]


class CycleError(ValueError):
    """Raised when an edge set contains a directed cycle."""


class DotSyntaxError(ValueError):
    """Raised for DOT text outside the supported subset."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


class Dag:
    """Directed acyclic graph over named variables.

    Parameters
    ----------
    nodes : iterable of str
        Variable names, kept in the given order.
    edges : iterable of (str, str) or (str, str, float)
        Directed edges; a third element is stored as the edge weight.
    labels : mapping, optional
        Display strings per node.
    """

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    weights: Mapping[tuple[str, str], float]
    labels: Mapping[str, str]

    def __setattr__(self, name, value):
        raise AttributeError("Dag is immutable")

    def __init__(self, nodes: Iterable[str] = (), edges: Iterable = (), labels=None):
        nodes = tuple(nodes)
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node names")
        node_set = set(nodes)
        pairs = []
        weights = {}
        for e in edges:
            if len(e) == 3:
                a, b, w = e
                if w is not None:
                    weights[(a, b)] = float(w)
            else:
                a, b = e
            for v in (a, b):
                if v not in node_set:
                    raise ValueError(f"edge endpoint {v!r} is not a declared node")
            if a == b:
                raise CycleError(f"self-loop on {a!r}")
            if (a, b) in pairs:
                raise ValueError(f"duplicate edge {a!r} -> {b!r}")
            pairs.append((a, b))
        labels = dict(labels or {})
        for name in labels:
            if name not in node_set:
                raise ValueError(f"label given for unknown node {name!r}")

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", frozenset(pairs))
        object.__setattr__(self, "weights", MappingProxyType(weights))
        object.__setattr__(self, "labels", MappingProxyType(labels))

        parents = {v: set() for v in nodes}
        children = {v: set() for v in nodes}
        for a, b in pairs:
            children[a].add(b)
            parents[b].add(a)
        object.__setattr__(self, "_parents", {v: frozenset(s) for v, s in parents.items()})
        object.__setattr__(self, "_children", {v: frozenset(s) for v, s in children.items()})
        object.__setattr__(self, "_order", self._toposort())

    def _toposort(self) -> tuple[str, ...]:
        indeg = {v: len(self._parents[v]) for v in self.nodes}
        ready = [v for v in self.nodes if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in sorted(self._children[v], key=self.nodes.index):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != len(self.nodes):
            stuck = [v for v in self.nodes if indeg[v] > 0]
            raise CycleError(f"directed cycle through {', '.join(stuck)}")
        return tuple(order)

    # structural queries

    def __contains__(self, node) -> bool:
        return node in self._parents

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return (
            set(self.nodes) == set(other.nodes)
            and self.edges == other.edges
            and self.weights == other.weights
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.nodes), self.edges))

    def __repr__(self) -> str:
        edges = ", ".join(f"{a}->{b}" for a, b in self.sorted_edges())
        return f"Dag(nodes={list(self.nodes)}, edges=[{edges}])"

    def sorted_edges(self) -> list[tuple[str, str]]:
        idx = {v: i for i, v in enumerate(self.nodes)}
        return sorted(self.edges, key=lambda e: (idx[e[0]], idx[e[1]]))

    def parents(self, v: str) -> frozenset[str]:
        self._check(v)
        return self._parents[v]

    def children(self, v: str) -> frozenset[str]:
        self._check(v)
        return self._children[v]

    def topological_order(self) -> tuple[str, ...]:
        return self._order

    def ancestors(self, vs) -> set[str]:
        """Ancestors of ``vs``, including ``vs`` themselves."""
        return self._closure(vs, self._parents)

    def descendants(self, vs) -> set[str]:
        """Descendants of ``vs``, including ``vs`` themselves."""
        return self._closure(vs, self._children)

    def _closure(self, vs, step) -> set[str]:
        vs = _as_set(vs)
        for v in vs:
            self._check(v)
        seen = set(vs)
        stack = list(vs)
        while stack:
            for u in step[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return seen

    def has_edge(self, a: str, b: str) -> bool:
        return (a, b) in self.edges

    def _check(self, v) -> None:
        if v not in self._parents:
            raise KeyError(f"unknown node {v!r}")

    # derived graphs

    def without_edges_from(self, vs) -> "Dag":
        """Copy of the graph with every edge leaving ``vs`` deleted."""
        vs = _as_set(vs)
        return self._rebuild(e for e in self.edges if e[0] not in vs)

    def without_edges_into(self, vs) -> "Dag":
        vs = _as_set(vs)
        return self._rebuild(e for e in self.edges if e[1] not in vs)

    def relabel(self, mapping: Mapping[str, str]) -> "Dag":
        m = lambda v: mapping.get(v, v)  # noqa: E731
        return Dag(
            [m(v) for v in self.nodes],
            [(m(a), m(b), self.weights.get((a, b))) for a, b in self.sorted_edges()],
            {m(k): s for k, s in self.labels.items()},
        )

    def _rebuild(self, edges) -> "Dag":
        edges = [(a, b, self.weights.get((a, b))) for a, b in edges]
        return Dag(self.nodes, edges, self.labels)


def _as_set(vs) -> set:
    if isinstance(vs, str):
        return {vs}
    return set(vs)


# ---------------------------------------------------------------------------
# DOT subset

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*|/\*.*?\*/)
  | (?P<arrow>->)
  | (?P<punct>[{}\[\];=,])
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<bare>-?[A-Za-z0-9_.]+)
    """,
    re.VERBOSE | re.DOTALL,
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DotSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "quoted":
            raw = m.group()[1:-1]
            tokens.append(("id", re.sub(r"\\(.)", r"\1", raw), pos, True))
        elif kind == "bare":
            tokens.append(("id", m.group(), pos, False))
        elif kind != "ws":
            tokens.append((m.group(), m.group(), pos, False))
        pos = m.end()
    tokens.append(("eof", None, pos, False))
    return tokens


class _DotParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.nodes: list[str] = []
        self.labels: dict[str, str] = {}
        self.edges: list[tuple[str, str, float | None]] = []

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise DotSyntaxError(f"expected {kind!r}, found {found}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Dag:
        kw = self.take("id")
        if kw[1] == "strict":
            kw = self.take("id")
        if kw[1] != "digraph":
            raise DotSyntaxError("only 'digraph' graphs are supported", kw[2])
        if self.peek()[0] == "id":
            self.take("id")
        self.take("{")
        while self.peek()[0] not in ("}", "eof"):
            if self.peek()[0] == ";":
                self.take()
                continue
            self.statement()
        self.take("}")
        self.take("eof")
        try:
            return Dag(self.nodes, self.edges, self.labels)
        except CycleError:
            raise
        except ValueError as exc:
            raise DotSyntaxError(str(exc)) from None

    def declare(self, name: str) -> None:
        if name not in self.nodes:
            self.nodes.append(name)

    def statement(self) -> None:
        first = self.take("id")
        if not first[3] and first[1] in ("graph", "node", "edge", "subgraph"):
            raise DotSyntaxError(f"'{first[1]}' statements are not supported", first[2])
        if self.peek()[0] == "=":
            raise DotSyntaxError("graph attributes are not supported", first[2])
        chain = [first[1]]
        while self.peek()[0] == "->":
            self.take()
            chain.append(self.take("id")[1])
        attrs = self.attributes() if self.peek()[0] == "[" else {}
        for name in chain:
            self.declare(name)
        if len(chain) == 1:
            if "label" in attrs:
                name, label = first[1], attrs["label"]
                if self.labels.get(name, label) != label:
                    raise DotSyntaxError(f"conflicting labels for node {name!r}", first[2])
                self.labels[name] = label
            return
        weight = None
        if "label" in attrs:
            try:
                weight = float(attrs["label"])
            except ValueError:
                raise DotSyntaxError("edge labels must be numeric weights", first[2]) from None
        for a, b in zip(chain, chain[1:]):
            if any(e[:2] == (a, b) for e in self.edges):
                continue
            self.edges.append((a, b, weight))

    def attributes(self) -> dict[str, str]:
        self.take("[")
        attrs = {}
        while self.peek()[0] != "]":
            key = self.take("id")
            if key[1] != "label":
                raise DotSyntaxError(f"unsupported attribute {key[1]!r}", key[2])
            self.take("=")
            attrs[key[1]] = self.take("id")[1]
            if self.peek()[0] in (",", ";"):
                self.take()
        self.take("]")
        return attrs


def parse_dot(text: str) -> Dag:
    """Parse the ``digraph`` subset used for causal models.

    Supported: node statements with an optional ``label`` attribute, ``->``
    chains (``A->B->C`` gives A→B and B→C), and numeric ``label`` on edges,
    which becomes the edge weight.  Semicolons between statements are
    optional.  Anything else raises :class:`DotSyntaxError`.
    """
    return _DotParser(text).parse()


_BARE_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _quote(name: str) -> str:
    if _BARE_ID.match(name) and name not in ("digraph", "graph", "node", "edge", "strict", "subgraph"):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_dot(g: Dag) -> str:
    lines = ["digraph {"]
    for v in g.nodes:
        if v in g.labels:
            lines.append(f"  {_quote(v)} [label={_quote_always(g.labels[v])}];")
        else:
            lines.append(f"  {_quote(v)};")
    for a, b in g.sorted_edges():
        w = g.weights.get((a, b))
        attr = f' [label="{w!r}"]' if w is not None else ""
        lines.append(f"  {_quote(a)} -> {_quote(b)}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _quote_always(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Path:
    """Simple path ignoring orientation.

    ``forward[i]`` is True when the edge between ``nodes[i]`` and
    ``nodes[i + 1]`` points along the path (``nodes[i] -> nodes[i + 1]``).
    """

    nodes: tuple[str, ...]
    forward: tuple[bool, ...]

    def __str__(self) -> str:
        out = [self.nodes[0]]
        for v, fwd in zip(self.nodes[1:], self.forward):
            out.append("→" if fwd else "←")
            out.append(v)
        return "".join(out)

    def is_collider(self, i: int) -> bool:
        """Whether interior node ``nodes[i]`` has both path edges pointing in."""
        return self.forward[i - 1] and not self.forward[i]

    def is_blocked(self, g: Dag, zs) -> bool:
        zs = _as_set(zs)
        for i in range(1, len(self.nodes) - 1):
            v = self.nodes[i]
            if self.is_collider(i):
                if not (g.descendants(v) & zs):
                    return True
            elif v in zs:
                return True
        return False


def all_paths(g: Dag, x: str, y: str) -> list[Path]:
    """Every simple path between ``x`` and ``y``, regardless of edge direction."""
    g._check(x)
    g._check(y)
    if x == y:
        raise ValueError("path endpoints must differ")
    out = []
    nodes = [x]
    fwd: list[bool] = []
    on_path = {x}

    def walk(v):
        steps = [(c, True) for c in g._children[v]] + [(p, False) for p in g._parents[v]]
        for u, direction in sorted(steps):
            if u in on_path:
                continue
            nodes.append(u)
            fwd.append(direction)
            if u == y:
                out.append(Path(tuple(nodes), tuple(fwd)))
            else:
                on_path.add(u)
                walk(u)
                on_path.discard(u)
            nodes.pop()
            fwd.pop()

    walk(x)
    return out


def backdoor_paths(g: Dag, treatment: str, outcome: str) -> list[Path]:
    """Paths from ``treatment`` to ``outcome`` that start with an arrow into the treatment."""
    return [p for p in all_paths(g, treatment, outcome) if not p.forward[0]]


# ---------------------------------------------------------------------------
# d-separation


def _check_disjoint(g: Dag, xs, ys, zs):
    xs, ys, zs = _as_set(xs), _as_set(ys), _as_set(zs)
    for v in xs | ys | zs:
        g._check(v)
    if xs & ys or xs & zs or ys & zs:
        raise ValueError("xs, ys and zs must be pairwise disjoint")
    return xs, ys, zs


def d_separated(g: Dag, xs, ys, zs=()) -> bool:
    """Whether ``zs`` d-separates every node of ``xs`` from every node of ``ys``.

    Uses the reachability ("Bayes ball") formulation: walk from ``xs`` along
    active trails, tracking whether each node was entered from a child
    (travelling up) or from a parent (travelling down).
    """
    xs, ys, zs = _check_disjoint(g, xs, ys, zs)
    if not xs or not ys:
        return True
    parents, children = g._parents, g._children
    anc_z = g.ancestors(zs) if zs else set()

    # (node, up): up=True means we arrived from a child
    stack = [(x, True) for x in xs]
    visited = set()
    while stack:
        state = stack.pop()
        if state in visited:
            continue
        visited.add(state)
        v, up = state
        if v not in zs and v in ys:
            return False
        if up:
            if v not in zs:
                stack.extend((p, True) for p in parents[v])
                stack.extend((c, False) for c in children[v])
        else:
            if v not in zs:
                stack.extend((c, False) for c in children[v])
            if v in anc_z:
                stack.extend((p, True) for p in parents[v])
    return True


def d_separated_by_paths(g: Dag, xs, ys, zs=()) -> bool:
    """Reference d-separation by enumerating simple paths and blocking each.

    Exponential in graph size; intended as an oracle on small graphs.
    """
    xs, ys, zs = _check_disjoint(g, xs, ys, zs)
    for x in xs:
        for y in ys:
            for p in all_paths(g, x, y):
                if not p.is_blocked(g, zs):
                    return False
    return True


def minimal_separators(g: Dag, x: str, y: str, candidates: Iterable[str], max_size=None):
    """Yield separating sets of ``x`` and ``y`` drawn from ``candidates``, smallest first.

    Sets of equal size come out in lexicographic order.
    """
    pool = sorted(set(candidates))
    top = len(pool) if max_size is None else min(max_size, len(pool))
    for k in range(top + 1):
        for zs in combinations(pool, k):
            if d_separated(g, {x}, {y}, set(zs)):
                yield set(zs)
