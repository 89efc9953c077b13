"""Discrete Bayesian networks: BIF parsing, serialization, and ancestral
sampling.

Supported BIF subset: `network`, `variable` blocks with `type discrete`,
and `probability` blocks using either a `table` row or per-configuration
`( state, ... ) p, ...;` rows.  `property` lines are preserved as opaque
strings.  `//` and `/* */` comments are allowed.  Identifiers and state
names accept any run of non-delimiter characters (the repository files use
unquoted names such as `<5` and `5-12`); quoted strings are accepted too.
Anything outside this subset is a syntax error, never a silent skip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .datasets import Dataset
from .graphs import Dag, GraphError
from .rng import substream

__all__ = [
    "DiscreteBn",
    "BifError",
    "BifSyntaxError",
    "UndeclaredVariable",
    "NonNormalizedRow",
    "DuplicateDeclaration",
    "CyclicStructure",
    "parse_bif",
    "serialize_bif",
    "sample_bn",
]

ROW_SUM_TOL = 1e-6


class BifError(ValueError):
    """Base class for BIF document errors."""


class BifSyntaxError(BifError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


class UndeclaredVariable(BifError):
    pass


class NonNormalizedRow(BifError):
    pass


class DuplicateDeclaration(BifError):
    pass


class CyclicStructure(BifError):
    pass


@dataclass(frozen=True)
class DiscreteBn:
    """Categorical Bayesian network.

    `cpts[i]` has shape (q_i, r_i): one row per configuration of the node's
    parents taken in `parent_order[i]` (the probability-block header order,
    last parent varying fastest), one column per child category.
    """

    name: str
    dag: Dag
    categories: tuple[tuple[str, ...], ...]
    cpts: tuple[np.ndarray, ...]
    parent_order: tuple[tuple[int, ...], ...]
    properties: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        p = self.dag.node_count
        if not (len(self.categories) == len(self.cpts) == len(self.parent_order) == p):
            raise ValueError("per-node fields must cover every node")
        for i in range(p):
            if set(self.parent_order[i]) != self.dag.parents(i):
                raise ValueError(f"parent_order[{i}] does not match DAG parents")
            r = len(self.categories[i])
            q = 1
            for par in self.parent_order[i]:
                q *= len(self.categories[par])
            cpt = np.asarray(self.cpts[i], dtype=np.float64)
            if cpt.shape != (q, r):
                raise ValueError(f"cpt of node {i} must have shape ({q}, {r})")
            if cpt.min() < 0.0 or cpt.max() > 1.0:
                raise NonNormalizedRow(f"node {i}: probability outside [0, 1]")
            bad = np.abs(cpt.sum(axis=1) - 1.0) > ROW_SUM_TOL
            if bad.any():
                j = int(np.flatnonzero(bad)[0])
                raise NonNormalizedRow(
                    f"node {i} ({self.dag.node_labels[i]}): CPT row {j} sums to "
                    f"{cpt[j].sum():.8f}")
            cpt.setflags(write=False)

    @property
    def node_count(self) -> int:
        return self.dag.node_count

    def cardinality(self, node: int) -> int:
        return len(self.categories[node])


# ---------------------------------------------------------------------------
# Tokenizer.

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>//[^\n]*|/\*.*?\*/)
    | (?P<string>"[^"\n]*")
    | (?P<punct>[(){}\[\]|,;])
    | (?P<word>[^\s(){}\[\]|,;"]+)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise BifSyntaxError(f"unexpected character {text[pos]!r}",
                                 line, pos - line_start + 1)
        kind = m.lastgroup
        tok_text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, tok_text, line, m.start() - line_start + 1))
        newlines = tok_text.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + tok_text.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def error(self, msg: str):
        raise BifSyntaxError(msg, self.cur.line, self.cur.col)

    def advance(self) -> _Token:
        tok = self.cur
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        if self.cur.text != text:
            self.error(f"expected {text!r}, found {self.cur.text!r}")
        return self.advance()

    def expect_name(self) -> str:
        tok = self.cur
        if tok.kind == "word":
            self.advance()
            return tok.text
        if tok.kind == "string":
            self.advance()
            return tok.text[1:-1]
        self.error(f"expected a name, found {tok.text!r}")

    def expect_number(self) -> float:
        tok = self.cur
        try:
            value = float(tok.text)
        except ValueError:
            self.error(f"expected a number, found {tok.text!r}")
        self.advance()
        return value

    def expect_int(self) -> int:
        value = self.expect_number()
        if value != int(value):
            self.error("expected an integer")
        return int(value)


def parse_bif(text: str) -> DiscreteBn:
    """Parse BIF text into a DiscreteBn."""
    p = _Parser(text)
    p.expect("network")
    name = p.expect_name()
    p.expect("{")
    net_properties: list[str] = []
    while p.cur.text != "}":
        _parse_property(p, net_properties)
    p.expect("}")

    var_names: list[str] = []
    var_index: dict[str, int] = {}
    categories: dict[str, list[str]] = {}
    var_properties: dict[str, list[str]] = {}
    prob_blocks: dict[str, tuple[list[str], object]] = {}

    while p.cur.kind != "eof":
        if p.cur.text == "variable":
            vname, states, props = _parse_variable(p)
            if vname in var_index:
                raise DuplicateDeclaration(f"variable {vname!r} declared twice")
            var_index[vname] = len(var_names)
            var_names.append(vname)
            categories[vname] = states
            var_properties[vname] = props
        elif p.cur.text == "probability":
            child, parents, body = _parse_probability(p)
            if child in prob_blocks:
                raise DuplicateDeclaration(
                    f"variable {child!r} has two probability blocks")
            prob_blocks[child] = (parents, body)
        else:
            p.error(f"expected 'variable' or 'probability', found {p.cur.text!r}")

    for referenced in prob_blocks:
        if referenced not in var_index:
            raise UndeclaredVariable(
                f"probability block for undeclared variable {referenced!r}")
    for child, (parents, _) in prob_blocks.items():
        for parent in parents:
            if parent not in var_index:
                raise UndeclaredVariable(
                    f"probability block of {child!r} conditions on undeclared "
                    f"variable {parent!r}")
    for vname in var_names:
        if vname not in prob_blocks:
            raise BifError(f"variable {vname!r} has no probability block")

    edges = set()
    for child, (parents, _) in prob_blocks.items():
        for parent in parents:
            edges.add((var_index[parent], var_index[child]))
    try:
        dag = Dag(tuple(var_names), frozenset(edges))
    except GraphError as exc:
        raise CyclicStructure(str(exc)) from exc

    cpts: list[np.ndarray] = []
    parent_order: list[tuple[int, ...]] = []
    for vname in var_names:
        parents, body = prob_blocks[vname]
        parent_idx = tuple(var_index[q] for q in parents)
        parent_order.append(parent_idx)
        cards = [len(categories[q]) for q in parents]
        r = len(categories[vname])
        q_total = int(np.prod(cards)) if cards else 1
        cpt = np.full((q_total, r), np.nan)
        if isinstance(body, list) and body and body[0][0] == "table":
            values = body[0][1]
            if len(values) != q_total * r:
                raise BifError(
                    f"table of {vname!r} has {len(values)} values, expected {q_total * r}")
            cpt[:, :] = np.asarray(values).reshape(q_total, r)
        else:
            seen_rows = set()
            state_index = {q: {s: k for k, s in enumerate(categories[q])} for q in parents}
            for states, values in body:
                if len(states) != len(parents):
                    raise BifError(
                        f"configuration of {vname!r} names {len(states)} states "
                        f"for {len(parents)} parents")
                row = 0
                for q, s in zip(parents, states):
                    if s not in state_index[q]:
                        raise BifError(
                            f"configuration of {vname!r} uses unknown state {s!r} "
                            f"of {q!r}")
                    row = row * len(categories[q]) + state_index[q][s]
                if row in seen_rows:
                    raise DuplicateDeclaration(
                        f"duplicate configuration {states!r} for {vname!r}")
                seen_rows.add(row)
                if len(values) != r:
                    raise BifError(
                        f"row for {vname!r} has {len(values)} probabilities, "
                        f"expected {r}")
                cpt[row, :] = values
        if np.isnan(cpt).any():
            raise BifError(f"probability block of {vname!r} leaves configurations unset")
        cpts.append(cpt)

    props = tuple(tuple(var_properties[v]) for v in var_names)
    return DiscreteBn(name, dag, tuple(tuple(categories[v]) for v in var_names),
                      tuple(cpts), tuple(parent_order), props)


def _parse_property(p: _Parser, sink: list[str]) -> None:
    if p.cur.text != "property":
        p.error(f"expected 'property', found {p.cur.text!r}")
    p.advance()
    parts = []
    while p.cur.text != ";":
        if p.cur.kind == "eof":
            p.error("unterminated property")
        parts.append(p.advance().text)
    p.expect(";")
    sink.append(" ".join(parts))


def _parse_variable(p: _Parser) -> tuple[str, list[str], list[str]]:
    p.expect("variable")
    name = p.expect_name()
    p.expect("{")
    states: list[str] | None = None
    props: list[str] = []
    while p.cur.text != "}":
        if p.cur.text == "type":
            p.advance()
            p.expect("discrete")
            p.expect("[")
            count = p.expect_int()
            p.expect("]")
            p.expect("{")
            states = []
            while p.cur.text != "}":
                states.append(p.expect_name())
                if p.cur.text == ",":
                    p.advance()
            p.expect("}")
            p.expect(";")
            if len(states) != count:
                p.error(f"variable {name!r} declares {count} states but lists "
                        f"{len(states)}")
        elif p.cur.text == "property":
            _parse_property(p, props)
        else:
            p.error(f"unsupported construct {p.cur.text!r} in variable block")
    p.expect("}")
    if states is None:
        p.error(f"variable {name!r} has no discrete type declaration")
    return name, states, props


def _parse_probability(p: _Parser):
    p.expect("probability")
    p.expect("(")
    child = p.expect_name()
    parents: list[str] = []
    if p.cur.text == "|":
        p.advance()
        while p.cur.text != ")":
            parents.append(p.expect_name())
            if p.cur.text == ",":
                p.advance()
    p.expect(")")
    p.expect("{")
    body: list[tuple] = []
    while p.cur.text != "}":
        if p.cur.text == "table":
            p.advance()
            values = []
            while p.cur.text != ";":
                values.append(p.expect_number())
                if p.cur.text == ",":
                    p.advance()
            p.expect(";")
            body.append(("table", values))
        elif p.cur.text == "(":
            p.advance()
            states = []
            while p.cur.text != ")":
                states.append(p.expect_name())
                if p.cur.text == ",":
                    p.advance()
            p.expect(")")
            values = []
            while p.cur.text != ";":
                values.append(p.expect_number())
                if p.cur.text == ",":
                    p.advance()
            p.expect(";")
            body.append((tuple(states), values))
        else:
            p.error(f"unsupported construct {p.cur.text!r} in probability block")
    p.expect("}")
    if not body:
        p.error(f"probability block of {child!r} is empty")
    if any(row[0] == "table" for row in body) and len(body) > 1:
        p.error(f"probability block of {child!r} mixes table and configuration rows")
    return child, parents, body


def serialize_bif(bn: DiscreteBn) -> str:
    """Serialize in the supported subset; parse_bif round-trips the output."""
    out = [f"network {bn.name} {{", "}"]
    for i, label in enumerate(bn.dag.node_labels):
        states = ", ".join(bn.categories[i])
        out.append(f"variable {label} {{")
        out.append(f"  type discrete [ {len(bn.categories[i])} ] {{ {states} }};")
        for prop in (bn.properties[i] if bn.properties else ()):
            out.append(f"  property {prop} ;")
        out.append("}")
    for i, label in enumerate(bn.dag.node_labels):
        parents = bn.parent_order[i]
        if parents:
            header = f"{label} | " + ", ".join(bn.dag.node_labels[q] for q in parents)
        else:
            header = label
        out.append(f"probability ( {header} ) {{")
        if not parents:
            out.append("  table " + ", ".join(f"{v:.17g}" for v in bn.cpts[i][0]) + ";")
        else:
            cards = [len(bn.categories[q]) for q in parents]
            for row in range(bn.cpts[i].shape[0]):
                idx = []
                rem = row
                for c in reversed(cards):
                    idx.append(rem % c)
                    rem //= c
                idx.reverse()
                states = ", ".join(bn.categories[q][k] for q, k in zip(parents, idx))
                probs = ", ".join(f"{v:.17g}" for v in bn.cpts[i][row])
                out.append(f"  ({states}) {probs};")
        out.append("}")
    return "\n".join(out) + "\n"


def sample_bn(bn: DiscreteBn, n: int, seed: int = 0) -> Dataset:
    """Ancestral sampling: draw each node given its parents in topological
    order.  Values are category codes; labels retained on the Dataset."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = bn.node_count
    rng = substream(seed, "bn_data")
    codes = np.zeros((n, p), dtype=np.int64)
    u = rng.random((n, p))
    for node in bn.dag.topological_order():
        parents = bn.parent_order[node]
        cpt = bn.cpts[node]
        if parents:
            rows = np.zeros(n, dtype=np.int64)
            for q in parents:
                rows = rows * bn.cardinality(q) + codes[:, q]
        else:
            rows = np.zeros(n, dtype=np.int64)
        cum = np.cumsum(cpt, axis=1)
        codes[:, node] = (u[:, node, None] > cum[rows, :-1]).sum(axis=1)
    return Dataset(codes, bn.dag.node_labels, "categorical", bn.categories)
