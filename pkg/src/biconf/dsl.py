"""Manifold description language: lexer, parser, printer, compiler, validation.

A file declares one manifold::

    manifold sphere {
      dim 2;
      coords th, ph;
      metric { g[th,th] = 1; g[ph,ph] = sin(th)^2; }
      projector block { leaf = th; }
      domain { th in [0.2, 2.9]; ph in [0, 6]; }
    }

Expressions support ``+ - * / ^``, unary minus and the functions
``sin cos tan exp log sqrt``.  Unary minus binds tighter than ``^`` (so
``-x^2`` is ``(-x)^2``); ``^`` is right associative and its exponent must be
a literal integer or a rational literal with denominator at most 4, written
``x^2``, ``x^-1`` or ``x^(3/2)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .errors import (
    DimensionMismatch, DomainError, DslSyntaxError, DuplicateDefinition, EmptyDomain,
    MissingDiagonal, NonIntegerRank, NotAProjector, OutsideDomain, SingularMetric,
    UnknownIdentifier,
)
from .jets import ELEMENTARY, Jet, jet_elem, jet_pow, jet_space

# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

BINARY = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


@dataclass(frozen=True)
class ExprNode:
    """Expression tree node.

    kinds: ``num`` (value: float), ``coord`` / ``const`` / ``ref`` (value: name),
    ``neg`` (one child), ``add sub mul div`` (two children),
    ``pow`` (one child, value: Fraction exponent), ``call`` (value: function name, one child).
    """
    kind: str
    value: object = None
    children: tuple = ()


def num(v) -> ExprNode:
    return ExprNode("num", float(v))


@dataclass(frozen=True)
class BlockSplit:
    leaf: tuple


@dataclass(frozen=True)
class Normals:
    labels: tuple        # covector labels as written (ints)
    covectors: tuple     # per covector: tuple over coords of ExprNode or None


@dataclass(frozen=True)
class Explicit:
    P: tuple             # n x n, symmetric, entries ExprNode or None


ProjectorSpec = Union[BlockSplit, Normals, Explicit]


@dataclass(frozen=True)
class VectorSpec:
    components: tuple    # per coord: ExprNode or None
    phi: ExprNode | None = None
    chi: ExprNode | None = None


@dataclass(frozen=True)
class ManifoldSpec:
    name: str
    dim: int
    coords: tuple
    constants: dict
    subexprs: dict
    metric: tuple        # n x n symmetric, ExprNode or None (= 0)
    projector: ProjectorSpec
    domain: tuple        # per coord (lo, hi)
    vectors: dict = field(default_factory=dict)

    def coord_index(self, name: str) -> int:
        return self.coords.index(name)


@dataclass(frozen=True)
class ValidatedManifold:
    spec: ManifoldSpec
    p: int
    warnings: tuple
    notes: tuple
    probe: tuple

    @property
    def n(self):
        return self.spec.dim


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[{}\[\](),;=+\-*/^])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            if kind == "op" and s == "**":
                s = "^"
            out.append(Token(kind, s, line, col))
        nl = s.count("\n") if kind == "ws" else 0
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(m.group())
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.coords: list[str] = []
        self.constants: dict[str, float] = {}
        self.subexprs: dict[str, ExprNode] = {}

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, expected, msg=None):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise DslSyntaxError(msg or f"unexpected {found}", t.line, t.col, expected)

    def at(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def expect(self, text) -> Token:
        if not self.at(text):
            self.fail([repr(text)])
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.fail(["identifier"])
        t = self.tok
        self.i += 1
        return t

    def integer(self) -> int:
        if self.tok.kind != "num" or not self.tok.text.isdigit():
            self.fail(["integer"])
        t = self.tok
        self.i += 1
        return int(t.text)

    def signed_number(self) -> float:
        sign = 1.0
        if self.at("-"):
            self.i += 1
            sign = -1.0
        elif self.at("+"):
            self.i += 1
        if self.tok.kind != "num":
            self.fail(["number"])
        t = self.tok
        self.i += 1
        return sign * float(t.text)

    def declare(self, tok: Token):
        name = tok.text
        if name in ELEMENTARY:
            raise DuplicateDefinition(f"{tok.line}:{tok.col}: {name!r} is a builtin function name")
        if name in self.coords or name in self.constants or name in self.subexprs:
            raise DuplicateDefinition(f"{tok.line}:{tok.col}: {name!r} is already defined")

    def coord_of(self, tok: Token) -> int:
        if tok.text not in self.coords:
            raise DimensionMismatch(
                f"{tok.line}:{tok.col}: {tok.text!r} is not one of the {len(self.coords)} coordinates")
        return self.coords.index(tok.text)

    # file structure
    def parse_file(self) -> ManifoldSpec:
        self.expect("manifold")
        name = self.ident().text
        self.expect("{")
        self.expect("dim")
        dim = self.integer()
        self.expect(";")
        self.expect("coords")
        toks = [self.ident()]
        while self.at(","):
            self.i += 1
            toks.append(self.ident())
        self.expect(";")
        for t in toks:
            self.declare(t)
            self.coords.append(t.text)
        if len(self.coords) != dim:
            raise DimensionMismatch(f"dim {dim} declared but {len(self.coords)} coordinates listed")
        while self.at("const"):
            self.i += 1
            t = self.ident()
            self.declare(t)
            self.expect("=")
            self.constants[t.text] = self.signed_number()
            self.expect(";")
        while self.at("func"):
            self.i += 1
            t = self.ident()
            self.declare(t)
            self.expect("=")
            e = self.expr()
            self.expect(";")
            self.subexprs[t.text] = e
        metric = self.parse_metric(dim)
        projector = self.parse_projector(dim)
        domain = self.parse_domain(dim)
        vectors = {}
        while self.at("vector"):
            self.i += 1
            t = self.ident()
            if t.text in vectors:
                raise DuplicateDefinition(f"{t.line}:{t.col}: vector {t.text!r} declared twice")
            vectors[t.text] = self.parse_vector(dim)
        self.expect("}")
        if self.tok.kind != "eof":
            self.fail(["end of input"])
        return ManifoldSpec(name, dim, tuple(self.coords), dict(self.constants),
                            dict(self.subexprs), metric, projector, domain, vectors)

    def parse_pair_block(self, head: str, dim: int, what: str):
        entries = [[None] * dim for _ in range(dim)]
        self.expect("{")
        count = 0
        while self.at(head):
            self.i += 1
            self.expect("[")
            a = self.coord_of(self.ident())
            self.expect(",")
            b = self.coord_of(self.ident())
            self.expect("]")
            t = self.expect("=")
            e = self.expr()
            self.expect(";")
            if entries[a][b] is not None:
                raise DuplicateDefinition(f"{t.line}:{t.col}: {what} component "
                                          f"[{self.coords[a]},{self.coords[b]}] set twice")
            entries[a][b] = e
            entries[b][a] = e
            count += 1
        if count == 0:
            self.fail([f"'{head}'"])
        self.expect("}")
        return tuple(tuple(r) for r in entries)

    def parse_metric(self, dim):
        self.expect("metric")
        g = self.parse_pair_block("g", dim, "metric")
        for a in range(dim):
            if g[a][a] is None:
                raise MissingDiagonal(f"diagonal metric component g[{self.coords[a]},{self.coords[a]}] is not set")
        return g

    def parse_projector(self, dim) -> ProjectorSpec:
        self.expect("projector")
        if self.at("block"):
            self.i += 1
            self.expect("{")
            self.expect("leaf")
            self.expect("=")
            toks = [self.ident()]
            while self.at(","):
                self.i += 1
                toks.append(self.ident())
            self.expect(";")
            self.expect("}")
            leaf = []
            for t in toks:
                if t.text not in self.coords:
                    raise UnknownIdentifier(f"{t.line}:{t.col}: leaf coordinate {t.text!r} is not declared")
                if t.text in leaf:
                    raise DuplicateDefinition(f"{t.line}:{t.col}: leaf coordinate {t.text!r} repeated")
                leaf.append(t.text)
            return BlockSplit(tuple(leaf))
        if self.at("normals"):
            self.i += 1
            self.expect("{")
            covs: dict[int, list] = {}
            while self.tok.kind == "ident" and re.fullmatch(r"n\d*", self.tok.text):
                t = self.tok
                self.i += 1
                label = int(t.text[1:]) if len(t.text) > 1 else self.integer()
                self.expect("[")
                a = self.coord_of(self.ident())
                self.expect("]")
                self.expect("=")
                e = self.expr()
                self.expect(";")
                row = covs.setdefault(label, [None] * dim)
                if row[a] is not None:
                    raise DuplicateDefinition(f"{t.line}:{t.col}: normal n{label}[{self.coords[a]}] set twice")
                row[a] = e
            if not covs:
                self.fail(["'n'"])
            self.expect("}")
            labels = tuple(sorted(covs))
            return Normals(labels, tuple(tuple(covs[k]) for k in labels))
        if self.at("explicit"):
            self.i += 1
            return Explicit(self.parse_pair_block("P", dim, "projector"))
        self.fail(["'block'", "'normals'", "'explicit'"])

    def parse_domain(self, dim):
        self.expect("domain")
        self.expect("{")
        box: dict[str, tuple] = {}
        while self.tok.kind == "ident":
            t = self.ident()
            if t.text not in self.coords:
                raise UnknownIdentifier(f"{t.line}:{t.col}: domain for unknown coordinate {t.text!r}")
            if t.text in box:
                raise DuplicateDefinition(f"{t.line}:{t.col}: domain for {t.text!r} given twice")
            self.expect("in")
            self.expect("[")
            lo = self.signed_number()
            self.expect(",")
            hi = self.signed_number()
            self.expect("]")
            self.expect(";")
            if not lo < hi:
                raise EmptyDomain(f"{t.line}:{t.col}: interval [{lo}, {hi}] for {t.text!r} is empty")
            box[t.text] = (lo, hi)
        self.expect("}")
        missing = [c for c in self.coords if c not in box]
        if missing:
            raise DimensionMismatch(f"no domain interval for coordinates {missing}")
        return tuple(box[c] for c in self.coords)

    def parse_vector(self, dim) -> VectorSpec:
        self.expect("{")
        comps = [None] * dim
        count = 0
        while self.at("xi"):
            self.i += 1
            self.expect("[")
            t = self.ident()
            a = self.coord_of(t)
            self.expect("]")
            self.expect("=")
            e = self.expr()
            self.expect(";")
            if comps[a] is not None:
                raise DuplicateDefinition(f"{t.line}:{t.col}: xi[{t.text}] set twice")
            comps[a] = e
            count += 1
        if count == 0:
            self.fail(["'xi'"])
        phi = chi = None
        if self.at("phi") and self.toks[self.i + 1].text == "=":
            self.i += 2
            phi = self.expr()
            self.expect(";")
        if self.at("chi") and self.toks[self.i + 1].text == "=":
            self.i += 2
            chi = self.expr()
            self.expect(";")
        self.expect("}")
        return VectorSpec(tuple(comps), phi, chi)

    # expressions
    def expr(self) -> ExprNode:
        node = self.term()
        while self.at("+") or self.at("-"):
            op = "add" if self.tok.text == "+" else "sub"
            self.i += 1
            node = ExprNode(op, None, (node, self.term()))
        return node

    def term(self) -> ExprNode:
        node = self.power()
        while self.at("*") or self.at("/"):
            op = "mul" if self.tok.text == "*" else "div"
            self.i += 1
            node = ExprNode(op, None, (node, self.power()))
        return node

    def power(self) -> ExprNode:
        base = self.unary()
        if self.at("^"):
            t = self.tok
            self.i += 1
            exponent = _literal_exponent(self.power())
            if exponent is None:
                raise DslSyntaxError("exponent must be an integer or a rational literal with "
                                     "denominator at most 4", t.line, t.col)
            return ExprNode("pow", exponent, (base,))
        return base

    def unary(self) -> ExprNode:
        if self.at("-"):
            self.i += 1
            return ExprNode("neg", None, (self.unary(),))
        return self.primary()

    def primary(self) -> ExprNode:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return ExprNode("num", float(t.text))
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            self.i += 1
            name = t.text
            if name in ELEMENTARY:
                self.expect("(")
                e = self.expr()
                self.expect(")")
                return ExprNode("call", name, (e,))
            if name in self.coords:
                return ExprNode("coord", name)
            if name in self.constants:
                return ExprNode("const", name)
            if name in self.subexprs:
                return ExprNode("ref", name)
            raise UnknownIdentifier(f"{t.line}:{t.col}: unknown identifier {name!r}")
        self.fail(["number", "identifier", "'('", "'-'"])


def _literal_exponent(node: ExprNode):
    def lit(nd):
        if nd.kind == "num":
            return Fraction(nd.value)
        if nd.kind == "neg":
            v = lit(nd.children[0])
            return None if v is None else -v
        if nd.kind == "div":
            a, b = lit(nd.children[0]), lit(nd.children[1])
            if a is None or b is None or b == 0 or a.denominator != 1 or b.denominator != 1:
                return None
            return a / b
        return None

    q = lit(node)
    if q is None or q.denominator > 4:
        return None
    return q


def parse_manifold(text: str) -> ManifoldSpec:
    """Parse one manifold description."""
    return _Parser(text).parse_file()


def parse_expression(text: str, spec: ManifoldSpec) -> ExprNode:
    """Parse a standalone expression in the identifier scope of ``spec``."""
    p = _Parser(text)
    p.coords = list(spec.coords)
    p.constants = dict(spec.constants)
    p.subexprs = dict(spec.subexprs)
    e = p.expr()
    if p.tok.kind != "eof":
        p.fail(["end of input"])
    return e


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------

def format_expr(e: ExprNode) -> str:
    k = e.kind
    if k == "num":
        return repr(float(e.value))
    if k in ("coord", "const", "ref"):
        return e.value
    if k == "neg":
        return f"-({format_expr(e.children[0])})"
    if k in BINARY:
        return f"({format_expr(e.children[0])} {BINARY[k]} {format_expr(e.children[1])})"
    if k == "pow":
        q = e.value
        ex = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        return f"({format_expr(e.children[0])})^({ex})"
    if k == "call":
        return f"{e.value}({format_expr(e.children[0])})"
    raise ValueError(f"unknown node kind {k!r}")


def format_manifold(spec: ManifoldSpec) -> str:
    c = spec.coords
    lines = [f"manifold {spec.name} {{", f"  dim {spec.dim};", f"  coords {', '.join(c)};"]
    for k, v in spec.constants.items():
        lines.append(f"  const {k} = {v!r};")
    for k, v in spec.subexprs.items():
        lines.append(f"  func {k} = {format_expr(v)};")
    lines.append("  metric {")
    for a in range(spec.dim):
        for b in range(a, spec.dim):
            if spec.metric[a][b] is not None:
                lines.append(f"    g[{c[a]},{c[b]}] = {format_expr(spec.metric[a][b])};")
    lines.append("  }")
    pr = spec.projector
    if isinstance(pr, BlockSplit):
        lines.append(f"  projector block {{ leaf = {', '.join(pr.leaf)}; }}")
    elif isinstance(pr, Normals):
        lines.append("  projector normals {")
        for label, row in zip(pr.labels, pr.covectors):
            for a, e in enumerate(row):
                if e is not None:
                    lines.append(f"    n{label}[{c[a]}] = {format_expr(e)};")
        lines.append("  }")
    else:
        lines.append("  projector explicit {")
        for a in range(spec.dim):
            for b in range(a, spec.dim):
                if pr.P[a][b] is not None:
                    lines.append(f"    P[{c[a]},{c[b]}] = {format_expr(pr.P[a][b])};")
        lines.append("  }")
    lines.append("  domain {")
    for name, (lo, hi) in zip(c, spec.domain):
        lines.append(f"    {name} in [{lo!r}, {hi!r}];")
    lines.append("  }")
    for name, v in spec.vectors.items():
        lines.append(f"  vector {name} {{")
        for a, e in enumerate(v.components):
            if e is not None:
                lines.append(f"    xi[{c[a]}] = {format_expr(e)};")
        if v.phi is not None:
            lines.append(f"    phi = {format_expr(v.phi)};")
        if v.chi is not None:
            lines.append(f"    chi = {format_expr(v.chi)};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

class PointEvaluator:
    """Evaluates expressions of one spec at one point, memoizing sub-expressions."""

    def __init__(self, spec: ManifoldSpec, x):
        self.spec = spec
        self.x = np.asarray(x, dtype=float)
        if self.x.shape != (spec.dim,):
            raise DimensionMismatch(f"point has {self.x.size} entries, manifold has dim {spec.dim}")
        self.space = jet_space(spec.dim)
        self._vars = {c: Jet.variable(self.space, i, self.x[i]) for i, c in enumerate(spec.coords)}
        self._memo: dict[str, Jet] = {}

    def jet(self, e: ExprNode | None) -> Jet:
        if e is None:
            return Jet.constant(self.space, 0.0)
        k = e.kind
        if k == "num":
            return Jet.constant(self.space, e.value)
        if k == "coord":
            return self._vars[e.value]
        if k == "const":
            return Jet.constant(self.space, self.spec.constants[e.value])
        if k == "ref":
            if e.value not in self._memo:
                self._memo[e.value] = self.jet(self.spec.subexprs[e.value])
            return self._memo[e.value]
        if k == "neg":
            return -self.jet(e.children[0])
        if k in BINARY:
            a, b = self.jet(e.children[0]), self.jet(e.children[1])
            if k == "add":
                return a + b
            if k == "sub":
                return a - b
            if k == "mul":
                return a * b
            if b.coeffs[0] == 0.0:
                raise DomainError(f"division by an expression vanishing at {self.x.tolist()}")
            return a / b
        if k == "pow":
            return jet_pow(self.jet(e.children[0]), e.value)
        if k == "call":
            return jet_elem(e.value, self.jet(e.children[0]))
        raise ValueError(f"unknown node kind {k!r}")


def compile_expr(e: ExprNode, spec: ManifoldSpec) -> Callable[[np.ndarray], Jet]:
    """Return an evaluator ``x -> Jet`` for ``e``."""
    def evaluate(x):
        return PointEvaluator(spec, x).jet(e)
    return evaluate


_FLOAT_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan,
                "exp": math.exp, "log": math.log, "sqrt": math.sqrt}


def evaluate_value(e: ExprNode | None, spec: ManifoldSpec, x) -> float:
    """Plain floating-point evaluation (no jets)."""
    if e is None:
        return 0.0
    k = e.kind
    if k == "num":
        return e.value
    if k == "coord":
        return float(x[spec.coords.index(e.value)])
    if k == "const":
        return spec.constants[e.value]
    if k == "ref":
        return evaluate_value(spec.subexprs[e.value], spec, x)
    if k == "neg":
        return -evaluate_value(e.children[0], spec, x)
    if k in BINARY:
        a = evaluate_value(e.children[0], spec, x)
        b = evaluate_value(e.children[1], spec, x)
        return {"add": a + b, "sub": a - b, "mul": a * b}[k] if k != "div" else a / b
    if k == "pow":
        return evaluate_value(e.children[0], spec, x) ** float(e.value)
    if k == "call":
        return _FLOAT_FUNCS[e.value](evaluate_value(e.children[0], spec, x))
    raise ValueError(f"unknown node kind {k!r}")


def inside_domain(spec: ManifoldSpec, x) -> bool:
    return all(lo < xi < hi for xi, (lo, hi) in zip(x, spec.domain))


def check_inside(spec: ManifoldSpec, x):
    if len(x) != spec.dim:
        raise DimensionMismatch(f"point has {len(x)} entries, manifold has dim {spec.dim}")
    if not inside_domain(spec, x):
        raise OutsideDomain(f"point {list(map(float, x))} is not strictly inside the domain box")


def domain_center(spec: ManifoldSpec) -> np.ndarray:
    return np.array([(lo + hi) / 2.0 for lo, hi in spec.domain])


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _rank_messages(n: int, p: int):
    warnings, notes = [], []
    for r, who in ((p, "projector"), (n - p, "complementary projector")):
        if r in (1, 2):
            warnings.append(f"rank-{r} {who}: Lie algebra may be infinite dimensional")
    if p == 3 or n - p == 3:
        notes.append("rank-3 leaf: use Cotton condition (cotton0 / cotton1) in place of the "
                     "Weyl-type obstruction")
    return tuple(warnings), tuple(notes)


def validate_spec(spec: ManifoldSpec, probe=None) -> ValidatedManifold:
    """Check metric and projector at ``probe`` (domain centre by default) and fix the rank."""
    from .geometry import eval_metric, projector_eval

    probe = domain_center(spec) if probe is None else np.asarray(probe, dtype=float)
    m = eval_metric(spec, probe)
    proj = projector_eval(spec, m, check=False)
    P, Pi, g, ginv = proj.P_dd, proj.Pi_dd, m.g, m.ginv
    scale = 1.0 + np.abs(g).max()
    if isinstance(spec.projector, Explicit):
        Pud = proj.P_ud
        if np.abs(Pud @ Pud - Pud).max() > 1e-9 * scale:
            raise NotAProjector("explicit P is not idempotent: P^a_c P^c_b != P^a_b")
        if np.abs(P @ ginv @ Pi).max() > 1e-9 * scale:
            raise NotAProjector("explicit P is not orthogonal to its complement g - P")
        if np.abs(P + Pi - g).max() > 1e-9 * scale:
            raise NotAProjector("P + Pi does not reproduce the metric")
    tr = float(np.trace(proj.P_ud))
    p = int(round(tr))
    if abs(tr - p) > 1e-9:
        raise NonIntegerRank(f"trace of the projector is {tr!r}, not an integer")
    n = spec.dim
    if p <= 0 or p >= n:
        raise NotAProjector(f"projector rank {p} leaves an empty leaf or an empty complement")
    warnings, notes = _rank_messages(n, p)
    return ValidatedManifold(spec, p, warnings, notes, tuple(float(v) for v in probe))


def ensure_validated(spec) -> ValidatedManifold:
    if isinstance(spec, ValidatedManifold):
        return spec
    return validate_spec(spec)


def load_manifold(path) -> ManifoldSpec:
    with open(path) as fh:
        return parse_manifold(fh.read())


__all__ = [
    "ExprNode", "BlockSplit", "Normals", "Explicit", "VectorSpec", "ManifoldSpec",
    "ValidatedManifold", "parse_manifold", "parse_expression", "format_expr",
    "format_manifold", "compile_expr", "evaluate_value", "validate_spec",
    "ensure_validated", "load_manifold", "PointEvaluator", "SingularMetric",
]
