"""Framed links, linear plumbings, negative continued fractions and the
diagram text format.

A framed link is stored purely as its linking matrix: the diagonal holds the
framings, off-diagonal entries are pairwise linking numbers.  Everything is
exact Python integers.

Text format (one statement per line, ``;`` also separates, ``#`` comments)::

    comp <label> <framing>
    lk <label> <label> <int>
    chain <int> <int> ...

Other keywords (``rot``, ``l0``, Kirby moves, fixture metadata) are passed
through untouched as :class:`Statement` records for the modules that
understand them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

__all__ = [
    "FramedLink",
    "PlumbingChain",
    "ContinuedFraction",
    "Statement",
    "Document",
    "ParseError",
    "LinkError",
    "MalformedCFError",
    "chain_to_link",
    "cf_value",
    "neg_cf_expand",
    "parse_statements",
    "parse_document",
    "parse_link",
    "serialize_link",
]


class LinkError(ValueError):
    """Invalid framed-link data (asymmetry, duplicate or unknown labels)."""


class MalformedCFError(ZeroDivisionError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class FramedLink:
    labels: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        matrix = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", matrix)
        m = len(labels)
        if len(set(labels)) != m:
            dup = next(lab for lab in labels if labels.count(lab) > 1)
            raise LinkError(f"duplicate label {dup!r}")
        if len(matrix) != m or any(len(row) != m for row in matrix):
            raise LinkError("linking matrix must be square with one row per label")
        for i in range(m):
            for j in range(i + 1, m):
                if matrix[i][j] != matrix[j][i]:
                    raise LinkError(
                        f"asymmetric linking data between {labels[i]!r} and {labels[j]!r}"
                    )

    @classmethod
    def from_data(
        cls,
        framings: Mapping[str, int] | Sequence[tuple[str, int]],
        links: Mapping[tuple[str, str], int] | None = None,
    ) -> "FramedLink":
        items = list(framings.items()) if isinstance(framings, Mapping) else list(framings)
        labels = [lab for lab, _ in items]
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels):
            raise LinkError("duplicate label")
        mat = [[0] * len(labels) for _ in labels]
        for i, (_, f) in enumerate(items):
            mat[i][i] = f
        for (a, b), v in (links or {}).items():
            if a not in index or b not in index:
                raise LinkError(f"unknown label in linking pair {(a, b)!r}")
            mat[index[a]][index[b]] = mat[index[b]][index[a]] = v
        return cls(tuple(labels), tuple(map(tuple, mat)))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def framings(self) -> tuple[int, ...]:
        return tuple(self.matrix[i][i] for i in range(len(self)))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LinkError(f"unknown component {label!r}") from None

    def framing(self, label: str) -> int:
        i = self.index(label)
        return self.matrix[i][i]

    def lk(self, a: str, b: str) -> int:
        return self.matrix[self.index(a)][self.index(b)]

    def lk_with(self, label: str, multiplicities: Mapping[str, int]) -> int:
        """Bilinear extension: lk(K, sum m_j K_j), with lk(K, K) = framing."""
        row = self.matrix[self.index(label)]
        return sum(row[self.index(b)] * m for b, m in multiplicities.items())

    def mirror(self) -> "FramedLink":
        return FramedLink(self.labels, tuple(tuple(-v for v in row) for row in self.matrix))

    def relabel(self, mapping: Mapping[str, str]) -> "FramedLink":
        return FramedLink(tuple(mapping.get(lab, lab) for lab in self.labels), self.matrix)

    def reorder(self, order: Sequence[str]) -> "FramedLink":
        if sorted(order) != sorted(self.labels):
            raise LinkError("reorder needs a permutation of the labels")
        idx = [self.index(lab) for lab in order]
        return FramedLink(tuple(order), tuple(tuple(self.matrix[i][j] for j in idx) for i in idx))

    def determinant(self) -> int:
        return _bareiss_det(self.matrix)

    def __str__(self) -> str:
        return serialize_link(self)


def _bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class PlumbingChain:
    """Linear plumbing: consecutive spheres meet once."""

    framings: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "framings", tuple(int(f) for f in self.framings))
        if not self.framings:
            raise LinkError("a plumbing chain needs at least one component")

    def to_link(self, labels: Sequence[str] | None = None) -> FramedLink:
        return chain_to_link(self, labels)


def chain_to_link(
    chain: PlumbingChain | Sequence[int],
    labels: Sequence[str] | None = None,
    *,
    prefix: str = "K",
    start: int = 1,
    link_sign: int = 1,
) -> FramedLink:
    if not isinstance(chain, PlumbingChain):
        chain = PlumbingChain(tuple(chain))
    m = len(chain.framings)
    if labels is None:
        labels = [f"{prefix}{start + i}" for i in range(m)]
    if len(labels) != m:
        raise LinkError("need one label per chain component")
    mat = [[0] * m for _ in range(m)]
    for i, f in enumerate(chain.framings):
        mat[i][i] = f
        if i + 1 < m:
            mat[i][i + 1] = mat[i + 1][i] = link_sign
    return FramedLink(tuple(labels), tuple(map(tuple, mat)))


@dataclass(frozen=True)
class ContinuedFraction:
    """Coefficients of a1 - 1/(a2 - 1/(a3 - ...))."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))

    def value(self) -> Fraction:
        return cf_value(self)

    def __iter__(self):
        return iter(self.coefficients)

    def __len__(self):
        return len(self.coefficients)


def cf_value(cf: ContinuedFraction | Sequence[int]) -> Fraction:
    coeffs = list(cf.coefficients if isinstance(cf, ContinuedFraction) else cf)
    if not coeffs:
        raise MalformedCFError("empty continued fraction")
    value = Fraction(coeffs[-1])
    for a in reversed(coeffs[:-1]):
        if value == 0:
            raise MalformedCFError(f"division by zero while evaluating {coeffs}")
        value = a - 1 / value
    return value


def neg_cf_expand(p: int, q: int) -> ContinuedFraction:
    """Expansion of p/q with every coefficient <= -2.

    Sign convention: the returned coefficients evaluate to -p/q, so that
    ``neg_cf_expand(p, q)`` is the framing chain of -p/q surgery on the
    unknot, i.e. of the lens space L(p, q).
    """
    if not (isinstance(p, int) and isinstance(q, int)):
        raise TypeError("p and q must be integers")
    if not 0 < q < p or gcd(p, q) != 1:
        raise ValueError(f"need 0 < q < p with gcd(p, q) = 1, got p={p}, q={q}")
    coeffs = []
    num, den = p, q
    while den:
        b = -(-num // den)  # ceil
        coeffs.append(-b)
        num, den = den, b * den - num
    return ContinuedFraction(tuple(coeffs))


# --------------------------------------------------------------------------
# Text format
# --------------------------------------------------------------------------

LINK_KEYWORDS = frozenset({"comp", "lk", "chain"})
# Keywords owned by other modules; parse_link skips them.
EXTENSION_KEYWORDS = frozenset(
    {
        "rot", "l0", "dot", "front", "meridian", "prefer", "spin",
        "gamma", "stated", "gammasum",
        "blowup", "blowdown", "slide", "surger", "relabel",
    }
)


@dataclass(frozen=True)
class Statement:
    keyword: str
    args: tuple[str, ...]
    line: int
    col: int
    arg_cols: tuple[int, ...] = field(default=(), compare=False)

    def error(self, message: str, arg: int | None = None) -> ParseError:
        col = self.col if arg is None or arg >= len(self.arg_cols) else self.arg_cols[arg]
        return ParseError(message, self.line, col)

    def int_arg(self, k: int) -> int:
        try:
            return int(self.args[k])
        except IndexError:
            raise self.error(f"{self.keyword}: missing argument {k + 1}") from None
        except ValueError:
            raise self.error(f"{self.keyword}: expected an integer, got {self.args[k]!r}", k) from None


@dataclass(frozen=True)
class Document:
    link: FramedLink
    extras: tuple[Statement, ...]

    def statements(self, keyword: str) -> list[Statement]:
        return [s for s in self.extras if s.keyword == keyword]


def _normalize_text(text: str) -> str:
    return text.replace("−", "-")


def parse_statements(text: str, allowed: Iterable[str] | None = None) -> list[Statement]:
    allowed = set(LINK_KEYWORDS | EXTENSION_KEYWORDS if allowed is None else allowed)
    out = []
    for lineno, raw in enumerate(_normalize_text(text).split("\n"), start=1):
        line = raw.split("#", 1)[0]
        offset = 0
        for chunk in line.split(";"):
            tokens, cols = [], []
            pos = 0
            for tok in chunk.split():
                pos = chunk.index(tok, pos)
                tokens.append(tok)
                cols.append(offset + pos + 1)
                pos += len(tok)
            offset += len(chunk) + 1
            if not tokens:
                continue
            kw = tokens[0]
            if kw not in allowed:
                raise ParseError(f"unknown statement {kw!r}", lineno, cols[0])
            out.append(Statement(kw, tuple(tokens[1:]), lineno, cols[0], tuple(cols[1:])))
    return out


def parse_document(text: str, allowed: Iterable[str] | None = None) -> Document:
    """Parse link statements into a FramedLink; keep everything else as extras."""
    labels: list[str] = []
    framings: dict[str, int] = {}
    links: dict[frozenset, tuple[int, Statement]] = {}
    extras: list[Statement] = []

    def declare(label: str, framing: int, st: Statement, arg: int) -> None:
        if label in framings:
            raise st.error(f"duplicate label {label!r}", arg)
        labels.append(label)
        framings[label] = framing

    for st in parse_statements(text, allowed):
        if st.keyword == "comp":
            if len(st.args) != 2:
                raise st.error("comp expects: comp <label> <framing>")
            declare(st.args[0], st.int_arg(1), st, 0)
        elif st.keyword == "chain":
            if not st.args:
                raise st.error("chain expects at least one framing")
            values = [st.int_arg(k) for k in range(len(st.args))]
            first = len(labels)
            for k, f in enumerate(values):
                declare(f"K{first + k + 1}", f, st, k)
            for k in range(len(values) - 1):
                a, b = labels[first + k], labels[first + k + 1]
                links[frozenset((a, b))] = (1, st)
        elif st.keyword == "lk":
            if len(st.args) != 3:
                raise st.error("lk expects: lk <label> <label> <int>")
            a, b = st.args[0], st.args[1]
            for k, lab in enumerate((a, b)):
                if lab not in framings:
                    raise st.error(f"undeclared label {lab!r}", k)
            if a == b:
                raise st.error("self-linking is the framing; use comp", 1)
            v = st.int_arg(2)
            key = frozenset((a, b))
            if key in links and links[key][0] != v:
                prev = links[key][1]
                raise st.error(
                    f"symmetry violation: lk({a},{b}) = {v} conflicts with "
                    f"{links[key][0]} given on line {prev.line}"
                )
            links[key] = (v, st)
        else:
            extras.append(st)

    pairs = {tuple(sorted(k)): v for k, (v, _) in links.items()}
    link = FramedLink.from_data([(lab, framings[lab]) for lab in labels], pairs)
    return Document(link, tuple(extras))


def parse_link(text: str) -> FramedLink:
    return parse_document(text).link


def serialize_link(link: FramedLink) -> str:
    lines = [f"comp {lab} {f}" for lab, f in zip(link.labels, link.framings)]
    m = len(link)
    for i in range(m):
        for j in range(i + 1, m):
            if link.matrix[i][j]:
                lines.append(f"lk {link.labels[i]} {link.labels[j]} {link.matrix[i][j]}")
    return "\n".join(lines) + "\n"
