"""Kirby moves on linking matrices, with homology classes tracked through them.

Each move acts on the linking matrix only; band choices of a handle slide
are reduced to a sign.  A TrackedLink remembers, for every current
component, its meridian written in the meridians of the starting diagram,
and after every move the induced map on H_1 is re-verified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .homology import GeneratorMap, GroupElement, H1Presentation, boundary_h1, format_group
from .links import Document, FramedLink, Statement, parse_document

__all__ = [
    "MoveError",
    "blow_up",
    "blow_down",
    "slide",
    "surger_1handle",
    "BlowUp",
    "BlowDown",
    "Slide",
    "Surger",
    "Relabel",
    "TrackedLink",
    "Script",
    "parse_script",
    "run_script",
]


class MoveError(ValueError):
    def __init__(self, message: str, step: int | None = None):
        prefix = f"step {step}: " if step is not None else ""
        super().__init__(prefix + message)
        self.step = step


def _as_lists(link: FramedLink):
    return list(link.labels), [list(row) for row in link.matrix]


def _build(labels, mat) -> FramedLink:
    return FramedLink(tuple(labels), tuple(map(tuple, mat)))


def blow_up(link: FramedLink, new: str, sign: int, targets: Mapping[str, int] | None = None) -> FramedLink:
    """Add a sign-framed unknot linking each target m times.

    The targets' framings and mutual linking change by sign * m_k * m_l.
    """
    if sign not in (1, -1):
        raise MoveError(f"blow-up sign must be +1 or -1, got {sign}")
    if new in link.labels:
        raise MoveError(f"label {new!r} already in use")
    targets = dict(targets or {})
    labels, mat = _as_lists(link)
    m = [targets.get(lab, 0) for lab in labels]
    unknown = set(targets) - set(labels)
    if unknown:
        raise MoveError(f"unknown components {sorted(unknown)}")
    k = len(labels)
    for i in range(k):
        for j in range(k):
            mat[i][j] += sign * m[i] * m[j]
    for i in range(k):
        mat[i].append(m[i])
    mat.append(m + [sign])
    return _build(labels + [new], mat)


def blow_down(link: FramedLink, c: str) -> FramedLink:
    eps = link.framing(c)
    if eps not in (1, -1):
        raise MoveError(f"cannot blow down {c}: framing {eps} is not ±1")
    labels, mat = _as_lists(link)
    ci = labels.index(c)
    col = [mat[i][ci] for i in range(len(labels))]
    keep = [i for i in range(len(labels)) if i != ci]
    new = [[mat[i][j] - eps * col[i] * col[j] for j in keep] for i in keep]
    return _build([labels[i] for i in keep], new)


def slide(link: FramedLink, i: str, j: str, sign: int) -> FramedLink:
    """Slide component i over component j; sign picks the band orientation."""
    if i == j:
        raise MoveError("cannot slide a component over itself")
    if sign not in (1, -1):
        raise MoveError(f"slide sign must be +1 or -1, got {sign}")
    labels, mat = _as_lists(link)
    a, b = link.index(i), link.index(j)
    f_i, f_j, l_ij = mat[a][a], mat[b][b], mat[a][b]
    for k in range(len(labels)):
        if k not in (a, b):
            mat[a][k] = mat[k][a] = mat[a][k] + sign * mat[b][k]
    mat[a][b] = mat[b][a] = l_ij + sign * f_j
    mat[a][a] = f_i + f_j + 2 * sign * l_ij
    return _build(labels, mat)


def surger_1handle(link: FramedLink, c: str, dotted: Sequence[str] = ()) -> FramedLink:
    """Trade the dotted circle c for a 0-framed unknot.

    A dotted circle is already stored as a 0-framed component whose linking
    numbers are the signed passes over the handle, so the matrix is kept.
    """
    if dotted and c not in dotted:
        raise MoveError(f"{c} is not a 1-handle")
    if link.framing(c) != 0:
        raise MoveError(f"dotted circle {c} must carry framing 0")
    return link


# --------------------------------------------------------------------------
# Moves as data
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BlowUp:
    new: str
    sign: int
    targets: tuple[tuple[str, int], ...] = ()

    def __str__(self):
        tg = " ".join(f"{lab}:{m}" for lab, m in self.targets)
        return f"blowup {self.new} {'+' if self.sign > 0 else '-'} {tg}".rstrip()


@dataclass(frozen=True)
class BlowDown:
    label: str

    def __str__(self):
        return f"blowdown {self.label}"


@dataclass(frozen=True)
class Slide:
    over: str  # component being moved
    onto: str
    sign: int

    def __str__(self):
        return f"slide {self.over} {self.onto} {'+' if self.sign > 0 else '-'}"


@dataclass(frozen=True)
class Surger:
    label: str

    def __str__(self):
        return f"surger {self.label}"


@dataclass(frozen=True)
class Relabel:
    old: str
    new: str

    def __str__(self):
        return f"relabel {self.old} {self.new}"


Move = BlowUp | BlowDown | Slide | Surger | Relabel


@dataclass(frozen=True)
class TrackedLink:
    """A link plus the meridian of each current component in original terms."""

    link: FramedLink
    origin: H1Presentation
    labels: Mapping[str, tuple[int, ...]]  # current label -> coefficients over origin generators
    dotted: frozenset = frozenset()
    l0: frozenset = frozenset()

    @classmethod
    def start(
        cls,
        link: FramedLink,
        names: Mapping[str, str] | None = None,
        dotted: Sequence[str] = (),
        l0: Sequence[str] = (),
    ) -> "TrackedLink":
        origin = boundary_h1(link, names)
        k = len(link)
        labels = {lab: tuple(int(i == j) for j in range(k)) for i, lab in enumerate(link.labels)}
        return cls(link, origin, labels, frozenset(dotted), frozenset(l0))

    @cached_property
    def _presentation(self) -> H1Presentation:
        return boundary_h1(self.link)

    def presentation(self) -> H1Presentation:
        return self._presentation

    def to_origin(self) -> GeneratorMap:
        """Current meridians -> original meridians."""
        p = self.presentation()
        return GeneratorMap(p, self.origin, [self.labels[lab] for lab in self.link.labels])

    def class_of(self, label: str) -> GroupElement:
        return self.origin.element(self.labels[label])

    def classes(self) -> dict[str, GroupElement]:
        """Original meridian symbol -> element over the current meridians."""
        inv = self.to_origin().inverse()
        return {
            self.origin.names[g]: inv.apply(self.origin.gen(g).coeffs)
            for g in self.origin.generators
        }

    def describe_class(self, label: str) -> str:
        return format_combination(self.labels[label], [self.origin.names[g] for g in self.origin.generators])

    def check(self) -> None:
        """Raise unless the tracked map is a well-defined isomorphism."""
        verdict = self.to_origin().verify()
        if not verdict:
            raise MoveError(f"tracked classes inconsistent: {verdict.kind} ({verdict.detail})")
        p = self.presentation()
        if p.invariant_factors != self.origin.invariant_factors:
            raise MoveError(
                f"group changed from {format_group(self.origin.invariant_factors)} "
                f"to {format_group(p.invariant_factors)}"
            )

    def apply(self, move: Move) -> "TrackedLink":
        link, labels = self.link, dict(self.labels)
        dotted, l0 = set(self.dotted), set(self.l0)
        if isinstance(move, BlowUp):
            targets = dict(move.targets)
            link = blow_up(link, move.new, move.sign, targets)
            k = len(self.origin.generators)
            vec = [0] * k
            for lab, mult in targets.items():
                for r in range(k):
                    vec[r] -= move.sign * mult * labels[lab][r]
            labels[move.new] = tuple(vec)
        elif isinstance(move, BlowDown):
            if move.label in dotted:
                raise MoveError(f"cannot blow down the 1-handle {move.label}")
            link = blow_down(link, move.label)
            labels.pop(move.label)
            l0.discard(move.label)
        elif isinstance(move, Slide):
            if move.over in dotted or move.onto in dotted:
                raise MoveError("slides involving a dotted circle are not supported; surger it first")
            link = slide(link, move.over, move.onto, move.sign)
            # the meridian of the component slid over picks up -sign times the other's
            li, lj = labels[move.over], labels[move.onto]
            labels[move.onto] = tuple(b - move.sign * a for a, b in zip(li, lj))
        elif isinstance(move, Surger):
            link = surger_1handle(link, move.label, tuple(dotted))
            dotted.discard(move.label)
            l0.add(move.label)
        elif isinstance(move, Relabel):
            if move.new in labels:
                raise MoveError(f"label {move.new!r} already in use")
            link = link.relabel({move.old: move.new})
            labels[move.new] = labels.pop(move.old)
            for s in (dotted, l0):
                if move.old in s:
                    s.discard(move.old)
                    s.add(move.new)
        else:
            raise TypeError(f"unknown move {move!r}")
        return TrackedLink(link, self.origin, labels, frozenset(dotted), frozenset(l0))


def format_combination(coeffs: Sequence[int], symbols: Sequence[str]) -> str:
    parts = []
    for c, s in zip(coeffs, symbols):
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else str(abs(c))
        parts.append((sign, f"{mag}{s}"))
    if not parts:
        return "0"
    head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    return head + "".join(f" {sg} {t}" for sg, t in parts[1:])


# --------------------------------------------------------------------------
# Script files
# --------------------------------------------------------------------------

MOVE_KEYWORDS = ("blowup", "blowdown", "slide", "surger", "relabel")


@dataclass(frozen=True)
class Script:
    start: TrackedLink
    moves: tuple[Move, ...]
    document: Document | None = field(default=None, compare=False)


def _sign(st: Statement, k: int) -> int:
    try:
        tok = st.args[k]
    except IndexError:
        raise st.error(f"{st.keyword}: missing sign") from None
    if tok in ("+", "+1", "1"):
        return 1
    if tok in ("-", "-1"):
        return -1
    raise st.error(f"expected + or -, got {tok!r}", k)


def parse_move(st: Statement) -> Move:
    kw, args = st.keyword, st.args
    if kw == "blowup":
        if len(args) < 2:
            raise st.error("blowup expects: blowup <new> <+|-> [label:mult ...]")
        targets = []
        for k, tok in enumerate(args[2:], start=2):
            lab, _, mult = tok.partition(":")
            try:
                targets.append((lab, int(mult) if mult else 1))
            except ValueError:
                raise st.error(f"bad multiplicity in {tok!r}", k) from None
        return BlowUp(args[0], _sign(st, 1), tuple(targets))
    if kw == "blowdown":
        if len(args) != 1:
            raise st.error("blowdown expects one label")
        return BlowDown(args[0])
    if kw == "slide":
        if len(args) != 3:
            raise st.error("slide expects: slide <moving> <over> <+|->")
        return Slide(args[0], args[1], _sign(st, 2))
    if kw == "surger":
        if len(args) != 1:
            raise st.error("surger expects one label")
        return Surger(args[0])
    if kw == "relabel":
        if len(args) != 2:
            raise st.error("relabel expects: relabel <old> <new>")
        return Relabel(args[0], args[1])
    raise st.error(f"not a move: {kw}")


def parse_script(text: str) -> Script:
    """Start diagram (comp/lk/chain/dot/l0/meridian) followed by moves."""
    doc = parse_document(text)
    names = {}
    for st in doc.statements("meridian"):
        if len(st.args) != 2:
            raise st.error("meridian expects: meridian <label> <symbol>")
        names[st.args[0]] = st.args[1]
    dotted, l0 = [], []
    for st in doc.statements("dot") + doc.statements("l0") + doc.statements("meridian"):
        for k, lab in enumerate(st.args[:1] if st.keyword == "meridian" else st.args):
            if lab not in doc.link.labels:
                raise st.error(f"unknown component {lab!r}", k)
        if st.keyword != "meridian":
            (dotted if st.keyword == "dot" else l0).extend(st.args)
    moves = tuple(parse_move(st) for st in doc.extras if st.keyword in MOVE_KEYWORDS)
    start = TrackedLink.start(doc.link, names, dotted, l0)
    return Script(start, moves, doc)


def run_script(start: TrackedLink | Script, moves: Sequence[Move] | None = None, trace: list | None = None) -> TrackedLink:
    """Apply moves in order, re-verifying the tracked classes after each one."""
    if isinstance(start, Script):
        moves = start.moves if moves is None else moves
        start = start.start
    state = start
    state.check()
    for step, move in enumerate(moves or (), start=1):
        try:
            state = state.apply(move)
            state.check()
        except (MoveError, ValueError) as exc:
            msg = str(exc)
            raise MoveError(f"{move}: {msg}", step) from exc
        if trace is not None:
            trace.append((step, move, state))
    return state
