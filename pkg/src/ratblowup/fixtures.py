"""Fixture diagrams shipped as jinja2 templates of the link text format.

Each template is rendered with ``n`` and parsed.  Besides link statements a
fixture may carry:

    rot <label> <int>             rotation number
    l0 <label>...                 surgered 1-handles
    dot <label>...                dotted circles (1-handles)
    front <label> w lp lm rp rm h [b]
    meridian <label> <symbol>     name of the meridian class
    prefer <label>                reporting generator for cyclic groups
    spin <name> <label>...        named characteristic sublink
    gamma <spin> <coeff>          Gamma value as a multiple of the preferred generator
    stated <spin> <coeff>         alternative stated value, reported when it differs
    gammasum <spin> <label>:<c>...  stated combination of meridians
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import jinja2

from .gamma import GammaEntry, GammaResult, SteinSurgeryDiagram
from .homology import H1Presentation, boundary_h1
from .kirby import MOVE_KEYWORDS, Script, TrackedLink, parse_move
from .legendrian import FrontData, FrontError
from .links import Document, FramedLink, ParseError, Statement, parse_document
from .spin import SpinStructure, is_characteristic

__all__ = ["Fixture", "FixtureError", "FIXTURE_NAMES", "render", "load", "load_script", "fixture_dir"]

FIXTURE_NAMES = ("bn", "bn_dotted", "bn_handles", "cn", "lens", "bn_to_lens", "bn_to_cn")
SPACES = {"bn": "bn", "cn": "cn", "lens": "lens"}

_override: Path | None = None


class FixtureError(ValueError):
    pass


def fixture_dir() -> Path:
    if _override is not None:
        return _override
    env = os.environ.get("RATBLOWUP_FIXTURES")
    return Path(env) if env else Path(__file__).with_name("data")


def set_fixture_dir(path: str | os.PathLike | None) -> None:
    global _override
    _override = Path(path) if path else None


def render(name: str, n: int) -> str:
    if n < 2:
        raise FixtureError(f"n must be at least 2, got {n}")
    env = jinja2.Environment(
        loader=jinja2.FileSystemLoader(str(fixture_dir())),
        undefined=jinja2.StrictUndefined,
        keep_trailing_newline=True,
    )
    try:
        template = env.get_template(f"{name}.j2")
    except jinja2.TemplateNotFound:
        raise FixtureError(f"no fixture named {name!r} in {fixture_dir()}") from None
    return template.render(n=n)


@dataclass
class Fixture:
    name: str
    n: int
    document: Document
    meridians: dict[str, str] = field(default_factory=dict)
    preferred: str | None = None
    dotted: tuple[str, ...] = ()
    l0: tuple[str, ...] = ()
    rot: dict[str, int] = field(default_factory=dict)
    fronts: dict[str, FrontData] = field(default_factory=dict)
    spins: dict[str, SpinStructure] = field(default_factory=dict)
    gamma: dict[str, int] = field(default_factory=dict)
    stated: dict[str, int] = field(default_factory=dict)
    gammasums: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def link(self) -> FramedLink:
        return self.document.link

    def presentation(self) -> H1Presentation:
        return boundary_h1(self.link, self.meridians)

    def diagram(self) -> SteinSurgeryDiagram:
        return SteinSurgeryDiagram(self.link, self.rot, frozenset(self.l0), self.fronts, self.meridians)

    def spin_names(self) -> dict[SpinStructure, str]:
        return {s: name for name, s in self.spins.items()}

    def gamma_result(self, presentation: H1Presentation | None = None) -> GammaResult:
        """Gamma values given as data in the fixture (``gamma`` lines)."""
        p = presentation or self.presentation()
        if self.preferred is None:
            raise FixtureError(f"{self.name}: no preferred generator")
        g = p.gen(self.preferred)
        entries = tuple(
            GammaEntry(name, self.spins.get(name), (g * c).reduced()) for name, c in self.gamma.items()
        )
        return GammaResult(p, entries, self.preferred)

    def symbol(self, label: str) -> str:
        return self.meridians.get(label, label)


def _labels_known(doc: Document, st: Statement, labels, first_arg: int = 0) -> None:
    for k, lab in enumerate(labels, start=first_arg):
        if lab not in doc.link.labels:
            raise st.error(f"unknown component {lab!r}", k)


def interpret(name: str, n: int, text: str) -> Fixture:
    doc = parse_document(text)
    fx = Fixture(name, n, doc)
    for st in doc.extras:
        kw, args = st.keyword, st.args
        if kw == "meridian":
            if len(args) != 2:
                raise st.error("meridian expects: meridian <label> <symbol>")
            _labels_known(doc, st, args[:1])
            fx.meridians[args[0]] = args[1]
        elif kw == "prefer":
            _labels_known(doc, st, args)
            fx.preferred = args[0]
        elif kw == "dot":
            _labels_known(doc, st, args)
            fx.dotted += tuple(args)
        elif kw == "l0":
            _labels_known(doc, st, args)
            fx.l0 += tuple(args)
        elif kw == "rot":
            if len(args) != 2:
                raise st.error("rot expects: rot <label> <int>")
            _labels_known(doc, st, args[:1])
            fx.rot[args[0]] = st.int_arg(1)
        elif kw == "front":
            _labels_known(doc, st, args[:1])
            try:
                fx.fronts[args[0]] = FrontData.parse([st.int_arg(k) for k in range(1, len(args))])
            except FrontError as exc:
                raise st.error(str(exc)) from None
        elif kw == "spin":
            if not args:
                raise st.error("spin expects a name")
            _labels_known(doc, st, args[1:], 1)
            fx.spins[args[0]] = SpinStructure.of(doc.link, args[1:])
        elif kw in ("gamma", "stated"):
            if len(args) != 2:
                raise st.error(f"{kw} expects: {kw} <spin> <int>")
            getattr(fx, kw)[args[0]] = st.int_arg(1)
        elif kw == "gammasum":
            combo = {}
            for k, tok in enumerate(args[1:], start=1):
                lab, _, c = tok.partition(":")
                _labels_known(doc, st, [lab], k)
                try:
                    combo[lab] = combo.get(lab, 0) + int(c)
                except ValueError:
                    raise st.error(f"bad coefficient in {tok!r}", k) from None
            fx.gammasums[args[0]] = combo
        elif kw in MOVE_KEYWORDS:
            pass
        else:
            raise st.error(f"statement {kw!r} is not meaningful in a fixture")
    for sname in list(fx.gamma) + list(fx.stated) + list(fx.gammasums):
        if sname not in fx.spins:
            raise FixtureError(f"{name}: Gamma data for undeclared spin structure {sname!r}")
    for sname, s in fx.spins.items():
        if not is_characteristic(fx.link, s.members):
            raise FixtureError(f"{name}: spin {sname} = {s} is not characteristic")
    return fx


def load(name: str, n: int) -> Fixture:
    return interpret(name, n, render(name, n))


def load_script(name: str, n: int) -> Script:
    fx = load(name, n)
    start = TrackedLink.start(fx.link, fx.meridians, fx.dotted, fx.l0)
    moves = tuple(parse_move(st) for st in fx.document.extras if st.keyword in MOVE_KEYWORDS)
    return Script(start, moves, fx.document)


def space_fixture(space: str, n: int) -> Fixture:
    if space not in SPACES:
        raise FixtureError(f"unknown space {space!r}; choose from {', '.join(SPACES)}")
    return load(SPACES[space], n)


__all__ += ["interpret", "set_fixture_dir", "space_fixture", "SPACES", "ParseError"]
