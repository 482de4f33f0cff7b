"""Gompf's Gamma invariant from a surgered Stein diagram.

For a Legendrian surgery diagram whose 1-handles have been replaced by
0-framed unknots L0, the class rho with

    <rho, alpha_i> = (rot(K_i) + lk(K_i, L0 + L(s))) / 2

restricts to the boundary as PD Gamma(xi, s) = sum_i <rho, alpha_i> mu_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .homology import GeneratorMap, GroupElement, H1Presentation, boundary_h1
from .legendrian import FrontData, rot as front_rot, stein_framing
from .links import FramedLink
from .spin import SpinMatchResult, SpinStructure, characteristic_sublinks, is_characteristic, match_spins

__all__ = [
    "GammaIntegralityError",
    "SteinSurgeryDiagram",
    "GammaEntry",
    "GammaResult",
    "GammaComparison",
    "rho_values",
    "gamma",
    "gamma_all",
    "compare_gamma",
]


class GammaIntegralityError(ArithmeticError):
    """rot(K) + lk(K, L0 + L(s)) is odd for some K."""


@dataclass(frozen=True)
class SteinSurgeryDiagram:
    link: FramedLink
    rot: Mapping[str, int]
    l0: frozenset = frozenset()
    fronts: Mapping[str, FrontData] = field(default_factory=dict)
    names: Mapping[str, str] = field(default_factory=dict)  # label -> meridian symbol

    def __post_init__(self):
        object.__setattr__(self, "l0", frozenset(self.l0))
        labels = set(self.link.labels)
        for lab in set(self.rot) | self.l0 | set(self.fronts):
            if lab not in labels:
                raise ValueError(f"unknown component {lab!r}")
        for lab in self.l0:
            if self.link.framing(lab) != 0:
                raise ValueError(f"L0 member {lab} must be 0-framed")
            if self.rot.get(lab, 0) != 0:
                raise ValueError(f"L0 member {lab} must have rot 0")
        for lab, front in self.fronts.items():
            if stein_framing(front) != self.link.framing(lab):
                raise ValueError(
                    f"{lab}: framing {self.link.framing(lab)} differs from tb - 1 = {stein_framing(front)}"
                )
            if lab in self.rot and front_rot(front) != self.rot[lab]:
                raise ValueError(f"{lab}: declared rot {self.rot[lab]} differs from front rot {front_rot(front)}")

    def rotation(self, label: str) -> int:
        if label in self.rot:
            return self.rot[label]
        if label in self.fronts:
            return front_rot(self.fronts[label])
        return 0

    def presentation(self) -> H1Presentation:
        return boundary_h1(self.link, self.names)

    def relabel(self, mapping: Mapping[str, str]) -> "SteinSurgeryDiagram":
        m = lambda lab: mapping.get(lab, lab)  # noqa: E731
        return SteinSurgeryDiagram(
            self.link.relabel(mapping),
            {m(k): v for k, v in self.rot.items()},
            frozenset(m(k) for k in self.l0),
            {m(k): v for k, v in self.fronts.items()},
            {m(k): v for k, v in self.names.items()},
        )

    def reorder(self, order: Sequence[str]) -> "SteinSurgeryDiagram":
        return SteinSurgeryDiagram(self.link.reorder(order), self.rot, self.l0, self.fronts, self.names)


def rho_values(diagram: SteinSurgeryDiagram, spin: SpinStructure | Iterable[str]) -> list[int]:
    """<rho, alpha_i> for every component, in link order."""
    link = diagram.link
    members = spin.members if isinstance(spin, SpinStructure) else tuple(spin)
    if not is_characteristic(link, members):
        raise ValueError(f"{{{', '.join(members)}}} is not a characteristic sublink")
    mult: dict[str, int] = {}
    for lab in list(diagram.l0) + list(members):
        mult[lab] = mult.get(lab, 0) + 1
    out = []
    for lab in link.labels:
        total = diagram.rotation(lab) + link.lk_with(lab, mult)
        if total % 2:
            raise GammaIntegralityError(
                f"rot({lab}) + lk({lab}, L0 + L(s)) = {total} is odd"
            )
        out.append(total // 2)
    return out


def gamma(
    diagram: SteinSurgeryDiagram,
    spin: SpinStructure | Iterable[str],
    presentation: H1Presentation | None = None,
) -> GroupElement:
    p = presentation or diagram.presentation()
    return p.element(rho_values(diagram, spin)).reduced()


@dataclass(frozen=True)
class GammaEntry:
    name: str
    spin: SpinStructure | None
    value: GroupElement


@dataclass(frozen=True)
class GammaResult:
    presentation: H1Presentation
    entries: tuple[GammaEntry, ...]
    generator: str | None = None  # preferred reporting generator (a label)

    def by_name(self) -> dict[str, GroupElement]:
        return {e.name: e.value for e in self.entries}

    def __getitem__(self, name: str) -> GroupElement:
        return self.by_name()[name]

    def coefficient(self, name: str) -> int:
        if self.generator is None:
            raise ValueError("no preferred generator")
        return self[name].coefficient(self.generator)

    def generator_symbol(self) -> str:
        return self.presentation.names.get(self.generator, self.generator)

    def coefficients(self) -> dict[str, int]:
        return {e.name: self.coefficient(e.name) for e in self.entries}


def gamma_all(
    diagram: SteinSurgeryDiagram,
    names: Mapping[SpinStructure, str] | None = None,
    generator: str | None = None,
    presentation: H1Presentation | None = None,
) -> GammaResult:
    """Gamma for every characteristic sublink, in enumeration order."""
    p = presentation or diagram.presentation()
    entries = []
    for s in characteristic_sublinks(diagram.link):
        name = (names or {}).get(s, str(s))
        entries.append(GammaEntry(name, s, gamma(diagram, s, p)))
    return GammaResult(p, tuple(entries), generator)


@dataclass(frozen=True)
class GammaComparison:
    rows: tuple[tuple[str, bool], ...]  # (spin of A, some spin of B has the image value)
    match: SpinMatchResult

    @property
    def ok(self) -> bool:
        return all(found for _, found in self.rows) and self.match.ok


def compare_gamma(
    a: GammaResult,
    b: GammaResult,
    iso: GeneratorMap,
    expected: Iterable[tuple[str, str]] | None = None,
) -> GammaComparison:
    """Compare Gamma data along iso: A's presentation -> B's presentation."""
    if iso.source is not a.presentation or iso.target is not b.presentation:
        raise ValueError("iso must map A's presentation to B's presentation")
    verdict = iso.verify()
    if not verdict:
        return GammaComparison((), SpinMatchResult("failed", (), f"map is {verdict.kind}"))
    targets = list(b.by_name().values())
    rows = tuple((e.name, any(iso.apply(e.value) == t for t in targets)) for e in a.entries)
    return GammaComparison(rows, match_spins(a.by_name(), b.by_name(), iso, expected))
