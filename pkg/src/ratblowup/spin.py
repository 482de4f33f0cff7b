"""Spin structures on surgered links as characteristic sublinks.

A sublink S is characteristic when lk(K, S) = lk(K, K) mod 2 for every
component K, where lk(K, K) is the framing.  The set of solutions is an
affine space over GF(2) of dimension dim ker(Q mod 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

from .homology import GeneratorMap, GroupElement
from .links import FramedLink

__all__ = [
    "SpinStructure",
    "SpinMatchResult",
    "InconsistentSpinSystem",
    "characteristic_sublinks",
    "is_characteristic",
    "match_spins",
]


class InconsistentSpinSystem(RuntimeError):
    """The mod-2 system has no solution; never happens for a symmetric matrix."""


@dataclass(frozen=True)
class SpinStructure:
    members: tuple[str, ...]

    def __str__(self):
        return "{" + ", ".join(self.members) + "}"

    def indicator(self, link: FramedLink) -> list[int]:
        return [int(lab in self.members) for lab in link.labels]

    @classmethod
    def of(cls, link: FramedLink, members: Iterable[str]) -> "SpinStructure":
        members = set(members)
        unknown = members - set(link.labels)
        if unknown:
            raise ValueError(f"unknown components {sorted(unknown)}")
        return cls(tuple(lab for lab in link.labels if lab in members))


def is_characteristic(link: FramedLink, members: Iterable[str]) -> bool:
    """framing(K) = lk(K, S) mod 2 for every K, with lk(K, K) = framing(K)."""
    members = set(members)
    return all(
        (link.lk_with(lab, {m: 1 for m in members}) - link.framing(lab)) % 2 == 0
        for lab in link.labels
    )


def _solve_gf2(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[list[int]]:
    """All solutions of A x = b over GF(2), lexicographically ordered."""
    n = len(b)
    rows = [[v & 1 for v in A[i]] + [b[i] & 1] for i in range(n)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, n) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(n):
            if i != r and rows[i][c]:
                rows[i] = [a ^ bb for a, bb in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][n] for i in range(r, n)):
        raise InconsistentSpinSystem("no characteristic sublink exists")
    free = [c for c in range(n) if c not in pivots]
    out = []
    for choice in product((0, 1), repeat=len(free)):
        x = [0] * n
        for c, v in zip(free, choice):
            x[c] = v
        for i, c in enumerate(pivots):
            x[c] = rows[i][n] ^ (sum(rows[i][f] & x[f] for f in free) & 1)
        out.append(x)
    out.sort()
    return out


def characteristic_sublinks(link: FramedLink) -> list[SpinStructure]:
    """Characteristic sublinks in lexicographic order of their indicator vectors."""
    # lk(K_i, S) counts K_i itself with its framing, so the system is Q x = diag(Q).
    A = link.matrix
    b = link.framings
    sols = _solve_gf2(A, b)
    return [SpinStructure(tuple(lab for lab, v in zip(link.labels, x) if v)) for x in sols]


@dataclass(frozen=True)
class SpinMatchResult:
    status: str  # "ok" | "ambiguous" | "failed"
    pairs: tuple[tuple[str, str], ...]
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def __str__(self):
        body = ", ".join(f"{a}↔{b}" for a, b in self.pairs)
        return f"{self.status}: {body}" + (f" ({self.detail})" if self.detail else "")


def match_spins(
    src_gamma: Mapping[str, GroupElement],
    dst_gamma: Mapping[str, GroupElement],
    iso: GeneratorMap,
    expected: Iterable[tuple[str, str]] | None = None,
) -> SpinMatchResult:
    """Pair spin structures whose Gamma values correspond under ``iso``.

    Keys are spin-structure names, values the Gamma classes in the source
    and target presentations.  A source spin structure pairs with the unique
    target whose Gamma equals the image of its own.  Two targets with the
    same value make the pairing ambiguous; that is reported, never guessed.
    With ``expected`` the pairing must also agree with the given name pairs.
    """
    pairs = []
    used = set()
    for s_name, value in src_gamma.items():
        img = iso.apply(value)
        hits = [t for t, g in dst_gamma.items() if g == img]
        if len(hits) > 1:
            return SpinMatchResult(
                "ambiguous", tuple(pairs), f"{s_name} matches {', '.join(hits)}"
            )
        if not hits:
            return SpinMatchResult("failed", tuple(pairs), f"no target Gamma equals the image of {s_name}")
        if hits[0] in used:
            return SpinMatchResult("failed", tuple(pairs), f"{hits[0]} is hit twice")
        used.add(hits[0])
        pairs.append((s_name, hits[0]))
    if len(pairs) != len(dst_gamma):
        return SpinMatchResult("failed", tuple(pairs), "spin structure counts differ")
    if expected is not None:
        want = sorted(tuple(p) for p in expected)
        if sorted(pairs) != want:
            return SpinMatchResult(
                "failed", tuple(pairs), f"pairing differs from expected {want}"
            )
    return SpinMatchResult("ok", tuple(pairs))
