"""Thurston-Bennequin and rotation numbers from front-projection counts.

A front is stored only as the numbers the invariants need: the writhe,
the four cusp counts (left cusps pointing up/down, right cusps up/down),
the number of passes through 1-handles and, for square diagrams drawn on
the torus, the signed number of top-to-bottom crossings.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["FrontData", "FrontError", "tb", "rot", "stein_framing", "parity_ok"]


class FrontError(ValueError):
    pass


@dataclass(frozen=True)
class FrontData:
    writhe: int
    lam_plus: int
    lam_minus: int
    rho_plus: int
    rho_minus: int
    handle_crossings: int = 0
    top_bottom: int = 0

    def __post_init__(self):
        counts = (self.lam_plus, self.lam_minus, self.rho_plus, self.rho_minus, self.handle_crossings)
        if any(c < 0 for c in counts):
            raise FrontError(f"cusp and handle counts must be non-negative, got {counts}")
        if self.lam_plus + self.lam_minus != self.rho_plus + self.rho_minus:
            raise FrontError(
                "left and right cusps must alternate: "
                f"λ+ + λ- = {self.lam_plus + self.lam_minus}, "
                f"ρ+ + ρ- = {self.rho_plus + self.rho_minus}"
            )

    @property
    def left_cusps(self) -> int:
        return self.lam_plus + self.lam_minus

    @classmethod
    def parse(cls, fields) -> "FrontData":
        """From ``w lp lm rp rm h [b]``."""
        vals = [int(v) for v in fields]
        if len(vals) not in (6, 7):
            raise FrontError("front expects: w λ+ λ- ρ+ ρ- h [b]")
        return cls(*vals)

    def tb(self) -> int:
        return tb(self)

    def rot(self) -> int:
        return rot(self)


def tb(front: FrontData) -> int:
    return front.writhe - front.left_cusps


def rot(front: FrontData) -> int:
    # The two cusp formulas agree automatically once the cusps balance;
    # the check guards FrontData built around __post_init__.
    a = front.lam_minus - front.rho_plus
    if a != front.rho_minus - front.lam_plus:
        raise FrontError("inconsistent cusp data: λ- - ρ+ != ρ- - λ+")
    return a + front.top_bottom


def stein_framing(front: FrontData) -> int:
    return tb(front) - 1


def parity_ok(front: FrontData) -> bool:
    return (tb(front) + rot(front) + 1 - front.handle_crossings) % 2 == 0
