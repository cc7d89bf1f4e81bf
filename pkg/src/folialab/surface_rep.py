"""Surface groups, their representations into PSL(2, R), and Euler numbers.

Generators of the genus-g surface group are numbered 1..2g in the order
a1, b1, a2, b2, ...; a negative letter is an inverse.  The relator is
``[a1, b1] ... [ag, bg]`` with ``[x, y] = x y x^-1 y^-1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .moebius import (
    GroupError,
    LiftedCircleMap,
    MoebiusElement,
    classify,
    hyperbolic_translation,
    lift_relator,
    rotation,
)

RELATOR_TOL = 1e-8


class Word(tuple):
    """A freely reduced word in signed generator indices."""

    def __new__(cls, letters: Iterable[int] = ()):
        out: list[int] = []
        for x in letters:
            x = int(x)
            if x == 0:
                raise ValueError("letter 0 is not a generator")
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return super().__new__(cls, out)

    @property
    def cyclically_reduced(self) -> bool:
        return len(self) < 2 or self[0] != -self[-1]

    def inverse(self) -> "Word":
        return Word(-x for x in reversed(self))

    def __mul__(self, other: Iterable[int]) -> "Word":  # type: ignore[override]
        return Word(tuple(self) + tuple(other))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(tuple(base) * abs(k))

    def cyclic_reduction(self) -> "Word":
        w = list(self)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        return Word(w)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"


def letter_name(x: int) -> str:
    i = abs(x) - 1
    name = f"{'ab'[i % 2]}{i // 2 + 1}"
    return name if x > 0 else name.upper()


def format_word(w: Sequence[int]) -> str:
    return " ".join(letter_name(x) for x in w) or "1"


def parse_word(text: str) -> Word:
    """Inverse of :func:`format_word`: ``"a1 B2"`` means a1 * b2^-1."""
    letters = []
    for tok in text.split():
        if tok == "1":
            continue
        kind, idx = tok[0], int(tok[1:])
        n = 2 * (idx - 1) + (1 if kind.lower() == "a" else 2)
        letters.append(n if kind.islower() else -n)
    return Word(letters)


def relator_word(genus: int) -> Word:
    letters: list[int] = []
    for i in range(genus):
        a, b = 2 * i + 1, 2 * i + 2
        letters += [a, b, -a, -b]
    return Word(letters)


@dataclass(frozen=True)
class Representation:
    genus: int
    gens: tuple[MoebiusElement, ...]
    label: str = ""
    relator_residual: float = field(init=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gens", tuple(self.gens))
        if self.genus < 2:
            raise ValueError(f"genus must be at least 2, got {self.genus}")
        if len(self.gens) != 2 * self.genus:
            raise ValueError(f"expected {2 * self.genus} generators, got {len(self.gens)}")
        residual = _evaluate(self.gens, relator_word(self.genus)).distance_to(
            MoebiusElement.identity())
        object.__setattr__(self, "relator_residual", residual)
        if residual >= RELATOR_TOL:
            raise GroupError(f"relator residual {residual:.3g} exceeds {RELATOR_TOL:g}")

    def image(self, letter: int) -> MoebiusElement:
        if not 1 <= abs(letter) <= len(self.gens):
            raise IndexError(f"letter {letter} out of range for genus {self.genus}")
        g = self.gens[abs(letter) - 1]
        return g if letter > 0 else g.inverse()

    def conjugate(self, h: MoebiusElement, label: str | None = None) -> "Representation":
        hi = h.inverse()
        return Representation(self.genus, tuple(h @ g @ hi for g in self.gens),
                              label if label is not None else f"conj({self.label})")

    def to_json(self) -> str:
        return json.dumps({
            "genus": self.genus,
            "generators": [[float(f"{e:.17g}") for e in g.entries()] for g in self.gens],
            "label": self.label,
        })

    @classmethod
    def from_json(cls, text: str) -> "Representation":
        data = json.loads(text)
        try:
            gens = tuple(MoebiusElement.from_entries(*map(float, g)) for g in data["generators"])
            return cls(int(data["genus"]), gens, str(data.get("label", "")))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"not a representation document: {exc}") from exc


def _evaluate(gens: Sequence[MoebiusElement], w: Iterable[int]) -> MoebiusElement:
    result = MoebiusElement.identity()
    for x in w:
        g = gens[abs(x) - 1]
        result = result @ (g if x > 0 else g.inverse())
    return result


def evaluate(rep: Representation, w: Iterable[int]) -> MoebiusElement:
    w = tuple(w)
    for x in w:
        if not 1 <= abs(x) <= len(rep.gens):
            raise IndexError(f"letter {x} out of range for genus {rep.genus}")
    return _evaluate(rep.gens, w)


# --- built-in families ---------------------------------------------------

# The regular octagon with angles pi/4 has inradius arccosh(cot(pi/8)) and
# opposite sides paired by translations through its center.  In terms of
# those pairings g0..g3 a standard symplectic basis is
#   a1 = g3^-1, b1 = g2, a2 = g1 g0^-1, b2 = g3^-1 g2 g1^-1.
BOLZA_INRADIUS = math.acosh(1.0 + math.sqrt(2.0))


def octagon_pairings() -> list[MoebiusElement]:
    t = hyperbolic_translation(2.0 * BOLZA_INRADIUS)
    return [rotation(k * math.pi / 8) @ t @ rotation(-k * math.pi / 8) for k in range(4)]


def bolza() -> Representation:
    g0, g1, g2, g3 = octagon_pairings()
    a1 = g3.inverse()
    b1 = g2
    a2 = g1 @ g0.inverse()
    b2 = g3.inverse() @ g2 @ g1.inverse()
    return Representation(2, (a1, b1, a2, b2), "bolza")


def trivial_rep(genus: int = 2) -> Representation:
    return Representation(genus, (MoebiusElement.identity(),) * (2 * genus), "trivial")


def free_quotient_rep(g1: MoebiusElement, g2: MoebiusElement) -> Representation:
    """Genus-2 representation a1, b1, a2, b2 -> g1, g2, g2, g1.

    The relator becomes [g1, g2][g2, g1] = 1 identically, so the images form
    an arbitrary two-generator group and the Euler number vanishes.
    """
    return Representation(2, (g1, g2, g2, g1), "free_quotient")


def rotation_rep(genus: int, angles: Sequence[float]) -> Representation:
    """All generators rotations about i (commuting, so the relator is exact)."""
    if len(angles) != 2 * genus:
        raise ValueError(f"expected {2 * genus} angles, got {len(angles)}")
    return Representation(genus, tuple(rotation(a) for a in angles),
                           "rotation:" + ",".join(repr(float(a)) for a in angles))


def twist(rep: Representation, k: int) -> Representation:
    """Precompose with the automorphism b1 -> b1 a1^k."""
    if k == 0:
        return rep
    gens = list(rep.gens)
    gens[1] = gens[1] @ (gens[0] ** k)
    return Representation(rep.genus, tuple(gens), f"twist({rep.label},{k})")


# --- Euler number --------------------------------------------------------

def euler_number(rep: Representation, offsets: Sequence[int] | None = None) -> int:
    """Integer translation of the lifted relator.

    ``offsets`` shifts the lift of each generator by an integer; the relator
    uses every generator once with each sign, so the answer is unchanged.
    """
    if rep.relator_residual >= RELATOR_TOL:
        raise GroupError("relator residual too large for an Euler number")
    offsets = offsets or [0] * len(rep.gens)
    lifts = [LiftedCircleMap(g, int(o)) for g, o in zip(rep.gens, offsets)]
    chain: list[LiftedCircleMap] = []
    for x in relator_word(rep.genus):
        lift = lifts[abs(x) - 1]
        chain.append(lift if x > 0 else lift.inverse())
    return lift_relator(chain)


def is_fuchsian_candidate(rep: Representation) -> bool:
    """Maximal Euler number, the necessary and sufficient condition for Fuchsian."""
    return abs(euler_number(rep)) == 2 * rep.genus - 2


def generator_kinds(rep: Representation) -> list:
    return [classify(g) for g in rep.gens]
