"""Parameter sets for every integral family.

Each class is a frozen dataclass holding the free parameters of one family
and exposing the derived products / sums used by its kernel.  Domain checks
live in :mod:`ellbeta.kernels.domain`; constructing an object only checks
shapes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Tuple, Union

import numpy as np

from ..special import OmegaTriple


def _ctuple(values) -> Tuple[complex, ...]:
    return tuple(complex(v) for v in values)


def _prod(values) -> complex:
    out = 1 + 0j
    for v in values:
        out *= v
    return out


class Family(str, enum.Enum):
    UNIVARIATE = "univariate"
    CN = "cn"
    AN = "an"
    AN_SYM = "an_sym"
    DN = "dn"
    CN_UNIT = "cn_unit"
    AN_UNIT = "an_unit"
    DN_UNIT = "dn_unit"
    CN_Q = "cn_q"
    AN_Q = "an_q"
    DN_Q = "dn_q"


class RootSystem(str, enum.Enum):
    CN = "Cn"
    AN = "An"
    DN = "Dn"


@dataclass(frozen=True)
class UnivariateParams:
    t: Tuple[complex, ...]

    family = Family.UNIVARIATE
    n = 1

    def __post_init__(self):
        object.__setattr__(self, "t", _ctuple(self.t))
        if len(self.t) != 5:
            raise ValueError(f"univariate kernel takes 5 parameters, got {len(self.t)}")

    @property
    def A(self) -> complex:
        return _prod(self.t)

    def scaled(self, index: int, factor: complex) -> "UnivariateParams":
        t = list(self.t)
        t[index] *= factor
        return replace(self, t=tuple(t))


@dataclass(frozen=True)
class CnParams:
    n: int
    t: Tuple[complex, ...]

    family = Family.CN

    def __post_init__(self):
        object.__setattr__(self, "t", _ctuple(self.t))
        if self.n < 1 or len(self.t) != 2 * self.n + 3:
            raise ValueError(f"C_n kernel with n={self.n} takes {2 * self.n + 3} parameters")

    @property
    def A(self) -> complex:
        return _prod(self.t)

    def scaled(self, index: int, factor: complex) -> "CnParams":
        t = list(self.t)
        t[index] *= factor
        return replace(self, t=tuple(t))


@dataclass(frozen=True)
class AnParams:
    n: int
    t: Tuple[complex, ...]
    s: Tuple[complex, ...]

    family = Family.AN

    def __post_init__(self):
        object.__setattr__(self, "t", _ctuple(self.t))
        object.__setattr__(self, "s", _ctuple(self.s))
        if self.n < 1 or len(self.t) != self.n + 1 or len(self.s) != self.n + 2:
            raise ValueError(f"A_n kernel with n={self.n} takes {self.n + 1} t's and {self.n + 2} s's")

    @property
    def T(self) -> complex:
        return _prod(self.t)

    @property
    def S(self) -> complex:
        return _prod(self.s)

    def scaled(self, index: int, factor: complex) -> "AnParams":
        t = list(self.t)
        t[index] *= factor
        return replace(self, t=tuple(t))


@dataclass(frozen=True)
class AnSymParams:
    """The t <-> s symmetric A_n form; balancing A S = p q is checked by the validator."""

    n: int
    t: Tuple[complex, ...]
    s: Tuple[complex, ...]

    family = Family.AN_SYM

    def __post_init__(self):
        object.__setattr__(self, "t", _ctuple(self.t))
        object.__setattr__(self, "s", _ctuple(self.s))
        if self.n < 1 or len(self.t) != self.n + 2 or len(self.s) != self.n + 2:
            raise ValueError(f"symmetric A_n kernel with n={self.n} takes {self.n + 2} t's and s's")

    @property
    def A(self) -> complex:
        return _prod(self.t)

    @property
    def S(self) -> complex:
        return _prod(self.s)


@dataclass(frozen=True)
class DnParams:
    n: int
    t: Tuple[complex, ...]
    s: Tuple[complex, ...]

    family = Family.DN

    def __post_init__(self):
        object.__setattr__(self, "t", _ctuple(self.t))
        object.__setattr__(self, "s", _ctuple(self.s))
        if self.n < 1 or len(self.t) != self.n or len(self.s) != self.n + 3:
            raise ValueError(f"D_n kernel with n={self.n} takes {self.n} t's and {self.n + 3} s's")

    @property
    def D(self) -> complex:
        return _prod(self.s)


def _unit_sizes(root: RootSystem, g, h):
    if root is RootSystem.CN:
        if len(h) != 0 or len(g) < 5 or len(g) % 2 == 0:
            raise ValueError("C_n family takes 2n+3 g's and no h's")
        return (len(g) - 3) // 2
    if root is RootSystem.AN:
        n = len(g) - 1
        if n < 1 or len(h) != n + 2:
            raise ValueError("A_n family takes n+1 g's and n+2 h's")
        return n
    n = len(h)
    if n < 1 or len(g) != n + 3:
        raise ValueError("D_n family takes n+3 g's and n h's")
    return n


@dataclass(frozen=True)
class _AdditiveParams:
    root: RootSystem
    g: Tuple[complex, ...]
    h: Tuple[complex, ...]
    w: OmegaTriple

    def __post_init__(self):
        object.__setattr__(self, "root", RootSystem(self.root))
        object.__setattr__(self, "g", _ctuple(self.g))
        object.__setattr__(self, "h", _ctuple(self.h))
        _unit_sizes(self.root, self.g, self.h)

    @property
    def n(self) -> int:
        return _unit_sizes(self.root, self.g, self.h)

    @property
    def F(self) -> complex:
        """Sum of the g's (written as the calligraphic A for C_n)."""
        return complex(math.fsum(x.real for x in self.g) + 1j * math.fsum(x.imag for x in self.g))

    @property
    def H(self) -> complex:
        return complex(math.fsum(x.real for x in self.h) + 1j * math.fsum(x.imag for x in self.h))

    def shifted(self, index: int, amount: complex):
        g = list(self.g)
        g[index] += amount
        return replace(self, g=tuple(g))


@dataclass(frozen=True)
class ModifiedParams(_AdditiveParams):
    """Parameters of the unit-circle kernels built from G(u; omega)."""

    @property
    def family(self) -> Family:
        return {RootSystem.CN: Family.CN_UNIT, RootSystem.AN: Family.AN_UNIT, RootSystem.DN: Family.DN_UNIT}[
            self.root
        ]

    def multiplicative(self):
        """t = e(-g/omega3), s = e(-h/omega3) as used after the modular substitution."""
        e = lambda x: complex(np.exp(-2j * np.pi * x / self.w.omega3))  # noqa: E731
        return tuple(e(x) for x in self.g), tuple(e(x) for x in self.h)


@dataclass(frozen=True)
class QReducedParams(_AdditiveParams):
    """Parameters of the line-integral kernels built from S(u; omega1, omega2)."""

    @property
    def family(self) -> Family:
        return {RootSystem.CN: Family.CN_Q, RootSystem.AN: Family.AN_Q, RootSystem.DN: Family.DN_Q}[self.root]


FamilyParams = Union[
    UnivariateParams, CnParams, AnParams, AnSymParams, DnParams, ModifiedParams, QReducedParams
]
