"""Coefficient rings paired with a norm.

Coefficients are plain exact Python values: ``int`` for the integers and for
residues mod m, ``fractions.Fraction`` for the rationals.
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
import random
import re
from typing import Optional, Union

from isofill.errors import ConfigurationError

logger = logging.getLogger("isofill.rings")

Coefficient = Union[int, Fraction]

_RING_SPEC = re.compile(r"^(Z|Q|Zmod(\d+)):(abs|disc)$")


class RingKind(str, Enum):
    INTEGERS = "Z"
    RATIONALS = "Q"
    INTEGERS_MOD = "Zmod"


class NormKind(str, Enum):
    ABSOLUTE = "abs"
    DISCRETE = "disc"


@dataclass(frozen=True)
class NormedRing:
    ring_kind: RingKind
    norm_kind: NormKind
    m: Optional[int] = None

    def __post_init__(self):
        if self.ring_kind == RingKind.INTEGERS_MOD:
            if self.m is None or self.m < 2:
                raise ConfigurationError(f"integers mod m need m >= 2, got {self.m}")
            if self.norm_kind == NormKind.ABSOLUTE:
                raise ConfigurationError(
                    f"absolute norm is not defined on Zmod{self.m}: it is not a subring of C"
                )
        elif self.m is not None:
            raise ConfigurationError(f"modulus given for {self.ring_kind.value}")

    @property
    def spec(self) -> str:
        kind = f"Zmod{self.m}" if self.ring_kind == RingKind.INTEGERS_MOD else self.ring_kind.value
        return f"{kind}:{self.norm_kind.value}"

    @property
    def is_discrete(self) -> bool:
        return self.norm_kind == NormKind.DISCRETE

    @property
    def zero(self) -> Coefficient:
        return Fraction(0) if self.ring_kind == RingKind.RATIONALS else 0

    @property
    def one(self) -> Coefficient:
        return Fraction(1) if self.ring_kind == RingKind.RATIONALS else 1

    def coerce(self, value) -> Coefficient:
        """Bring ``value`` into the ring's canonical representation."""
        if self.ring_kind == RingKind.RATIONALS:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ConfigurationError(f"{value} is not an element of {self.spec}")
            value = value.numerator
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{value!r} is not an element of {self.spec}")
        if self.ring_kind == RingKind.INTEGERS_MOD:
            return value % self.m
        return value

    def add(self, r: Coefficient, s: Coefficient) -> Coefficient:
        if self.ring_kind == RingKind.INTEGERS_MOD:
            return (r + s) % self.m
        return r + s

    def neg(self, r: Coefficient) -> Coefficient:
        if self.ring_kind == RingKind.INTEGERS_MOD:
            return (-r) % self.m
        return -r

    def sub(self, r: Coefficient, s: Coefficient) -> Coefficient:
        return self.add(r, self.neg(s))

    def mul(self, r: Coefficient, s: Coefficient) -> Coefficient:
        if self.ring_kind == RingKind.INTEGERS_MOD:
            return (r * s) % self.m
        return r * s

    def is_zero(self, r: Coefficient) -> bool:
        return r == 0

    def equal(self, r: Coefficient, s: Coefficient) -> bool:
        return self.is_zero(self.sub(r, s))

    def norm(self, r: Coefficient) -> Coefficient:
        if r == 0:
            return 0
        if self.norm_kind == NormKind.DISCRETE:
            return 1
        return abs(r)


def make_ring(spec: Union[str, NormedRing], norm_kind: Optional[str] = None, m: Optional[int] = None) -> NormedRing:
    """Build a NormedRing from a spec string such as ``"Zmod5:disc"``.

    Also accepts ``make_ring("Z", "abs")`` and ``make_ring("Zmod", "disc", 5)``.
    """
    if isinstance(spec, NormedRing):
        return spec
    if norm_kind is None:
        match = _RING_SPEC.match(spec.strip())
        if not match:
            raise ConfigurationError(
                f"unsupported ring spec {spec!r}; expected Z:abs, Z:disc, Q:abs, Q:disc or ZmodM:disc"
            )
        kind, modulus, norm_kind = match.groups()
        if modulus is not None:
            kind, m = "Zmod", int(modulus)
        spec = kind
    try:
        return NormedRing(RingKind(spec), NormKind(norm_kind), m)
    except ValueError as e:
        raise ConfigurationError(f"unsupported ring {spec!r} with norm {norm_kind!r}: {e}")


def norm_of(ring: NormedRing, r: Coefficient) -> Coefficient:
    return ring.norm(ring.coerce(r))


def parse_coefficient(ring: NormedRing, text) -> Coefficient:
    if isinstance(text, (int, Fraction)) and not isinstance(text, bool):
        return ring.coerce(text)
    try:
        value = Fraction(str(text).strip())
    except ValueError:
        raise ConfigurationError(f"cannot parse coefficient {text!r} for {ring.spec}")
    return ring.coerce(value)


def format_coefficient(ring: NormedRing, r: Coefficient) -> str:
    return str(ring.coerce(r))


def random_coefficient(ring: NormedRing, rng: random.Random, bound: int = 20) -> Coefficient:
    if ring.ring_kind == RingKind.INTEGERS_MOD:
        return rng.randrange(ring.m)
    numerator = rng.randint(-bound, bound)
    if ring.ring_kind == RingKind.RATIONALS:
        return Fraction(numerator, rng.randint(1, bound))
    return numerator
