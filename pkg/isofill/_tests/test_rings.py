from fractions import Fraction
import random

import pytest

from isofill.errors import ConfigurationError
from isofill.rings import (
    NormKind,
    RingKind,
    format_coefficient,
    make_ring,
    norm_of,
    parse_coefficient,
    random_coefficient,
)

RING_SPECS = ["Z:abs", "Z:disc", "Q:abs", "Q:disc", "Zmod2:disc", "Zmod6:disc"]


@pytest.mark.parametrize("spec", RING_SPECS)
def test_spec_round_trip(spec):
    assert make_ring(spec).spec == spec


def test_make_ring_parts():
    ring = make_ring("Zmod", "disc", 5)
    assert ring.ring_kind == RingKind.INTEGERS_MOD
    assert ring.norm_kind == NormKind.DISCRETE
    assert ring.m == 5
    assert make_ring(ring) is ring


@pytest.mark.parametrize("spec", ["Zmod5:abs", "Zmod1:disc", "R:abs", "Z", "Q:euclid"])
def test_unsupported_rings(spec):
    with pytest.raises(ConfigurationError):
        make_ring(spec)


@pytest.mark.parametrize("spec", RING_SPECS)
def test_norm_axioms(spec):
    ring = make_ring(spec)
    rng = random.Random(7)
    for _ in range(10_000):
        r = random_coefficient(ring, rng)
        s = random_coefficient(ring, rng)
        assert (ring.norm(r) == 0) == ring.is_zero(r)
        assert ring.norm(ring.neg(r)) == ring.norm(r)
        assert ring.norm(ring.add(r, s)) <= ring.norm(r) + ring.norm(s)
        assert ring.norm(ring.mul(r, s)) <= ring.norm(r) * ring.norm(s)


def test_discrete_norm_is_indicator():
    ring = make_ring("Q:disc")
    assert ring.norm(Fraction(-7, 3)) == 1
    assert ring.norm(Fraction(0)) == 0


def test_coerce():
    assert make_ring("Zmod5:disc").coerce(-1) == 4
    assert make_ring("Q:abs").coerce(3) == Fraction(3)
    with pytest.raises(ConfigurationError):
        make_ring("Z:abs").coerce(Fraction(1, 2))
    with pytest.raises(ConfigurationError):
        make_ring("Z:abs").coerce(True)


def test_coefficient_text():
    q = make_ring("Q:abs")
    assert parse_coefficient(q, "3/4") == Fraction(3, 4)
    assert format_coefficient(q, Fraction(-6, 8)) == "-3/4"
    assert parse_coefficient(make_ring("Zmod3:disc"), "7") == 1
    assert norm_of(make_ring("Z:abs"), -4) == 4
    with pytest.raises(ConfigurationError):
        parse_coefficient(q, "three")
