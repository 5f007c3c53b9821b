"""Shared generators for the test suite."""

from __future__ import annotations

import random

from toric_periods.etale import BaseQuadratic, EtaleAlgebra, EtalePair, label_value

ETALE_SHAPES = (("1",), ("u",), ("p",), ("up",), ("1", "1"), ("1", "u"), ("u", "p"), ("1", "1", "1"), ("1", "u", "p"))


def random_base(p: int, rng: random.Random, field_only: bool = False, precision: int = 20) -> BaseQuadratic:
    labels = ("u", "p", "up") if field_only else ("1", "u", "p", "up")
    d = label_value(p, rng.choice(labels)) * rng.choice([1, 4, p * p])
    return BaseQuadratic(p, d, rng.choice([1, 2, p, -3]), precision)


def random_pair(p: int, rng: random.Random, shape=None, field_only: bool = False, precision: int = 20) -> EtalePair:
    shape = shape or rng.choice(ETALE_SHAPES)
    return EtalePair(EtaleAlgebra(p, shape, precision), random_base(p, rng, field_only, precision))


def random_lambda(pair: EtalePair, rng: random.Random):
    out = []
    for c in pair.components:
        F = c.field
        while True:
            x = F.make(rng.randint(-1, 2), [rng.randrange(1, F.p ** 6) for _ in range(F.degree)])
            if not x.is_zero():
                out.append(x)
                break
    return tuple(out)
