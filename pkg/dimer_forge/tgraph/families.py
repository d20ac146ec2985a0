"""Small named T-graphs used by the verification commands and the tests."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from dimer_forge.config.schema import Config
from dimer_forge.tgraph.tgraph import TGraph, build_from_segments


def single_segment(config: Config | None = None) -> TGraph:
    return build_from_segments([((0, 0), (1, 0))], config=config)


def t_shape(config: Config | None = None) -> TGraph:
    """A horizontal segment with a vertical one teeing into it at a quarter of its length."""
    return build_from_segments([((0, 0), (4, 0)), ((1, 0), (1, 2))], config=config)


def triangle(config: Config | None = None) -> TGraph:
    return build_from_segments(
        [((0, 0), (1, 0)), ((1, 0), (0, 1)), ((0, 1), (0, 0))], config=config
    )


def cevian(config: Config | None = None) -> TGraph:
    """Triangle with apex (1, 2) and a segment from the apex down to (1, 0) on the base."""
    apex, left, right, foot = (1, 2), (0, 0), (3, 0), (1, 0)
    return build_from_segments(
        [(apex, left), (apex, right), (left, right), (apex, foot)], config=config
    )


def torus_cross(a: Any = Fraction(1, 2), b: Any = Fraction(1, 2),
                config: Config | None = None) -> TGraph:
    """Two horizontal and two vertical loops on the unit torus, offset by (a, b)."""
    a, b = Fraction(a), Fraction(b)
    if not (0 < a < 1 and 0 < b < 1):
        raise ValueError("offsets must lie strictly between 0 and 1")
    segments = [
        ((0, 0), (1, 0)),
        ((a, b), (a + 1, b)),
        ((0, b), (0, b + 1)),
        ((a, 0), (a, 1)),
    ]
    return build_from_segments(segments, ambient="torus", config=config)
