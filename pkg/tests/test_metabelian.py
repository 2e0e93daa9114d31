"""Tests for the four metabelian decision routes."""

import random
from fractions import Fraction

import pytest

from goh_atlas.freelie import generate_basis, structure_table
from goh_atlas.metabelian import (
    coefficient_dependence,
    is_metabelian,
    is_metabelian_algebra,
    translation_invariance,
)
from goh_atlas.normalform import realize_frame
from goh_atlas.polyfield import Frame, Poly, PolyVec, heisenberg_frame, martinet_frame

F = Fraction


def realized(rank, step):
    frame, maps = realize_frame(generate_basis(rank, step))
    return frame, maps


class TestFrameLevel:
    def test_heisenberg_true(self):
        v = is_metabelian(heisenberg_frame(), 4)
        assert v.metabelian and v.witness is None

    def test_f24_true(self):
        frame, _ = realized(2, 4)
        assert is_metabelian(frame, 4).metabelian

    def test_f25_false_with_witness(self):
        frame, _ = realized(2, 5)
        v = is_metabelian(frame, 5)
        assert not v.metabelian
        assert v.witness == ((1, 2), (1, 1, 2))
        assert v.nonzero_component is not None

    def test_f27_false(self):
        frame, _ = realized(2, 7)
        v = is_metabelian(frame, 7)
        assert not v.metabelian
        assert v.witness == ((1, 2), (1, 1, 2))

    def test_depth_validation(self):
        with pytest.raises(ValueError):
            is_metabelian(heisenberg_frame(), 3)

    def test_reorder_invariance(self):
        frame, _ = realized(2, 5)
        swapped = Frame([frame.fields[1], frame.fields[0]])
        assert is_metabelian(frame, 5).metabelian \
            == is_metabelian(swapped, 5).metabelian
        frame24, _ = realized(2, 4)
        swapped24 = Frame([frame24.fields[1], frame24.fields[0]])
        assert is_metabelian(swapped24, 4).metabelian

    def test_verdict_json(self):
        frame, _ = realized(2, 5)
        data = is_metabelian(frame, 5).to_json()
        assert data["metabelian"] is False and data["depth"] == 5
        assert data["witness"]["I"] == [1, 2]
        assert data["witness"]["J"] == [1, 1, 2]
        ok = is_metabelian(heisenberg_frame(), 4).to_json()
        assert ok["metabelian"] is True and "witness" not in ok


class TestAlgebraLevel:
    def test_f23_true(self):
        assert is_metabelian_algebra(structure_table(generate_basis(2, 3)))

    def test_f24_true(self):
        assert is_metabelian_algebra(structure_table(generate_basis(2, 4)))

    def test_f25_false(self):
        assert not is_metabelian_algebra(structure_table(generate_basis(2, 5)))

    def test_f27_false(self):
        assert not is_metabelian_algebra(structure_table(generate_basis(2, 7)))

    def test_abelian_true(self):
        assert is_metabelian_algebra(structure_table(generate_basis(3, 1)))


class TestCoefficientDependence:
    def test_f23_true(self):
        frame, _ = realized(2, 3)
        assert coefficient_dependence(frame)

    def test_martinet_true(self):
        assert coefficient_dependence(martinet_frame())

    def test_f25_false(self):
        frame, _ = realized(2, 5)
        assert not coefficient_dependence(frame)

    def test_requires_normal_form(self):
        bad = Frame([PolyVec([Poly.one(2), Poly.one(2)]),
                     PolyVec.coordinate(2, 1)])
        with pytest.raises(ValueError):
            coefficient_dependence(bad)


class TestTranslationInvariance:
    def test_f23_zero(self):
        frame, _ = realized(2, 3)
        rng = random.Random(31)
        samples = []
        for _ in range(6):
            x = [F(rng.randrange(-3, 4), rng.randrange(1, 4))
                 for _ in range(5)]
            tau = [F(rng.randrange(-3, 4), rng.randrange(1, 4))
                   for _ in range(3)]
            samples.append((x, tau))
        assert translation_invariance(frame, samples) == 0.0

    def test_zero_shift_trivial(self):
        frame, _ = realized(2, 5)
        x = [F(1)] * frame.n
        assert translation_invariance(frame, [(x, [F(0)] * (frame.n - 2))]) == 0.0

    def test_f25_positive(self):
        frame, _ = realized(2, 5)
        rng = random.Random(32)
        samples = []
        for _ in range(4):
            x = [F(rng.randrange(-2, 3), 2) for _ in range(frame.n)]
            tau = [F(rng.randrange(1, 3)) for _ in range(frame.n - 2)]
            samples.append((x, tau))
        assert translation_invariance(frame, samples) > 0.0


@pytest.mark.parametrize("step", [2, 3, 4, 5])
def test_route_equivalence(step):
    # all four decision routes must agree on the realized frames
    basis = generate_basis(2, step)
    frame, maps = realize_frame(basis)
    expected = step <= 4
    assert is_metabelian(frame, max(4, step)).metabelian is expected
    assert is_metabelian_algebra(maps.table) is expected
    assert coefficient_dependence(frame) is expected
    rng = random.Random(step)
    samples = []
    for _ in range(5):
        x = [F(rng.randrange(-2, 3), rng.randrange(1, 3))
             for _ in range(frame.n)]
        tau = [F(rng.randrange(-2, 3), rng.randrange(1, 3))
               for _ in range(frame.n - 2)]
        samples.append((x, tau))
    assert (translation_invariance(frame, samples) == 0.0) is expected
