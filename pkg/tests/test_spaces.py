"""Normed spaces: orthogonalization, distance, quotients, duals, lattices."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from ultranorm import (Lattice, NormedSpace, PadicRationals, PreconditionError,
                       TrivialRationals, choose_laurent_base,
                       distance_to_subspace, dual_norm, lattice_from_norm,
                       norm_attaining_lift, norm_from_lattice,
                       orthogonalize_flag, quotient_norm, scalar_extension)


def F(x, y=1):
    return Fraction(x, y)


def standard(field, dim):
    return NormedSpace.standard(field, dim)


def weighted(field, weights):
    dim = len(weights)
    basis = [[F(1) if i == j else F(0) for j in range(dim)] for i in range(dim)]
    return NormedSpace(field, basis, [field.magnitude(w) for w in weights])


class TestNorm:
    def test_sup_norm_on_standard_basis(self):
        Q2 = PadicRationals(2)
        space = standard(Q2, 2)
        assert space.norm([F(6), F(1)]).value() == 1
        assert space.norm([F(4), F(8)]).value() == F(1, 4)
        assert space.norm([F(0), F(0)]).is_zero

    def test_norm_in_skew_basis(self):
        Q2 = PadicRationals(2)
        space = NormedSpace(Q2, [[F(1), F(1)], [F(0), F(2)]],
                            [Q2.one_magnitude(), Q2.one_magnitude()])
        # columns (1,0) and (1,2); (0,1) = -1/2*(1,0) + 1/2*(1,2)
        assert space.norm([F(0), F(1)]).value() == 2

    def test_value_set_discrete(self):
        Q2 = PadicRationals(2)
        space = weighted(Q2, [F(1), F(3)])
        vals = space.norm_value_set()
        qs = sorted(v.q for v in vals if not v.is_zero)
        assert qs == [F(1), F(3)]

    def test_value_set_trivial_includes_zero(self):
        K = TrivialRationals()
        space = weighted(K, [F(1), F(2)])
        vals = sorted(v.value() for v in space.norm_value_set())
        assert vals == [F(0), F(1), F(2)]


class TestOrthogonalizeFlag:
    def test_frozen_example(self):
        Q2 = PadicRationals(2)
        space = standard(Q2, 2)
        g, norms, pivots = orthogonalize_flag(space, [[F(6), F(0)],
                                                      [F(2), F(1)]])
        assert [w.value() for w in norms] == [F(1, 2), F(1)]
        assert g[0] == [F(6), F(0)]

    def test_flag_preserved_and_orthogonal(self):
        rng = random.Random(11)
        for p in (2, 3, 5):
            field = PadicRationals(p)
            for _ in range(10):
                dim = rng.randint(1, 4)
                space = weighted(field, [F(p) ** rng.randint(-1, 1)
                                         for _ in range(dim)])
                vecs = [[F(rng.randint(-6, 6)) for _ in range(dim)]
                        for _ in range(dim)]
                import ultranorm.linalg as lg
                if lg.rank([[Fraction(x) for x in v] for v in vecs]) < dim:
                    continue
                g, norms, _ = orthogonalize_flag(space, vecs)
                # same flag: span(v_1..v_k) == span(g_1..g_k)
                for k in range(1, dim + 1):
                    assert lg.rank(vecs[:k] + g[:k]) == k
                # orthogonality on random coefficients
                for _ in range(20):
                    coeffs = [F(rng.randint(-8, 8)) for _ in range(dim)]
                    v = [sum(c * gi[i] for c, gi in zip(coeffs, g))
                         for i in range(dim)]
                    expect = max((field.abs(c) * w for c, w in
                                  zip(coeffs, norms)), default=None)
                    assert space.norm(v) == expect


class TestDistance:
    def test_frozen_padic_example(self):
        Q2 = PadicRationals(2)
        space = standard(Q2, 2)
        dist, closest = distance_to_subspace(space, [F(2), F(1)],
                                             [[F(1), F(0)]])
        assert dist.value() == 1
        assert closest == [F(2), F(0)]

    def test_frozen_trivial_example(self):
        K = TrivialRationals()
        space = standard(K, 2)
        dist, closest = distance_to_subspace(space, [F(2), F(1)],
                                             [[F(1), F(0)]])
        assert dist.value() == 1

    def test_minimizer_is_in_subspace_and_attains(self):
        Q3 = PadicRationals(3)
        space = weighted(Q3, [F(1), F(3), F(1, 3)])
        x = [F(2), F(5), F(7)]
        W = [[F(1), F(0), F(1)], [F(0), F(1), F(2)]]
        dist, closest = distance_to_subspace(space, x, W)
        import ultranorm.linalg as lg
        coords = lg.solve([[Fraction(W[j][i]) for j in range(2)]
                           for i in range(3)], closest)
        assert coords is not None
        diff = [a - b for a, b in zip(x, closest)]
        assert space.norm(diff) == dist


class TestQuotient:
    def test_frozen_example(self):
        Q2 = PadicRationals(2)
        space = weighted(Q2, [F(1), F(1, 4)])
        quo, lifts = quotient_norm(space, [[F(1), F(1)]])
        assert quo.dim == 1
        assert quo.norm([F(1)]).value() == F(1, 4)
        assert lifts[0] in ([F(0), F(1)], [F(1), F(0)])
        assert space.norm(lifts[0]) == quo.norm([F(1)])

    def test_lift_attains_quotient_norm(self):
        rng = random.Random(5)
        Q3 = PadicRationals(3)
        for _ in range(20):
            dim = rng.randint(2, 4)
            space = weighted(Q3, [F(3) ** rng.randint(-1, 1)
                                  for _ in range(dim)])
            surj = [[F(rng.randint(-4, 4)) for _ in range(dim)]]
            import ultranorm.linalg as lg
            if lg.rank([[Fraction(x) for x in r] for r in surj]) < 1:
                continue
            quo, _ = quotient_norm(space, surj)
            target = [F(rng.randint(-5, 5))]
            if all(t == 0 for t in target):
                continue
            lift = norm_attaining_lift(space, surj, target)
            image = [sum(surj[0][i] * lift[i] for i in range(dim))]
            assert image == target
            assert space.norm(lift) == quo.norm(target)
            # random coset samples never beat the lift
            ker = lg.kernel_basis([[Fraction(x) for x in r] for r in surj])
            for _ in range(20):
                coeffs = [F(rng.randint(-6, 6)) for _ in ker]
                k = [sum(c * kv[i] for c, kv in zip(coeffs, ker))
                     for i in range(dim)]
                other = [a + b for a, b in zip(lift, k)]
                assert space.norm(other) >= space.norm(lift)


class TestDual:
    def test_frozen_example(self):
        Q2 = PadicRationals(2)
        space = weighted(Q2, [F(1), F(2)])
        dual = dual_norm(space)
        assert [w.value() for w in dual.weights] == [F(1), F(1, 2)]

    def test_double_dual_isometry(self):
        rng = random.Random(3)
        Q5 = PadicRationals(5)
        for _ in range(20):
            dim = rng.randint(1, 4)
            space = weighted(Q5, [F(5) ** rng.randint(-2, 2)
                                  for _ in range(dim)])
            dd = dual_norm(dual_norm(space))
            for _ in range(10):
                v = [F(rng.randint(-9, 9)) for _ in range(dim)]
                assert space.norm(v) == dd.norm(v)


class TestLattice:
    def test_frozen_round_trip(self):
        Q2 = PadicRationals(2)
        space = weighted(Q2, [F(1), F(2)])
        lat = lattice_from_norm(space)
        cols = lat.columns()
        assert cols == [[F(1), F(0)], [F(0), F(2)]]
        back = norm_from_lattice(lat)
        assert [w.value() for w in back.weights] == [F(1), F(1)]

    def test_canonical_form_is_basis_independent(self):
        Q2 = PadicRationals(2)
        a = Lattice.from_columns(Q2, [[F(1), F(0)], [F(0), F(2)]])
        b = Lattice.from_columns(Q2, [[F(1), F(0)], [F(2), F(2)]])
        # second set spans the same Z_(2)-lattice:
        # (1,2) = (1,0) + (0,2); (0,2) = (1,2) - (1,0)
        assert a == b

    def test_sandwich_strict(self):
        rng = random.Random(9)
        for p in (2, 3, 5):
            field = PadicRationals(p)
            for _ in range(10):
                dim = rng.randint(1, 3)
                space = weighted(field, [F(p) ** rng.randint(-1, 1)
                                         * (1 if rng.random() < 0.5
                                            else F(1))
                                         for _ in range(dim)])
                lat_norm = norm_from_lattice(lattice_from_norm(space))
                for _ in range(20):
                    v = [F(rng.randint(-9, 9)) for _ in range(dim)]
                    if all(x == 0 for x in v):
                        continue
                    base = space.norm(v).value()
                    rounded = lat_norm.norm(v).value()
                    assert base <= rounded < p * base


class TestScalarExtension:
    def test_extension_preserves_base_norms(self):
        from ultranorm import LaurentRationals
        K = TrivialRationals()
        space = weighted(K, [F(1), F(2)])
        base = choose_laurent_base([w.value() for w in
                                    space.norm_value_set()
                                    if not w.is_zero] + [F(1)])
        ext = scalar_extension(space, LaurentRationals(base))
        for v in ([F(1), F(0)], [F(0), F(1)], [F(3), F(5)]):
            ev = [ext.field.from_rational(x) for x in v]
            assert ext.norm(ev).value() == space.norm(v).value()
