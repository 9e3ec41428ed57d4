"""Adelic norms, unit lattices, lambda invariants, quotient spaces."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from ultranorm import NormedSpace, PadicRationals
from ultranorm.adelic import (AdelicSpace, NormedLattice, arch_norm,
                              check_localization, finite_unit_lattice,
                              graded_lambda_table, lambda_Q, lambda_Z,
                              lambda_upper_bound, nakai_basis_search,
                              nakai_first_success, quotient_adelic,
                              support_unit)
from ultranorm.spaces import PreconditionError
import ultranorm.linalg as lg

F = Fraction


def diag_space(p, weights):
    field = PadicRationals(p)
    dim = len(weights)
    basis = [[F(1) if i == j else F(0) for j in range(dim)]
             for i in range(dim)]
    return NormedSpace(field, basis, [field.magnitude(w) for w in weights])


SUP2 = [[F(1), F(0)], [F(0), F(1)], [F(1), F(1)]]


class TestFiniteUnitLattice:
    def test_no_places_gives_integers(self):
        A = AdelicSpace(2, {}, SUP2)
        M = finite_unit_lattice(A)
        assert M.basis_columns == [[F(1), F(0)], [F(0), F(1)]]

    def test_weighted_place_frozen(self):
        # weight 1/2 on e_0 puts (1/2)e_0 inside the unit ball
        A = AdelicSpace(2, {2: diag_space(2, [F(1, 2), F(1)])}, SUP2)
        M = finite_unit_lattice(A)
        assert M.basis_columns == [[F(1, 2), F(0)], [F(0), F(1)]]

    def test_fractional_column_frozen(self):
        # weight 2 on e_1 shrinks the ball to 2 Z_(2) in that coordinate
        A = AdelicSpace(2, {2: diag_space(2, [F(1), F(2)])}, SUP2)
        M = finite_unit_lattice(A)
        assert M.basis_columns == [[F(1), F(0)], [F(0), F(2)]]

    def test_two_places(self):
        A = AdelicSpace(2, {2: diag_space(2, [F(1, 2), F(1)]),
                            3: diag_space(3, [F(1), F(3)])}, SUP2)
        M = finite_unit_lattice(A)
        assert M.basis_columns == [[F(1, 2), F(0)], [F(0), F(3)]]

    def test_localization_identities(self):
        rng = random.Random(7)
        for _ in range(20):
            r = rng.randint(1, 3)
            while True:
                funcs = [[F(rng.randint(-2, 2)) for _ in range(r)]
                         for _ in range(r + 1)]
                if lg.rank(funcs) == r:
                    break
            places = {}
            for p in (2, 3):
                if rng.random() < 0.6:
                    field = PadicRationals(p)
                    while True:
                        B = [[F(rng.randint(-2, 2)) for _ in range(r)]
                             for _ in range(r)]
                        if lg.rank(B) == r:
                            break
                    w = [field.magnitude(F(p) ** rng.randint(-1, 1))
                         for _ in range(r)]
                    places[p] = NormedSpace(field, B, w)
            A = AdelicSpace(r, places, funcs)
            M = finite_unit_lattice(A)
            for p in list(places) + [5]:
                assert check_localization(A, M, p)


class TestLambda:
    def test_integers_with_sup_norm(self):
        M = NormedLattice([[F(1), F(0)], [F(0), F(1)]], SUP2)
        assert lambda_Q(M) == 1
        assert lambda_Z(M) == 1

    def test_stretched_lattice(self):
        M = NormedLattice([[F(2), F(0)], [F(0), F(1)]], SUP2)
        assert lambda_Q(M) == 2
        assert lambda_Z(M) == 2

    def test_want_basis_returns_unimodular_basis(self):
        M = NormedLattice([[F(1), F(0)], [F(0), F(2)]], SUP2)
        val, basis = lambda_Z(M, want_basis=True)
        assert val == 2
        mat = [[basis[j][i] for j in range(2)] for i in range(2)]
        coords = [lg.solve([[c[i] for c in M.basis_columns]
                            for i in range(2)], v) for v in basis]
        det = coords[0][0] * coords[1][1] - coords[0][1] * coords[1][0]
        assert abs(det) == 1

    def test_sandwich_random(self):
        rng = random.Random(13)
        for _ in range(30):
            r = rng.randint(1, 4)
            while True:
                funcs = [[F(rng.randint(-2, 2)) for _ in range(r)]
                         for _ in range(r + 1)]
                if lg.rank(funcs) == r:
                    break
            cols = []
            while lg.rank([[c[i] for c in cols] for i in range(r)]
                          if cols else [[0] * r]) < r:
                cols = [[F(rng.randint(-3, 3), rng.choice((1, 1, 2)))
                         for _ in range(r)] for _ in range(r)]
            from ultranorm.adelic import _rational_hnf
            M = NormedLattice(_rational_hnf(cols), funcs)
            lq, lz = lambda_Q(M), lambda_Z(M)
            assert lq <= lz <= r * lq
            assert lz <= lambda_upper_bound(M)

    def test_brute_force_oracle_rank_two(self):
        # independent oracle: direct enumeration over a coordinate box
        rng = random.Random(21)
        for _ in range(6):
            funcs = [[F(rng.randint(-2, 2)) for _ in range(2)]
                     for _ in range(3)]
            if lg.rank(funcs) < 2:
                continue
            cols = [[F(rng.randint(-2, 2)) for _ in range(2)]
                    for _ in range(2)]
            if lg.rank(cols) < 2:
                continue
            from ultranorm.adelic import _rational_hnf
            M = NormedLattice(_rational_hnf([[c[i] for c in cols]
                                             for i in range(2)]), funcs)
            lq = lambda_Q(M)
            lz = lambda_Z(M)
            # oracle: scan all coordinate pairs in a generous box
            vals = {}
            for a, b in itertools.product(range(-6, 7), repeat=2):
                if (a, b) == (0, 0):
                    continue
                v = M.vector((a, b))
                vals[(a, b)] = arch_norm(funcs, v)
            best_q = None
            for (c1, c2) in itertools.combinations(vals, 2):
                m1 = [list(map(Fraction, c1)), list(map(Fraction, c2))]
                if lg.rank(m1) == 2:
                    cand = max(vals[c1], vals[c2])
                    if best_q is None or cand < best_q:
                        best_q = cand
            assert lq == best_q
            best_z = None
            for (c1, c2) in itertools.combinations(vals, 2):
                det = c1[0] * c2[1] - c1[1] * c2[0]
                if abs(det) == 1:
                    cand = max(vals[c1], vals[c2])
                    if best_z is None or cand < best_z:
                        best_z = cand
            assert lz == best_z

    def test_rank_bound_refusal(self):
        cols = [[F(1) if i == j else F(0) for j in range(9)]
                for i in range(9)]
        funcs = [[F(1) if i == j else F(0) for j in range(9)]
                 for i in range(9)]
        M = NormedLattice(cols, funcs)
        with pytest.raises(PreconditionError):
            lambda_Z(M)
        assert lambda_upper_bound(M) == 1


class TestSupportUnit:
    def test_products(self):
        assert support_unit([2, 3]) == 6
        assert support_unit([]) == 1
        assert support_unit([5]) == 5


class TestQuotient:
    def test_frozen_quotient(self):
        space = diag_space(2, [F(1), F(1, 4)])
        A = AdelicSpace(2, {2: space}, SUP2)
        Aq = quotient_adelic(A, [[F(1), F(1)]])
        assert Aq.dim == 1
        assert [w.value() for w in Aq.finite_places[2].weights] == [F(1, 4)]
        Mq = finite_unit_lattice(Aq)
        assert Mq.basis_columns == [[F(1, 4)]]

    def test_quotient_lattice_is_pushforward(self):
        rng = random.Random(17)
        for _ in range(10):
            r = rng.randint(2, 3)
            while True:
                funcs = [[F(rng.randint(-2, 2)) for _ in range(r)]
                         for _ in range(r + 1)]
                if lg.rank(funcs) == r:
                    break
            A = AdelicSpace(r, {}, funcs)
            f = [[F(rng.randint(-2, 2)) for _ in range(r)]]
            if lg.rank(f) < 1:
                continue
            Aq = quotient_adelic(A, f)
            Mq = finite_unit_lattice(Aq)
            # pushforward of Z^r under f
            from ultranorm.adelic import _rational_hnf
            push = _rational_hnf([[f[0][i]] for i in range(r)])
            assert Mq.basis_columns == push


class TestNakai:
    def family(self, c):
        out = {}
        for n in (1, 2, 3):
            r = n + 1
            s = c * F(1, 2) ** n
            funcs = [[(s if i == j else F(0)) for j in range(r)]
                     for i in range(r)]
            out[n] = AdelicSpace(r, {}, funcs)
        return out

    def test_unit_scale_succeeds_at_degree_one(self):
        n0, basis = nakai_first_success(self.family(F(1)), 3)
        assert n0 == 1
        assert sorted(basis) == [[F(0), F(1)], [F(1), F(0)]]

    def test_triple_scale_succeeds_at_degree_two(self):
        n0, basis = nakai_first_success(self.family(F(3)), 3)
        assert n0 == 2
        assert len(basis) == 3

    def test_search_returns_none_before_threshold(self):
        G = self.family(F(3))
        assert nakai_basis_search(G, 1) is None

    def test_graded_table(self):
        table = graded_lambda_table(self.family(F(1)), 3)
        assert [row["lambda_Z"] for row in table["rows"]] == [
            F(1, 2), F(1, 4), F(1, 8)]
        assert table["log_fit"] is not None
