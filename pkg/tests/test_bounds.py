#!/usr/bin/env python3
"""
Tests for the determinant inequalities on generated instances: identity and
reduction cases, brute-force left-hand sides, proof quantities and errors.
"""

import math
import unittest
from functools import reduce

import numpy as np

from blockdet import bounds, logspace
from blockdet.block import flatten, khatri_rao_all, partition
from blockdet.dense import det_cofactor_oracle, det_lu, hadamard
from blockdet.errors import (
    BlockGridMismatch,
    DimensionMismatch,
    DomainError,
    EmptyFactorList,
    IndexOutOfRange,
    NegativeDiagonal,
    NonSquareBlocks,
    NotHermitian,
    NotPositiveDefinite,
)
from blockdet.gen import GenConfig, random_block_pd, random_block_psd_singular, random_pd
from blockdet.harness import report_discrepancy

REDUCTION_TOL = 1e-12


def pd(seed, dim, kind="real"):
    return random_pd(GenConfig(seed, dim=dim, cond_cap=1e3, scalar_kind=kind))


def block_pd(seed, n, q, kind="real"):
    return random_block_pd(GenConfig(seed, n=n, block_dim=q, cond_cap=1e3, scalar_kind=kind))


def unit(a):
    return partition(a, a.shape[0], 1, 1)


def block_identity(n, q):
    return partition(np.eye(n * q), n, q, q)


class TestClassicalInequalities(unittest.TestCase):

    def test_hadamard_identity_and_diagonal(self):
        self.assertEqual(bounds.hadamard_ineq(np.eye(3)).margin_log, 0.0)
        self.assertAlmostEqual(bounds.hadamard_ineq(np.diag([2.0, 5.0])).margin_log, 0.0, places=12)

    def test_hadamard_errors(self):
        with self.assertRaises(NotHermitian):
            bounds.hadamard_ineq([[1.0, 2.0], [0.0, 1.0]])
        with self.assertRaises(NegativeDiagonal):
            bounds.hadamard_ineq(np.diag([-1.0, 1.0]))

    def test_hadamard_singular_input(self):
        report = bounds.hadamard_ineq(np.diag([1.0, 0.0]))
        self.assertEqual(report.lhs_log, -math.inf)
        self.assertEqual(report.rhs_log, -math.inf)
        self.assertTrue(report.holds)

    def test_indefinite_input_rejected_not_treated_as_singular(self):
        indefinite = np.array([[1.0, 2.0], [2.0, 1.0]])
        cases = [
            lambda: bounds.hadamard_ineq(indefinite),
            lambda: bounds.fischer_ineq(indefinite, 1),
            lambda: bounds.oppenheim_ineq(indefinite, np.eye(2)),
            lambda: bounds.coro27_ineq([indefinite, np.eye(2)]),
        ]
        for i, evaluate in enumerate(cases):
            with self.subTest(case=i):
                with self.assertRaises(NotPositiveDefinite):
                    evaluate()
        rank_one = np.ones((3, 3))
        self.assertEqual(bounds.hadamard_ineq(rank_one).rhs_log, -math.inf)
        self.assertTrue(bounds.oppenheim_schur_ineq(rank_one, pd(40, 3)).holds)

    def test_fischer_block_diagonal_second_link_equality(self):
        a = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]])
        report = bounds.fischer_ineq(a, 2)
        self.assertAlmostEqual(report.links[1].margin_log, 0.0, places=12)
        self.assertTrue(report.verified)

    def test_fischer_identity_any_split(self):
        for split in (1, 2, 3):
            with self.subTest(split=split):
                report = bounds.fischer_ineq(np.eye(4), split)
                self.assertEqual(report.margin_log, 0.0)
                self.assertTrue(all(link.margin_log == 0.0 for link in report.links))

    def test_fischer_split_range(self):
        for split in (0, 3):
            with self.subTest(split=split):
                with self.assertRaises(IndexOutOfRange):
                    bounds.fischer_ineq(np.eye(3), split)

    def test_oppenheim_with_identity_is_hadamard(self):
        a = pd(11, 4)
        upper = bounds.oppenheim_ineq(a, np.eye(4)).links[0]
        self.assertLessEqual(report_discrepancy(upper, bounds.hadamard_ineq(a)), REDUCTION_TOL)

    def test_oppenheim_identity_pair(self):
        report = bounds.oppenheim_ineq(np.eye(3), np.eye(3))
        self.assertEqual(report.margin_log, 0.0)
        self.assertTrue(all(abs(link.margin_log) <= 1e-15 for link in report.links))

    def test_oppenheim_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            bounds.oppenheim_ineq(np.eye(2), np.eye(3))
        with self.assertRaises(DimensionMismatch):
            bounds.oppenheim_schur_ineq(np.eye(2), np.eye(3))

    def test_oppenheim_schur_against_cofactor_oracle(self):
        for seed, kind in ((21, "real"), (22, "complex")):
            with self.subTest(kind=kind):
                a, b = pd(seed, 3, kind), pd(seed + 100, 3, kind)
                report = bounds.oppenheim_schur_ineq(a, b)
                expected = (
                    det_cofactor_oracle(hadamard(a, b)).value().real
                    + det_cofactor_oracle(a).value().real * det_cofactor_oracle(b).value().real
                )
                self.assertLessEqual(abs(math.exp(report.lhs_log) - expected), 1e-9 * expected)
                self.assertGreaterEqual(report.margin_log, 0.0 - 1e-12)

    def test_oppenheim_schur_identity(self):
        report = bounds.oppenheim_schur_ineq(np.eye(4), np.eye(4))
        self.assertAlmostEqual(report.lhs_log, math.log(2.0), places=15)
        self.assertAlmostEqual(report.margin_log, 0.0, places=15)


class TestChen(unittest.TestCase):

    def test_identity_equality(self):
        report = bounds.chen_bound(np.eye(3), np.eye(3))
        self.assertEqual(report.lhs_log, 0.0)
        self.assertEqual(report.rhs_log, 0.0)

    def test_requires_positive_definite(self):
        with self.assertRaises(NotPositiveDefinite):
            bounds.chen_bound(np.diag([1.0, 0.0]), np.eye(2))

    def test_scale_covariance(self):
        a, b = pd(31, 4), pd(32, 4)
        c = 3.7
        base = bounds.chen_bound(a, b)
        scaled = bounds.chen_bound(c * a, b)
        shift = 4 * math.log(c)
        self.assertAlmostEqual(scaled.lhs_log - base.lhs_log, shift, delta=1e-9)
        self.assertAlmostEqual(scaled.rhs_log - base.rhs_log, shift, delta=1e-9)
        self.assertAlmostEqual(scaled.margin_log, base.margin_log, delta=1e-9)

    def test_improves_on_oppenheim_schur(self):
        for seed in range(5):
            with self.subTest(seed=seed):
                report = bounds.chen_improves_schur(pd(40 + seed, 4), pd(50 + seed, 4))
                self.assertTrue(report.holds)

    def test_random_pairs_hold(self):
        for seed in range(5):
            with self.subTest(seed=seed):
                report = bounds.chen_bound(pd(60 + seed, 5, "complex"), pd(70 + seed, 5, "complex"))
                self.assertTrue(report.verified)


class TestKhatriRaoBounds(unittest.TestCase):

    def test_unit_blocks_reduce_to_chen(self):
        a, b = pd(81, 4), pd(82, 4)
        self.assertLessEqual(
            report_discrepancy(bounds.thm21_bound(unit(a), unit(b)), bounds.chen_bound(a, b)),
            REDUCTION_TOL,
        )

    def test_two_factors_of_thm24_are_thm21(self):
        a, b = block_pd(83, 3, 2), block_pd(84, 3, 3)
        self.assertLessEqual(
            report_discrepancy(bounds.thm24_bound([a, b]), bounds.thm21_bound(a, b)),
            REDUCTION_TOL,
        )

    def test_lhs_matches_lu_of_assembled_product(self):
        a, b = block_pd(85, 2, 1), block_pd(86, 2, 2)
        report = bounds.thm21_bound(a, b)
        expected = det_lu(flatten(khatri_rao_all([a, b])))
        self.assertEqual(expected.sign, 1)
        self.assertAlmostEqual(report.lhs_log, expected.log_abs, delta=1e-8)
        self.assertTrue(report.verified)

    def test_three_factors(self):
        factors = [block_pd(87, 2, 1), block_pd(88, 2, 1), block_pd(89, 2, 2, "complex")]
        report = bounds.thm24_bound(factors)
        expected = det_lu(flatten(khatri_rao_all(factors)))
        self.assertAlmostEqual(report.lhs_log, expected.log_abs, delta=1e-8)
        self.assertTrue(report.verified)

    def test_block_identity_equality(self):
        report = bounds.thm24_bound([block_identity(3, 1), block_identity(3, 2), block_identity(3, 2)])
        self.assertEqual(report.lhs_log, 0.0)
        self.assertEqual(report.rhs_log, 0.0)

    def test_induction_quantities(self):
        """R_mu >= 1, S_mu >= 1 and R_mu S_mu >= R_mu + S_mu - 1 >= bracket."""
        factors = [block_pd(90, 4, 1), block_pd(91, 4, 2), block_pd(92, 4, 2)]
        report = bounds.thm24_bound(factors)
        self.assertEqual([t.mu for t in report.terms], [2, 3, 4])
        for term in report.terms:
            with self.subTest(mu=term.mu):
                self.assertTrue(term.fischer_ok)
                self.assertGreaterEqual(term.r_mu, -1e-9)
                self.assertGreaterEqual(term.s_mu, -1e-9)
                r, s = math.exp(term.r_mu), math.exp(term.s_mu)
                self.assertGreaterEqual(r * s, (r + s - 1) * (1 - 1e-12))
                combined = logspace.log_sum_minus([term.r_mu, term.s_mu], 1)
                self.assertGreaterEqual(combined, term.factor_log - 1e-9)

    def test_kim_equal_block_orders(self):
        a, b = block_pd(93, 2, 2), block_pd(94, 2, 2)
        kim = bounds.kim_bound(a, b)
        self.assertEqual(kim.name, "kim")
        self.assertEqual(report_discrepancy(kim, bounds.thm21_bound(a, b)), 0.0)
        with self.assertRaises(DimensionMismatch):
            bounds.kim_bound(a, block_pd(95, 2, 3))

    def test_errors(self):
        square = block_identity(2, 1)
        rectangular = partition(np.ones((2, 4)), 2, 1, 2)
        cases = [
            (lambda: bounds.thm21_bound(square, rectangular), NonSquareBlocks),
            (lambda: bounds.thm21_bound(square, block_identity(3, 1)), BlockGridMismatch),
            (lambda: bounds.thm24_bound([]), EmptyFactorList),
            (lambda: bounds.thm24_bound([square]), DomainError),
            (lambda: bounds.thm21_bound(square, partition(np.diag([1.0, 0.0]), 2, 1, 1)), NotPositiveDefinite),
        ]
        for call, error in cases:
            with self.subTest(error=error.__name__):
                with self.assertRaises(error):
                    call()


class TestThm25(unittest.TestCase):

    def test_unit_blocks_reduce_to_oppenheim_schur(self):
        a, b = pd(101, 4), pd(102, 4)
        self.assertLessEqual(
            report_discrepancy(bounds.thm25_ineq([unit(a), unit(b)]), bounds.oppenheim_schur_ineq(a, b)),
            REDUCTION_TOL,
        )

    def test_block_identity_equality(self):
        report = bounds.thm25_ineq([block_identity(2, 2), block_identity(2, 3)])
        self.assertAlmostEqual(report.margin_log, 0.0, places=14)
        self.assertAlmostEqual(report.links[0].margin_log, 0.0, places=14)

    def test_arrangements_agree(self):
        factors = [block_pd(103, 3, 1), block_pd(104, 3, 2), block_pd(105, 3, 2)]
        report = bounds.thm25_ineq(factors)
        self.assertTrue(report.verified)
        self.assertLessEqual(report.details["arrangementGap"], 1e-8)

    def test_singular_diagonal_block_zeroes_rhs(self):
        singular = partition(np.diag([0.0, 1.0]), 2, 1, 1)
        report = bounds.thm25_ineq([singular, unit(pd(106, 2))])
        self.assertEqual(report.rhs_log, -math.inf)
        self.assertTrue(report.holds)
        self.assertEqual(report.links, ())
        self.assertNotIn("arrangementGap", report.details)

    def test_rank_deficient_factor(self):
        singular = random_block_psd_singular(GenConfig(107, n=2, block_dim=2, rank_deficit=1))
        report = bounds.thm25_ineq([singular, block_pd(108, 2, 1)])
        self.assertTrue(report.holds)

    def test_dominated_by_product_bound(self):
        for seed in range(3):
            with self.subTest(seed=seed):
                factors = [block_pd(110 + seed, 3, 1), block_pd(120 + seed, 3, 2), block_pd(130 + seed, 3, 1)]
                self.assertTrue(bounds.thm24_dominates_thm25(factors).holds)


class TestHadamardCorollaries(unittest.TestCase):

    def test_two_factors_reduce(self):
        a, b = pd(141, 4, "complex"), pd(142, 4, "complex")
        self.assertLessEqual(
            report_discrepancy(bounds.coro26_bound([a, b]), bounds.chen_bound(a, b)), REDUCTION_TOL
        )
        self.assertLessEqual(
            report_discrepancy(bounds.coro27_ineq([a, b]), bounds.oppenheim_schur_ineq(a, b)),
            REDUCTION_TOL,
        )

    def test_three_factors_against_lu(self):
        mats = [pd(143, 3), pd(144, 3), pd(145, 3)]
        expected = det_lu(reduce(hadamard, mats)).log_abs
        for report in (bounds.coro26_bound(mats), bounds.coro27_ineq(mats)):
            with self.subTest(bound=report.name):
                self.assertTrue(report.verified)
        self.assertAlmostEqual(bounds.coro26_bound(mats).lhs_log, expected, delta=1e-8)

    def test_identity_equality(self):
        mats = [np.eye(3)] * 3
        self.assertEqual(bounds.coro26_bound(mats).margin_log, 0.0)
        self.assertAlmostEqual(bounds.coro27_ineq(mats).margin_log, 0.0, places=14)

    def test_singular_factor(self):
        report = bounds.coro27_ineq([np.diag([1.0, 0.0]), np.array([[3.0, 1.0], [1.0, 3.0]])])
        self.assertEqual(report.details["logDetHadamard"], -math.inf)
        self.assertTrue(report.holds)

    def test_errors(self):
        with self.assertRaises(DimensionMismatch):
            bounds.coro26_bound([np.eye(2), np.eye(3)])
        with self.assertRaises(EmptyFactorList):
            bounds.coro27_ineq([])


class TestScalarLemmas(unittest.TestCase):

    def test_all_ones_equality(self):
        self.assertEqual(bounds.lemma23_check(np.ones((4, 5))).margin_log, 0.0)
        self.assertEqual(bounds.coro24_check(np.ones(4), 7).margin_log, 0.0)

    def test_exponent_one_equality(self):
        self.assertEqual(bounds.coro24_check([1.5, 2.5, 40.0], 1).margin_log, 0.0)

    def test_two_rows_reduce_to_product_form(self):
        a, b = [1.5, 2.0, 7.0], [3.0, 1.25, 2.0]
        report = bounds.lemma23_check([a, b])
        expected_lhs = math.prod(x + y - 1 for x, y in zip(a, b))
        expected_rhs = math.prod(a) + math.prod(b) - 1
        self.assertAlmostEqual(report.details["lhs"], expected_lhs, places=10)
        self.assertAlmostEqual(report.details["rhs"], expected_rhs, places=10)
        self.assertTrue(report.holds)

    def test_domain_errors(self):
        cases = [
            lambda: bounds.lemma23_check([[0.5, 2.0]]),
            lambda: bounds.lemma23_check([[math.inf, 2.0]]),
            lambda: bounds.coro24_check([2.0, 0.9], 2),
            lambda: bounds.coro24_check([2.0, 3.0], 0),
            lambda: bounds.coro24_check([2.0, 3.0], 1.5),
            lambda: bounds.coro24_check([], 2),
        ]
        for i, call in enumerate(cases):
            with self.subTest(case=i):
                with self.assertRaises(DomainError):
                    call()


class TestPerturbation(unittest.TestCase):

    def test_positive_definite_unchanged_for_zero_delta(self):
        a = pd(151, 3, "complex")
        np.testing.assert_array_equal(bounds.perturb_to_pd(a, 0.0), a)

    def test_singular_diagonal(self):
        out = bounds.perturb_to_pd(np.diag([1.0, 0.0]), 1e-8)
        np.testing.assert_allclose(out, np.diag([1.0 + 2e-8, 2e-8]), rtol=1e-15, atol=0)
        bounds.chen_bound(out, np.eye(2))

    def test_zero_matrix(self):
        out = bounds.perturb_to_pd(np.zeros((3, 3)), 1e-8)
        np.testing.assert_allclose(out, 1e-8 * np.eye(3), rtol=1e-15, atol=0)

    def test_errors(self):
        with self.assertRaises(NotHermitian):
            bounds.perturb_to_pd([[1.0, 2.0], [0.0, 1.0]], 1e-8)
        with self.assertRaises(DomainError):
            bounds.perturb_to_pd(np.eye(2), -1.0)


if __name__ == "__main__":
    unittest.main()
