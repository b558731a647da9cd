import unittest
import itertools

import pandas as pd

from powerfree import arith
from powerfree import capset
from powerfree import utils

S4_BREAKPOINTS = list(capset.REFERENCE_BREAKPOINTS[(4, False)])
WEIGHTED_S4_BREAKPOINTS = list(capset.REFERENCE_BREAKPOINTS[(4, True)])


def value_at(bands, i):
    value = 0
    for band in bands:
        if band.i_lo <= i:
            value = band.value
    return value


def brute_force(instance):
    vectors = [instance.space.vectors[j] for j in instance.eligible]
    best = 0
    for size in range(len(vectors) + 1):
        for subset in itertools.combinations(range(len(vectors)), size):
            if capset.is_cap([vectors[j] for j in subset]):
                best = max(best, sum(instance.weights[j] for j in subset))
    return best


def lex_least_optimum(instance):
    vectors = [instance.space.vectors[j] for j in instance.eligible]
    best, least = 0, None
    for size in range(len(vectors) + 1):
        for subset in itertools.combinations(range(len(vectors)), size):
            chosen = tuple(sorted(vectors[j] for j in subset))
            if not capset.is_cap(chosen):
                continue
            weight = sum(instance.weights[j] for j in subset)
            if least is None or weight > best or \
                    (weight == best and chosen < least):
                best, least = weight, chosen
    return least


class TestCapset(unittest.TestCase):
    def test_witness_is_lex_least(self):
        for weighted in (False, True):
            for band in capset.threshold_bands(2, weighted=weighted):
                instance = capset.make_instance(2, band.i_lo, weighted)
                self.assertEqual(tuple(sorted(band.witness.chosen)),
                                 lex_least_optimum(instance),
                                 f"i={band.i_lo}, weighted={weighted}")
        # (0,0), (0,1), (1,0), (1,1) over the primes 2, 3
        self.assertEqual(capset.threshold_bands(2)[-1].witness.values,
                         (1, 2, 3, 6))
        self.assertEqual(
            capset.threshold_bands(2, weighted=True)[-1].witness.values,
            (1, 2, 3, 6, 8, 16, 24, 48))

    def test_witness_does_not_depend_on_engine(self):
        for weighted in (False, True):
            bands = capset.threshold_bands(3, weighted=weighted, engine="bnb")
            for band in bands[::3]:
                instance = capset.make_instance(3, band.i_lo, weighted)
                for engine in ("bnb", "cpsat"):
                    self.assertEqual(
                        capset.solve_instance(instance, engine=engine),
                        band.witness)

    def test_enumerate_L(self):
        self.assertEqual(capset.enumerate_L(1, 4), [(0,), (1,), (2,)])
        self.assertEqual(capset.enumerate_L(4, 1), [(0, 0, 0, 0)])
        self.assertEqual(len(capset.enumerate_L(4, 44100)), 81)
        self.assertEqual(len(capset.enumerate_L(4, 44099)), 80)
        space = capset.smooth_vector_space(4)
        self.assertEqual(space.full_bound, 44100)
        self.assertEqual(list(space.values), sorted(space.values))
        self.assertEqual(space.index_of_value(44100), 80)
        self.assertIsNone(space.index_of_value(11))
        with self.assertRaises(utils.InvalidArgumentError):
            capset.enumerate_L(9, 10)
        with self.assertRaises(utils.InvalidArgumentError):
            capset.make_instance(2, 0)

    def test_lines(self):
        # x + z = 2y for distinct x, y, z, by direct enumeration
        for r in range(1, 4):
            vectors = list(itertools.product(range(3), repeat=r))
            expected = set()
            for x, y, z in itertools.permutations(vectors, 3):
                if all((a + c - 2 * b) % 3 == 0 for a, b, c in zip(x, y, z)):
                    expected.add(frozenset((x, y, z)))
            found = {frozenset(vectors[j] for j in triple)
                     for triple in capset.lines(vectors)}
            self.assertEqual(found, expected)
            self.assertEqual(len(found), 3**(r - 1) * (3**r - 1) // 2)

    def test_is_cap(self):
        self.assertTrue(capset.is_cap([(0, 0), (0, 1), (1, 0), (1, 1)]))
        self.assertFalse(capset.is_cap([(0, 0), (1, 1), (2, 2)]))
        self.assertTrue(capset.is_cap([(0,), (0,), (1,)]))

    def test_weights(self):
        instance = capset.make_instance(2, 20, weighted=True)
        weights = dict(zip(instance.values, instance.weights))
        self.assertEqual(weights, {1: 2, 2: 2, 3: 1, 4: 1, 6: 1, 9: 1,
                                   12: 1, 18: 1})
        unweighted = capset.make_instance(2, 20)
        self.assertEqual(set(unweighted.weights), {1})

    def test_cap_numbers(self):
        for r, expected in [(0, 1), (1, 2), (2, 4), (3, 9)]:
            solution = capset.max_cap(r, engine="bnb")
            self.assertEqual(solution.total, expected)
            self.assertTrue(capset.is_cap(solution.chosen))
            self.assertEqual(len(set(solution.chosen)), expected)
        self.assertEqual(capset.cap_number(3, engine="cpsat"), 9)

    def test_r1_table(self):
        bands = capset.threshold_bands(1, i_max=100)
        self.assertEqual([(b.i_lo, b.i_hi, b.value) for b in bands],
                         [(1, 1, 1), (2, None, 2)])

    def test_r2_against_brute_force(self):
        for weighted in (False, True):
            bands = capset.threshold_bands(2, weighted=weighted)
            space = capset.smooth_vector_space(2)
            points = set(space.values) | {8 * v for v in space.values}
            for i in sorted(points | {p - 1 for p in points} - {0}):
                instance = capset.make_instance(2, i, weighted)
                self.assertEqual(value_at(bands, i), brute_force(instance),
                                 f"i={i}, weighted={weighted}")
            self.assertEqual(bands[-1].value, 8 if weighted else 4)
            self.assertIsNone(bands[-1].i_hi)

    def test_r3_tables(self):
        for weighted in (False, True):
            bands = capset.threshold_bands(3, weighted=weighted, engine="bnb")
            self.assertEqual(bands[-1].value, 18 if weighted else 9)
            values = [b.value for b in bands]
            self.assertEqual(values, list(range(1, len(bands) + 1)))
            for band in bands:
                instance = capset.make_instance(3, band.i_lo, weighted)
                self.assertEqual(band.witness.total, band.value)
                self.assertTrue(capset.is_cap(band.witness.chosen))
                for engine in ("bnb", "cpsat"):
                    fresh = capset.solve_instance(instance, engine=engine)
                    self.assertEqual(fresh.total, band.value)
                if band.i_lo > 1:
                    before = capset.make_instance(3, band.i_lo - 1, weighted)
                    self.assertEqual(
                        capset.solve_instance(before).total, band.value - 1)

    def test_r4_prefix(self):
        bands = capset.threshold_bands(4, i_max=60, engine="bnb")
        self.assertEqual([b.i_lo for b in bands], S4_BREAKPOINTS[:15])
        self.assertEqual(bands[-1].i_hi, 60)
        self.assertEqual(value_at(bands, 10), 7)
        weighted = capset.threshold_bands(4, weighted=True, i_max=60,
                                          engine="bnb")
        self.assertEqual([b.i_lo for b in weighted],
                         WEIGHTED_S4_BREAKPOINTS[:20])
        self.assertEqual(value_at(weighted, 7), 6)
        for i in (1, 7, 15, 30, 60):
            self.assertLessEqual(value_at(weighted, i),
                                 2 * value_at(bands, i))

    def test_weighted_witness_has_no_cube_triple(self):
        bands = capset.threshold_bands(4, weighted=True, i_max=60,
                                       engine="bnb")
        witness = bands[-1].witness
        self.assertEqual(len(witness.values), witness.total)
        self.assertEqual(len(set(witness.values)), witness.total)
        for a, b, c in itertools.combinations(witness.values, 3):
            self.assertFalse(arith.is_perfect_power(a * b * c, 3),
                             f"{a} * {b} * {c}")

    def test_max_capfree(self):
        instance = capset.make_instance(4, 10)
        solution = capset.max_capfree(instance, engine="bnb")
        self.assertEqual(solution.total, 7)
        self.assertTrue(all(v <= 10 for v in solution.values))
        weighted = capset.make_instance(4, 7, weighted=True)
        self.assertEqual(
            capset.max_capfree_weighted(weighted, engine="bnb").total, 6)
        self.assertEqual(
            capset.max_capfree_weighted(capset.make_instance(4, 1, True),
                                        engine="bnb").total, 1)
        with self.assertRaises(utils.InvalidArgumentError):
            capset.max_capfree(weighted)
        with self.assertRaises(utils.InvalidArgumentError):
            capset.max_capfree_weighted(instance)

    def test_threads_do_not_change_witness(self):
        instance = capset.make_instance(3, 900)
        single = capset.solve_instance(instance, threads=1)
        parallel = capset.solve_instance(instance, threads=2)
        self.assertEqual(single, parallel)

    def test_threshold_table(self):
        df = capset.threshold_table(2)
        self.assertListEqual(list(df.columns), ["i_lo", "i_hi", "value"])
        self.assertEqual(str(df["i_hi"].dtype), "Int64")
        self.assertTrue(pd.isna(df["i_hi"].iloc[-1]))
        self.assertEqual(df["value"].tolist(), [1, 2, 3, 4])

    def test_saturation_report(self):
        report = capset.saturation_report(1)
        self.assertEqual(report["saturation_value"], 2)
        self.assertEqual(report["saturation_point"], 2)
        self.assertEqual(report["claimed_point"], 4)
        self.assertTrue(report["saturates_by_claimed_point"])
        self.assertNotIn("matches_reference", report)

    def test_invalid_engine(self):
        with self.assertRaises(utils.InvalidArgumentError):
            capset.threshold_bands(2, engine="greedy")
        with self.assertRaises(utils.InvalidArgumentError):
            capset.threshold_bands(2, i_max=0)


if __name__ == '__main__':
    unittest.main()
