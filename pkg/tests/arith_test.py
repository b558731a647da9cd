import unittest
import random
from math import comb, gcd, log, prod

import numpy.testing as nptesting
import sympy

from powerfree import arith
from powerfree import utils


class TestArith(unittest.TestCase):
    def setUp(self):
        self.table = arith.sieve(10**5)

    def test_sieve(self):
        self.assertEqual(list(arith.sieve(10).primes), [2, 3, 5, 7])
        self.assertEqual(list(arith.sieve(2).primes), [2])
        self.assertEqual(len(arith.sieve(100).primes), 25)
        for n in range(2, 2000):
            self.assertEqual(n % int(self.table.spf[n]), 0)
        for p in self.table.primes[:200]:
            self.assertEqual(int(self.table.spf[p]), p)
        with self.assertRaises(utils.InvalidArgumentError):
            arith.sieve(1)

    def test_factor(self):
        test_input = [1, 12, 44100, 97, 2**10 * 3]
        test_output = [(), ((2, 2), (3, 1)), ((2, 2), (3, 2), (5, 2), (7, 2)),
                       ((97, 1),), ((2, 10), (3, 1))]
        fail = False
        i = 0
        for input, output in zip(test_input, test_output):
            try:
                self.assertEqual(arith.factor(input, self.table).factors,
                                 output)
            except AssertionError as e:
                i += 1
                fail = True
                print(f"Test failure {i}: ", e)
        if fail:
            raise AssertionError
        # beyond the sieve
        big = 1000003 * 1000033 * 4
        self.assertEqual(arith.factor(big, self.table).factors,
                         ((2, 2), (1000003, 1), (1000033, 1)))
        with self.assertRaises(utils.InvalidArgumentError):
            arith.factor(0)

    def test_residue_vector(self):
        self.assertTrue(arith.residue_vector(8, 3, self.table).is_zero())
        self.assertEqual(arith.residue_vector(12, 3, self.table).as_dict(),
                         {2: 2, 3: 1})
        self.assertTrue(arith.residue_vector(1, 5, self.table).is_zero())
        with self.assertRaises(utils.InvalidArgumentError):
            arith.residue_vector(5, 1)
        # additivity
        rng = random.Random(1)
        for _ in range(10**4):
            a = rng.randint(1, 1000)
            b = rng.randint(1, 1000)
            for d in (2, 3):
                self.assertEqual(arith.residue_vector(a * b, d, self.table),
                                 arith.residue_vector(a, d, self.table) +
                                 arith.residue_vector(b, d, self.table))
        # zero vector exactly for perfect powers
        for d in (2, 3, 4, 5):
            for n in range(1, 10**5 + 1):
                root = round(n ** (1 / d))
                is_power = any((root + s) ** d == n for s in (-1, 0, 1))
                self.assertEqual(
                    arith.residue_vector(n, d, self.table).is_zero(), is_power)

    def test_residue_vector_scale(self):
        v = arith.residue_vector(12, 3, self.table)
        self.assertTrue(v.scale(3).is_zero())
        self.assertEqual(v.scale(2).as_dict(), {2: 1, 3: 2})
        self.assertEqual(v.support(), [2, 3])

    def test_cubefree_decompose(self):
        test_input = [1, 12, 72]
        test_output = [(1, 1, 1), (3, 2, 1), (1, 3, 2)]
        for input, output in zip(test_input, test_output):
            c = arith.cubefree_decompose(input, self.table)
            self.assertEqual((c.u, c.v, c.w), output)
        for n in range(1, 10**4 + 1):
            c = arith.cubefree_decompose(n, self.table)
            self.assertEqual(c.value, n)
            self.assertTrue(arith.is_squarefree(c.u, self.table))
            self.assertTrue(arith.is_squarefree(c.v, self.table))
            self.assertEqual(gcd(c.u, c.v), 1)
            # opposite classes multiply to a cube
            self.assertTrue(arith.residue_vector(
                c.cubefree_part * c.opposite, 3, self.table).is_zero())
        rng = random.Random(2)
        for n in rng.sample(range(10**4, 10**6 + 1), 2000):
            c = arith.cubefree_decompose(n, self.table)
            self.assertEqual(c.value, n)
            self.assertEqual(gcd(c.u, c.v), 1)
            exponents = sympy.factorint(n)
            self.assertEqual(c.u, prod(p for p, e in exponents.items()
                                       if e % 3 == 1))
            self.assertEqual(c.v, prod(p for p, e in exponents.items()
                                       if e % 3 == 2))


    def test_smooth_rough_split(self):
        self.assertEqual(arith.smooth_rough_split(60, 2), (12, 5))
        self.assertEqual(arith.smooth_rough_split(7, 2), (1, 7))
        self.assertEqual(arith.smooth_rough_split(8, 1), (8, 1))

    def test_small_functions(self):
        self.assertEqual(arith.big_omega(1), 0)
        self.assertEqual(arith.big_omega(12), 3)
        self.assertEqual(arith.largest_prime_factor(28), 7)
        with self.assertRaises(utils.InvalidArgumentError):
            arith.largest_prime_factor(1)
        self.assertTrue(arith.is_squarefree(30))
        self.assertFalse(arith.is_squarefree(12))
        self.assertEqual(arith.nth_root(26, 3), 2)
        self.assertEqual(arith.nth_root(27, 3), 3)
        self.assertEqual(arith.prime_pi(100), 25)
        self.assertEqual(arith.prime_pi(1), 0)
        self.assertEqual(arith.primes_in_range(10, 30),
                         [11, 13, 17, 19, 23, 29])

    def test_tau3(self):
        self.assertEqual(arith.tau3(1), 1)
        self.assertEqual(arith.tau3(7), 3)
        self.assertEqual(arith.tau3(12), 18)
        for n in range(1, 2001):
            brute = sum(1 for a in range(1, n + 1) if n % a == 0
                        for b in range(1, n // a + 1) if (n // a) % b == 0)
            self.assertEqual(arith.tau3(n, self.table), brute)
        self.assertEqual(arith.tau3(2**3 * 3), comb(5, 2) * comb(3, 2))

    def test_omega_tables(self):
        omega = arith.omega_table(1000, self.table)
        lpf = arith.largest_prime_factor_table(1000, self.table)
        expected_omega = [0, 0] + [arith.big_omega(m, self.table)
                                   for m in range(2, 1001)]
        expected_lpf = [1, 1] + [arith.largest_prime_factor(m, self.table)
                                 for m in range(2, 1001)]
        nptesting.assert_array_equal(omega, expected_omega)
        nptesting.assert_array_equal(lpf, expected_lpf)

    def test_count_by_omega(self):
        self.assertEqual(arith.count_by_omega(10, 0, "ge"), 10)
        self.assertEqual(arith.count_by_omega(10, 100, "le"), 10)
        threshold = log(log(100))
        brute = sum(1 for m in range(1, 101)
                    if arith.big_omega(m) <= threshold)
        self.assertEqual(arith.count_by_omega(100, 1, "le"), brute)
        with self.assertRaises(utils.InvalidArgumentError):
            arith.count_by_omega(100, 1, "eq")

    def test_count_almost_primes(self):
        self.assertEqual(arith.count_almost_primes(10, 1), 4)
        self.assertEqual(arith.count_almost_primes(10, 2), 4)
        self.assertEqual(arith.count_almost_primes(1, 2), 0)

    def test_balanced_triple_factorization(self):
        self.assertEqual(arith.balanced_triple_factorization(8, 2, 2),
                         (2, 2, 2))
        self.assertEqual(arith.balanced_triple_factorization(30, 2, 5),
                         (2, 3, 5))
        self.assertIsNone(arith.balanced_triple_factorization(7, 2, 6))
        for a in range(1, 400):
            triple = arith.balanced_triple_factorization(a, 2, 9)
            brute = [(u, v, a // (u * v)) for u in range(2, 10)
                     for v in range(2, 10) if a % (u * v) == 0 and
                     2 <= a // (u * v) <= 9]
            if brute:
                self.assertIsNotNone(triple)
                u, v, w = triple
                self.assertEqual(u * v * w, a)
            else:
                self.assertIsNone(triple)

    def test_equipartition_max_part(self):
        test_output = [3, 4, 5, 3, 4, 4, 3, 4, 4, 3]
        for m, output in zip(range(3, 13), test_output):
            self.assertEqual(arith.equipartition_max_part(m, 3), output)
        with self.assertRaises(utils.InvalidArgumentError):
            arith.equipartition_max_part(2, 3)

    def test_main_term(self):
        self.assertEqual(arith.main_term(100, 9, 3), 40)
        self.assertEqual(arith.main_term(10, 9, 3), 7)
        self.assertEqual(arith.main_term(100, 12, 3), 51)
        with self.assertRaises(utils.InvalidArgumentError):
            arith.main_term(100, 6, 3)


if __name__ == '__main__':
    unittest.main()
