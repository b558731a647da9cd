import unittest
import random
from fractions import Fraction

import mpmath
import pandas as pd

from powerfree import capset
from powerfree import constants
from powerfree import utils


def bands_from_breakpoints(breakpoints):
    bands = []
    for j, lo in enumerate(breakpoints):
        hi = breakpoints[j + 1] - 1 if j + 1 < len(breakpoints) else None
        bands.append((lo, hi, j + 1))
    return bands


S4_TABLE = bands_from_breakpoints(capset.REFERENCE_BREAKPOINTS[(4, False)])
WEIGHTED_S4_TABLE = bands_from_breakpoints(
    capset.REFERENCE_BREAKPOINTS[(4, True)])
TABLES = {False: S4_TABLE, True: WEIGHTED_S4_TABLE}


class TestConstants(unittest.TestCase):
    def test_table_sum(self):
        # constant s = 1 telescopes to 1
        self.assertEqual(constants.table_sum([(1, None, 1)], 44100), 1)
        gamma = constants.gamma_r(4, [(1, None, 1)])
        self.assertEqual(gamma.exact, Fraction(8, 35))
        self.assertEqual(gamma.exact, constants.euler_factor(4))
        # s_1: 1 at i = 1, 2 afterwards, N = 4
        gamma_1 = constants.gamma_r(1, [(1, 1, 1), (2, None, 2)])
        self.assertEqual(gamma_1.exact, Fraction(3, 4))
        self.assertTrue(gamma_1.contains(mpmath.mpf(0.75)))

    def test_table_forms_agree(self):
        df = pd.DataFrame({"i_lo": [b[0] for b in S4_TABLE],
                           "i_hi": [b[1] for b in S4_TABLE],
                           "value": [b[2] for b in S4_TABLE]})
        df["i_hi"] = df["i_hi"].astype("Int64")
        self.assertEqual(constants.gamma_r(4, df).exact,
                         constants.gamma_r(4, S4_TABLE).exact)
        bands = capset.threshold_bands(1, i_max=100)
        self.assertEqual(constants.gamma_r(1, bands).exact, Fraction(3, 4))

    def test_incomplete_tables(self):
        with self.assertRaises(utils.InvalidArgumentError):
            constants.table_sum([(1, 10, 1)], 36)
        with self.assertRaises(utils.InvalidArgumentError):
            constants.table_sum([(1, 1, 1), (3, None, 2)], 36)
        with self.assertRaises(utils.InvalidArgumentError):
            constants.table_sum([(2, None, 1)], 36)

    def test_euler_product_tail(self):
        tail = constants.euler_product_tail(0)
        self.assertTrue(tail.contains(6 / mpmath.pi**2))
        self.assertAlmostEqual(float(tail.lower), 0.607927, places=6)
        self.assertAlmostEqual(float(constants.euler_product_tail(4).mid),
                               0.96968, places=5)
        self.assertLess(tail.upper - tail.lower, mpmath.mpf("1e-40"))
        previous = tail
        for r in range(1, 8):
            current = constants.euler_product_tail(r)
            self.assertLess(previous.upper, current.lower)
            self.assertLess(current.upper, 1)
            previous = current
        with self.assertRaises(utils.InvalidArgumentError):
            constants.euler_product_tail(-1)

    def test_enclosures_r4(self):
        bounds = constants.enclosures(4, TABLES)
        expected = {"gamma": (0.6419, 0.6421), "beta": (0.6224, 0.6226),
                    "Gamma": (0.7135, 0.7137), "B": (0.6918, 0.6920)}
        for name, (lo, hi) in expected.items():
            self.assertGreaterEqual(bounds[name].lower, lo, name)
            self.assertLessEqual(bounds[name].upper, hi, name)
            self.assertLessEqual(bounds[name].lower, bounds[name].upper)
        self.assertLess(bounds["beta"].upper, bounds["gamma"].lower)
        self.assertLess(bounds["B"].upper, bounds["Gamma"].lower)
        tail = constants.euler_product_tail(4)
        ratio = bounds["beta"].mid / bounds["gamma"].mid
        self.assertLess(abs(ratio - tail.mid), 1e-12)
        with self.assertRaises(utils.InvalidArgumentError):
            constants.beta_r(3, bounds["gamma"])

    def test_rounding_report(self):
        report = constants.rounding_report(4, TABLES).set_index("name")
        self.assertTrue(report["inequality_holds"].all())
        self.assertEqual(report.loc["gamma", "rounded"], "0.6419")
        self.assertFalse(report.loc["gamma", "rounds_to_published"])
        self.assertEqual(report.loc["B", "rounded"], "0.6919")
        self.assertTrue(report.loc["B", "rounds_to_published"])

    def test_dilog(self):
        self.assertEqual(constants.dilog(0), 0)
        self.assertAlmostEqual(float(constants.dilog(1)),
                               float(mpmath.pi**2 / 6), places=14)
        half = mpmath.pi**2 / 12 - mpmath.log(2)**2 / 2
        self.assertLess(abs(constants.dilog(0.5) - half), 1e-12)
        rng = random.Random(0)
        for _ in range(100):
            x = mpmath.mpf(rng.random())
            value = constants.dilog(x)
            self.assertLess(abs(value - mpmath.polylog(2, x)), 1e-12)
            reflected = value + constants.dilog(1 - x)
            identity = mpmath.pi**2 / 6 - mpmath.log(x) * mpmath.log(1 - x)
            self.assertLess(abs(reflected - identity), 1e-12)
        with self.assertRaises(utils.InvalidArgumentError):
            constants.dilog(1.5)
        with self.assertRaises(utils.InvalidArgumentError):
            constants.dilog(-0.1)

    def test_c0(self):
        closed = constants.c0_closed_form()
        self.assertLess(abs(closed - mpmath.mpf("0.82849")), 1e-5)
        alpha, c0 = constants.c0_by_max()
        self.assertLess(abs(c0 - closed), 1e-9)
        self.assertLess(abs(alpha - constants.alpha_star()), 1e-6)
        self.assertAlmostEqual(float(alpha), 0.377541, places=6)
        self.assertLess(constants.c0_objective(mpmath.mpf(1) / 3), c0)
        self.assertLess(constants.c0_objective(mpmath.mpf(1) / 2), c0)
        coarse = constants.c0_closed_form(tol=mpmath.mpf("1e-6"))
        self.assertLess(abs(coarse - closed), 1e-5)

    def test_to_dict(self):
        out = constants.gamma_r(4, S4_TABLE).to_dict()
        self.assertEqual(set(out), {"name", "r", "lower", "upper",
                                    "lower_digits", "upper_digits",
                                    "digits"})
        self.assertEqual(out["digits"], 50)
        self.assertLessEqual(out["lower"], out["upper"])


if __name__ == '__main__':
    unittest.main()
