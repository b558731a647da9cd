from dataclasses import dataclass
from fractions import Fraction
from math import prod

import mpmath
import pandas as pd
from mpmath import iv, mp

from powerfree import arith
from powerfree import capset
from powerfree import utils

"""
    High-precision evaluation of the density constants: the enclosures
    gamma_r, beta_r (for c_{3,3}) and Gamma_r, B_r (for C_{3,3}), the
    Euler product tail, and the constant c_0 of the alpha-construction
    by a numerical maximisation and by its closed form.

    Sums over threshold tables are exact rationals; transcendental factors
    enter through mpmath interval arithmetic so every reported bound is an
    outward-rounded enclosure.
"""

DIGITS = 50
SEARCH_DIGITS = 30
iv.dps = DIGITS

# (constant, published 4-decimal value, direction of the published claim)
PUBLISHED = {
    "gamma": ("0.6420", "upper"),
    "beta": ("0.6224", "lower"),
    "Gamma": ("0.7136", "upper"),
    "B": ("0.6919", "lower"),
}


@dataclass(frozen=True)
class BoundPair:
    """
        Enclosure lower <= x <= upper of a constant; exact holds the rational
        value when there is one
    """
    name: str
    r: int
    weighted: bool
    lower: mpmath.mpf
    upper: mpmath.mpf
    exact: Fraction = None

    @property
    def interval(self):
        return iv.mpf([self.lower, self.upper])

    @property
    def mid(self):
        return (self.lower + self.upper) / 2

    def contains(self, x):
        return self.lower <= x <= self.upper

    def to_dict(self):
        return {"name": self.name, "r": self.r,
                "lower": float(self.lower), "upper": float(self.upper),
                "lower_digits": mpmath.nstr(self.lower, DIGITS),
                "upper_digits": mpmath.nstr(self.upper, DIGITS),
                "digits": DIGITS}


def _pair(name, r, weighted, interval, exact=None):
    return BoundPair(name=name, r=r, weighted=weighted,
                     lower=mpmath.mpf(interval.a),
                     upper=mpmath.mpf(interval.b), exact=exact)


def _enclose(q):
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _bands_from(table):
    """
        Normalises a threshold table given as a DataFrame, Band objects or
        (i_lo, i_hi, value) tuples; i_hi None means unbounded
    """
    if isinstance(table, pd.DataFrame):
        rows = [(int(row.i_lo), None if pd.isna(row.i_hi) else int(row.i_hi),
                 int(row.value)) for row in table.itertuples(index=False)]
    else:
        rows = [(b.i_lo, b.i_hi, b.value) if isinstance(b, capset.Band)
                else tuple(b) for b in table]
    return rows


def table_sum(table, N):
    """
        s(N)/N + sum_{i=1}^{N-1} s(i)/(i(i+1)) for a step function s given
        by its bands, exactly. On a band of value v over [lo, hi] the terms
        telescope to v (1/lo - 1/(hi+1)).
    """
    bands = _bands_from(table)
    if not bands or bands[0][0] != 1:
        raise utils.InvalidArgumentError(
            "Invalid table: bands must start at i = 1")
    total = Fraction(0)
    expected = 1
    value_at_N = None
    for lo, hi, value in bands:
        if lo != expected:
            raise utils.InvalidArgumentError(
                f"Invalid table: gap before i = {lo}")
        top = N - 1 if hi is None else min(hi, N - 1)
        if lo <= top:
            total += value * (Fraction(1, lo) - Fraction(1, top + 1))
        if lo <= N and (hi is None or hi >= N):
            value_at_N = value
        if hi is None:
            break
        expected = hi + 1
    if value_at_N is None:
        raise utils.InvalidArgumentError(
            f"Invalid table: incomplete, it does not cover i = {N}")
    return total + Fraction(value_at_N, N)


def euler_factor(r):
    """
        prod_{j <= r} (1 - 1/p_j) as an exact rational
    """
    return prod((Fraction(p - 1, p) for p in arith.first_primes(r)),
                start=Fraction(1))


def euler_product_tail(r):
    """
        prod_{j > r} (1 - 1/p_j^2) = (6/pi^2) / prod_{j <= r} (1 - 1/p_j^2)
    """
    if r < 0:
        raise utils.InvalidArgumentError(f"Invalid r '{r}': must be >= 0")
    head = prod((Fraction(p * p - 1, p * p) for p in arith.first_primes(r)),
                start=Fraction(1))
    return _pair("tail", r, False, 6 / iv.pi**2 / _enclose(head))


def _table_constant(name, r, weighted, table):
    N = capset.smooth_vector_space(r).full_bound * (8 if weighted else 1)
    if table is None:
        table = capset.threshold_bands(r, weighted=weighted, i_max=N)
    exact = table_sum(table, N) * euler_factor(r)
    return _pair(name, r, weighted, _enclose(exact), exact)


def gamma_r(r, table=None):
    """
        gamma_r, the upper bound on c_{3,3} from the s_r table up to
        N = (p_1...p_r)^2

        Parameters:
            r (int): number of primes
            table: threshold table of s_r covering [1, N]; computed when
            omitted

        Returns:
            bound (BoundPair): exact rational value and its enclosure
    """
    return _table_constant("gamma", r, False, table)


def Gamma_r(r, table=None):
    """
        Weighted analogue of gamma_r from the S_r table up to 8N
    """
    return _table_constant("Gamma", r, True, table)


def _times_tail(name, r, weighted, bound):
    if bound.r != r:
        raise utils.InvalidArgumentError(
            f"Invalid bound: computed for r = {bound.r}, not r = {r}")
    return _pair(name, r, weighted,
                 bound.interval * euler_product_tail(r).interval)


def beta_r(r, gamma=None):
    """
        beta_r = gamma_r * prod_{j > r} (1 - 1/p_j^2), the lower bound on
        c_{3,3}
    """
    return _times_tail("beta", r, False, gamma or gamma_r(r))


def B_r(r, Gamma=None):
    return _times_tail("B", r, True, Gamma or Gamma_r(r))


def enclosures(r, tables=None):
    """
        All four bounds for one r; tables maps weighted (bool) to a
        threshold table
    """
    tables = tables or {}
    gamma = gamma_r(r, tables.get(False))
    Gamma = Gamma_r(r, tables.get(True))
    return {"gamma": gamma, "beta": beta_r(r, gamma),
            "Gamma": Gamma, "B": B_r(r, Gamma)}


def rounding_report(r=4, tables=None):
    """
        For each of gamma, beta, Gamma and B: the enclosure, its rounding
        to 4 decimals, whether that equals the published value and whether
        the published inequality holds
    """
    rows = []
    for name, bound in enclosures(r, tables).items():
        published, direction = PUBLISHED[name]
        claim = mpmath.mpf(published)
        rounded = mpmath.nstr(mpmath.nint(bound.mid * 10**4) / 10**4, 4,
                              strip_zeros=False)
        if direction == "upper":
            holds = bound.upper <= claim
        else:
            holds = bound.lower >= claim
        rows.append({"name": name, "r": r, "lower": float(bound.lower),
                     "upper": float(bound.upper), "rounded": rounded,
                     "published": published, "direction": direction,
                     "rounds_to_published": rounded == published,
                     "inequality_holds": bool(holds)})
    return pd.DataFrame(rows)


def dilog(x, tol=mpmath.mpf("1e-12")):
    """
        Li_2(x) on [0, 1] by the power series for x <= 1/2 and the
        reflection Li_2(x) = pi^2/6 - log(x) log(1-x) - Li_2(1-x) above
    """
    x = mpmath.mpf(x)
    if not 0 <= x <= 1:
        raise utils.InvalidArgumentError(
            f"Invalid x '{x}': dilog is evaluated on [0, 1]")
    if x == 0:
        return mpmath.mpf(0)
    if x == 1:
        return mp.pi**2 / 6
    if x > 0.5:
        return mp.pi**2 / 6 - mpmath.log(x) * mpmath.log(1 - x) \
            - dilog(1 - x, tol)
    # with x <= 1/2 the tail after a term t is below t
    total = mpmath.mpf(0)
    power = x
    k = 1
    while True:
        term = power / (k * k)
        total += term
        if term < tol / 2:
            return total
        power *= x
        k += 1


def c0_objective(alpha):
    """
        -log a + (log(1-a) - log a) log a - int_a^{1-a} log(1-t)/t dt
    """
    alpha = mpmath.mpf(alpha)
    integral = mpmath.quad(lambda t: mpmath.log(1 - t) / t,
                           [alpha, 1 - alpha])
    return -mpmath.log(alpha) \
        + (mpmath.log(1 - alpha) - mpmath.log(alpha)) * mpmath.log(alpha) \
        - integral


def golden_section_max(f, lo, hi, tol):
    """
        Maximiser of a unimodal f on [lo, hi] to within tol
    """
    ratio = (mpmath.sqrt(5) - 1) / 2
    x1 = hi - ratio * (hi - lo)
    x2 = lo + ratio * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    while hi - lo > tol:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + ratio * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - ratio * (hi - lo)
            f1 = f(x1)
    return (lo + hi) / 2


def c0_by_max(tol=mpmath.mpf("1e-10")):
    """
        Maximises c0_objective over [1/3, 1/2]

        Returns:
            (alpha_star, c0) (tuple of mpf)
    """
    with mp.workdps(SEARCH_DIGITS):
        alpha = golden_section_max(c0_objective, mpmath.mpf(1) / 3,
                                   mpmath.mpf(1) / 2, tol)
        return +alpha, +c0_objective(alpha)


def c0_closed_form(tol=mpmath.mpf("1e-12")):
    """
        pi^2/6 - log^2(1+sqrt e) + log(1+sqrt e) - 2 Li_2(1/(1+sqrt e))
    """
    with mp.workdps(DIGITS):
        base = 1 + mpmath.sqrt(mp.e)
        return +(mp.pi**2 / 6 - mpmath.log(base)**2 + mpmath.log(base)
                 - 2 * dilog(1 / base, tol))


def alpha_star():
    return 1 / (1 + mpmath.sqrt(mp.e))
