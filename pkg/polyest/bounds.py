################################################################################
#
# bounds.py 		polyest
#
# Closed-form polarization constants and bounds on c(k1,...,kn, X), for a
# generic real normed space and for real l_p spaces, computed in the log
# domain. Also the moment and tail machinery behind the sub-gaussian bound.
################################################################################

import enum
import functools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, logsumexp

from polyest.forms import Partition
from polyest.utilities import InputRejected, integer_partitions, log_factorial, \
    log_binomial, xlogx

logger = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(np.finfo(float).max)
GENERIC = 'generic'
# exact enumeration limits
RADEMACHER_MAX_K = 30
WORST_PARTITION_EXHAUSTIVE_M = 30


class BoundName(enum.Enum):
    PROBLEM73 = 'problem73'
    HARRIS_COMPLEX = 'harris_complex'
    SQRT = 'sqrt'
    NEW = 'new'
    REAL_MIN = 'real_min'
    NGUYEN = 'nguyen'
    LP_UPPER = 'lp_upper'
    LP_UPPER_SHARP = 'lp_upper_sharp'
    LP_LOWER = 'lp_lower'
    X_LOWER = 'x_lower'
    SARANTOPOULOS = 'sarantopoulos'
    SQRT_N = 'sqrt_n'


CITATIONS = {
    BoundName.PROBLEM73: 'Mazur-Orlicz, Scottish Book Problem 73: m^m/m! for symmetric '
                         'm-linear forms',
    BoundName.HARRIS_COMPLEX: 'Harris, exact c(k1..kn) on complex normed spaces: '
                              'prod k! / prod k^k * m^m/m!',
    BoundName.SQRT: 'Harris, real normed spaces: sqrt(m^m / prod k^k)',
    BoundName.NEW: 'block-averaged polarization over n vectors: prod k^k n^m / m!',
    BoundName.REAL_MIN: 'minimum of the square-root and block-averaged bounds on '
                        'real normed spaces',
    BoundName.NGUYEN: 'Nguyen, sub-gaussian moment method: e^(m/2) (em/n)^n C(m+n-1, n-1)',
    BoundName.LP_UPPER: 'Hoeffding tail integrals on real l_p: upper bound of c(k1..kn, l_p)',
    BoundName.LP_UPPER_SHARP: 'Hoeffding tail integrals on real l_p, with the sum of '
                              'k^(p/2) sharpened',
    BoundName.LP_LOWER: 'product form on l_p block vectors: lower bound of c(k1..kn, l_p)',
    BoundName.X_LOWER: 'product form on l_1 block vectors: lower bound of c(k1..kn, X)',
    BoundName.SARANTOPOULOS: 'Sarantopoulos, L_p(mu) with 1 <= p <= m\': m^(m/p)/m!',
    BoundName.SQRT_N: 'Harris square-root bound at the worst n-part partition: '
                      '(||L||_(n)/||L^||)^(1/m) <= sqrt(n)',
}


@dataclass
class BoundReport:
    """
    A computed bound with its formula identity.

    Attributes:
    -----------
    name: BoundName
    log_value: float
        natural log of the bound; finite for all valid inputs
    partition: Partition
        None for bounds that depend on m (and n) only
    space_tag: str
        'generic' or 'lp(p)'
    branches: dict
        log values of the individual branches of a min
    """
    name: BoundName
    log_value: float
    partition: Partition = None
    space_tag: str = GENERIC
    branches: dict = field(default_factory=dict)

    @property
    def value(self):
        """exp(log_value), or None when it overflows double precision."""
        if self.log_value > LOG_FLOAT_MAX:
            return None
        return math.exp(self.log_value)

    @property
    def citation(self):
        return CITATIONS[self.name]

    def to_json(self):
        return {'name': self.name.value, 'value': self.value, 'log_value': self.log_value,
                'partition': None if self.partition is None else list(self.partition.parts),
                'space': self.space_tag, 'citation': self.citation,
                'branches': dict(self.branches)}


###############################################################################
# Helpers
###############################################################################

def log_gamma(x):
    return float(gammaln(x))


def _partition(partition):
    if not isinstance(partition, Partition):
        partition = Partition(partition)
    if partition.n == 0:
        raise InputRejected('Empty partition')
    return partition


def _exp(log_value):
    return math.inf if log_value > LOG_FLOAT_MAX else math.exp(log_value)


def _check_p(p):
    p = float(p)
    if not p >= 1:
        raise InputRejected('Need 1 <= p <= inf, got %s' % p)
    return p


def space_tag(p):
    return 'lp(%s)' % ('inf' if math.isinf(p) else repr(float(p)))


def _sum_klogk(partition):
    return math.fsum(xlogx(k) for k in partition.parts)


def _sum_logfact(partition):
    return math.fsum(log_factorial(k) for k in partition.parts)


def power_sum(partition, e):
    """sum_i k_i^e."""
    return math.fsum(k ** e for k in _partition(partition).parts)


def power_sum_bound(m, n, e):
    """(m-n+1)^e + n - 1: the largest sum_i k_i^e (e >= 1) over n-part partitions of m."""
    return (m - n + 1) ** e + n - 1


###############################################################################
# Generic normed spaces
###############################################################################

def bound_problem73(m):
    if m < 1:
        raise InputRejected('Need m >= 1, got %s' % m)
    return BoundReport(BoundName.PROBLEM73, xlogx(m) - log_factorial(m))


def bound_harris_complex(partition):
    """(k1!...kn! / k1^k1...kn^kn) m^m/m!"""
    partition = _partition(partition)
    m = partition.m
    log_value = _sum_logfact(partition) - _sum_klogk(partition) + xlogx(m) - log_factorial(m)
    return BoundReport(BoundName.HARRIS_COMPLEX, log_value, partition)


def bound_x_lower(partition):
    """Lower bound of c(k1..kn, X); same value as the complex constant."""
    report = bound_harris_complex(partition)
    return BoundReport(BoundName.X_LOWER, report.log_value, report.partition)


def bound_sqrt(partition):
    """sqrt(m^m / k1^k1...kn^kn)"""
    partition = _partition(partition)
    return BoundReport(BoundName.SQRT,
                       0.5 * (xlogx(partition.m) - _sum_klogk(partition)), partition)


def bound_new(partition):
    """(k1^k1...kn^kn / m!) n^m"""
    partition = _partition(partition)
    m, n = partition.m, partition.n
    log_value = _sum_klogk(partition) - log_factorial(m) + m * math.log(n)
    return BoundReport(BoundName.NEW, log_value, partition)


def bound_real_min(partition):
    """min(bound_sqrt, bound_new): upper bound of c(k1..kn, X) for real X."""
    partition = _partition(partition)
    sqrt_branch = bound_sqrt(partition).log_value
    new_branch = bound_new(partition).log_value
    return BoundReport(BoundName.REAL_MIN, min(sqrt_branch, new_branch), partition,
                       branches={'sqrt': sqrt_branch, 'new': new_branch})


def bound_sqrt_n(m, n):
    """n^(m/2)"""
    if not 1 <= n <= m:
        raise InputRejected('Need 1 <= n <= m, got m = %s, n = %s' % (m, n))
    return BoundReport(BoundName.SQRT_N, 0.5 * m * math.log(n))


def bound_nguyen(m, n):
    """e^(m/2) (em/n)^n C(m+n-1, n-1)"""
    if not 1 <= n <= m:
        raise InputRejected('Need 1 <= n <= m, got m = %s, n = %s' % (m, n))
    log_value = 0.5 * m + n * (1.0 + math.log(m) - math.log(n)) + \
        log_binomial(m + n - 1, n - 1)
    return BoundReport(BoundName.NGUYEN, log_value)


def f_min(m):
    """
    Minimize f(k) = k^k (m-k)^(m-k) over integers 1 <= k <= m-1, in exact
    integer arithmetic; ties go to the smaller k.

    Returns:
    ----------
    k: int
    value: int
    """
    if m < 2:
        raise InputRejected('f_min needs m >= 2, got %s' % m)
    best_k, best = None, None
    for k in range(1, m):
        value = k ** k * (m - k) ** (m - k)
        if best is None or value < best:
            best_k, best = k, value
    return best_k, best


@functools.lru_cache(maxsize=None)
def _product_table(m):
    """best[j][s]: (largest product, parts) over j positive parts summing to s."""
    best = [[None] * (m + 1) for _ in range(m + 1)]
    best[0][0] = (1, ())
    for j in range(1, m + 1):
        for s in range(j, m + 1):
            for k in range(1, s - j + 2):
                prev = best[j - 1][s - k]
                if prev is None:
                    continue
                candidate = (prev[0] * k, tuple(sorted(prev[1] + (k,))))
                if best[j][s] is None or candidate[0] > best[j][s][0]:
                    best[j][s] = candidate
    return best


def sup_product(m, n):
    """
    Exhaustive maximum of k1*...*kn over partitions of m into n positive parts.

    Returns:
    ----------
    witness: Partition
        parts in increasing order
    product: int
    bound: Fraction
        (m/n)^n; product <= bound with equality iff n divides m
    """
    if not 1 <= n <= m:
        raise InputRejected('Need 1 <= n <= m, got m = %s, n = %s' % (m, n))
    product, parts = _product_table(m)[n][m]
    bound = Fraction(m, n) ** n
    if product > bound:
        raise ArithmeticError('sup_product %d exceeds (m/n)^n = %s' % (product, bound))
    return Partition(parts), product, bound


def worst_sqrt_partition(m, n):
    """
    The n-part partition of m maximizing bound_sqrt (minimizing
    prod k^k): exhaustive for small m, the balanced split above.
    """
    if not 1 <= n <= m:
        raise InputRejected('Need 1 <= n <= m, got m = %s, n = %s' % (m, n))
    if m <= WORST_PARTITION_EXHAUSTIVE_M:
        best = min(integer_partitions(m, exact_parts=n),
                   key=lambda parts: (sum(xlogx(k) for k in parts), parts))
        return Partition(sorted(best))
    q, r = divmod(m, n)
    return Partition([q] * (n - r) + [q + 1] * r)


def asymptotic_constant(m, n):
    """
    C(m, n) = e^(-1/2) min(n^(m/2), bound_nguyen(m, n))^(1/m), so that
    (||L||_(n)/||L^||)^(1/m) <= C sqrt(e). The square-root branch uses its
    envelope n^(m/2), which the worst n-part partition reaches when n | m.
    """
    if n < 3:
        raise InputRejected('asymptotic_constant needs n >= 3 (n = 2 gives sqrt(2) exactly)')
    if m < n:
        raise InputRejected('Need m >= n, got m = %s, n = %s' % (m, n))
    log_min = min(bound_sqrt_n(m, n).log_value, bound_nguyen(m, n).log_value)
    return math.exp(-0.5 + log_min / m)


###############################################################################
# Moments and tails
###############################################################################

def _check_moment(k, subg_p):
    if int(k) != k or k < 1:
        raise InputRejected('Moment order must be a positive integer, got %s' % k)
    if not subg_p > 0:
        raise InputRejected('Sub-gaussian parameter must be positive, got %s' % subg_p)


def log_moment_bound_gamma(k, subg_p):
    _check_moment(k, subg_p)
    if k == 1:
        return 0.5 * math.log(2.0 * subg_p)
    if k == 2:
        return math.log(4.0 * subg_p)
    return math.log(k) + 0.5 * k * math.log(2.0 * subg_p) + log_gamma(0.5 * k)


def moment_bound_gamma(k, subg_p):
    """E|A|^k <= k (2p)^(k/2) Gamma(k/2); sqrt(2p) for k = 1 and 4p for k = 2."""
    return _exp(log_moment_bound_gamma(k, subg_p))


def log_moment_bound_unified(k, subg_p):
    _check_moment(k, subg_p)
    return math.log(k) + 1.0 + 0.5 * k * (math.log(subg_p * k) - 1.0)


def moment_bound_unified(k, subg_p):
    """k e (p k/e)^(k/2)"""
    return _exp(log_moment_bound_unified(k, subg_p))


def moment_bound_even(k, subg_p):
    """e sqrt(2(k-2)) (p k/e)^(k/2), for even k != 2."""
    _check_moment(k, subg_p)
    if k % 2 or k == 2:
        raise InputRejected('moment_bound_even needs even k != 2, got %s' % k)
    return _exp(1.0 + 0.5 * math.log(2.0 * (k - 2)) + 0.5 * k * (math.log(subg_p * k) - 1.0))


def moment_bound_odd(k, subg_p):
    """(k-1) sqrt(e) (p k/e)^(k/2), for odd k != 1."""
    _check_moment(k, subg_p)
    if k % 2 == 0 or k == 1:
        raise InputRejected('moment_bound_odd needs odd k != 1, got %s' % k)
    return _exp(math.log(k - 1) + 0.5 + 0.5 * k * (math.log(subg_p * k) - 1.0))


def hoeffding_tail(k, x):
    """P(|r_1 + ... + r_k| >= x) <= 2 exp(-x^2 / 2k)"""
    if k < 1 or x < 0:
        raise InputRejected('Need k >= 1 and x >= 0, got k = %s, x = %s' % (k, x))
    return 2.0 * math.exp(-x * x / (2.0 * k))


def _rademacher_sums(k):
    if int(k) != k or k < 1:
        raise InputRejected('Need a positive integer k, got %s' % k)
    if k > RADEMACHER_MAX_K:
        raise InputRejected('Exact Rademacher enumeration limited to k <= %d, got %s'
                            % (RADEMACHER_MAX_K, k))
    k = int(k)
    return [(math.comb(k, j), abs(k - 2 * j)) for j in range(k + 1)], 2 ** k


def exact_rademacher_tail(k, x):
    """P(|r_1 + ... + r_k| >= x) by binomial enumeration."""
    sums, total = _rademacher_sums(k)
    return sum(count for count, s in sums if s >= x) / total


def hoeffding_moment(k, p):
    """p (2k)^(p/2) Gamma(p/2): the tail integral p int x^(p-1) 2exp(-x^2/2k) dx."""
    if k < 1 or not p > 0:
        raise InputRejected('Need k >= 1 and p > 0, got k = %s, p = %s' % (k, p))
    return _exp(math.log(p) + 0.5 * p * math.log(2.0 * k) + log_gamma(0.5 * p))


def exact_rademacher_moment(k, p):
    """E|r_1 + ... + r_k|^p by binomial enumeration."""
    sums, total = _rademacher_sums(k)
    return math.fsum(count * float(s) ** p for count, s in sums) / total


###############################################################################
# l_p spaces
###############################################################################

def _lp_terms(partition, p):
    """log of the block-averaged term and of the tail-integral term (None at p = inf)."""
    m, n = partition.m, partition.n
    log_mfact = log_factorial(m)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    term1 = _sum_klogk(partition) - log_mfact + m * inv_p * math.log(n)
    if math.isinf(p):
        return term1, None, None
    if p >= m:
        e = 0.5 * p
        prefactor = math.log(p) + e * math.log(2.0) + log_gamma(e) - log_mfact
    else:
        e = 0.5 * m
        prefactor = (m - p) / p * math.log(n) + math.log(m) + e * math.log(2.0) + \
            log_gamma(e) - log_mfact
    return term1, prefactor, e


def bound_lp_upper(partition, p):
    """
    Upper bound of c(k1..kn, l_p): the smaller of the block-averaged bound
    (prod k^k / m!) n^(m/p) and the tail-integral bound, whose form depends
    on whether p >= m. At p = inf only the first term is kept.
    """
    partition = _partition(partition)
    p = _check_p(p)
    term1, prefactor, e = _lp_terms(partition, p)
    branches = {'block': term1}
    if prefactor is not None:
        branches['tail'] = prefactor + e * math.log(partition.m)
    return BoundReport(BoundName.LP_UPPER, min(branches.values()), partition,
                       space_tag(p), branches)


def bound_lp_upper_sharp(partition, p):
    """
    bound_lp_upper with the factor m^e of the tail-integral term replaced
    by the smallest of sum k^e, (m-n+1)^e + n - 1 and m^e.
    """
    partition = _partition(partition)
    p = _check_p(p)
    term1, prefactor, e = _lp_terms(partition, p)
    branches = {'block': term1}
    if prefactor is not None:
        m, n = partition.m, partition.n
        log_exact = float(logsumexp([e * math.log(k) for k in partition.parts]))
        log_remark = float(np.logaddexp(e * math.log(m - n + 1),
                                        math.log(n - 1) if n > 1 else -np.inf))
        branches['tail'] = prefactor + min(log_exact, log_remark, e * math.log(m))
    return BoundReport(BoundName.LP_UPPER_SHARP, min(branches.values()), partition,
                       space_tag(p), branches)


def bound_lp_lower(partition, p):
    """(k1!...kn! / k1^(k1/p)...kn^(kn/p)) m^(m/p)/m!"""
    partition = _partition(partition)
    p = _check_p(p)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    log_value = _sum_logfact(partition) - inv_p * _sum_klogk(partition) + \
        inv_p * xlogx(partition.m) - log_factorial(partition.m)
    return BoundReport(BoundName.LP_LOWER, log_value, partition, space_tag(p))


def bound_sarantopoulos(m, p):
    """m^(m/p)/m!"""
    if m < 1:
        raise InputRejected('Need m >= 1, got %s' % m)
    p = _check_p(p)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    return BoundReport(BoundName.SARANTOPOULOS, inv_p * xlogx(m) - log_factorial(m),
                       None, space_tag(p))


def bound_catalog():
    """Name -> (callable, argument kind) for every bound the CLI tabulates."""
    return {
        BoundName.PROBLEM73: (bound_problem73, 'm'),
        BoundName.HARRIS_COMPLEX: (bound_harris_complex, 'partition'),
        BoundName.SQRT: (bound_sqrt, 'partition'),
        BoundName.NEW: (bound_new, 'partition'),
        BoundName.REAL_MIN: (bound_real_min, 'partition'),
        BoundName.X_LOWER: (bound_x_lower, 'partition'),
        BoundName.NGUYEN: (bound_nguyen, 'm,n'),
        BoundName.SQRT_N: (bound_sqrt_n, 'm,n'),
        BoundName.LP_UPPER: (bound_lp_upper, 'partition,p'),
        BoundName.LP_UPPER_SHARP: (bound_lp_upper_sharp, 'partition,p'),
        BoundName.LP_LOWER: (bound_lp_lower, 'partition,p'),
        BoundName.SARANTOPOULOS: (bound_sarantopoulos, 'm,p'),
    }
