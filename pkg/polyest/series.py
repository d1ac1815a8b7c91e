################################################################################
#
# series.py 		polyest
#
# Power series sum_m L^_m(x - a) on R^d: evaluation with a tail estimate,
# radius of uniform convergence, the re-expansion radius rho_bar (never
# below rho/sqrt(2)), re-expansion at a new center and the Taylor series
# of the Frechet derivatives D^n F.
################################################################################

import functools
import itertools
import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from polyest.forms import SymmetricForm, contract, eval_poly, log_mixed_amplification, \
    polarize, taylor_pieces
from polyest.norms import LpSpace, estimate_mixed_norm, estimate_poly_norm
from polyest.utilities import InputRejected, SeriesDivergence, binomial_weight, \
    derive_seed, restart_rng

logger = logging.getLogger(__name__)

TRUNCATED_LIMSUP = 'truncated-limsup'
EXACT_GEOMETRIC = 'exact-geometric'
DECLARED = 'declared'

MIN_NONZERO_TERMS = 8
# number of realizing degrees whose ||L||_(2) enters the empirical rho_bar
RHO_BAR_DEGREES = 3
# largest rounding error accepted in the m-th root of a mixed norm
MIXED_ROOT_TOL = 1e-4
# degrees within this relative distance of the largest root realize the limsup
REALIZING_FRACTION = 1e-3

FD_STEP = {1: 1e-4, 2: 1e-4, 3: 1e-3}
FD_TOL = {1: 1e-5, 2: 1e-4, 3: 1e-3}

SeriesValue = namedtuple('SeriesValue', ['value', 'tail'])


@dataclass
class CheckReport:
    """Named claims of a verification and the numbers behind them."""
    name: str
    claims: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.claims.values())

    @property
    def failures(self):
        return [name for name, ok in self.claims.items() if not ok]

    def to_json(self):
        return {'check': self.name, 'passed': self.passed, 'claims': dict(self.claims),
                'failures': self.failures, 'values': dict(self.values)}


class PowerSeries(object):
    """
    Truncation sum_{m=0}^{M} L^_m(x - center) of a power series.

    Attributes:
    -----------
    terms: list of SymmetricForm
        terms[m] has degree m
    space: LpSpace
    center: array
    declared_radius: float
        radius of uniform convergence supplied with the series, or None
    """

    def __init__(self, terms, space, center=None, declared_radius=None):
        if len(terms) == 0:
            raise InputRejected('Empty series')
        for m, term in enumerate(terms):
            if term.degree != m or term.dim != space.dim:
                raise InputRejected('Term %d has degree %d and dim %d; expected degree %d, '
                                    'dim %d' % (m, term.degree, term.dim, m, space.dim))
        self.terms = list(terms)
        self.space = space
        self.center = np.zeros(space.dim) if center is None else \
            np.asarray(center, dtype=float)
        if self.center.shape != (space.dim,):
            raise InputRejected('Center must have length %d' % space.dim)
        self.declared_radius = declared_radius

    @property
    def degree(self):
        return len(self.terms) - 1

    @property
    def dim(self):
        return self.space.dim

    @classmethod
    def polynomial(cls, terms, space, center=None):
        """A finite series: the terms are the whole function, radius +inf."""
        return cls(terms, space, center, math.inf)

    @classmethod
    def geometric(cls, c, M, d=1, p=2.0):
        """Terms (c x_1)^m, m = 0..M."""
        terms = [SymmetricForm(m, d, {(m,) + (0,) * (d - 1): float(c) ** m})
                 for m in range(M + 1)]
        return cls(terms, LpSpace(p, d))

    @classmethod
    def from_json(cls, obj):
        try:
            space = LpSpace.from_json(obj['space'])
            terms = [SymmetricForm.from_json(t) for t in obj['terms']]
            radius = obj.get('radius')
            if radius is not None:
                radius = math.inf if radius == 'inf' else float(radius)
            return cls(terms, space, obj.get('center'), radius)
        except (KeyError, TypeError, AttributeError, ValueError) as err:
            raise InputRejected('Malformed series JSON: %s' % err)

    def to_json(self):
        obj = {'space': self.space.to_json(), 'terms': [t.to_json() for t in self.terms]}
        if np.any(self.center != 0):
            obj['center'] = list(self.center)
        if self.declared_radius is not None:
            obj['radius'] = 'inf' if math.isinf(self.declared_radius) else self.declared_radius
        return obj

    def __repr__(self):
        return 'PowerSeries(M=%d, %r)' % (self.degree, self.space)


###############################################################################
# Evaluation and radius
###############################################################################

def _tail_window(M, tail_window=None):
    """Degrees of the trailing window: the last half by default."""
    if tail_window is None:
        tail_window = M - (M + 1) // 2 + 1
    return [m for m in range(max(1, M - tail_window + 1), M + 1)]


def _geometric_tail(bounds, M):
    """q^(M+1)/(1-q) with q the largest m-th root in the window, None if q >= 1."""
    roots = [b ** (1.0 / m) for m, b in bounds if b > 0]
    if not roots:
        return 0.0
    q = max(roots)
    if q >= 1.0:
        return None
    return q ** (M + 1) / (1.0 - q)


def eval_series(series, x):
    """
    Partial sum at x with a geometric tail estimate from the last window
    of the majorants sum|c_alpha| ||x - a||_inf^m.

    Returns:
    ----------
    SeriesValue(value, tail)

    Raises:
    ----------
    SeriesDivergence when neither the majorants nor the computed terms
    of the last window decay.
    """
    z = np.asarray(x, dtype=float) - series.center
    if z.shape != (series.dim,):
        raise InputRejected('Expected a point of length %d' % series.dim)
    values = [eval_poly(term, z) for term in series.terms]
    value = math.fsum(values)
    M = series.degree
    if series.declared_radius == math.inf:
        return SeriesValue(value, 0.0)
    window = _tail_window(M, max(4, (M + 1) // 4))
    r = float(np.max(np.abs(z)))
    tail = _geometric_tail([(m, series.terms[m].coefficient_bound() * r ** m)
                            for m in window], M)
    if tail is None:
        tail = _geometric_tail([(m, abs(values[m])) for m in window], M)
    if tail is None:
        raise SeriesDivergence('Partial sums at %s are not Cauchy: last terms do not decay'
                               % (list(np.asarray(x, dtype=float)),))
    return SeriesValue(value, tail)


@dataclass
class RadiusEstimate:
    """
    Attributes:
    -----------
    rho: float
        1/limsup ||L^_m||^(1/m); an upper estimate when norms are lower-certified
    method: str
        truncated-limsup, exact-geometric or declared
    tail_window: int
        number of degrees in the window
    roots: dict
        degree -> ||L^_m||^(1/m) estimate over the window
    """
    rho: float
    method: str
    tail_window: int
    roots: dict = field(default_factory=dict)

    def to_json(self):
        return {'rho': self.rho, 'method': self.method, 'tail_window': self.tail_window}


def radius_uniform(series, budget=256, seed=42, tail_window=None):
    """
    rho = 1/limsup ||L^_m||^(1/m), the limsup replaced by the maximum over
    the trailing window of degrees (the last half by default).
    """
    window = _tail_window(series.degree, tail_window)
    if series.declared_radius is not None:
        return RadiusEstimate(series.declared_radius, DECLARED, len(window))
    if all(series.terms[m].is_zero() for m in window):
        return RadiusEstimate(math.inf, TRUNCATED_LIMSUP, len(window))

    nonzero = sum(1 for t in series.terms if not t.is_zero())
    if nonzero < MIN_NONZERO_TERMS:
        raise InputRejected('Truncated limsup needs %d nonzero terms, series has %d; '
                            'declare a radius instead' % (MIN_NONZERO_TERMS, nonzero))

    if series.dim == 1:
        # on a line every unit vector is +-1: the norm is |c_m|
        roots = {m: series.terms[m].coefficient_bound() ** (1.0 / m) for m in window}
        method = EXACT_GEOMETRIC
    else:
        roots = {}
        for m in window:
            estimate = estimate_poly_norm(series.terms[m], series.space, budget,
                                          derive_seed(seed, m))
            roots[m] = estimate.value ** (1.0 / m)
        method = TRUNCATED_LIMSUP
    limsup = max(roots.values())
    rho = math.inf if limsup == 0.0 else 1.0 / limsup
    logger.info('rho = %.17g by %s over degrees %d..%d', rho, method, window[0], window[-1])
    return RadiusEstimate(rho, method, len(window), roots)


@dataclass
class RhoBar:
    """
    Attributes:
    -----------
    rho_bar: float
        max(empirical, floor)
    empirical: float
        rho * max (||L^_m|| / ||L_m||_(2))^(1/m) over the degrees realizing
        the limsup; None when none of them is resolvable in double precision
    floor: float
        rho/sqrt(2), guaranteed
    rho: float
    """
    rho_bar: float
    empirical: float
    floor: float
    rho: float

    def to_json(self):
        return {'rho_bar': self.rho_bar, 'empirical': self.empirical,
                'floor': self.floor, 'rho': self.rho}


@functools.lru_cache(maxsize=None)
def _mixed_root_error(m):
    """
    Relative error of (||L^|| / ||L||_(2))^(1/m) caused by rounding in the
    batched two-block sign sums, worst case over the partitions (k, m - k).
    """
    if m < 2:
        return 0.0
    worst = max(log_mixed_amplification((k, m - k)) for k in range(1, m // 2 + 1))
    return math.exp(worst) * np.finfo(float).eps / m


def rho_bar(series, budget=256, seed=42, radius=None):
    """
    Re-expansion radius rho_bar = rho * limsup (||L^_m|| / ||L_m||_(2))^(1/m).
    The limsup is taken over the largest degrees realizing the radius whose
    mixed norm is resolvable in double precision. The ||L_m||_(2) estimates
    use a reduced budget, so the empirical value is heuristic; the floor
    rho/sqrt(2) always holds.
    """
    radius = radius or radius_uniform(series, budget, seed)
    rho = radius.rho
    floor = rho / math.sqrt(2.0)
    if math.isinf(rho):
        return RhoBar(math.inf, math.inf, math.inf, rho)
    if series.dim == 1:
        return RhoBar(rho, rho, floor, rho)

    top = max(radius.roots.values()) if radius.roots else 0.0
    realizing = [m for m, root in sorted(radius.roots.items(), reverse=True)
                 if root >= (1.0 - REALIZING_FRACTION) * top]
    resolvable = []
    for m in realizing:
        if len(resolvable) == RHO_BAR_DEGREES:
            break
        if _mixed_root_error(m) <= MIXED_ROOT_TOL:
            resolvable.append(m)
    if realizing and not resolvable:
        logger.warning('rho_bar: degrees %d..%d realize the radius but their mixed norms '
                       'are not resolvable in double precision; reporting the floor',
                       min(realizing), max(realizing))
    reduced = max(1, budget // 4)
    ratios = []
    for m in resolvable:
        term = series.terms[m]
        if m == 1:
            ratios.append(1.0)
            continue
        term_seed = derive_seed(seed, m)
        poly = estimate_poly_norm(term, series.space, reduced, term_seed)
        mixed = estimate_mixed_norm(term, 2, series.space, reduced, term_seed, pool=[poly])
        if mixed.value > 0:
            ratios.append((poly.value / mixed.value) ** (1.0 / m))
    empirical = rho * max(ratios) if ratios else None
    value = floor if empirical is None else max(empirical, floor)
    logger.info('rho_bar = %.17g (empirical %s, floor %.17g)', value, empirical, floor)
    return RhoBar(value, empirical, floor, rho)


###############################################################################
# Re-expansion
###############################################################################

@dataclass
class ReexpansionPlan:
    """
    A_k(z) = sum_{m>=k} C(m, k) L_m(y^(m-k), z^k), the k-homogeneous
    coefficients of the series re-expanded at the new center, with y the
    displacement from the old center.
    """
    new_center: np.ndarray
    offset: np.ndarray
    rho_bar: float
    valid_ball_radius: float
    coefficients: list

    def evaluate(self, z):
        """sum_k A_k(z), z measured from the new center."""
        return math.fsum(eval_poly(A, z) for A in self.coefficients)

    def to_json(self):
        return {'new_center': list(self.new_center), 'rho_bar': self.rho_bar,
                'valid_ball_radius': self.valid_ball_radius,
                'coefficients': [A.to_json() for A in self.coefficients]}


def reexpand(series, y, K=None, budget=256, seed=42, bar=None):
    """
    Re-expand the series at the point y, keeping degrees 0..K.

    Parameters:
    ----------
    y: array
        new center; ||y - center|| < rho_bar required
    K: int
        output degree cap (defaults to the series degree)
    bar: RhoBar
        precomputed rho_bar; computed with budget and seed when None
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (series.dim,):
        raise InputRejected('Expected a center of length %d' % series.dim)
    K = series.degree if K is None else int(K)
    if K < 0:
        raise InputRejected('Degree cap K must be >= 0, got %d' % K)
    bar = bar or rho_bar(series, budget, seed)
    offset = y - series.center
    y_norm = series.space.norm(offset)
    if not y_norm < bar.rho_bar:
        raise InputRejected('Re-expansion needs ||y|| < rho_bar, got %.17g >= %.17g'
                            % (y_norm, bar.rho_bar))

    coefficients = [SymmetricForm.zero(k, series.dim) for k in range(K + 1)]
    for term in series.terms:
        if term.is_zero():
            continue
        for k, piece in enumerate(taylor_pieces(term, offset)[:K + 1]):
            if not piece.is_zero():
                coefficients[k] = coefficients[k] + piece
    logger.debug('re-expanded at %s: %d coefficients, valid radius %.17g',
                 list(y), K + 1, bar.rho_bar - y_norm)
    return ReexpansionPlan(y, offset, bar.rho_bar, bar.rho_bar - y_norm, coefficients)


def verify_analyticity(series, y, x, tolerance=1e-8, K=None, budget=256, seed=42,
                       margin=0.0, bar=None):
    """
    Compare the direct sum at x with the re-expansion at y evaluated at x.
    Pieces of degree > K are dropped; their sum is bounded by the majorant
    sum_{m=K+1}^{M} sum|c_alpha| r^m with r = ||y - a||_inf + ||x - y||_inf.
    The operational stand-in for full analyticity on the ball: one
    re-expansion, checked at one point.

    Returns:
    ----------
    report: CheckReport
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    bar = bar or rho_bar(series, budget, seed)
    offset = y - series.center
    reach = series.space.norm(offset) + series.space.norm(x - y)
    if not reach < bar.rho_bar - margin:
        raise InputRejected('Need ||y|| + ||x - y|| < rho_bar - margin, got %.17g >= %.17g'
                            % (reach, bar.rho_bar - margin))
    K = series.degree if K is None else int(K)

    direct = eval_series(series, x)
    plan = reexpand(series, y, K, bar=bar)
    reexpanded = plan.evaluate(x - y)
    observed = abs(direct.value - reexpanded)
    r = float(np.max(np.abs(offset)) + np.max(np.abs(x - y)))
    majorant = math.fsum(series.terms[m].coefficient_bound() * r ** m
                         for m in range(K + 1, series.degree + 1))
    scale = max(1.0, abs(direct.value))

    report = CheckReport('analyticity')
    report.values.update({'direct': direct.value, 'direct_tail': direct.tail,
                          'reexpanded': reexpanded, 'observed': observed,
                          'majorant': majorant, 'rho_bar': bar.rho_bar,
                          'valid_ball_radius': plan.valid_ball_radius})
    report.claims['values_match'] = observed <= tolerance * scale + majorant
    report.claims['majorant_dominates'] = observed <= majorant + 1e-12 * scale
    return report


###############################################################################
# Frechet derivatives
###############################################################################

class DerivativeSeries(object):
    """
    Taylor series of D^n F: coefficient k is the form
    n! C(k+n, n) L^_(k+n), of degree k + n, with n slots reserved for the
    directions.

    Attributes:
    -----------
    terms: list of SymmetricForm
    slots: int
        n
    floor: float
        guaranteed radius of uniform convergence, rho/sqrt(2) for n <= 2
        and rho/sqrt(e) for n >= 3
    """

    def __init__(self, terms, slots, space, center, floor):
        self.terms = terms
        self.slots = slots
        self.space = space
        self.center = center
        self.floor = floor

    def evaluate(self, x, directions, caps=None):
        """D^n F(x)[u_1, ..., u_n] = sum_k coefficient_k(x^k, u_1, ..., u_n)."""
        if len(directions) != self.slots:
            raise InputRejected('Need %d directions, got %d' % (self.slots, len(directions)))
        z = np.asarray(x, dtype=float) - self.center
        values = []
        for k, term in enumerate(self.terms):
            if term.is_zero():
                continue
            values.append(polarize(contract(term, z, k), list(directions), caps))
        return math.fsum(values)


def derivative_floor(rho, n):
    return rho / math.sqrt(2.0) if n <= 2 else rho / math.sqrt(math.e)


def dn_taylor(series, n, budget=256, seed=42, radius=None):
    """
    Taylor series of the n-th Frechet derivative, with its radius floor.
    """
    n = int(n)
    if n < 1:
        raise InputRejected('Derivative order must be >= 1, got %d' % n)
    if n > series.degree:
        raise InputRejected('Derivative order %d exceeds the truncation degree %d'
                            % (n, series.degree))
    radius = radius or radius_uniform(series, budget, seed)
    terms = [series.terms[k + n].scaled(math.factorial(n) * binomial_weight(k + n, n))
             for k in range(series.degree - n + 1)]
    return DerivativeSeries(terms, n, series.space, series.center,
                            derivative_floor(radius.rho, n))


def _fd_derivative(series, x, directions, h):
    """Central mixed difference sum_eps prod(eps) F(x + h sum eps_i u_i) / (2h)^n."""
    n = len(directions)
    U = np.asarray(directions, dtype=float)
    total = []
    for eps in itertools.product((1.0, -1.0), repeat=n):
        eps = np.array(eps)
        total.append(np.prod(eps) * eval_series(series, x + h * (eps @ U)).value)
    return math.fsum(total) / (2.0 * h) ** n


def _fd_richardson(series, x, directions, h):
    coarse = _fd_derivative(series, x, directions, h)
    fine = _fd_derivative(series, x, directions, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def _unit_directions(series, n, seed):
    rng = restart_rng(seed, n)
    return list(series.space.normalize(rng.standard_normal((n, series.dim))))


def dn_check_fd(series, n, x, h=None, seed=42, tolerance=None, directions=None,
                budget=256, radius=None):
    """
    Compare D^n F(x)[u_1..u_n] from dn_taylor with Richardson-extrapolated
    central differences along random unit directions.
    """
    n = int(n)
    if not 1 <= n <= 3:
        raise InputRejected('Finite-difference check supports 1 <= n <= 3, got %d' % n)
    h = FD_STEP[n] if h is None else h
    tolerance = FD_TOL[n] if tolerance is None else tolerance
    x = np.asarray(x, dtype=float)
    directions = directions if directions is not None else _unit_directions(series, n, seed)

    exact = dn_taylor(series, n, budget, seed, radius).evaluate(x, directions)
    fd = _fd_richardson(series, x, directions, h)
    rel_error = abs(fd - exact) / max(abs(exact), 1.0)

    report = CheckReport('dn_fd_%d' % n)
    report.values.update({'series': exact, 'finite_difference': fd, 'rel_error': rel_error,
                          'h': h, 'tolerance': tolerance})
    report.claims['fd_matches'] = rel_error <= tolerance
    return report


def verify_taylor_identity(series, y, kmax=3, seed=42, budget=256, bar=None):
    """
    A_k = (1/k!) D^k F(y) on the diagonal: A_k(u) from reexpand against the
    k-th central difference of eval_series at y along a random unit u.
    """
    if not 0 <= kmax <= 3:
        raise InputRejected('Taylor identity check supports k <= 3, got %d' % kmax)
    y = np.asarray(y, dtype=float)
    plan = reexpand(series, y, kmax, budget, seed, bar)
    u = _unit_directions(series, 1, seed)[0]

    report = CheckReport('taylor_identity')
    direct = eval_series(series, y).value
    a0 = eval_poly(plan.coefficients[0], u)
    report.values['A_0'] = a0
    report.claims['A_0'] = abs(a0 - direct) <= 1e-12 * max(1.0, abs(direct))
    for k in range(1, kmax + 1):
        a_k = eval_poly(plan.coefficients[k], u)
        fd = _fd_richardson(series, y, [u] * k, FD_STEP[k]) / math.factorial(k)
        rel_error = abs(fd - a_k) / max(abs(a_k), 1.0)
        report.values['A_%d' % k] = a_k
        report.values['fd_%d' % k] = fd
        report.claims['A_%d' % k] = rel_error <= FD_TOL[k]
    return report
