################################################################################
#
# suites.py 		polyest
#
# Verification suites driven by `polyest verify`. Every suite is a list of
# independent seeded cases; cases may run on a thread pool and results are
# collected in input order, so reports do not depend on the thread count.
################################################################################

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from polyest import bounds
from polyest.extremal import build_extremal_lp, build_extremal_x, verify_extremal
from polyest.forms import Partition, SymmetricForm, eval_direct_oracle, eval_poly, \
    polarize
from polyest.norms import LpSpace, estimate_mixed_norm, estimate_partition_value, \
    estimate_poly_norm, grid_norm_oracle, ratio_statistic
from polyest.series import PowerSeries, dn_check_fd, radius_uniform, rho_bar, \
    verify_analyticity, verify_taylor_identity
from polyest.utilities import UsageError, derive_seed, integer_partitions, restart_rng

logger = logging.getLogger(__name__)

LOG_TOL = 1e-12
POLARIZATION_TOL = 1e-10
DOMINANCE_SLACK = 1.05
RATIO_SLACK = 0.02


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return len(self.failures) == 0

    def to_json(self):
        return {'suite': self.name, 'checks': self.checks, 'passed': self.passed,
                'failures': self.failures}


class CaseLog(object):
    """Counts checks of one case and records the failed ones."""

    def __init__(self):
        self.checks = 0
        self.failures = []

    def check(self, ok, claim, **instance):
        self.checks += 1
        if not ok:
            self.failures.append(_jsonable(dict(claim=claim, **instance)))
        return ok


def _jsonable(obj):
    """Round-trip through json so failure dumps hold plain values."""
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        if isinstance(o, Partition):
            return list(o.parts)
        if hasattr(o, 'to_json'):
            return o.to_json()
        return str(o)
    return json.loads(json.dumps(obj, default=default))


def _run_cases(name, case, inputs, config):
    result = SuiteResult(name)
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        for log in pool.map(lambda item: case(item, config), inputs):
            result.checks += log.checks
            result.failures.extend(log.failures)
    logger.info('suite %s: %d checks, %d failures', name, result.checks,
                len(result.failures))
    return result


def _scale(form, args):
    """sum|c| prod ||x_i||_inf, an upper bound of |L(x_1, ..., x_m)|."""
    return max(form.coefficient_bound() * math.prod(float(np.max(np.abs(x))) for x in args),
               1e-300)


def random_corpus(seed, count, max_degree, max_dim, min_degree=1, min_dim=1):
    """Seeded random forms, coefficients uniform in [-1, 1]."""
    forms = []
    for i in range(count):
        rng = restart_rng(seed, i)
        m = int(rng.integers(min_degree, max_degree + 1))
        d = int(rng.integers(min_dim, max_dim + 1))
        forms.append(SymmetricForm.random(m, d, rng))
    return forms


###############################################################################
# polarization
###############################################################################

def _polarization_case(item, config):
    i, form = item
    log = CaseLog()
    rng = restart_rng(config.seed, i, 1)
    m, d = form.degree, form.dim
    for t in range(10):
        args = list(rng.standard_normal((m, d)))
        scale = _scale(form, args)
        value = polarize(form, args, config.caps)
        oracle = eval_direct_oracle(form, args, config.caps)
        log.check(abs(value - oracle) <= POLARIZATION_TOL * scale, 'polarize_equals_oracle',
                  form=form, args=args, polarize=value, oracle=oracle)

        permuted = [args[j] for j in rng.permutation(m)]
        log.check(abs(polarize(form, permuted, config.caps) - value) <= POLARIZATION_TOL * scale,
                  'symmetric', form=form, args=args)

        a, b = rng.standard_normal(2)
        u, v = rng.standard_normal((2, d))
        slot = int(rng.integers(m))
        mixed = list(args)
        mixed[slot] = a * u + b * v
        left = polarize(form, mixed, config.caps)
        ml_scale = _scale(form, mixed)
        mixed[slot] = u
        right = a * polarize(form, mixed, config.caps)
        ml_scale += abs(a) * _scale(form, mixed)
        mixed[slot] = v
        right += b * polarize(form, mixed, config.caps)
        ml_scale += abs(b) * _scale(form, mixed)
        log.check(abs(left - right) <= POLARIZATION_TOL * ml_scale, 'multilinear',
                  form=form, args=args, slot=slot)

        x = args[0]
        diagonal = polarize(form, [x] * m, config.caps)
        log.check(abs(diagonal - eval_poly(form, x)) <= 1e-12 * _scale(form, [x] * m),
                  'diagonal_equals_poly', form=form, x=x)
    return log


def suite_polarization(config, count=200):
    forms = random_corpus(config.seed, count, 6, 4)
    return _run_cases('polarization', _polarization_case, list(enumerate(forms)), config)


###############################################################################
# sandwich
###############################################################################

SANDWICH_P = (1.0, 1.5, 2.0, 4.0, 8.0)


def _sandwich_case(m, config):
    log = CaseLog()
    p_list = sorted(set(SANDWICH_P + (float(m), 2.0 * m, math.inf)))
    for parts in integer_partitions(m):
        partition = Partition(parts)
        lower = bounds.bound_x_lower(partition).log_value
        upper = bounds.bound_real_min(partition).log_value
        log.check(lower <= upper + LOG_TOL, 'x_lower_below_real_min', partition=partition,
                  lower=lower, upper=upper)
        for p in p_list:
            lp_lower = bounds.bound_lp_lower(partition, p).log_value
            sharp = bounds.bound_lp_upper_sharp(partition, p).log_value
            lp_upper = bounds.bound_lp_upper(partition, p).log_value
            log.check(lp_lower <= sharp + LOG_TOL and sharp <= lp_upper + LOG_TOL,
                      'lp_sandwich', partition=partition, p=str(p), lower=lp_lower,
                      sharp=sharp, upper=lp_upper)

    ones = Partition([1] * m)
    log.check(abs(bounds.bound_x_lower(ones).log_value -
                  bounds.bound_real_min(ones).log_value) <= LOG_TOL,
              'generic_pinch', m=m)
    log.check(abs(bounds.bound_x_lower(ones).log_value -
                  bounds.bound_problem73(m).log_value) <= LOG_TOL,
              'generic_pinch_problem73', m=m)
    for p in p_list:
        lower = bounds.bound_lp_lower(ones, p).log_value
        log.check(abs(lower - bounds.bound_lp_upper(ones, p).log_value) <= LOG_TOL,
                  'lp_pinch', m=m, p=str(p))
        log.check(abs(lower - bounds.bound_sarantopoulos(m, p).log_value) <= LOG_TOL,
                  'lp_pinch_sarantopoulos', m=m, p=str(p))
    return log


def suite_sandwich(config, max_degree=12):
    return _run_cases('sandwich', _sandwich_case, list(range(1, max_degree + 1)), config)


###############################################################################
# moments and tails
###############################################################################

MOMENT_P = (0.5, 1.0, 2.0, 5.0, 10.0)


def _moments_case(subg_p, config):
    log = CaseLog()
    for k in range(1, 401):
        gamma = bounds.log_moment_bound_gamma(k, subg_p)
        unified = bounds.log_moment_bound_unified(k, subg_p)
        log.check(gamma <= unified + LOG_TOL, 'gamma_below_unified', k=k, subg_p=subg_p,
                  gamma=gamma, unified=unified)
    for k in range(3, 101):
        middle = bounds.moment_bound_even(k, subg_p) if k % 2 == 0 else \
            bounds.moment_bound_odd(k, subg_p)
        log.check(middle <= bounds.moment_bound_unified(k, subg_p), 'stirling_below_unified',
                  k=k, subg_p=subg_p)
    return log


def suite_moments(config):
    return _run_cases('moments', _moments_case, list(MOMENT_P), config)


def _tails_case(k, config):
    log = CaseLog()
    for i in range(10 * k + 1):
        x = i / 10
        bound = bounds.hoeffding_tail(k, x)
        exact = bounds.exact_rademacher_tail(k, x)
        log.check(bound >= exact, 'hoeffding_dominates_tail', k=k, x=x, bound=bound,
                  exact=exact)
    for p in (1, 2, 3, 4, 6, 8):
        bound = bounds.hoeffding_moment(k, p)
        exact = bounds.exact_rademacher_moment(k, p)
        log.check(bound >= exact, 'hoeffding_dominates_moment', k=k, p=p, bound=bound,
                  exact=exact)
    return log


def suite_tails(config, max_k=24):
    return _run_cases('tails', _tails_case, list(range(1, max_k + 1)), config)


###############################################################################
# extremal
###############################################################################

def _extremal_case(item, config):
    i, partition, p = item
    log = CaseLog()
    instance = build_extremal_x(partition) if p is None else build_extremal_lp(partition, p)
    report = verify_extremal(instance, config.budget, derive_seed(config.seed, i), config.caps)
    for claim, ok in report.claims.items():
        log.check(ok, claim, instance=instance, report=report)
    if partition.n > 1:
        swapped = Partition(reversed(partition.parts))
        other = build_extremal_x(swapped) if p is None else build_extremal_lp(swapped, p)
        attained = other.recompute_attained(config.caps)
        log.check(abs(attained - instance.attained_value) <=
                  1e-10 * instance.attained_value, 'block_permutation', partition=partition,
                  p=str(p))
    return log


def suite_extremal(config, max_degree=8):
    items = []
    for m in range(1, max_degree + 1):
        for parts in integer_partitions(m):
            partition = Partition(parts)
            for p in sorted(set((None, 1.0, 1.5, 2.0, 4.0, float(m))),
                            key=lambda v: -1.0 if v is None else v):
                items.append((len(items), partition, p))
    return _run_cases('extremal', _extremal_case, items, config)


###############################################################################
# asymptotic
###############################################################################

def _asymptotic_case(n, config):
    log = CaseLog()
    values = [bounds.asymptotic_constant(m, n) for m in (200, 400, 800, 1600)]
    for a, b in zip(values, values[1:]):
        log.check(b <= a, 'decreasing_along_doubling', n=n, values=values)
    if n == 3:
        value = bounds.asymptotic_constant(1000, 3)
        log.check(value <= 1.05, 'below_1.05_at_1000', value=value)
    return log


def _combinatorics_case(m, config):
    log = CaseLog()
    if m >= 2:
        k, value = bounds.f_min(m)
        log.check(k == m // 2, 'f_min_argmin', m=m, k=k)
        if m % 2 == 0:
            log.check(value == (m // 2) ** m, 'f_min_value', m=m, value=value)
    for n in range(1, m + 1):
        witness, product, bound = bounds.sup_product(m, n)
        log.check(product <= bound, 'sup_product_bound', m=m, n=n, product=product)
        log.check((product == bound) == (m % n == 0), 'sup_product_equality', m=m, n=n,
                  witness=witness, product=product, bound=str(bound))
        worst = bounds.worst_sqrt_partition(m, n)
        attained = bounds.bound_sqrt(worst).log_value
        envelope = bounds.bound_sqrt_n(m, n).log_value
        tol = LOG_TOL * max(1.0, abs(envelope))
        log.check(attained <= envelope + tol, 'sqrt_envelope_dominates', m=m, n=n,
                  worst=worst.parts, attained=attained, envelope=envelope)
        if m % n == 0:
            log.check(abs(attained - envelope) <= tol, 'sqrt_envelope_reached', m=m, n=n,
                      worst=worst.parts, attained=attained, envelope=envelope)
    return log


def suite_asymptotic(config):
    result = _run_cases('asymptotic', _asymptotic_case, [3, 4, 5], config)
    extra = _run_cases('asymptotic', _combinatorics_case, list(range(1, 61)), config)
    result.checks += extra.checks
    result.failures.extend(extra.failures)
    return result


###############################################################################
# series
###############################################################################

def _series_case(item, config):
    kind, i = item
    log = CaseLog()
    seed = derive_seed(config.seed, i)
    if kind == 'radius':
        c = (0.5, 1.0, 2.0, 5.0)[i]
        radius = radius_uniform(PowerSeries.geometric(c, 40), config.budget, seed)
        log.check(abs(radius.rho - 1.0 / c) <= 1e-6, 'radius_recovers_1/c', c=c,
                  rho=radius.rho)
    elif kind == 'geometric':
        series = PowerSeries.geometric(1.0, 200)
        bar = rho_bar(series, config.budget, seed)
        log.check(bar.rho_bar >= bar.rho / math.sqrt(2.0) - 1e-12, 'rho_bar_floor',
                  rho_bar=bar)
        report = verify_analyticity(series, [0.3], [0.6], 1e-8, bar=bar)
        log.check(report.passed, 'analyticity_geometric', report=report)
        log.check(abs(report.values['reexpanded'] - 2.5) <= 1e-8, 'closed_form_1/(1-x)',
                  report=report)
        for n in (1, 2):
            fd = dn_check_fd(series, n, [0.5], seed=seed)
            log.check(fd.passed, 'dn_fd_geometric', n=n, report=fd)
        identity = verify_taylor_identity(series, [0.3], 3, seed, bar=bar)
        log.check(identity.passed, 'taylor_identity_geometric', report=identity)
    else:
        rng = restart_rng(config.seed, i, 2)
        space = LpSpace(2.0, 3)
        terms = [SymmetricForm.random(m, 3, rng) for m in range(4)]
        series = PowerSeries.polynomial(terms, space)
        y, x = rng.uniform(-1.0, 1.0, (2, 3))
        report = verify_analyticity(series, y, x, 1e-12, budget=config.budget, seed=seed)
        log.check(report.passed, 'finite_reexpansion_exact', series=series, y=y, x=x,
                  report=report)
        for n in (1, 2):
            fd = dn_check_fd(series, n, x, seed=seed)
            log.check(fd.passed, 'dn_fd_polynomial', n=n, series=series, x=x, report=fd)
        identity = verify_taylor_identity(series, y, 3, seed)
        log.check(identity.passed, 'taylor_identity_polynomial', series=series, y=y,
                  report=identity)
    return log


def suite_series(config, polynomials=5):
    items = [('radius', i) for i in range(4)] + [('geometric', 4)] + \
        [('polynomial', 5 + i) for i in range(polynomials)]
    return _run_cases('series', _series_case, items, config)


###############################################################################
# norms
###############################################################################

NORM_P = (1.0, 2.0, math.inf)
# restarts per partition in the corpus-wide chain and dominance checks
CORPUS_BUDGET_DIVISOR = 16
# forms on which the grid oracle is compared with the ascent
GRID_MAX_DEGREE = 4
GRID_MAX_DIM = 3


def _norms_case(item, config):
    i, form = item
    log = CaseLog()
    seed = derive_seed(config.seed, i)
    budget = max(1, config.budget // CORPUS_BUDGET_DIVISOR)
    on_grid = form.degree <= GRID_MAX_DEGREE and form.dim <= GRID_MAX_DIM
    for p in NORM_P:
        space = LpSpace(p, form.dim)
        poly = estimate_poly_norm(form, space, budget, seed)
        chain = [poly]
        for n in range(2, min(3, form.degree) + 1):
            chain.append(estimate_mixed_norm(form, n, space, budget, seed, pool=chain))
        values = [e.value for e in chain]
        log.check(all(a <= b for a, b in zip(values, values[1:])), 'norm_chain',
                  form=form, p=str(p), values=values)

        if poly.value > 0:
            for k in range(1, form.degree // 2 + 1):
                partition = Partition([k, form.degree - k])
                found = estimate_partition_value(form, partition, space, budget, seed)
                limit = bounds.bound_sqrt(partition).value * poly.value * DOMINANCE_SLACK
                log.check(found.value <= limit, 'sqrt_bound_dominates', form=form,
                          p=str(p), partition=partition, value=found.value, limit=limit)

        if on_grid:
            full = estimate_poly_norm(form, space, config.budget, seed)
            grid = grid_norm_oracle(form, space, 401 if form.dim <= 2 else 121, config.caps)
            log.check(abs(full.value - grid.value) <= 0.02 * full.value, 'grid_agrees',
                      form=form, p=str(p), estimate=full.value, grid=grid.value)
            if form.degree == 2 and full.value > 0:
                ratio = ratio_statistic(form, 2, space, config.budget, seed)
                log.check(ratio <= math.sqrt(2.0) + RATIO_SLACK, 'quadratic_ratio_below_sqrt2',
                          form=form, p=str(p), ratio=ratio)
    return log


def suite_norms(config, count=200):
    """
    Norm chain and square-root dominance on the polarization corpus (m <= 6,
    d <= 4) at a reduced per-partition budget; the grid comparison and the
    quadratic ratio run at the full budget on its m <= 4, d <= 3 part.
    """
    forms = random_corpus(config.seed, count, 6, 4)
    return _run_cases('norms', _norms_case, list(enumerate(forms)), config)


SUITES = {
    'polarization': suite_polarization,
    'sandwich': suite_sandwich,
    'moments': suite_moments,
    'tails': suite_tails,
    'extremal': suite_extremal,
    'asymptotic': suite_asymptotic,
    'series': suite_series,
    'norms': suite_norms,
}


def run_suite(name, config):
    if name not in SUITES:
        raise UsageError('Unknown suite %s; choose from %s' % (name, ', '.join(SUITES)))
    return SUITES[name](config)
