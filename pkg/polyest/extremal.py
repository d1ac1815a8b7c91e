################################################################################
#
# extremal.py 		polyest
#
# The product form L^(x) = x_1 ... x_m with block-averaged unit vectors
# attains the lower bounds of c(k1..kn, X) (on l_1^m) and c(k1..kn, l_p).
# Builders for those witnesses and a numerical confirmation of the claims.
################################################################################

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from polyest.bounds import bound_lp_lower, bound_lp_upper_sharp, bound_real_min, \
    bound_x_lower
from polyest.config import Caps
from polyest.forms import Partition, SymmetricForm, eval_mixed, polarize_exact
from polyest.norms import LpSpace, estimate_poly_norm
from polyest.utilities import InputRejected, blocks, log_factorial, xlogx

logger = logging.getLogger(__name__)

CLOSED_FORM_TOL = 1e-10
RATIO_TOL = 1e-9
OPTIMIZER_FRACTION = 0.98
EXACT_MAX_DEGREE = 10


@dataclass
class ExtremalInstance:
    """
    Attributes:
    -----------
    form: SymmetricForm
        product form on R^m
    vectors: list of arrays
        y^i = k_i^(-1/p) * (sum of the coordinate vectors of block i)
    space: LpSpace
    partition: Partition
    attained_value: float
        closed form (1/m!) prod k_i! / prod k_i^(k_i/p)
    analytic_poly_norm: float
        m^(-m/p), from AM-GM applied to |x_i|^p
    kind: str
        'x' (generic normed space, realized on l_1^m) or 'lp'
    """
    form: SymmetricForm
    vectors: list
    space: LpSpace
    partition: Partition
    attained_value: float
    analytic_poly_norm: float
    kind: str

    @property
    def p(self):
        return self.space.p

    @property
    def ratio(self):
        return self.attained_value / self.analytic_poly_norm

    def recompute_attained(self, caps=None):
        return eval_mixed(self.form, self.partition, self.vectors, caps)

    def lower_bound(self):
        if self.kind == 'x':
            return bound_x_lower(self.partition)
        return bound_lp_lower(self.partition, self.p)

    def upper_bound(self):
        if self.kind == 'x':
            return bound_real_min(self.partition)
        return bound_lp_upper_sharp(self.partition, self.p)

    def to_json(self):
        return {'kind': self.kind, 'partition': list(self.partition.parts),
                'space': self.space.to_json(), 'form': self.form.to_json(),
                'vectors': [list(v) for v in self.vectors],
                'attained_value': self.attained_value,
                'analytic_poly_norm': self.analytic_poly_norm,
                'ratio': self.ratio}


@dataclass
class ExtremalReport:
    """Named claims of verify_extremal and the numbers behind them."""
    instance: ExtremalInstance
    claims: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(self.claims.values())

    @property
    def failures(self):
        return [name for name, ok in self.claims.items() if not ok]

    def to_json(self):
        return {'passed': self.passed, 'claims': dict(self.claims),
                'failures': self.failures, 'values': dict(self.values)}


def _build(partition, p, kind):
    if not isinstance(partition, Partition):
        partition = Partition(partition)
    if partition.n == 0:
        raise InputRejected('Empty partition')
    m = partition.m
    form = SymmetricForm.product_form(m)
    space = LpSpace(p, m)
    vectors = []
    for k, (start, stop) in zip(partition.parts, blocks(partition.parts)):
        y = np.zeros(m)
        y[start:stop] = k ** (-1.0 / p)
        vectors.append(y)
    log_attained = math.fsum(log_factorial(k) - xlogx(k) / p for k in partition.parts) - \
        log_factorial(m)
    return ExtremalInstance(form, vectors, space, partition, math.exp(log_attained),
                            math.exp(-xlogx(m) / p), kind)


def build_extremal_x(partition):
    """Witness for the lower bound of c(k1..kn, X) on l_1^m."""
    return _build(partition, 1.0, 'x')


def build_extremal_lp(partition, p):
    """Witness for the lower bound of c(k1..kn, l_p), finite p >= 1."""
    p = float(p)
    if math.isinf(p):
        raise InputRejected('The l_p extremal construction needs finite p')
    if not p >= 1:
        raise InputRejected('Need p >= 1, got %s' % p)
    return _build(partition, p, 'lp')


def _exact_attained(instance):
    """L(1_B1^k1 ... 1_Bn^kn) for integer block indicators; equals prod k_i! / m!."""
    m = instance.partition.m
    args = []
    for k, (start, stop) in zip(instance.partition.parts, blocks(instance.partition.parts)):
        indicator = [Fraction(1) if start <= j < stop else Fraction(0) for j in range(m)]
        args.extend([indicator] * k)
    return polarize_exact(instance.form, args), \
        Fraction(math.prod(math.factorial(k) for k in instance.partition.parts),
                 math.factorial(m))


def verify_extremal(instance, budget=256, seed=42, caps=None):
    """
    Confirm a witness numerically.

    Claims:
    -----------
    closed_form: polarize reproduces the closed-form attained value to 1e-10
    exact_rational: (m <= 10) the same identity in exact rational arithmetic
    optimizer_norm: estimate_poly_norm lies in [0.98, 1 + 1e-9] * m^(-m/p)
    ratio_matches_lower: attained / analytic norm equals the lower bound to 1e-9
    ratio_below_upper: the attained ratio does not exceed the upper bound

    Returns:
    ----------
    report: ExtremalReport
    """
    caps = caps or Caps()
    report = ExtremalReport(instance)
    attained = instance.recompute_attained(caps)
    closed = instance.attained_value
    report.values['attained_polarize'] = attained
    report.values['attained_closed_form'] = closed
    report.claims['closed_form'] = abs(attained - closed) <= CLOSED_FORM_TOL * abs(closed)

    if instance.partition.m <= EXACT_MAX_DEGREE:
        exact, expected = _exact_attained(instance)
        report.values['attained_exact'] = str(exact)
        report.claims['exact_rational'] = exact == expected

    estimate = estimate_poly_norm(instance.form, instance.space, budget, seed)
    analytic = instance.analytic_poly_norm
    report.values['poly_norm_estimate'] = estimate.value
    report.values['poly_norm_analytic'] = analytic
    report.claims['optimizer_norm'] = \
        OPTIMIZER_FRACTION * analytic <= estimate.value <= analytic * (1.0 + 1e-9)

    ratio = attained / analytic
    lower = instance.lower_bound()
    deviation = ratio / math.exp(lower.log_value) - 1.0
    report.values['ratio'] = ratio
    report.values['lower_bound'] = lower.value
    report.values['deviation'] = deviation
    report.claims['ratio_matches_lower'] = abs(deviation) <= RATIO_TOL

    upper = instance.upper_bound()
    report.values['upper_bound'] = upper.value
    report.claims['ratio_below_upper'] = math.log(ratio) <= upper.log_value + 1e-12

    if report.passed:
        logger.info('extremal %s %s on %s: ratio %.17g, all claims hold', instance.kind,
                    instance.partition, instance.space.tag, ratio)
    else:
        logger.warning('extremal %s %s on %s: failed %s', instance.kind,
                       instance.partition, instance.space.tag, ', '.join(report.failures))
    return report
