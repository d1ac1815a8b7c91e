################################################################################
#
# forms.py 		polyest
#
# Symmetric m-linear forms stored by the coefficients of their associated
# homogeneous polynomial, evaluation of the polynomial, the exact
# polarization formula (finite average over sign patterns), mixed
# evaluation L(x1^k1 ... xn^kn) and a dense-tensor oracle.
################################################################################

import itertools
import logging
import math
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, logsumexp

from polyest.config import Caps
from polyest.utilities import InputRejected, CapExceeded, multi_indices, \
    bounded_compositions, binomial_weight, log_binomial

logger = logging.getLogger(__name__)

# sign patterns are summed in fixed-size chunks so the summation
# tree does not depend on anything but m
SIGN_CHUNK = 1 << 14
# rows*monomials*dim above which batch evaluation is chunked
EVAL_CHUNK = 1 << 22


class MultiIndex(tuple):
    """
    Exponent vector alpha of a monomial x^alpha = x_1^a_1 ... x_d^a_d.
    """

    def __new__(cls, exponents):
        exponents = tuple(int(a) for a in exponents)
        if any(a < 0 for a in exponents):
            raise InputRejected('Multi-index entries must be nonnegative: %s'
                                % (exponents,))
        return super(MultiIndex, cls).__new__(cls, exponents)

    @property
    def degree(self):
        return sum(self)

    def power(self, x):
        return float(np.prod(np.asarray(x, dtype=float) ** np.array(self)))

    def factorial(self):
        return math.prod(math.factorial(a) for a in self)


class Partition(object):
    """
    Exponents (k1, ..., kn) of L(x1^k1 ... xn^kn). Zero parts are dropped
    on construction; the order of the remaining parts is kept because it
    pairs each part with its vector.
    """

    def __init__(self, parts):
        try:
            parts = [int(k) for k in parts]
        except (TypeError, ValueError):
            raise InputRejected('Partition parts must be integers: %s' % (parts,))
        if any(k < 0 for k in parts):
            raise InputRejected('Partition parts must be nonnegative: %s' % (parts,))
        self.parts = tuple(k for k in parts if k > 0)

    @classmethod
    def parse(cls, text):
        try:
            return cls([int(t) for t in text.split(',') if t.strip() != ''])
        except ValueError:
            raise InputRejected('Malformed partition: %s' % text)

    @property
    def m(self):
        return sum(self.parts)

    @property
    def n(self):
        return len(self.parts)

    def expand(self, vectors):
        """Argument list with each vector repeated k_i times."""
        if len(vectors) != self.n:
            raise InputRejected('Partition %s needs %d vectors, got %d'
                                % (self, self.n, len(vectors)))
        args = []
        for k, v in zip(self.parts, vectors):
            args.extend([v] * k)
        return args

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __eq__(self, other):
        return isinstance(other, Partition) and self.parts == other.parts

    def __lt__(self, other):
        return self.parts < other.parts

    def __hash__(self):
        return hash(self.parts)

    def __str__(self):
        return ','.join(str(k) for k in self.parts)

    def __repr__(self):
        return 'Partition(%s)' % (self.parts,)


def sign_patterns(m, start=0, stop=None, half=False):
    """
    Rows of Rademacher values (eps_1, ..., eps_m) in [start, stop).

    Parameters:
    -----------
    m: int
        length of each pattern
    start, stop: int
        range of pattern indices; pattern i takes eps_j = -1 iff bit j of i is set
    half: bool
        enumerate only the 2^(m-1) patterns with eps_m = +1; by
        m-homogeneity the polarization sum over the other half is identical

    Returns:
    -----------
    signs: array; shape = (stop-start, m)
    products: array; eps_1*...*eps_m for each row
    """
    free = m - 1 if half else m
    if stop is None:
        stop = 1 << free
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(free, dtype=np.int64)) & 1
    signs = 1 - 2 * bits
    if half:
        signs = np.hstack([signs, np.ones((len(idx), 1), dtype=np.int64)])
    products = np.prod(signs, axis=1)
    return signs.astype(float), products.astype(float)


class SymmetricForm(object):
    """
    Symmetric m-linear form L on R^d, stored as the coefficient map of
    L^(x) = sum_alpha c_alpha x^alpha. The symmetric tensor has value
    c_alpha * alpha! / m! on every index tuple in the orbit of alpha.

    Attributes:
    -----------
    degree: int
        m
    dim: int
        d
    coeffs: dict
        MultiIndex -> float, exact zeros dropped
    """

    def __init__(self, degree, dim, coeffs):
        self.degree = int(degree)
        self.dim = int(dim)
        if self.degree < 0 or self.dim < 1:
            raise InputRejected('Need degree >= 0 and dim >= 1, got (%d, %d)'
                                % (self.degree, self.dim))
        self.coeffs = {}
        for alpha, c in dict(coeffs).items():
            alpha = MultiIndex(alpha)
            if len(alpha) != self.dim or alpha.degree != self.degree:
                raise InputRejected('Multi-index %s does not fit degree %d, dim %d'
                                    % (tuple(alpha), self.degree, self.dim))
            c = float(c)
            if c != 0.0:
                self.coeffs[alpha] = self.coeffs.get(alpha, 0.0) + c
        keys = sorted(self.coeffs, reverse=True)
        self._exponents = np.array(keys, dtype=float).reshape(len(keys), self.dim)
        self._values = np.array([self.coeffs[k] for k in keys], dtype=float)

    ###########################################################################
    # Constructors
    ###########################################################################

    @classmethod
    def zero(cls, degree, dim):
        return cls(degree, dim, {})

    @classmethod
    def constant_form(cls, value, dim):
        return cls(0, dim, {(0,) * dim: value})

    @classmethod
    def product_form(cls, m):
        """L^(x) = x_1 x_2 ... x_m on R^m."""
        return cls(m, m, {(1,) * m: 1.0})

    @classmethod
    def random(cls, m, d, rng):
        """Every coefficient of degree m uniform in [-1, 1]."""
        alphas = list(multi_indices(m, d))
        values = rng.uniform(-1.0, 1.0, size=len(alphas))
        return cls(m, d, dict(zip(alphas, values)))

    @classmethod
    def from_json(cls, obj):
        try:
            coeffs = {}
            for entry in obj['coeffs']:
                alpha = tuple(entry['alpha'])
                coeffs[alpha] = coeffs.get(alpha, 0.0) + float(entry['c'])
            return cls(int(obj['m']), int(obj['d']), coeffs)
        except (KeyError, TypeError, ValueError) as err:
            raise InputRejected('Malformed form JSON: %s' % err)

    def to_json(self):
        return {'m': self.degree, 'd': self.dim,
                'coeffs': [{'alpha': list(alpha), 'c': self.coeffs[alpha]}
                           for alpha in sorted(self.coeffs, reverse=True)]}

    ###########################################################################
    # Properties
    ###########################################################################

    def is_zero(self):
        return len(self.coeffs) == 0

    @property
    def constant(self):
        if self.degree != 0:
            raise InputRejected('Only degree-0 forms are constants')
        return self._values.sum() if len(self._values) else 0.0

    def coefficient_bound(self):
        """sum |c_alpha|: bounds ||L|| on the l_inf unit ball, hence on every l_p ball."""
        return float(np.abs(self._values).sum())

    def scaled(self, factor):
        return SymmetricForm(self.degree, self.dim,
                             {a: factor * c for a, c in self.coeffs.items()})

    def __add__(self, other):
        if (other.degree, other.dim) != (self.degree, self.dim):
            raise InputRejected('Cannot add forms of different degree or dim')
        coeffs = dict(self.coeffs)
        for a, c in other.coeffs.items():
            coeffs[a] = coeffs.get(a, 0.0) + c
        return SymmetricForm(self.degree, self.dim, coeffs)

    def __repr__(self):
        return 'SymmetricForm(m=%d, d=%d, %d terms)' % (self.degree, self.dim,
                                                       len(self.coeffs))

    ###########################################################################
    # Batch evaluation
    ###########################################################################

    def _monomials(self, X, exponents):
        rows = max(1, EVAL_CHUNK // max(1, exponents.size))
        out = [np.prod(X[i:i + rows, None, :] ** exponents[None, :, :], axis=2)
               for i in range(0, len(X), rows)]
        return np.vstack(out) if out else np.zeros((0, len(exponents)))

    def eval_batch(self, X):
        """L^ at every row of X; shape (N, d) -> (N,)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if len(self._values) == 0:
            return np.zeros(len(X))
        return self._monomials(X, self._exponents) @ self._values

    def grad_batch(self, X):
        """Analytic gradient of L^ at every row of X; shape (N, d) -> (N, d)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        grad = np.zeros_like(X)
        if len(self._values) == 0 or self.degree == 0:
            return grad
        for j in range(self.dim):
            weights = self._values * self._exponents[:, j]
            keep = weights != 0
            if not keep.any():
                continue
            lowered = self._exponents[keep].copy()
            lowered[:, j] -= 1
            grad[:, j] = self._monomials(X, lowered) @ weights[keep]
        return grad


###############################################################################
# Operations
###############################################################################

def _as_vector(form, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (form.dim,):
        raise InputRejected('Expected a vector of length %d, got shape %s'
                            % (form.dim, x.shape))
    return x


def _check_args(form, args, count):
    if len(args) != count:
        raise InputRejected('Expected %d arguments, got %d' % (count, len(args)))
    return [_as_vector(form, x) for x in args]


def eval_poly(form, x):
    """L^(x) = sum_alpha c_alpha x^alpha."""
    x = _as_vector(form, x)
    return float(form.eval_batch(x[None, :])[0])


def gradient(form, x):
    x = _as_vector(form, x)
    return form.grad_batch(x[None, :])[0]


def polarize(form, args, caps=None):
    """
    Value L(x1, ..., xm) from the polarization formula

        L(x1,...,xm) = 1/m! * 2^-m * sum_eps eps_1...eps_m L^(sum_i eps_i x_i)

    computed as an exact finite average over sign patterns.

    Parameters:
    ----------
    form: SymmetricForm
    args: list of m vectors of length d
    caps: Caps
        refuses m > caps.polarize_max_degree unless caps.override is set

    Returns:
    ----------
    value: float
    """
    caps = caps or Caps()
    m = form.degree
    args = _check_args(form, args, m)
    if m == 0:
        return float(form.constant)
    if m > caps.polarize_max_degree and not caps.override:
        raise CapExceeded('polarize refuses m = %d > %d (2^m sign patterns); '
                          'set override to force' % (m, caps.polarize_max_degree))
    A = np.vstack(args)
    n_patterns = 1 << (m - 1)
    partial = []
    for start in range(0, n_patterns, SIGN_CHUNK):
        signs, products = sign_patterns(m, start, min(n_patterns, start + SIGN_CHUNK),
                                        half=True)
        partial.append(float(np.dot(products, form.eval_batch(signs @ A))))
    return math.fsum(partial) / n_patterns / math.factorial(m)


def polarize_exact(form, args):
    """
    Polarization sum in exact rational arithmetic; coefficients and
    arguments are converted with Fraction (floats convert exactly).
    """
    m = form.degree
    if len(args) != m:
        raise InputRejected('Expected %d arguments, got %d' % (m, len(args)))
    if m == 0:
        return Fraction(form.constant)
    args = [[Fraction(v) for v in x] for x in args]
    coeffs = [(tuple(alpha), Fraction(c)) for alpha, c in form.coeffs.items()]
    total = Fraction(0)
    for head in itertools.product((1, -1), repeat=m - 1):
        eps = head + (1,)
        point = [sum(e * x[j] for e, x in zip(eps, args)) for j in range(form.dim)]
        value = Fraction(0)
        for alpha, c in coeffs:
            term = c
            for pj, a in zip(point, alpha):
                term *= pj ** a
            value += term
        total += math.prod(eps) * value
    return total / (2 ** (m - 1) * math.factorial(m))


def eval_mixed(form, partition, vectors, caps=None):
    """
    L(x1^k1 ... xn^kn) by expanding the argument list and polarizing. Above
    caps.polarize_max_degree (without override) the value comes from
    iterated directional contraction instead of the 2^m sign sum.
    """
    caps = caps or Caps()
    if not isinstance(partition, Partition):
        partition = Partition(partition)
    if partition.m != form.degree:
        raise InputRejected('Partition %s sums to %d, form has degree %d'
                            % (partition, partition.m, form.degree))
    vectors = _check_args(form, list(vectors), partition.n)
    if form.degree > caps.polarize_max_degree and not caps.override:
        logger.debug('eval_mixed: m = %d above the polarization cap, contracting',
                     form.degree)
        return mixed_by_contraction(form, partition, vectors)
    return polarize(form, partition.expand(vectors), caps)


def dense_tensor(form):
    """
    The symmetric tensor T with T[i1..im] = c_alpha alpha! / m!, alpha the
    index counts; built once per form and kept on it.
    """
    T = getattr(form, '_dense', None)
    if T is None:
        m, d = form.degree, form.dim
        T = np.zeros((d,) * m)
        inv_mfact = 1.0 / math.factorial(m)
        for idx in itertools.product(range(d), repeat=m):
            alpha = MultiIndex(np.bincount(idx, minlength=d))
            c = form.coeffs.get(alpha)
            if c is not None:
                T[idx] = c * alpha.factorial() * inv_mfact
        form._dense = T
    return T


def eval_direct_oracle(form, args, caps=None):
    """
    Contract the dense symmetric tensor T against x1 (x) ... (x) xm by
    explicit O(d^m) enumeration. Independent check of polarize.
    """
    caps = caps or Caps()
    m, d = form.degree, form.dim
    if m > caps.oracle_max_degree or d > caps.oracle_max_dim:
        raise CapExceeded('Dense oracle limited to m <= %d, d <= %d; got m = %d, d = %d'
                          % (caps.oracle_max_degree, caps.oracle_max_dim, m, d))
    args = _check_args(form, args, m)
    if m == 0:
        return float(form.constant)
    result = dense_tensor(form)
    for x in reversed(args):
        result = np.tensordot(result, x, axes=([-1], [0]))
    return float(result)


###############################################################################
# Directional contraction
###############################################################################

def _taylor_weight(alpha, gamma, y):
    """prod_i C(alpha_i, gamma_i) y_i^gamma_i, log-domain for alpha_i > 170."""
    weight = 1.0
    for a, g, yi in zip(alpha, gamma, y):
        if g == 0:
            continue
        if yi == 0.0:
            return 0.0
        if a <= 170:
            weight *= binomial_weight(a, g) * yi ** g
        else:
            sign = -1.0 if (yi < 0 and g % 2) else 1.0
            weight *= sign * math.exp(log_binomial(a, g) + g * math.log(abs(yi)))
    return weight


def taylor_pieces(form, y):
    """
    All pieces of the expansion L^(y + z) = sum_k P_k(z): P_k is the
    k-homogeneous form z -> C(m, k) L(y^(m-k), z^k). Returns a list indexed by k.
    """
    y = _as_vector(form, y)
    pieces = [dict() for _ in range(form.degree + 1)]
    for alpha, c in form.coeffs.items():
        for gamma in itertools.product(*[range(a + 1) for a in alpha]):
            beta = tuple(a - g for a, g in zip(alpha, gamma))
            k = sum(beta)
            w = _taylor_weight(alpha, gamma, y)
            pieces[k][beta] = pieces[k].get(beta, 0.0) + c * w
    return [SymmetricForm(k, form.dim, pieces[k]) for k in range(form.degree + 1)]


def shift_part(form, y, j):
    """
    The form z -> (1/j!) D_y^j L^(z) = C(m, j) L(y^j, z^(m-j)), of degree m - j.
    """
    y = _as_vector(form, y)
    m = form.degree
    if not 0 <= j <= m:
        raise InputRejected('Cannot contract %d slots of a degree-%d form' % (j, m))
    coeffs = {}
    for alpha, c in form.coeffs.items():
        for gamma in bounded_compositions(j, tuple(alpha)):
            beta = tuple(a - g for a, g in zip(alpha, gamma))
            coeffs[beta] = coeffs.get(beta, 0.0) + c * _taylor_weight(alpha, gamma, y)
    return SymmetricForm(m - j, form.dim, coeffs)


def contract(form, y, j):
    """The form z -> L(y^j, z^(m-j))."""
    return shift_part(form, y, j).scaled(1.0 / binomial_weight(form.degree, j))


def mixed_by_contraction(form, partition, vectors):
    """
    L(x1^k1 ... xn^kn) by iterated directional contraction; no 2^m cost,
    used for degrees beyond the polarization batch limit.
    """
    g = form
    for k, v in zip(partition.parts, vectors):
        g = contract(g, v, k)
    return float(g.constant)


###############################################################################
# Batched mixed evaluation (used by the norm estimators)
###############################################################################

def block_sign_sums(parts):
    """
    Sign patterns grouped by their per-block sums. A pattern with j_i minus
    signs in block i maps sum_s eps_s x_{b(s)} to sum_i (k_i - 2 j_i) a_i, and
    there are prod_i C(k_i, j_i) such patterns, each with sign prod_i (-1)^j_i.

    Returns:
    -----------
    sums: array; shape = (T, n), entries k_i - 2 j_i
    weights: array; shape = (T,), prod_i (-1)^j_i C(k_i, j_i)
    scale: float; 1/(m! 2^m)
    """
    parts = tuple(parts)
    if len(parts) == 1:
        return np.ones((1, 1)), np.ones(1), 1.0
    grid = np.array(list(itertools.product(*[range(k + 1) for k in parts])), dtype=float)
    sums = np.array(parts, dtype=float)[None, :] - 2.0 * grid
    weights = np.ones(len(grid))
    for i, k in enumerate(parts):
        weights *= np.array([(-1) ** int(j) * math.comb(k, int(j)) for j in grid[:, i]])
    m = sum(parts)
    return sums, weights, 1.0 / (math.factorial(m) * 2.0 ** m)


def log_mixed_amplification(parts):
    """
    log of sum_t |w_t| (sum_i |k_i - 2 j_i|)^m / (m! 2^m), the block sign
    sum of eval_mixed_batch with absolute values. Bounds the size of its
    summands relative to ||L^|| prod_i ||a_i||^k_i, so rounding errors of
    the batched value are about exp(this) * eps in those units.
    """
    parts = tuple(parts)
    m = sum(parts)
    if len(parts) <= 1:
        return 0.0
    grid = np.indices([k + 1 for k in parts]).reshape(len(parts), -1).T.astype(float)
    k = np.array(parts, dtype=float)
    log_weights = np.sum(gammaln(k + 1.0) - gammaln(grid + 1.0) - gammaln(k - grid + 1.0),
                         axis=1)
    reach = np.sum(np.abs(k[None, :] - 2.0 * grid), axis=1)
    with np.errstate(divide='ignore'):
        log_terms = log_weights + m * np.log(reach)
    return float(logsumexp(log_terms) - gammaln(m + 1.0) - m * math.log(2.0))


def eval_mixed_batch(form, parts, X, with_grad=False):
    """
    L(a_1^k_1 ... a_n^k_n) for a batch of argument tuples.

    Parameters:
    ----------
    form: SymmetricForm
    parts: tuple of positive ints
    X: array; shape = (R, n, d)
    with_grad: bool
        also return the gradient with respect to every a_i

    Returns:
    ----------
    values: array; shape = (R,)
    grad: array; shape = (R, n, d), only if with_grad
    """
    X = np.asarray(X, dtype=float)
    R, n, d = X.shape
    sums, weights, scale = block_sign_sums(parts)
    points = np.einsum('tn,rnd->rtd', sums, X).reshape(R * len(weights), d)
    values = scale * (form.eval_batch(points).reshape(R, len(weights)) @ weights)
    if not with_grad:
        return values
    g = form.grad_batch(points).reshape(R, len(weights), d)
    grad = scale * np.einsum('t,tn,rtd->rnd', weights, sums, g)
    return values, grad
