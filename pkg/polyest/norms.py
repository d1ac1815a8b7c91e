################################################################################
#
# norms.py 		polyest
#
# Estimates of ||L^||, ||L||_(n) and sup |L(x1^k1 ... xn^kn)| over the unit
# sphere of a finite-dimensional real l_p space: vectorized multistart
# projected ascent with sign-vertex polishing, and an exhaustive grid
# oracle for d <= 4. All estimates are lower-certified: every reported value
# is attained at a recorded unit-norm point.
################################################################################

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from polyest.config import Caps
from polyest.forms import Partition, eval_mixed_batch
from polyest.utilities import InputRejected, CapExceeded, integer_partitions, \
    restart_rng

logger = logging.getLogger(__name__)

LOWER_CERTIFIED = 'lower-certified'
HEURISTIC = 'heuristic'

MAX_ITER = 150
TOL = 1e-10
# smooth stand-ins for the non-smooth l_1 and l_inf spheres
SURROGATE_P = {1.0: 1.01, np.inf: 100.0}
# largest dimension for the {-1,0,1}^d and {-1,1}^d polishing vertex sets
SUPPORT_VERTEX_DIM = 8
SIGN_VERTEX_DIM = 14
# largest number of vertex combinations tried for multi-vector partitions
VERTEX_COMBINATIONS = 4096


class LpSpace(object):
    """
    Real l_p^d, 1 <= p <= inf.
    """

    def __init__(self, p, dim):
        p = np.inf if p in ('inf', 'infinity') else float(p)
        if not p >= 1:
            raise InputRejected('l_p space needs p >= 1, got %s' % p)
        if int(dim) < 1:
            raise InputRejected('l_p space needs dim >= 1, got %s' % dim)
        self.p = p
        self.dim = int(dim)

    @property
    def surrogate_p(self):
        return SURROGATE_P.get(self.p, self.p)

    @property
    def tag(self):
        return 'lp(%s)' % ('inf' if np.isinf(self.p) else repr(self.p))

    def norm(self, x):
        return float(np.linalg.norm(np.asarray(x, dtype=float), ord=self.p))

    def normalize(self, X, p=None):
        """Scale every vector along the last axis to unit l_p norm."""
        X = np.asarray(X, dtype=float)
        norms = np.linalg.norm(X, ord=self.p if p is None else p, axis=-1, keepdims=True)
        return X / norms

    def to_json(self):
        return {'p': 'inf' if np.isinf(self.p) else self.p, 'd': self.dim}

    @classmethod
    def from_json(cls, obj):
        try:
            return cls(obj['p'], obj['d'])
        except (KeyError, TypeError, ValueError) as err:
            raise InputRejected('Malformed space JSON: %s' % err)

    def __eq__(self, other):
        return isinstance(other, LpSpace) and (self.p, self.dim) == (other.p, other.dim)

    def __repr__(self):
        return 'LpSpace(p=%s, dim=%d)' % (self.p, self.dim)


@dataclass
class Candidate:
    """A unit-norm argument tuple and the value |L(...)| it attains."""
    partition: Partition
    vectors: list
    value: float


@dataclass
class NormEstimate:
    """
    Attributes:
    -----------
    value: float
        best |L| attained at unit vectors (a lower bound on the supremum
        when kind is lower-certified)
    kind: str
    evaluations: int
        number of form evaluations spent
    seed: int
    partition: Partition
        partition attaining value
    candidates: list of Candidate
        best point per partition searched; may be pooled into later estimates
    """
    value: float
    kind: str
    evaluations: int
    seed: int
    partition: Partition = None
    candidates: list = field(default_factory=list)

    @property
    def best(self):
        for c in self.candidates:
            if c.partition == self.partition and c.value == self.value:
                return c
        return None

    def to_json(self):
        best = self.best
        return {'value': self.value, 'kind': self.kind,
                'evaluations': self.evaluations, 'seed': self.seed,
                'partition': None if self.partition is None else list(self.partition.parts),
                'argmax': None if best is None else [list(v) for v in best.vectors]}


###############################################################################
# Ascent
###############################################################################

def _check_space(form, space):
    if space.dim != form.dim:
        raise InputRejected('Space dimension %d does not match form dimension %d'
                            % (space.dim, form.dim))


def _normal(X, q):
    """Outward normal of the l_q sphere at X (gradient of ||x||_q^q / q)."""
    return np.sign(X) * np.abs(X) ** (q - 1.0)


def _ascend(form, parts, X, space):
    """
    Projected ascent of s*L(a_1^k_1 ... a_n^k_n) on the smooth surrogate
    sphere, s the sign at the start. Steps follow the normalized tangential
    gradient, so trajectories are invariant under scaling the form.

    Returns the endpoints, shape (R, n, d), and the evaluation count.
    """
    q = space.surrogate_p
    X = space.normalize(X, q)
    R = X.shape[0]
    f, G = eval_mixed_batch(form, parts, X, with_grad=True)
    sign = np.where(f < 0, -1.0, 1.0)
    f = sign * f
    step = np.full(R, 0.25)
    active = np.ones(R, dtype=bool)
    evaluations = R

    for _ in range(MAX_ITER):
        if not active.any():
            break
        Gs = sign[:, None, None] * G
        nu = _normal(X, q)
        tangential = Gs - (np.sum(Gs * nu, axis=-1, keepdims=True) /
                          np.maximum(np.sum(nu * nu, axis=-1, keepdims=True), 1e-300)) * nu
        size = np.sqrt(np.sum(tangential ** 2, axis=(1, 2)))
        active &= size > 0
        direction = np.where(active[:, None, None],
                             tangential / np.where(size > 0, size, 1.0)[:, None, None], 0.0)

        trial = space.normalize(X + step[:, None, None] * direction, q)
        f_trial, G_trial = eval_mixed_batch(form, parts, trial, with_grad=True)
        evaluations += int(active.sum())
        f_trial = sign * f_trial
        better = active & (f_trial > f)

        improvement = np.where(better, f_trial - f, 0.0)
        converged = better & (improvement <= TOL * np.abs(f_trial))
        X = np.where(better[:, None, None], trial, X)
        G = np.where(better[:, None, None], G_trial, G)
        f = np.where(better, f_trial, f)
        step = np.where(better, np.minimum(2.0 * step, 1.0), 0.5 * step)
        active &= ~converged & (step > 1e-12)

    return X, evaluations


def _vertex_set(space):
    """Symmetric sign points of the unit sphere, one of each +-pair."""
    d = space.dim
    if d <= SUPPORT_VERTEX_DIM:
        values = (1.0, 0.0, -1.0)
    elif d <= SIGN_VERTEX_DIM:
        values = (1.0, -1.0)
    else:
        values = None
    vertices = [] if values is None else \
        [v for v in itertools.product(values, repeat=d) if any(v)]
    vertices += [tuple(np.eye(d)[i]) for i in range(d)]
    V = np.array(sorted(set(vertices), reverse=True))
    # keep the representative whose first nonzero entry is positive
    first = V[np.arange(len(V)), np.argmax(V != 0, axis=1)]
    V = V[first > 0]
    return space.normalize(V)


def _polish_points(space, n):
    V = _vertex_set(space)
    if n > 1 and len(V) ** n > VERTEX_COMBINATIONS:
        return np.zeros((0, n, space.dim))
    idx = np.array(list(itertools.product(range(len(V)), repeat=n)))
    return V[idx]


def _exact_one_dim(form, partition, seed):
    # on l_p^1 every unit vector is +-1 and |L(...)| = |c| for all of them
    c = abs(next(iter(form.coeffs.values()), 0.0))
    vectors = [np.ones(1)] * partition.n
    best = Candidate(partition, vectors, c)
    return NormEstimate(c, LOWER_CERTIFIED, 1, seed, partition, [best])


def estimate_partition_value(form, partition, space, budget=256, seed=42):
    """
    Lower-certified estimate of sup |L(x1^k1 ... xn^kn)| over unit vectors
    x_i of space, for one fixed partition.

    Parameters:
    ----------
    form: SymmetricForm
    partition: Partition
        parts summing to form.degree
    space: LpSpace
    budget: int
        number of random restarts
    seed: int
        restart r starts from the stream (seed, r)

    Returns:
    ----------
    estimate: NormEstimate
    """
    if not isinstance(partition, Partition):
        partition = Partition(partition)
    _check_space(form, space)
    if budget < 1:
        raise InputRejected('budget must be >= 1, got %s' % budget)
    if partition.m != form.degree:
        raise InputRejected('Partition %s sums to %d, form has degree %d'
                            % (partition, partition.m, form.degree))
    if form.is_zero() or form.degree == 0:
        value = 0.0 if form.is_zero() else abs(form.constant)
        vectors = [space.normalize(np.ones(space.dim))] * partition.n
        return NormEstimate(value, LOWER_CERTIFIED, 0, seed, partition,
                            [Candidate(partition, vectors, value)])
    if space.dim == 1:
        return _exact_one_dim(form, partition, seed)

    parts, n, d = partition.parts, partition.n, space.dim
    starts = np.array([restart_rng(seed, r).standard_normal((n, d))
                       for r in range(budget)])
    ends, evaluations = _ascend(form, parts, starts, space)

    points = np.concatenate([space.normalize(ends), _polish_points(space, n)])
    values = np.abs(eval_mixed_batch(form, parts, points))
    evaluations += len(points)
    # argmax returns the first maximum: smallest restart index wins ties
    i = int(np.argmax(values))
    best = Candidate(partition, [points[i, j].copy() for j in range(n)], float(values[i]))
    logger.debug('partition %s on %s: %.17g after %d evaluations',
                 partition, space.tag, best.value, evaluations)
    return NormEstimate(best.value, LOWER_CERTIFIED, evaluations, seed, partition, [best])


def estimate_poly_norm(form, space, budget=256, seed=42):
    """Lower-certified estimate of ||L^|| = sup{|L^(x)| : ||x||_p = 1}."""
    estimate = estimate_partition_value(form, Partition([form.degree]), space, budget, seed)
    logger.info('||L^|| on %s >= %.17g (m = %d, budget %d)', space.tag,
                estimate.value, form.degree, budget)
    return estimate


def estimate_mixed_norm(form, n, space, budget=256, seed=42, pool=()):
    """
    Lower-certified estimate of ||L||_(n): the maximum over every partition
    of m into at most n positive parts of the partition's estimated value.

    Parameters:
    ----------
    pool: list of NormEstimate
        earlier estimates of the same form; their candidates with at most
        n parts are included, so that ||L^|| <= ||L||_(n) <= ||L||_(n+1)
        holds on the certified values
    """
    m = form.degree
    n = int(n)
    if n < 1 or n > max(m, 1):
        raise InputRejected('Mixed norm needs 1 <= n <= m, got n = %d, m = %d' % (n, m))
    _check_space(form, space)

    partitions = sorted(Partition(k) for k in integer_partitions(m, max_parts=n)) \
        if m > 0 else [Partition([])]
    best, evaluations, candidates = None, 0, []
    for partition in partitions:
        estimate = estimate_partition_value(form, partition, space, budget, seed)
        evaluations += estimate.evaluations
        candidates.extend(estimate.candidates)
        # strict comparison: lexicographically smallest partition wins ties
        if best is None or estimate.value > best.value:
            best = estimate.candidates[0]
    for earlier in pool:
        for candidate in earlier.candidates:
            if candidate.partition.n <= n and candidate.partition.m == m:
                candidates.append(candidate)
                if candidate.value > best.value:
                    best = candidate
    logger.info('||L||_(%d) on %s >= %.17g at partition %s', n, space.tag,
                best.value, best.partition)
    return NormEstimate(best.value, LOWER_CERTIFIED, evaluations, seed,
                        best.partition, candidates)


def ratio_statistic(form, n, space, budget=256, seed=42):
    """(||L||_(n) / ||L^||)^(1/m) from the two estimators, pooled."""
    poly = estimate_poly_norm(form, space, budget, seed)
    if poly.value == 0.0:
        raise InputRejected('||L^|| estimate is 0; ratio undefined')
    mixed = estimate_mixed_norm(form, n, space, budget, seed, pool=[poly])
    return (mixed.value / poly.value) ** (1.0 / form.degree)


###############################################################################
# Grid oracle
###############################################################################

def _angular_mesh(d, resolution):
    """Unit vectors of l_2^d from hyperspherical angles."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    axes = [np.linspace(0.0, np.pi, resolution) for _ in range(d - 2)]
    axes.append(np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False))
    angles = np.array(np.meshgrid(*axes, indexing='ij')).reshape(d - 1, -1).T
    X = np.ones((len(angles), d))
    for i in range(d - 1):
        X[:, i] *= np.cos(angles[:, i])
        X[:, i + 1:] *= np.sin(angles[:, i])[:, None]
    return X


def _box_mesh(d, resolution):
    """Mesh of the surface of the cube [-1,1]^d, 2d faces."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    axis = np.linspace(-1.0, 1.0, resolution)
    face = np.array(np.meshgrid(*[axis] * (d - 1), indexing='ij')).reshape(d - 1, -1).T
    meshes = []
    for i in range(d):
        for s in (1.0, -1.0):
            meshes.append(np.insert(face, i, s, axis=1))
    return np.vstack(meshes)


def grid_norm_oracle(form, space, resolution, caps=None):
    """
    Exhaustive evaluation of |L^| over a deterministic mesh of the unit
    sphere: angular parametrization for p = 2, the normalized surface mesh
    of the cube otherwise. Independent check of estimate_poly_norm.
    """
    caps = caps or Caps()
    _check_space(form, space)
    d = space.dim
    if d > 4:
        raise CapExceeded('Grid oracle limited to d <= 4, got d = %d' % d)
    resolution = int(resolution)
    if resolution < 2:
        raise InputRejected('Grid resolution must be >= 2, got %d' % resolution)
    n_points = resolution ** (d - 1) * (1 if space.p == 2.0 else 2 * d)
    if n_points > caps.grid_max_points:
        raise CapExceeded('Grid of %d points exceeds the cap of %d'
                          % (n_points, caps.grid_max_points))
    if space.p == 2.0:
        mesh = _angular_mesh(d, resolution)
    else:
        mesh = space.normalize(_box_mesh(d, resolution))

    best, argmax = 0.0, mesh[0]
    chunk = 1 << 16
    for start in range(0, len(mesh), chunk):
        values = np.abs(form.eval_batch(mesh[start:start + chunk]))
        i = int(np.argmax(values))
        if values[i] > best:
            best, argmax = float(values[i]), mesh[start + i]
    partition = Partition([form.degree])
    return NormEstimate(best, LOWER_CERTIFIED, len(mesh), 0, partition,
                        [Candidate(partition, [argmax], best)])
