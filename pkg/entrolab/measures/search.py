# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Multi-restart local search and the parametrizations it runs over.

Every search is deterministic given OptimizerConfig.seed: restart i draws
its start point from a stream derived from (seed, i), so enlarging the
number of restarts only adds candidates.
'''

import math

import attr
import numpy as np
from scipy.linalg import expm, polar
from scipy.optimize import minimize
from scipy.special import softmax

from entrolab.lib.util import class_logger, make_rng, map_in_threads


EXACT = 'exact-at-known-extension'
UPPER = 'upper-bound-only'
LOWER = 'lower-estimate'


def _positive(instance, attribute, value):
    if value <= 0:
        raise ValueError(f'{attribute.name} must be positive, got {value}')


def _optional_positive(instance, attribute, value):
    if value is not None:
        _positive(instance, attribute, value)


def _non_negative(instance, attribute, value):
    if value < 0:
        raise ValueError(f'{attribute.name} must be non-negative, '
                         f'got {value}')


@attr.s(slots=True, frozen=True)
class OptimizerConfig(object):
    '''Budgets and seeds for every optimizer in the package.

    ensemble_size and extension_dim default to functions of the target's
    rank; environment_dim is the Kraus rank of searched channels.'''
    restarts = attr.ib(default=16, validator=_positive)
    max_iters = attr.ib(default=400, validator=_positive)
    rel_tol = attr.ib(default=1e-7, validator=_positive)
    window = attr.ib(default=50, validator=_positive)
    ensemble_size = attr.ib(default=None, validator=_optional_positive)
    ensemble_cap = attr.ib(default=64, validator=_positive)
    extension_dim = attr.ib(default=None, validator=_optional_positive)
    extension_cap = attr.ib(default=32, validator=_positive)
    environment_dim = attr.ib(default=None, validator=_optional_positive)
    max_evals = attr.ib(default=20000, validator=_positive)
    seed = attr.ib(default=0, validator=_non_negative)
    method = attr.ib(default='Powell')
    concurrent = attr.ib(default=True)

    @classmethod
    def for_measurements(cls, **kwargs):
        '''Budget used by the measured mutual information search.'''
        kwargs.setdefault('restarts', 32)
        kwargs.setdefault('max_iters', 200)
        return cls(**kwargs)

    def evolve(self, **changes):
        return attr.evolve(self, **changes)

    def ensemble_for(self, rank):
        return min(self.ensemble_size or rank * rank, self.ensemble_cap)

    def extension_for(self, rank):
        if self.extension_dim is not None:
            return self.extension_dim
        return min(rank * rank, self.extension_cap)

    def environment_for(self, rank):
        return self.environment_dim or rank

    def as_dict(self):
        return attr.asdict(self)


@attr.s(slots=True)
class BoundReport(object):
    '''Outcome of an optimization.

    value equals scale times the information evaluated at witness.'''
    value = attr.ib()
    witness = attr.ib()
    certified = attr.ib()
    which = attr.ib()
    config = attr.ib(factory=dict)
    evals = attr.ib(default=0)
    trajectory = attr.ib(factory=tuple)
    scale = attr.ib(default=1.0)
    notes = attr.ib(factory=dict)


@attr.s(slots=True, frozen=True)
class SearchResult(object):
    value = attr.ib()
    params = attr.ib()
    restart = attr.ib()
    evals = attr.ib()
    trajectory = attr.ib()


class BudgetExhausted(Exception):
    '''Raised inside a restart when its evaluation budget is spent.'''


class _Tracker(object):
    '''Wraps an objective, keeping the best point seen.'''

    def __init__(self, objective, cfg):
        self.objective = objective
        self.cfg = cfg
        self.evals = 0
        self.best_value = math.inf
        self.best_x = None
        self.history = []

    def __call__(self, x):
        if self.evals >= self.cfg.max_evals:
            raise BudgetExhausted
        self.evals += 1
        value = float(self.objective(x))
        if not math.isfinite(value):
            return 1e300
        if value < self.best_value:
            self.best_value = value
            self.best_x = np.array(x, dtype=float)
        return value

    def callback(self, *args):
        # Stop once the best value has stalled over the window.
        self.history.append(self.best_value)
        window = self.cfg.window
        if len(self.history) > window:
            old, new = self.history[-window - 1], self.history[-1]
            if old - new <= self.cfg.rel_tol * max(1.0, abs(new)):
                raise StopIteration


_OPTIONS = {
    'Powell': lambda cfg: {'maxiter': cfg.max_iters, 'xtol': 1e-6,
                           'ftol': cfg.rel_tol},
    'Nelder-Mead': lambda cfg: {'maxiter': cfg.max_iters,
                                'fatol': cfg.rel_tol},
}


class MultiStartSearch(object):
    '''Minimizes an objective of a real vector from seeded random starts.'''

    def __init__(self, objective, dim, cfg, *, name='search', scale=1.0):
        self.logger = class_logger(__name__, self.__class__.__name__)
        self.objective = objective
        self.dim = dim
        self.cfg = cfg
        self.name = name
        self.scale = scale

    def _options(self):
        make = _OPTIONS.get(self.cfg.method)
        if make is None:
            return {'maxiter': self.cfg.max_iters}
        return make(self.cfg)

    def restart(self, index):
        cfg = self.cfg
        rng = make_rng(cfg.seed, index)
        x0 = rng.normal(scale=self.scale, size=self.dim)
        tracker = _Tracker(self.objective, cfg)
        if self.dim == 0:
            tracker(x0)
        else:
            try:
                minimize(tracker, x0, method=cfg.method,
                         callback=tracker.callback, options=self._options())
            except (StopIteration, BudgetExhausted):
                pass
        if tracker.best_x is None:
            tracker.best_x = x0
        self.logger.debug(f'{self.name} restart {index}: '
                          f'{tracker.best_value:.9f} after '
                          f'{tracker.evals:,d} evaluations')
        return SearchResult(tracker.best_value, tracker.best_x, index,
                            tracker.evals, (tracker.best_value, ))

    def run(self):
        results = map_in_threads(self.restart, range(self.cfg.restarts),
                                 self.cfg.concurrent)
        best = min(results, key=lambda r: (r.value, r.restart))
        evals = sum(r.evals for r in results)
        trajectory = tuple(r.value for r in results)
        self.logger.info(f'{self.name}: best {best.value:.9f} from restart '
                         f'{best.restart} of {len(results)}, '
                         f'{evals:,d} evaluations')
        return SearchResult(best.value, best.params, best.restart, evals,
                            trajectory)


# Parametrizations of feasible sets by unconstrained real vectors

def hermitian_size(n):
    return n * n


def hermitian_from_params(x, n):
    '''Hermitian n x n matrix from n*n reals.'''
    x = np.asarray(x, dtype=float)
    h = np.diag(x[:n]).astype(complex)
    rows, cols = np.triu_indices(n, 1)
    count = len(rows)
    upper = x[n:n + count] + 1j * x[n + count:n + 2 * count]
    h[rows, cols] = upper
    h[cols, rows] = upper.conj()
    return h


def unitary_from_params(x, n):
    return expm(1j * hermitian_from_params(x, n))


def polar_isometry_size(rows, cols):
    return 2 * rows * cols


def polar_isometry(x, rows, cols):
    '''Isometric factor of the polar decomposition of a complex matrix.'''
    x = np.asarray(x, dtype=float)
    half = rows * cols
    g = (x[:half] + 1j * x[half:2 * half]).reshape(rows, cols)
    u, _ = polar(g)
    return u


def stiefel_size(rows, cols):
    return cols * cols + 2 * (rows - cols) * cols


def stiefel_isometry(x, rows, cols):
    '''First cols columns of exp(iH) for H = [[A, B^dag], [B, 0]].

    A is Hermitian cols x cols and B is (rows - cols) x cols.'''
    x = np.asarray(x, dtype=float)
    h = np.zeros((rows, rows), dtype=complex)
    head = cols * cols
    h[:cols, :cols] = hermitian_from_params(x[:head], cols)
    if rows > cols:
        count = (rows - cols) * cols
        b = (x[head:head + count] + 1j * x[head + count:head + 2 * count])
        b = b.reshape(rows - cols, cols)
        h[cols:, :cols] = b
        h[:cols, cols:] = b.conj().T
    return expm(1j * h)[:, :cols]


def stochastic_from_params(x, out_size, in_size):
    '''Column-stochastic matrix from logits by a softmax down each column.'''
    logits = np.asarray(x, dtype=float).reshape(out_size, in_size)
    return softmax(logits, axis=0)
