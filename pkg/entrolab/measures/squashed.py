# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Upper bounds on squashed entanglement and on mixed convex roofs.

The classical version minimizes the conditional information over
ensembles of the state, which is the mixed convex roof of the
unconditioned information.  The quantum version minimizes over channels
applied to the canonical purifier.  Both searches start from a set of
anchor extensions that are always evaluated, so a report is never worse
than its best anchor.
'''

import math

import numpy as np

from entrolab.lib.qstate import DensityMatrix, check_size, partial_trace
from entrolab.lib.util import class_logger
from entrolab.measures.entropic import (
    BadPartition, EntropyTable, multi_info,
)
from entrolab.measures.extensions import (
    ClassicalExtension, QuantumExtension, check_extends, diagonal_ensemble,
    ensemble_from_blocks, extension_table, extension_to_channel,
    purifier_factor, spectral_ensemble, trivial_ensemble, value_at,
)
from entrolab.measures.search import (
    EXACT, UPPER, BoundReport, MultiStartSearch, OptimizerConfig,
    polar_isometry, polar_isometry_size, stiefel_isometry, stiefel_size,
)


MAX_OPT_DIM = 1 << 12
ZERO_TOL = 1e-9
KNOWN_TOL = 1e-6


def _certify(value, pure, known_value):
    if pure or value <= ZERO_TOL:
        return EXACT
    if known_value is not None and abs(value - known_value) <= KNOWN_TOL:
        return EXACT
    return UPPER


def _covered(rho, part):
    '''rho traced down to the labels part names, and the discarded set.'''
    if part.conditioner:
        raise BadPartition('squashed bounds condition on their own '
                           'extension; the partition takes no conditioner')
    part.check(rho.layout)
    discard = set(rho.layout.labels) - set(part.labels)
    if not discard:
        return rho, discard
    reduced = partial_trace(rho, discard)
    return DensityMatrix(reduced.layout, reduced.matrix), discard


def _reduce_anchor(ext, reduced, discard):
    if not discard:
        return ext
    if isinstance(ext, ClassicalExtension):
        members = [partial_trace(member, discard) for member in ext.members]
        return ClassicalExtension(ext.weights, members)
    return QuantumExtension(reduced, ext.label,
                            partial_trace(ext.state, discard))


class RoofSearch(object):
    '''Minimizes sum_i p_i g(rho_i) over ensembles {p_i, rho_i} of rho.

    Ensembles are parametrized by measurements on the canonical purifier
    with cfg.ensemble_for(rank) outcomes.'''

    def __init__(self, g, rho, cfg, *, name='mixed_convex_roof'):
        self.logger = class_logger(__name__, self.__class__.__name__)
        check_size(rho.dim, MAX_OPT_DIM)
        self.g = g
        self.rho = rho
        self.cfg = cfg
        self.name = name
        self.w = purifier_factor(rho)
        self.rank = self.w.shape[1]

    def average(self, ext):
        return float(sum(p * self.g(member)
                         for p, member in zip(ext.weights, ext.members)))

    def anchors(self, extra):
        yield 'trivial', trivial_ensemble(self.rho)
        if self.rank > 1:
            yield 'spectral', spectral_ensemble(self.rho)
            diagonal = diagonal_ensemble(self.rho)
            if diagonal is not None:
                yield 'diagonal', diagonal
        for n, ext in enumerate(extra):
            check_extends(ext, self.rho)
            yield f'anchor{n}', ext

    def ensemble_at(self, x, k):
        v = polar_isometry(x, k * self.rank, self.rank)
        return ensemble_from_blocks(self.rho.layout, self.w,
                                    v.reshape(k, self.rank, self.rank))

    def run(self, anchors=(), known_value=None, which=None):
        best = (math.inf, None, None)
        evals = 0
        for source, ext in self.anchors(anchors):
            value = self.average(ext)
            evals += 1
            if value < best[0]:
                best = (value, ext, source)

        trajectory = ()
        k = self.cfg.ensemble_for(self.rank)
        if self.rank > 1 and best[0] > ZERO_TOL:
            def objective(x):
                return self.average(self.ensemble_at(x, k))

            dim = polar_isometry_size(k * self.rank, self.rank)
            result = MultiStartSearch(objective, dim, self.cfg,
                                      name=self.name).run()
            evals += result.evals
            trajectory = result.trajectory
            ext = self.ensemble_at(result.params, k)
            # re-evaluate so the report is reproducible from its witness
            value = self.average(ext)
            if value < best[0]:
                best = (value, ext, 'search')

        value, witness, source = best
        certified = _certify(value, self.rank == 1, known_value)
        self.logger.info(f'{self.name}: {value:.9f} from {source} '
                         f'({certified})')
        return _report(value, witness, certified, which, self.cfg, evals,
                       trajectory, rank=self.rank, ensemble_size=k,
                       source=source)


def _report(value, witness, certified, which, cfg, evals, trajectory,
            **notes):
    return BoundReport(value=value, witness=witness, certified=certified,
                       which=which, config=cfg.as_dict(), evals=evals,
                       trajectory=tuple(trajectory), notes=notes)


class ChannelSearch(object):
    '''Minimizes the conditional information over channels on the
    canonical purifier of rho.

    A channel with output dimension e and Kraus rank K is the Stinespring
    isometry from the rank-dimensional purifier into e*K dimensions.'''

    def __init__(self, rho, part, which, cfg):
        self.logger = class_logger(__name__, self.__class__.__name__)
        check_size(rho.dim, MAX_OPT_DIM)
        self.rho = rho
        self.part = part
        self.which = which
        self.cfg = cfg
        self.w = purifier_factor(rho)
        self.rank = self.w.shape[1]
        self.output_dim = cfg.extension_for(self.rank)
        self.env_dim = cfg.environment_for(self.rank)
        if self.output_dim * self.env_dim < self.rank:
            self.env_dim = -(-self.rank // self.output_dim)

    def value(self, ext):
        table, label = extension_table(ext, self.rho.layout)
        return value_at(table, label, self.part, self.which)

    def extension_at(self, x):
        rows = self.output_dim * self.env_dim
        v = stiefel_isometry(x, rows, self.rank)
        return QuantumExtension.dilate(self.rho, self.w, v, self.output_dim,
                                       check=False)

    def anchors(self, extra, classical):
        yield 'trivial', QuantumExtension.trivial(self.rho)
        yield 'identity', QuantumExtension.dilate(
            self.rho, self.w, np.eye(self.rank, dtype=complex), self.rank)
        if classical is not None:
            yield 'classical', extension_to_channel(classical, self.rho)
        for n, ext in enumerate(extra):
            check_extends(ext, self.rho)
            if isinstance(ext, ClassicalExtension):
                ext = extension_to_channel(ext, self.rho)
            yield f'anchor{n}', ext

    def run(self, anchors=(), classical=None, known_value=None):
        best = (math.inf, None, None)
        evals = 0
        for source, ext in self.anchors(anchors, classical):
            value = self.value(ext)
            evals += 1
            if value < best[0]:
                best = (value, ext, source)

        trajectory = ()
        if self.rank > 1 and best[0] > ZERO_TOL:
            rows = self.output_dim * self.env_dim
            result = MultiStartSearch(
                lambda x: self.value(self.extension_at(x)),
                stiefel_size(rows, self.rank), self.cfg,
                name=f'q_squashed_{self.which}').run()
            evals += result.evals
            trajectory = result.trajectory
            ext = self.extension_at(result.params)
            value = self.value(ext)
            if value < best[0]:
                best = (value, ext, 'search')

        value, witness, source = best
        certified = _certify(value, self.rank == 1, known_value)
        self.logger.info(f'q_squashed_{self.which}: {value:.9f} from '
                         f'{source} ({certified}), extension dimension '
                         f'{self.output_dim}')
        return _report(value, witness, certified, self.which, self.cfg,
                       evals, trajectory, rank=self.rank,
                       extension_dim=self.output_dim,
                       environment_dim=self.env_dim, source=source)


def mixed_convex_roof(g, rho, cfg=None, known_value=None, anchors=()):
    '''Upper bound on inf sum_i p_i g(rho_i) over ensembles of rho.

    g maps a DensityMatrix to a number.  The witness is the best
    ClassicalExtension found.'''
    cfg = cfg or OptimizerConfig()
    return RoofSearch(g, rho, cfg).run(anchors, known_value)


def c_squashed_upper(rho, part, which='I', cfg=None, known_value=None,
                     anchors=()):
    '''Upper bound on the c-squashed entanglement of part in rho.

    Labels the partition does not name are traced out first; the witness
    then extends that marginal, as do anchors after the same reduction.'''
    cfg = cfg or OptimizerConfig()
    reduced, discard = _covered(rho, part)
    anchors = [_reduce_anchor(ext, reduced, discard) for ext in anchors]
    plain = part.unconditioned()

    def g(member):
        return multi_info(EntropyTable(member), plain, which)

    search = RoofSearch(g, reduced, cfg, name=f'c_squashed_{which}')
    return search.run(anchors, known_value, which)


def q_squashed_upper(rho, part, which='I', cfg=None, known_value=None,
                     anchors=(), classical=None):
    '''Upper bound on the q-squashed entanglement of part in rho.

    classical is a c-squashed report or extension used as one anchor; when
    omitted a classical search runs first with the same budget, so the
    result never exceeds the classical bound.'''
    cfg = cfg or OptimizerConfig()
    reduced, discard = _covered(rho, part)
    anchors = [_reduce_anchor(ext, reduced, discard) for ext in anchors]
    search = ChannelSearch(reduced, part, which, cfg)
    if search.rank == 1:
        classical = None
    elif classical is None:
        classical = c_squashed_upper(reduced, part, which, cfg).witness
    elif not isinstance(classical, ClassicalExtension):
        classical = classical.witness
    return search.run(anchors, classical, known_value)


def bipartite_squashed_upper(rho, part, cfg=None):
    '''Half the q-squashed bound with the I version, for two parties.'''
    if part.m != 2:
        raise BadPartition(f'bipartite squashed entanglement needs two '
                           f'parties, got {part.m}')
    report = q_squashed_upper(rho, part, 'I', cfg)
    report.scale = 0.5
    report.value *= 0.5
    report.trajectory = tuple(0.5 * v for v in report.trajectory)
    return report
