# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Classical secrecy quantities of joint distributions.

A JointDistribution is a dense probability tensor over named finite
variables.  Shannon quantities reuse the entropic forms of the quantum
side, evaluated against a table of marginal Shannon entropies, so every
classical value equals its quantum counterpart on the diagonal embedding.
'''

import csv
import math

import attr
import numpy as np

from entrolab.lib.qstate import (
    DensityMatrix, SystemLayout, as_layout, check_size, shannon_entropy,
)
from entrolab.lib.util import class_logger, make_rng
from entrolab.measures.entropic import (
    EntropyTable, info_form, label_union, mutual_form, zero_form,
)
from entrolab.measures.search import (
    EXACT, UPPER, BoundReport, MultiStartSearch, OptimizerConfig,
    stochastic_from_params,
)
from entrolab.measures.states import party_labels


MAX_CELLS = 1 << 16
MAX_EMBED_DIM = 1 << 12
NORM_TOL = 1e-12
CSV_TOL = 1e-6
ZERO_TOL = 1e-9
INDEPENDENCE_TOL = 1e-10
EVE = 'E'


class DistributionError(Exception):
    '''Raised on malformed distributions, channels or CSV input.'''


def _readonly(array):
    array = np.array(array)
    array.setflags(write=False)
    return array


@attr.s(slots=True, frozen=True, eq=False)
class JointDistribution(object):
    '''Probabilities over the product of the alphabets, in their order.'''
    alphabets = attr.ib()
    probs = attr.ib()

    def __repr__(self):
        return f'JointDistribution({self.alphabets})'

    @property
    def layout(self):
        return self.alphabets

    @property
    def labels(self):
        return self.alphabets.labels

    def size_of(self, label):
        return self.alphabets.dim_of(label)

    def marginal(self, labels):
        '''Marginal probabilities of labels, axes in alphabet order.'''
        self.alphabets.check_labels(labels)
        keep = set(self.alphabets.positions(labels))
        drop = tuple(n for n in range(len(self.labels)) if n not in keep)
        return self.probs.sum(axis=drop)


def make_distribution(alphabets, probs):
    '''A validated JointDistribution.'''
    alphabets = as_layout(alphabets)
    check_size(alphabets.total_dim, MAX_CELLS)
    try:
        p = np.asarray(probs, dtype=float).reshape(alphabets.dims)
    except ValueError:
        raise DistributionError(f'{np.size(probs)} probabilities do not '
                                f'fill alphabets {alphabets}') from None
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise DistributionError('probabilities must be finite and '
                                'nonnegative')
    total = p.sum()
    if abs(total - 1) > NORM_TOL:
        raise DistributionError(f'probabilities sum to {total!r}')
    return JointDistribution(alphabets, _readonly(p))


@attr.s(slots=True, frozen=True, eq=False)
class StochasticChannel(object):
    '''matrix[out, in] is the probability of out given in.'''
    in_size = attr.ib()
    out_size = attr.ib()
    matrix = attr.ib()


def make_stochastic(matrix):
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise DistributionError('a stochastic matrix is 2-dimensional')
    if np.any(m < 0):
        raise DistributionError('stochastic matrix has negative entries')
    deviation = np.max(np.abs(m.sum(axis=0) - 1))
    if deviation > NORM_TOL:
        raise DistributionError(f'columns do not sum to 1 (deviation '
                                f'{deviation:.3g})')
    return StochasticChannel(m.shape[1], m.shape[0], _readonly(m))


def identity_stochastic(in_size, out_size=None):
    '''Maps i to i, padded with unused outputs when out_size is larger.'''
    out_size = out_size or in_size
    if out_size < in_size:
        raise DistributionError(f'identity needs {in_size} outputs, '
                                f'got {out_size}')
    return make_stochastic(np.eye(out_size, in_size))


def constant_stochastic(in_size, out_size=1):
    m = np.zeros((out_size, in_size))
    m[0] = 1
    return make_stochastic(m)


class ClassicalEntropyTable(EntropyTable):
    '''Memoized Shannon entropies of marginals of a distribution.'''

    def compute(self, key):
        return shannon_entropy(self.state.marginal(key))


def _labels(variables):
    if isinstance(variables, str):
        return (variables, )
    return tuple(variables)


def _table(dist, labels):
    dist.alphabets.check_labels(labels)
    return ClassicalEntropyTable(dist)


def classical_entropy(dist, variables):
    variables = _labels(variables)
    return _table(dist, variables).entropy(variables)


def classical_mi(dist, a, b):
    a, b = _labels(a), _labels(b)
    return mutual_form(a, b).evaluate(_table(dist, a + b))


def classical_cmi(dist, a, b, e=()):
    a, b, e = _labels(a), _labels(b), _labels(e)
    return mutual_form(a, b, e).evaluate(_table(dist, a + b + e))


def _conditional_form(parties, cond, which):
    form = info_form(parties, which)
    return form.condition(cond) if cond else form


def cond_multi_info_classical(dist, parties, cond=(), which='I'):
    '''I (or S_m) of parties given cond.'''
    parties = [_labels(party) for party in parties]
    cond = _labels(cond)
    form = _conditional_form(parties, cond, which)
    return form.evaluate(_table(dist, tuple(label_union(parties)) + cond))


def _chain_term_forms(parties, cond):
    forms = []
    for k in range(len(parties) - 1):
        given = label_union(parties[:k]) | set(cond)
        forms.append(mutual_form(parties[k], label_union(parties[k + 1:]),
                                 given))
    return forms


def s_chain_terms(dist, parties, cond=()):
    '''The terms I(A_k : A_k+1 ... A_m | A_1 ... A_k-1 cond); their sum is
    the conditional S_m.'''
    parties = [_labels(party) for party in parties]
    cond = _labels(cond)
    table = _table(dist, tuple(label_union(parties)) + cond)
    return [form.evaluate(table)
            for form in _chain_term_forms(parties, cond)]


def _push(dist, label, channel):
    n = dist.alphabets.index(label)
    if channel.in_size != dist.size_of(label):
        raise DistributionError(f'channel takes {channel.in_size} inputs, '
                                f'{label} has {dist.size_of(label)}')
    moved = np.tensordot(dist.probs, channel.matrix, axes=([n], [1]))
    probs = np.moveaxis(moved, -1, n)
    alphabets = dist.alphabets.replace(label, label, channel.out_size)
    check_size(alphabets.total_dim, MAX_CELLS)
    probs = np.clip(probs, 0, None)
    return JointDistribution(alphabets, _readonly(probs / probs.sum()))


def apply_eve_channel(dist, eve, channel):
    '''Post-process Eve's variable; the label is kept.'''
    return _push(dist, eve, channel)


def process_locally(dist, label, channel):
    '''A party's local stochastic processing of its own variable.'''
    return _push(dist, label, channel)


class EveChannelSearch(object):
    '''Minimizes a form conditioned on Eve over channels E -> E-bar.'''

    def __init__(self, dist, eve, form, cfg, eve_size, *, name):
        self.logger = class_logger(__name__, self.__class__.__name__)
        self.dist = dist
        self.eve = eve
        self.form = form
        self.cfg = cfg
        self.in_size = dist.size_of(eve)
        self.out_size = eve_size or self.in_size
        self.name = name

    def value(self, channel):
        pushed = apply_eve_channel(self.dist, self.eve, channel)
        return self.form.evaluate(ClassicalEntropyTable(pushed))

    def channel_at(self, x):
        matrix = stochastic_from_params(x, self.out_size, self.in_size)
        return StochasticChannel(self.in_size, self.out_size, matrix)

    def anchors(self):
        if self.out_size >= self.in_size:
            yield 'identity', identity_stochastic(self.in_size, self.out_size)
        yield 'constant', constant_stochastic(self.in_size, self.out_size)

    def run(self, exact=False):
        best = (math.inf, None, None)
        evals = 0
        for source, channel in self.anchors():
            value = self.value(channel)
            evals += 1
            if value < best[0]:
                best = (value, channel, source)

        trajectory = ()
        if not exact and best[0] > ZERO_TOL:
            result = MultiStartSearch(
                lambda x: self.value(self.channel_at(x)),
                self.out_size * self.in_size, self.cfg, name=self.name).run()
            evals += result.evals
            trajectory = result.trajectory
            channel = self.channel_at(result.params)
            value = self.value(channel)
            if value < best[0]:
                best = (value, channel, 'search')

        value, channel, source = best
        certified = EXACT if exact or value <= ZERO_TOL else UPPER
        self.logger.info(f'{self.name}: {value:.9f} from {source} '
                         f'({certified})')
        return value, channel, certified, evals, trajectory, source


def _parties(dist, eve, parties):
    dist.alphabets.check_labels([eve])
    if parties is None:
        parties = [(label, ) for label in dist.labels if label != eve]
    parties = [_labels(party) for party in parties]
    if len(parties) < 2:
        raise DistributionError('need at least two parties besides Eve')
    if eve in label_union(parties):
        raise DistributionError(f'Eve\'s variable {eve} is also a party')
    return parties


def _eve_independent(dist, parties, eve):
    mi = classical_mi(dist, tuple(label_union(parties)), eve)
    return mi <= INDEPENDENCE_TOL


def intrinsic_info(dist, eve=EVE, cfg=None, parties=None, eve_size=None):
    '''Upper bound on the multipartite intrinsic information
    inf over channels E -> E-bar of I(A_1 : ... : A_m | E-bar).

    E-bar has eve_size letters, by default as many as E.  notes carry the
    value divided by m - 1.'''
    cfg = cfg or OptimizerConfig()
    parties = _parties(dist, eve, parties)
    form = info_form(parties, 'I').condition([eve])
    search = EveChannelSearch(dist, eve, form, cfg, eve_size,
                              name='intrinsic_info')
    value, channel, certified, evals, trajectory, source = search.run(
        _eve_independent(dist, parties, eve))
    m = len(parties)
    return BoundReport(value=value, witness=channel, certified=certified,
                       which='I', config=cfg.as_dict(), evals=evals,
                       trajectory=trajectory,
                       notes={'normalized': value / (m - 1),
                              'eve_size': search.out_size,
                              'source': source})


def s_arrow(dist, eve=EVE, cfg=None, parties=None, eve_size=None):
    '''Upper bound on the infimum over E -> E-bar of the chained sum
    I(A_1 : A_2...A_m | E-bar) + I(A_2 : A_3...A_m | A_1 E-bar) + ...

    notes carry the chain terms at the witness channel.'''
    cfg = cfg or OptimizerConfig()
    parties = _parties(dist, eve, parties)
    form = sum(_chain_term_forms(parties, [eve]), zero_form())
    search = EveChannelSearch(dist, eve, form, cfg, eve_size,
                              name='s_arrow')
    value, channel, certified, evals, trajectory, source = search.run(
        _eve_independent(dist, parties, eve))
    pushed = apply_eve_channel(dist, eve, channel)
    return BoundReport(value=value, witness=channel, certified=certified,
                       which='S', config=cfg.as_dict(), evals=evals,
                       trajectory=trajectory,
                       notes={'terms': s_chain_terms(pushed, parties, eve),
                              'eve_size': search.out_size,
                              'source': source})


EVE_MODES = ('independent', 'copy')


def ideal_key_dist(m, d, eve_mode='independent', eve_size=None):
    '''m perfectly correlated uniform d-ary variables and Eve.

    An independent Eve is uniform on eve_size letters (default d); a
    copying Eve holds the key.'''
    if m < 2 or d < 2:
        raise DistributionError(f'need m >= 2 and d >= 2, got m={m}, d={d}')
    if eve_mode not in EVE_MODES:
        raise DistributionError(f'eve mode must be one of {EVE_MODES}')
    eve_size = eve_size or d
    if eve_mode == 'copy' and eve_size != d:
        raise DistributionError('a copying Eve has d letters')
    alphabets = SystemLayout([(label, d) for label in party_labels(m)]
                             + [(EVE, eve_size)])
    check_size(alphabets.total_dim, MAX_CELLS)
    probs = np.zeros(alphabets.dims)
    for i in range(d):
        key = (i, ) * m
        if eve_mode == 'copy':
            probs[key + (i, )] = 1 / d
        else:
            probs[key] = 1 / (d * eve_size)
    return make_distribution(alphabets, probs)


def embed_classical(dist):
    '''The diagonal density matrix of a distribution.'''
    check_size(dist.alphabets.total_dim, MAX_EMBED_DIM)
    return DensityMatrix(dist.alphabets,
                         np.diag(dist.probs.reshape(-1)).astype(complex))


def random_distribution(alphabets, seed, concentration=1.0):
    '''A Dirichlet-distributed joint distribution.'''
    alphabets = as_layout(alphabets)
    check_size(alphabets.total_dim, MAX_CELLS)
    rng = make_rng(seed)
    probs = rng.dirichlet([concentration] * alphabets.total_dim)
    return make_distribution(alphabets, probs / probs.sum())


def _cell(value, label, row_number):
    try:
        index = int(value)
    except ValueError:
        raise DistributionError(f'row {row_number}: {label} value '
                                f'"{value}" is not an integer') from None
    if index < 0:
        raise DistributionError(f'row {row_number}: {label} value {index} '
                                f'is negative')
    return index


def read_distribution_csv(path):
    '''Read a header of labels plus a probability column, then one row per
    outcome.  Alphabet sizes are one more than the largest value seen.'''
    with open(path, newline='') as f:
        rows = [row for row in csv.reader(f) if row]
    if len(rows) < 2:
        raise DistributionError(f'{path} needs a header and outcome rows')
    header, body = rows[0], rows[1:]
    labels = [label.strip() for label in header[:-1]]
    if not labels:
        raise DistributionError(f'{path} names no variables')
    outcomes = {}
    for row_number, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DistributionError(f'row {row_number} has {len(row)} '
                                    f'fields, expected {len(header)}')
        key = tuple(_cell(v, label, row_number)
                    for v, label in zip(row[:-1], labels))
        if key in outcomes:
            raise DistributionError(f'row {row_number} repeats outcome {key}')
        try:
            outcomes[key] = float(row[-1])
        except ValueError:
            raise DistributionError(f'row {row_number}: probability '
                                    f'"{row[-1]}" is not a number') from None
    sizes = [1 + max(key[n] for key in outcomes) for n in range(len(labels))]
    alphabets = SystemLayout(zip(labels, sizes))
    check_size(alphabets.total_dim, MAX_CELLS)
    probs = np.zeros(sizes)
    for key, p in outcomes.items():
        probs[key] = p
    total = probs.sum()
    if np.any(probs < 0) or abs(total - 1) > CSV_TOL:
        raise DistributionError(f'{path}: probabilities sum to {total!r}')
    return make_distribution(alphabets, probs / total)


def write_distribution_csv(path, dist, prob_label='p'):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(list(dist.labels) + [prob_label])
        for key in zip(*np.nonzero(dist.probs)):
            writer.writerow([int(k) for k in key]
                            + [repr(float(dist.probs[key]))])

