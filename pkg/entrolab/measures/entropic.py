# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Multipartite mutual informations and the identities between them.

Two generalizations of mutual information to parties A_1 ... A_m:

    I   = sum_i S(A_i) - S(A_1...A_m)
    S_m = sum_i S(all but A_i) - (m - 1) S(A_1...A_m)

Both are linear combinations of subsystem entropies, held as an
EntropyForm.  Conditioning on E replaces every term S(T) by
S(TE) - S(E); forms are evaluated against an EntropyTable that memoizes
the entropies of one state.
'''

from collections import namedtuple

import attr
import numpy as np
import pylru

from entrolab.lib.qstate import (
    StateError, reduced_matrix, shannon_entropy, subsystem_entropy, tensor,
)
from entrolab.lib.util import class_logger, map_in_threads
from entrolab.measures.search import (
    MultiStartSearch, OptimizerConfig, hermitian_size, unitary_from_params,
)


UNITARY_TOL = 1e-8
WHICH = ('I', 'S')


class BadPartition(Exception):
    '''Raised when a partition does not fit a state or an operation.'''


class BadBasis(Exception):
    '''Raised when measurement bases are not orthonormal.'''


def _label_tuple(party):
    if isinstance(party, str):
        return (party, )
    return tuple(str(label) for label in party)


class Partition(namedtuple('Partition', 'parties conditioner')):
    '''Parties A_1 : ... : A_m and a conditioning register E.

    Each party is a tuple of labels; the conditioner may be empty.'''

    def __new__(cls, parties, conditioner=()):
        parties = tuple(_label_tuple(party) for party in parties)
        conditioner = _label_tuple(conditioner)
        if len(parties) < 2:
            raise BadPartition('a partition needs at least two parties')
        if not all(parties):
            raise BadPartition('parties must be nonempty')
        labels = [label for party in parties for label in party]
        labels.extend(conditioner)
        if len(set(labels)) != len(labels):
            raise BadPartition(f'labels are repeated in {labels}')
        return super().__new__(cls, parties, conditioner)

    @classmethod
    def from_string(cls, text):
        '''Parse "A,A2:B:C|E": parties joined by ":", labels inside a party
        by ",", and an optional conditioner after "|".'''
        head, bar, tail = text.partition('|')
        if bar and not tail.strip():
            raise BadPartition(f'empty conditioner in "{text}"')

        def labels(chunk):
            items = [item.strip() for item in chunk.split(',')]
            if not all(items):
                raise BadPartition(f'empty label in "{text}"')
            return tuple(items)

        parties = [labels(chunk) for chunk in head.split(':')]
        conditioner = labels(tail) if bar else ()
        return cls(parties, conditioner)

    def __str__(self):
        text = ':'.join(','.join(party) for party in self.parties)
        if self.conditioner:
            text += '|' + ','.join(self.conditioner)
        return text

    @property
    def m(self):
        return len(self.parties)

    @property
    def labels(self):
        '''Every label the partition names, parties first.'''
        return tuple(label for party in self.parties for label in party) \
            + self.conditioner

    def check(self, layout):
        missing = [label for label in self.labels
                   if label not in layout.labels]
        if missing:
            raise BadPartition(f'labels {missing} of partition {self} are '
                               f'not in layout {layout}')

    def unconditioned(self):
        return Partition(self.parties)

    def with_conditioner(self, conditioner):
        return Partition(self.parties, conditioner)


class EntropyForm(object):
    '''A linear combination sum_T c_T S(T) of subset entropies.'''

    def __init__(self, terms=None):
        self.terms = {}
        for labels, coeff in (terms or {}).items():
            self._add(frozenset(labels), coeff)

    def _add(self, key, coeff):
        if not key:
            return
        total = self.terms.get(key, 0) + coeff
        if total:
            self.terms[key] = total
        else:
            self.terms.pop(key, None)

    @classmethod
    def entropy(cls, labels):
        return cls({frozenset(labels): 1})

    def __add__(self, other):
        result = EntropyForm(self.terms)
        for key, coeff in other.terms.items():
            result._add(key, coeff)
        return result

    def __neg__(self):
        return EntropyForm({key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return EntropyForm({key: scalar * c for key, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, EntropyForm) and self.terms == other.terms

    def __repr__(self):
        parts = [f'{c:+g} S({"".join(sorted(key))})'
                 for key, c in sorted(self.terms.items(),
                                      key=lambda kv: sorted(kv[0]))]
        return 'EntropyForm(' + ' '.join(parts) + ')'

    def labels(self):
        result = set()
        for key in self.terms:
            result |= key
        return result

    def condition(self, labels):
        '''Apply S(T) -> S(T u E) - S(E) termwise.'''
        given = frozenset(labels)
        result = EntropyForm()
        for key, coeff in self.terms.items():
            result._add(key | given, coeff)
            result._add(given, -coeff)
        return result

    def evaluate(self, table):
        return float(sum(coeff * table.entropy(key)
                         for key, coeff in self.terms.items()))


def label_union(parties):
    result = set()
    for party in parties:
        result |= set(_label_tuple(party))
    return result


def zero_form():
    return EntropyForm()


def lindblad_form(parties):
    '''sum_i S(A_i) - S(A_1...A_m); zero for fewer than two parties.'''
    form = EntropyForm()
    for party in parties:
        form += EntropyForm.entropy(_label_tuple(party))
    return form - EntropyForm.entropy(label_union(parties))


def secrecy_form(parties):
    '''sum_i S(all but A_i) - (m - 1) S(all).'''
    everything = label_union(parties)
    form = EntropyForm()
    for party in parties:
        form += EntropyForm.entropy(everything - set(_label_tuple(party)))
    return form - (len(parties) - 1) * EntropyForm.entropy(everything)


def mutual_form(a, b, e=()):
    '''I(a:b|e).'''
    given = label_union([e]) if e else set()
    form = lindblad_form([a, b])
    return form.condition(given) if given else form


def info_form(parties, which):
    if which == 'I':
        return lindblad_form(parties)
    if which == 'S':
        return secrecy_form(parties)
    raise BadPartition(f'which must be I or S, not {which}')


class EntropyTable(object):
    '''Memoized entropies of label subsets of one state.

    The state may be a DensityMatrix or a PureState; labels a form does
    not mention are traced out implicitly.'''

    def __init__(self, state, size=512):
        self.state = state
        self.layout = state.layout
        self.cache = pylru.lrucache(size)

    def entropy(self, labels):
        key = frozenset(labels)
        if not key:
            return 0.0
        try:
            return self.cache[key]
        except KeyError:
            pass
        try:
            value = self.compute(key)
        except StateError as e:
            raise BadPartition(str(e)) from None
        self.cache[key] = value
        return value

    def compute(self, key):
        return subsystem_entropy(self.state, key)


def entropy_table(state):
    '''An EntropyTable for state, or state itself if it is one already.'''
    if isinstance(state, EntropyTable):
        return state
    return EntropyTable(state)


def _prepare(state, part):
    table = entropy_table(state)
    part.check(table.layout)
    return table


def multi_info_I(state, part):
    '''Lindblad multipartite mutual information I(A_1:...:A_m).'''
    if part.conditioner:
        raise BadPartition('use cond_multi_info with a conditioner')
    return lindblad_form(part.parties).evaluate(_prepare(state, part))


def multi_info_S(state, part):
    '''S_m(A_1:...:A_m).'''
    if part.conditioner:
        raise BadPartition('use cond_multi_info with a conditioner')
    return secrecy_form(part.parties).evaluate(_prepare(state, part))


def multi_info(state, part, which):
    if which == 'I':
        return multi_info_I(state, part)
    if which == 'S':
        return multi_info_S(state, part)
    raise BadPartition(f'which must be I or S, not {which}')


def cond_multi_info(state, part, which):
    '''I or S_m of the parties conditioned on part.conditioner.'''
    if not part.conditioner:
        return multi_info(state, part, which)
    form = info_form(part.parties, which).condition(part.conditioner)
    return form.evaluate(_prepare(state, part))


def bipartite_cmi(state, a, b, e=()):
    '''I(a:b|e) = S(ae) + S(be) - S(abe) - S(e).'''
    a, b, e = _label_tuple(a), _label_tuple(b), _label_tuple(e)
    if not a or not b:
        raise BadPartition('both sides of a mutual information need labels')
    labels = a + b + e
    if len(set(labels)) != len(labels):
        raise BadPartition(f'labels are repeated in {labels}')
    table = entropy_table(state)
    _check_present(labels, table.layout)
    return mutual_form(a, b, e).evaluate(table)


def _check_present(labels, layout):
    missing = [label for label in labels if label not in layout.labels]
    if missing:
        raise BadPartition(f'labels {missing} are not in layout {layout}')


def venn_info(state, part):
    '''Inclusion-exclusion sum over nonempty party subsets.

    For three parties this is the interaction information, which unlike I
    and S_m can be negative.'''
    if part.conditioner:
        raise BadPartition('venn_info takes no conditioner')
    table = _prepare(state, part)
    m = part.m
    total = 0.0
    for mask in range(1, 1 << m):
        chosen = [part.parties[i] for i in range(m) if mask >> i & 1]
        sign = 1 if len(chosen) % 2 else -1
        total += sign * table.entropy(label_union(chosen))
    return total


# Identity verification

IdentityRecord = namedtuple('IdentityRecord',
                            'sample name left right residual kind')


@attr.s(slots=True)
class IdentityReport(object):
    '''Residuals of identities (kind "eq") and inequalities (kind "ge").'''
    records = attr.ib(factory=list)
    tolerance = attr.ib(default=1e-8)

    def violations(self):
        tol = self.tolerance
        return [r for r in self.records
                if (r.kind == 'eq' and abs(r.residual) > tol)
                or (r.kind == 'ge' and r.residual < -tol)]

    @property
    def passed(self):
        return not self.violations()

    @property
    def max_violation(self):
        worst = 0.0
        for r in self.records:
            excess = abs(r.residual) if r.kind == 'eq' else -r.residual
            worst = max(worst, excess)
        return worst

    def extend(self, other):
        self.records.extend(other.records)


def _info(parties, which, given=()):
    form = info_form(parties, which)
    return form.condition(given) if given else form


def _identity_forms(parties, x, e):
    '''(name, left form, right form, kind) for one sample's identities.'''
    m = len(parties)
    first, rest = parties[0], parties[1:]
    x_first = (x, ) + first
    x_parties = [x_first] + list(rest)
    forms = []

    def eq(name, left, right):
        forms.append((name, left, right, 'eq'))

    def ge(name, left, right):
        forms.append((name, left, right, 'ge'))

    def bi_sum(given=()):
        total = mutual_form(parties[0], parties[1], given)
        for k in range(2, m):
            total += mutual_form(parties[k], label_union(parties[:k]), given)
        return total

    eq('multi_bi', _info(parties, 'I'), bi_sum())
    eq('multi_bi_cond', _info(parties, 'I', e), bi_sum(e))
    if m >= 3:
        eq('recur_I', _info(parties, 'I'),
           lindblad_form(parties[:-1])
           + mutual_form(parties[-1], label_union(parties[:-1])))

    chain = mutual_form(parties[0], label_union(parties[1:]))
    for k in range(1, m - 1):
        chain += mutual_form(parties[k], label_union(parties[k + 1:]),
                             label_union(parties[:k]))
    eq('s_chain', _info(parties, 'S'), chain)

    everything = label_union(parties)
    duality = zero_form()
    for party in parties:
        duality += mutual_form(party, everything - set(party))
    eq('duality', _info(parties, 'I') + _info(parties, 'S'), duality)

    for which in WHICH:
        eq(f'cond_assoc_{which}', _info(parties, which, set(e) | {x}),
           _info(parties, which).condition(e).condition([x]))

    rule1 = _info(parties, 'I', [x])
    for party in rest:
        rule1 += mutual_form([x], party)
    eq('rule1', _info(x_parties, 'I'), rule1)

    rule2 = _info(parties, 'I')
    for i in range(1, m):
        rule2 += mutual_form([x], parties[i], label_union(parties[:i]))
    eq('rule2', _info(x_parties, 'I'), rule2)

    eq('rule3', _info(x_parties, 'S'),
       _info(parties, 'S', [x]) + mutual_form([x], label_union(rest)))

    rule4 = -lindblad_form(rest)
    for i in range(1, m):
        others = everything - set(parties[i])
        rule4 += mutual_form(parties[i], others | {x})
    eq('rule4', _info(x_parties, 'S'), rule4)

    for which in WHICH:
        ge(f'local_conditioning_{which}', _info(x_parties, which),
           _info(parties, which, [x]))
    ge('ancilla_conditioning_I', _info(x_parties, 'I', e),
       _info(parties, 'I', e))
    return forms


def _sample_records(index, sample):
    state, part, x = sample
    table = entropy_table(state)
    part.check(table.layout)
    if x not in table.layout.labels or x in part.labels:
        raise BadPartition(f'extra label {x} must be in the state and '
                           f'outside partition {part}')
    records = []
    for name, left, right, kind in _identity_forms(
            part.parties, x, part.conditioner):
        lv, rv = left.evaluate(table), right.evaluate(table)
        records.append(IdentityRecord(index, name, lv, rv, lv - rv, kind))
    return records


def identity_suite(samples, tol=1e-8, concurrent=True):
    '''Check the multipartite information identities on samples.

    Each sample is (state, partition, x) where the partition's conditioner
    plays E and x is one more label of the state.'''
    samples = list(samples)
    logger = class_logger(__name__, 'IdentitySuite')
    per_sample = map_in_threads(lambda pair: _sample_records(*pair),
                                enumerate(samples), concurrent)
    report = IdentityReport([r for rs in per_sample for r in rs], tol)
    logger.info(f'{len(report.records):,d} identity records on '
                f'{len(samples):,d} samples, max violation '
                f'{report.max_violation:.3g}')
    return report


ChainTerms = namedtuple('ChainTerms', 'total conditioned primed residuals')


def _chain_forms(primed_pairs, e, which):
    unprimed = [(a, ) for a, _ in primed_pairs]
    primes = [(p, ) for _, p in primed_pairs]
    combined = [(a, p) for a, p in primed_pairs]
    all_primes = label_union(primes)
    total = _info(combined, which, e)
    conditioned = _info(unprimed, which, all_primes | set(e))
    primed = _info(primes, which, e)
    residuals = []
    for i, (a, p) in enumerate(primed_pairs):
        other_primes = all_primes - {p}
        if which == 'I':
            residuals.append(mutual_form([a], other_primes, {p} | set(e)))
        else:
            other_parties = {b for b, _ in primed_pairs} - {a}
            residuals.append(mutual_form(other_parties, [p],
                                         other_primes | set(e)))
    return total, conditioned, primed, residuals


def chain_residuals(state, primed_pairs, e=(), which='I'):
    '''Split I(A_1A_1':...:A_mA_m'|E) along the primed registers.

    Returns ChainTerms(total, conditioned, primed, residuals) with
    total = conditioned + primed + sum(residuals), where conditioned is
    the unprimed value given all primes and E, and primed is the primed
    value given E.'''
    primed_pairs = [tuple(pair) for pair in primed_pairs]
    e = _label_tuple(e)
    labels = [label for pair in primed_pairs for label in pair] + list(e)
    if len(primed_pairs) < 2 or any(len(pair) != 2 for pair in primed_pairs):
        raise BadPartition('need at least two (label, primed label) pairs')
    if len(set(labels)) != len(labels):
        raise BadPartition(f'labels are repeated in {labels}')
    table = entropy_table(state)
    _check_present(labels, table.layout)
    total, conditioned, primed, residuals = _chain_forms(
        primed_pairs, e, which)
    return ChainTerms(total.evaluate(table), conditioned.evaluate(table),
                      primed.evaluate(table),
                      [r.evaluate(table) for r in residuals])


def _chain_records(index, sample):
    state, primed_pairs, e = sample
    records = []
    for which in WHICH:
        terms = chain_residuals(state, primed_pairs, e, which)
        rebuilt = terms.conditioned + terms.primed + sum(terms.residuals)
        records.append(IdentityRecord(index, f'chain_{which}', terms.total,
                                      rebuilt, terms.total - rebuilt, 'eq'))
        for n, value in enumerate(terms.residuals):
            records.append(IdentityRecord(index, f'chain_{which}_term{n}',
                                          value, 0.0, value, 'ge'))
        split = terms.conditioned + terms.primed
        records.append(IdentityRecord(index, f'superadditivity_{which}',
                                      terms.total, split,
                                      terms.total - split, 'ge'))
    return records


def chain_suite(samples, tol=1e-8, concurrent=True):
    '''Chain decomposition and superadditivity on (state, pairs, e)
    samples.'''
    samples = list(samples)
    per_sample = map_in_threads(lambda pair: _chain_records(*pair),
                                enumerate(samples), concurrent)
    return IdentityReport([r for rs in per_sample for r in rs], tol)


def additivity_residuals(first, part1, second, part2, which):
    '''Conditional value of a product of extensions minus the sum of the
    factors' values.

    first and second are states on disjoint labels; the product's parties
    pair up the factors' parties in order and its conditioner joins both
    conditioners.'''
    if part1.m != part2.m:
        raise BadPartition('both partitions need the same number of parties')
    joint = tensor(first, second)
    part = Partition([a + b for a, b in zip(part1.parties, part2.parties)],
                     part1.conditioner + part2.conditioner)
    whole = cond_multi_info(joint, part, which)
    split = (cond_multi_info(first, part1, which)
             + cond_multi_info(second, part2, which))
    return whole - split


# Measured mutual information

MeasuredInfo = namedtuple('MeasuredInfo', 'value bases exact')


def _check_unitary(u, dim, name):
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise BadBasis(f'{name} basis has shape {u.shape}, expected '
                       f'{(dim, dim)}')
    deviation = np.max(np.abs(u.conj().T @ u - np.eye(dim)))
    if deviation > UNITARY_TOL:
        raise BadBasis(f'{name} basis is not orthonormal '
                       f'(deviation {deviation:.3g})')
    return u


def _outcome_mi(matrix, ua, ub):
    u = np.kron(ua, ub)
    probs = np.real(np.einsum('ia,ij,ja->a', u.conj(), matrix, u))
    probs = np.clip(probs, 0, None).reshape(ua.shape[1], ub.shape[1])
    return (shannon_entropy(probs.sum(axis=1))
            + shannon_entropy(probs.sum(axis=0)) - shannon_entropy(probs))


def measured_mutual_info(state, part, bases=None, search=None):
    '''Classical mutual information of local projective measurements.

    With bases (columns are basis vectors) the value is exact for those
    bases.  Otherwise bases are searched from unitary generators and the
    value is a lower estimate of the supremum.'''
    if part.m != 2 or part.conditioner:
        raise BadPartition('measured mutual information takes exactly two '
                           'parties and no conditioner')
    layout = state.layout
    part.check(layout)
    a, b = part.parties
    da, db = layout.dims_of(a), layout.dims_of(b)
    matrix = reduced_matrix(state, a + b)
    if bases is not None:
        ua = _check_unitary(bases[0], da, 'first')
        ub = _check_unitary(bases[1], db, 'second')
        return MeasuredInfo(_outcome_mi(matrix, ua, ub), (ua, ub), True)

    cfg = search or OptimizerConfig.for_measurements()
    na = hermitian_size(da)

    def bases_at(x):
        return (unitary_from_params(x[:na], da),
                unitary_from_params(x[na:], db))

    def objective(x):
        return -_outcome_mi(matrix, *bases_at(x))

    computational = _outcome_mi(matrix, np.eye(da), np.eye(db))
    result = MultiStartSearch(objective, na + hermitian_size(db), cfg,
                              name='measured_mutual_info').run()
    if -result.value >= computational:
        return MeasuredInfo(-result.value, bases_at(result.params), False)
    return MeasuredInfo(computational, (np.eye(da), np.eye(db)), False)
