# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Checks of the axioms an entanglement measure should satisfy.

Each check evaluates a MonotoneFn on sampled inputs and returns a
AxiomReport of per-trial residuals.  Checks are empirical: a passing
report is evidence, not a proof, and the negative controls shipped here
must fail their checks.
'''

import math
from collections import namedtuple

import attr
import numpy as np

from entrolab.lib.qstate import (
    DimensionMismatch, SystemLayout, apply_channel, apply_local, as_density,
    as_matrix, basis_state, entropy, fresh_label, mixture, tensor,
    trace_distance,
)
from entrolab.lib.sampling import (
    random_channel, random_isometry, random_mixed, random_unitary,
)
from entrolab.lib.util import class_logger, derive_seed, map_in_threads
from entrolab.measures.entropic import (
    IdentityReport, IdentityRecord, Partition, additivity_residuals,
    chain_suite, cond_multi_info, identity_suite, multi_info_I,
    multi_info_S,
)
from entrolab.measures.extensions import make_classical_extension
from entrolab.measures.squashed import c_squashed_upper, q_squashed_upper


@attr.s(slots=True, frozen=True)
class MonotoneFn(object):
    '''A functional of (state, partition), named for reports.

    budget is the OptimizerConfig of optimizer-backed functionals.'''
    name = attr.ib()
    eval = attr.ib()
    budget = attr.ib(default=None)

    def __call__(self, state, part):
        return float(self.eval(state, part))


def info_monotone(which='I'):
    '''The (conditional) multipartite information of the partition.'''
    return MonotoneFn(f'multi_info_{which}',
                      lambda state, part: cond_multi_info(state, part, which))


def c_squashed_monotone(which='I', cfg=None):
    return MonotoneFn(
        f'c_squashed_{which}',
        lambda state, part: c_squashed_upper(state, part, which, cfg).value,
        cfg)


def q_squashed_monotone(which='I', cfg=None):
    return MonotoneFn(
        f'q_squashed_{which}',
        lambda state, part: q_squashed_upper(state, part, which, cfg).value,
        cfg)


def entropy_monotone():
    '''Von Neumann entropy; concave, so a negative control for convexity.'''
    return MonotoneFn('entropy',
                      lambda state, part: entropy(as_density(state)))


def trace_monotone():
    return MonotoneFn(
        'trace', lambda state, part: np.real(np.trace(as_matrix(state))))


def rank_monotone(floor=1e-12):
    '''Matrix rank; discontinuous, so a negative control for continuity.'''
    return MonotoneFn(
        'rank', lambda state, part: np.linalg.matrix_rank(
            as_matrix(state), tol=floor, hermitian=True))


TrialRecord = namedtuple('TrialRecord', 'trial summary lhs rhs residual')


@attr.s(slots=True)
class AxiomReport(object):
    '''Per-trial records of one check.

    kind "eq" records |lhs - rhs|, "le" expects lhs <= rhs, "ge" expects
    lhs >= rhs, and "ratio" records an observed continuity ratio checked
    against tolerance.'''
    name = attr.ib()
    kind = attr.ib()
    records = attr.ib(factory=list)
    tolerance = attr.ib(default=1e-8)
    notes = attr.ib(factory=dict)

    def violation(self, record):
        if self.kind == 'eq':
            return abs(record.residual)
        if self.kind == 'ge':
            return -record.residual
        return record.residual

    @property
    def max_violation(self):
        return max((self.violation(r) for r in self.records), default=0.0)

    @property
    def passed(self):
        return bool(self.max_violation <= self.tolerance)

    @property
    def max_ratio(self):
        return max((r.residual for r in self.records), default=0.0)


def _party_containing(part, label):
    for n, party in enumerate(part.parties):
        if label in party:
            return n
    raise DimensionMismatch(f'no party of {part} holds {label}')


def _local_unitaries(state, part, seed):
    for n, party in enumerate(part.parties):
        u = random_unitary(state.layout.dims_of(party), derive_seed(seed, n))
        state = apply_local(state, party, u)
    return state


def check_lui(f, rho, part, trials=20, tol=1e-8, seed=0, concurrent=True):
    '''|f(U rho U^dag) - f(rho)| for random local unitaries per party.'''
    part.check(rho.layout)
    base = f(rho, part)

    def trial(n):
        rotated = _local_unitaries(rho, part, derive_seed(seed, n))
        value = f(rotated, part)
        return TrialRecord(n, 'local unitaries', value, base, value - base)

    records = map_in_threads(trial, range(trials), concurrent)
    return AxiomReport(f'lui[{f.name}]', 'eq', records, tol)


def flagged_state(ensemble, flag, flag_dim=None):
    '''sum_i p_i rho_i (x) |i><i|_flag.'''
    k = ensemble.size
    flag_dim = flag_dim or k
    if flag_dim < k:
        raise DimensionMismatch(f'{k} flags need a register of dimension at '
                                f'least {k}, got {flag_dim}')
    register = SystemLayout([(flag, flag_dim)])
    members = [tensor(member, basis_state(register, [i]).to_density())
               for i, member in enumerate(ensemble.members)]
    return mixture(ensemble.weights, members)


def check_flags(f, ensemble, part, flag_party, tol=1e-7, flag_dim=None):
    '''|f(sum_i p_i rho_i (x) |i><i|) - sum_i p_i f(rho_i)| with the flags
    held locally by the party owning flag_party.'''
    layout = ensemble.layout
    part.check(layout)
    n = _party_containing(part, flag_party)
    flag = fresh_label(layout, flag_party + '_flag')
    flagged = flagged_state(ensemble, flag, flag_dim)
    parties = list(part.parties)
    parties[n] = parties[n] + (flag, )
    lhs = f(flagged, Partition(parties, part.conditioner))
    rhs = sum(p * f(member, part)
              for p, member in zip(ensemble.weights, ensemble.members))
    record = TrialRecord(0, f'{ensemble.size} flags on {flag_party}', lhs,
                         rhs, lhs - rhs)
    return AxiomReport(f'flags[{f.name}]', 'eq', [record], tol)


def check_convexity(f, rho, sigma, part, p, tol=1e-8):
    '''f(p rho + (1 - p) sigma) <= p f(rho) + (1 - p) f(sigma).'''
    if rho.layout != sigma.layout:
        raise DimensionMismatch(f'layouts differ: {rho.layout} and '
                                f'{sigma.layout}')
    if not 0 <= p <= 1:
        raise ValueError(f'mixing weight {p} is not in [0, 1]')
    mixed = mixture([p, 1 - p], [as_density(rho), as_density(sigma)])
    lhs = f(mixed, part)
    rhs = p * f(rho, part) + (1 - p) * f(sigma, part)
    record = TrialRecord(0, f'p={p}', lhs, rhs, lhs - rhs)
    return AxiomReport(f'convexity[{f.name}]', 'le', [record], tol)


def check_continuity(f, rho, part, eps_list, trials=5, seed=0,
                     ratio_bound=math.inf):
    '''Largest |f(rho) - f(sigma)| / (eps log2 d) over sampled sigma with
    trace distance at most eps from rho.

    sigma moves from rho towards a random full-rank state.  The ratio is
    an observation; the check passes when it stays within ratio_bound.'''
    rho = as_density(rho)
    base = f(rho, part)
    log_dim = math.log2(rho.dim) if rho.dim > 1 else 1.0
    records = []
    for i, eps in enumerate(eps_list):
        if not 0 < eps < 2:
            raise ValueError(f'eps {eps} is not in (0, 2)')
        for n in range(trials):
            far = random_mixed(rho.layout, rho.dim, derive_seed(seed, i, n))
            gap = trace_distance(rho, far)
            t = min(1.0, eps / gap) if gap > 0 else 0.0
            sigma = mixture([1 - t, t], [rho, far])
            ratio = abs(f(sigma, part) - base) / (eps * log_dim)
            records.append(TrialRecord(len(records), f'eps={eps:g}',
                                       t * gap, eps, ratio))
    report = AxiomReport(f'continuity[{f.name}]', 'ratio', records,
                         ratio_bound)
    report.notes['max_ratio'] = report.max_ratio
    return report


def check_local_channels(f, rho, part, trials=20, seed=0, tol=1e-7,
                         kraus_count=2, concurrent=True):
    '''f(Lambda(rho)) <= f(rho) for random channels on party 1's first
    label.'''
    part.check(rho.layout)
    label = part.parties[0][0]
    dim = rho.layout.dim_of(label)
    base = f(rho, part)

    def trial(n):
        channel = random_channel(dim, dim, kraus_count, derive_seed(seed, n))
        value = f(apply_channel(rho, channel, label), part)
        return TrialRecord(n, f'channel on {label}', value, base,
                           value - base)

    records = map_in_threads(trial, range(trials), concurrent)
    return AxiomReport(f'local_channels[{f.name}]', 'le', records, tol)


def check_additivity(first, part1, second, part2, which='I', tol=1e-8):
    '''Conditional values on a product of extensions add.'''
    residual = additivity_residuals(first, part1, second, part2, which)
    record = TrialRecord(0, f'{part1} (x) {part2}', residual, 0.0, residual)
    return AxiomReport(f'additivity_{which}', 'eq', [record], tol)


def local_instrument(dim, seed, outcomes=2):
    '''Kraus operators of a random instrument on one register.'''
    v = random_isometry(dim, outcomes * dim, seed)
    return [v[k * dim:(k + 1) * dim] for k in range(outcomes)]


def check_roof_average(rho, part, cfg=None, seed=0, tol=2e-6, which='I'):
    '''sum_k q_k E(rho_k) <= E(rho) for the c-squashed bound E and a random
    two-outcome measurement on party 1's first label.'''
    label = part.parties[0][0]
    rho = as_density(rho)
    f = c_squashed_monotone(which, cfg)
    average = 0.0
    for op in local_instrument(rho.layout.dim_of(label), seed):
        outcome = apply_local(rho, [label], op)
        q = float(np.real(np.trace(outcome.matrix)))
        if q <= 1e-12:
            continue
        outcome = type(outcome)(outcome.layout, outcome.matrix / q)
        average += q * f(outcome, part)
    base = f(rho, part)
    record = TrialRecord(0, f'instrument on {label}', average, base,
                         average - base)
    return AxiomReport(f'roof_average[{f.name}]', 'le', [record], tol)

# Suites

SuiteOutcome = namedtuple('SuiteOutcome', 'name report expected')


def _labels(count):
    return [chr(ord('A') + n) for n in range(count)]


def _qubits(labels):
    return [(label, 2) for label in labels]


def identity_samples(count, seed):
    '''count (state, partition | E, X) samples each with 3 and 2 parties.'''
    samples = []
    for m in (3, 2):
        parties = _labels(m)
        layout = _qubits(parties + ['E', 'X'])
        for n in range(count):
            state = random_mixed(layout, 4, derive_seed(seed, 1, m, n))
            samples.append((state, Partition(parties, 'E'), 'X'))
    return samples


def chain_samples(count, seed):
    pairs = [(label, label + "'") for label in _labels(3)]
    layout = _qubits([label for pair in pairs for label in pair] + ['E'])
    return [(random_mixed(layout, 2, derive_seed(seed, 2, n)), pairs, ('E', ))
            for n in range(count)]


def bipartite_report(count, seed, tol):
    '''For two parties I and S_m coincide.'''
    records = []
    part = Partition(['A', 'B'])
    for n in range(count):
        state = random_mixed([('A', 2), ('B', 3)], 3,
                             derive_seed(seed, 3, n))
        lhs, rhs = multi_info_I(state, part), multi_info_S(state, part)
        records.append(IdentityRecord(n, 'bipartite_I_equals_S', lhs, rhs,
                                      lhs - rhs, 'eq'))
    return IdentityReport(records, tol)


def additivity_report(count, seed, tol):
    report = IdentityReport([], tol)
    part1 = Partition(['A', 'B', 'C'], 'E')
    part2 = Partition(['A2', 'B2', 'C2'], 'E2')
    for n in range(count):
        first = random_mixed(_qubits(part1.labels), 2,
                             derive_seed(seed, 4, n, 0))
        second = random_mixed(_qubits(part2.labels), 2,
                              derive_seed(seed, 4, n, 1))
        for which in ('I', 'S'):
            residual = additivity_residuals(first, part1, second, part2,
                                            which)
            report.records.append(IdentityRecord(
                n, f'additivity_{which}', residual, 0.0, residual, 'eq'))
    return report


def flag_ensemble(layout, seed):
    '''Two members differing by a unitary on A, so every marginal without
    A agrees across members.'''
    first = random_mixed(layout, 4, derive_seed(seed, 9, 0))
    u = random_unitary(first.layout.dim_of('A'), derive_seed(seed, 9, 1))
    second = apply_local(first, ['A'], u)
    return make_classical_extension([0.3, 0.7], [first, second])


def monotonicity_reports(count, seed, tol=1e-7, concurrent=True):
    '''Local channel, unitary and flag checks of both informations, and
    the negative controls.'''
    layout = _qubits('ABCE')
    part = Partition(['A', 'B', 'C'], 'E')
    outcomes = []
    for which in ('I', 'S'):
        f = info_monotone(which)
        channels = AxiomReport(f'local_channels[{f.name}]', 'le', [], tol)
        for n in range(count):
            state = random_mixed(layout, 4, derive_seed(seed, 5, n))
            channels.records.extend(check_local_channels(
                f, state, part, 1, derive_seed(seed, 6, n), tol,
                concurrent=False).records)
        state = random_mixed(layout, 4, derive_seed(seed, 7))
        lui = check_lui(f, state, part, 20, tol, derive_seed(seed, 8),
                        concurrent)
        flags = check_flags(f, flag_ensemble(layout, seed), part, 'A', tol)
        outcomes.extend(SuiteOutcome(report.name, report, True)
                        for report in (channels, lui, flags))

    bipartite = Partition(['A', 'B'])
    pure = random_mixed(_qubits('AB'), 1, derive_seed(seed, 10))
    other = random_mixed(_qubits('AB'), 1, derive_seed(seed, 11))
    convexity = check_convexity(entropy_monotone(), pure, other, bipartite,
                                0.5, tol)
    continuity = check_continuity(rank_monotone(), pure, bipartite,
                                  [1e-3, 1e-6], 2, derive_seed(seed, 12),
                                  16.0)
    outcomes.extend(SuiteOutcome(report.name, report, False)
                    for report in (convexity, continuity))
    return outcomes


def run_suites(count, seed, tol=1e-8, concurrent=True):
    '''SuiteOutcomes for every identity and axiom suite; a suite behaves
    when report.passed equals expected.'''
    logger = class_logger(__name__, 'Suites')
    outcomes = [
        SuiteOutcome('identities', identity_suite(
            identity_samples(count, seed), tol, concurrent), True),
        SuiteOutcome('chain', chain_suite(
            chain_samples(count, seed), tol, concurrent), True),
        SuiteOutcome('bipartite', bipartite_report(count, seed, tol), True),
        SuiteOutcome('additivity', additivity_report(count, seed, tol),
                     True),
    ]
    outcomes.extend(monotonicity_reports(count, seed, concurrent=concurrent))
    failures = [o.name for o in outcomes if o.report.passed != o.expected]
    logger.info(f'{len(outcomes)} suites on {count:,d} samples, '
                f'{len(failures)} unexpected outcomes')
    return outcomes
