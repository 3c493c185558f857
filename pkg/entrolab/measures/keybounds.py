# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Distillable key: a one-way rate and bounds from private dit states.'''

import math
from collections import namedtuple

from entrolab.lib.qstate import fresh_label, purify
from entrolab.lib.sampling import random_channel
from entrolab.lib.util import derive_seed
from entrolab.measures.entropic import (
    BadPartition, EntropyTable, mutual_form,
)
from entrolab.measures.extensions import (
    QuantumExtension, cmi_at_extension, purifier_factor,
)
from entrolab.measures.harness import TrialRecord, AxiomReport
from entrolab.measures.states import (
    PURIFIER, flower, flower_locked_ensemble, flower_locked_state,
    flower_measured_extension, paired_partition, pdit,
)


def dw_rate(rho, part, key_labels):
    '''min over i != 1 of I(A_1 : A_i) - I(A_1 : E), E purifying rho.

    key_labels names one key register per party.  The value may be
    negative, in which case it certifies nothing.'''
    key_labels = tuple(key_labels)
    if len(key_labels) != part.m:
        raise BadPartition(f'need one key label per party, got '
                           f'{len(key_labels)} for {part.m} parties')
    for label, party in zip(key_labels, part.parties):
        if label not in party:
            raise BadPartition(f'key label {label} is not in party '
                               f'{",".join(party)}')
    part.check(rho.layout)
    eve = fresh_label(rho.layout, 'E')
    table = EntropyTable(purify(rho, eve))
    first, rest = key_labels[0], key_labels[1:]
    shared = min(mutual_form([first], [other]).evaluate(table)
                 for other in rest)
    return shared - mutual_form([first], [eve]).evaluate(table)


def sample_channel_extensions(gamma, count, ext_dim, seed, kraus_count=None):
    '''Extensions from random channels on the purifier of gamma.'''
    rank = purifier_factor(gamma).shape[1]
    kraus_count = kraus_count or rank
    return [QuantumExtension.from_channel(
                gamma, random_channel(rank, ext_dim, kraus_count,
                                      derive_seed(seed, n)))
            for n in range(count)]


def pdit_normalization_check(spec, extensions, tol=1e-7):
    '''The conditional I at every extension of the private dit is at least
    m log2 d.

    notes hold the smallest value and the key bound it implies, that
    value divided by m.'''
    gamma = pdit(spec)
    part = paired_partition(spec.m)
    floor = spec.m * math.log2(spec.d)
    records = []
    for n, ext in enumerate(extensions):
        value = cmi_at_extension(gamma, part, ext, 'I')
        records.append(TrialRecord(n, f'{ext!r}', value, floor,
                                   value - floor))
    report = AxiomReport('pdit_normalization', 'ge', records, tol)
    if records:
        smallest = min(r.lhs for r in records)
        report.notes.update(min_value=smallest,
                            key_upper_bound=smallest / spec.m)
    report.notes['floor'] = floor
    return report


LockabilityRecord = namedtuple(
    'LockabilityRecord',
    'm d full_value_I full_value_S measured_value_I trivial_value_I '
    'locked_value')


def lockability_demo(m, d):
    '''Flower state values at its known extensions and after the first
    party loses one qubit.

    full_value_I is taken at the purifying extension, full_value_S and
    trivial_value_I at the trivial one, measured_value_I at the extension
    measuring the purifier, and locked_value at the product extension of
    the locked state.'''
    f = flower(m, d)
    part = f.partition()
    purifying = QuantumExtension.explicit(f.purification, f.reduced,
                                          PURIFIER)
    trivial = QuantumExtension.trivial(f.reduced)
    locked = flower_locked_state(f)
    return LockabilityRecord(
        m, d,
        cmi_at_extension(f.reduced, part, purifying, 'I'),
        cmi_at_extension(f.reduced, part, trivial, 'S'),
        cmi_at_extension(f.reduced, part, flower_measured_extension(f), 'I'),
        cmi_at_extension(f.reduced, part, trivial, 'I'),
        cmi_at_extension(locked, f.locked_partition(),
                         flower_locked_ensemble(f, locked), 'I'))
