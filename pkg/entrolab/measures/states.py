# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Catalog of named states: GHZ, flower, private dit and ideal key.

Parties are labelled A, B, C, ...; a party's second register carries a
prime (A'), and the flower state's purifying register is X.
'''

import math
import string

import attr
import numpy as np

from entrolab.lib.qstate import (
    DimensionMismatch, PureState, SystemLayout, StateError,
    basis_state, check_size, make_density, make_pure, partial_trace,
)
from entrolab.lib.sampling import BadParams, random_mixed, random_unitary
from entrolab.lib.util import derive_seed, subclasses
from entrolab.measures.entropic import Partition
from entrolab.measures.extensions import make_classical_extension


PURIFIER = 'X'
UNITARY_TOL = 1e-9


def party_labels(m):
    if not 1 <= m <= len(string.ascii_uppercase) - 2:
        raise BadParams(f'unsupported party count {m}')
    # X and E are reserved for purifiers and eavesdroppers
    letters = [c for c in string.ascii_uppercase if c not in 'EX']
    return letters[:m]


def primed(label):
    return label + "'"


def fourier(d):
    '''Unitary Fourier matrix F[j, k] = exp(2 pi i jk / d) / sqrt(d).'''
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing='ij')
    return np.exp(2j * np.pi * j * k / d) / math.sqrt(d)


def _check_md(m, d):
    if m < 2 or d < 2:
        raise BadParams(f'need m >= 2 and d >= 2, got m={m}, d={d}')


def _diagonal_stride(m, d):
    # index of |i...i> is i * stride
    return sum(d ** k for k in range(m))


def ghz(m, d):
    '''(1/sqrt d) sum_i |i...i> on m parties.'''
    _check_md(m, d)
    check_size(d ** m)
    stride = _diagonal_stride(m, d)
    v = np.zeros(d ** m, dtype=complex)
    v[np.arange(d) * stride] = 1 / math.sqrt(d)
    return make_pure([(label, d) for label in party_labels(m)], v)


def ideal_key_state(m, d):
    '''sum_i (1/d) |i...i><i...i|, the embedded ideal key.'''
    _check_md(m, d)
    check_size(d ** m)
    stride = _diagonal_stride(m, d)
    diag = np.zeros(d ** m)
    diag[np.arange(d) * stride] = 1 / d
    return make_density([(label, d) for label in party_labels(m)],
                        np.diag(diag))


def paired_partition(m):
    '''Parties (A, A') : (B, B') : ...'''
    return Partition([(label, primed(label)) for label in party_labels(m)])


def plain_partition(m):
    return Partition(party_labels(m))


@attr.s(slots=True, frozen=True, eq=False)
class FlowerBundle(object):
    '''The flower state on A, A', B, B', ... with its purification on X.'''
    reduced = attr.ib()
    purification = attr.ib()
    m = attr.ib()
    d = attr.ib()

    @property
    def parties(self):
        return party_labels(self.m)

    def partition(self, conditioner=()):
        return paired_partition(self.m).with_conditioner(conditioner)

    def locked_partition(self):
        '''The first party keeps only A after A' is lost.'''
        first, *rest = self.parties
        return Partition([(first, )] + [(p, primed(p)) for p in rest])


def flower(m, d):
    '''Purification (2d)^(-1/2) sum_{i,j} (x)_k |i>|j> (x) U_j |i>_X with
    U_0 the identity and U_1 the Fourier matrix.'''
    _check_md(m, d)
    check_size((2 * d) ** m * d)
    twists = [np.eye(d), fourier(d)]
    phi = np.zeros((d, 2) * m + (d, ), dtype=complex)
    for i in range(d):
        for j in range(2):
            phi[(i, j) * m] = twists[j][:, i] / math.sqrt(2 * d)
    layout = []
    for label in party_labels(m):
        layout.extend([(label, d), (primed(label), 2)])
    layout.append((PURIFIER, d))
    purification = make_pure(layout, phi.reshape(-1))
    reduced = partial_trace(purification, {PURIFIER})
    reduced = make_density(reduced.layout, reduced.matrix)
    return FlowerBundle(reduced, purification, m, d)


def flower_measured_extension(f):
    '''Ensemble from measuring X in the computational basis.'''
    phi = f.purification.vector.reshape(-1, f.d)
    weights, members = [], []
    for k in range(f.d):
        amp = phi[:, k]
        p = float(np.real(np.vdot(amp, amp)))
        weights.append(p)
        members.append(PureState(f.reduced.layout, amp / math.sqrt(p)))
    return make_classical_extension(weights, members, target=f.reduced)


def flower_locked_state(f):
    '''The flower state after the first party loses its A' qubit.'''
    first = f.parties[0]
    locked = partial_trace(f.reduced, {primed(first)})
    return make_density(locked.layout, locked.matrix)


def flower_locked_ensemble(f, locked=None):
    '''The (i, j) ensemble of computational product states, weight 1/2d.'''
    if locked is None:
        locked = flower_locked_state(f)
    weights, members = [], []
    for i in range(f.d):
        for j in range(2):
            digits = [i] + [i, j] * (f.m - 1)
            members.append(basis_state(locked.layout, digits))
            weights.append(1 / (2 * f.d))
    return make_classical_extension(weights, members, target=locked)


@attr.s(slots=True, frozen=True, eq=False)
class PditSpec(object):
    '''Shield state on A', B', ... and the d twisting unitaries.'''
    m = attr.ib()
    d = attr.ib()
    shield = attr.ib()
    twists = attr.ib(converter=tuple)


def trivial_shield(m):
    layout = [(primed(label), 1) for label in party_labels(m)]
    return make_density(layout, np.ones((1, 1)))


def identity_twists(d, shield):
    return [np.eye(shield.dim, dtype=complex) for _ in range(d)]


def random_pdit_spec(m, d, seed, shield_dim=2, rank=2, twisted=True):
    '''Random shield of the given rank and Haar random twists.'''
    layout = [(primed(label), shield_dim) for label in party_labels(m)]
    shield = random_mixed(layout, rank, derive_seed(seed, 0))
    if twisted:
        twists = [random_unitary(shield.dim, derive_seed(seed, 1 + i))
                  for i in range(d)]
    else:
        twists = identity_twists(d, shield)
    return PditSpec(m, d, shield, twists)


def pdit(spec):
    '''sum_{i,j} (1/d) |i...i><j...j| (x) U_i rho U_j^dag.

    Key labels come first, then the shield labels.'''
    m, d, shield = spec.m, spec.d, spec.shield
    _check_md(m, d)
    ds = shield.dim
    check_size(d ** m * ds)
    if len(spec.twists) != d:
        raise DimensionMismatch(f'need {d} twists, got {len(spec.twists)}')
    twists = [np.asarray(u, dtype=complex) for u in spec.twists]
    for u in twists:
        if u.shape != (ds, ds):
            raise DimensionMismatch(f'twist shape {u.shape} does not act on '
                                    f'a shield of dimension {ds}')
        if np.max(np.abs(u.conj().T @ u - np.eye(ds))) > UNITARY_TOL:
            raise StateError('twists must be unitary')
    keys = SystemLayout([(label, d) for label in party_labels(m)])
    layout = keys.concat(shield.layout)
    stride = _diagonal_stride(m, d)
    matrix = np.zeros((d ** m * ds, d ** m * ds), dtype=complex)
    for i in range(d):
        a = i * stride * ds
        for j in range(d):
            b = j * stride * ds
            block = twists[i] @ shield.matrix @ twists[j].conj().T / d
            matrix[a:a + ds, b:b + ds] = block
    return make_density(layout, matrix)


# Named states, as in "ghz:m=3,d=2"

class NamedState(object):
    '''A catalog entry reachable by name from the command line.'''

    NAME = None
    DEFAULTS = {}

    @classmethod
    def lookup(cls, name):
        for named in subclasses(NamedState):
            if named.NAME == name:
                return named
        known = ', '.join(sorted(n.NAME for n in subclasses(NamedState)))
        raise BadParams(f'unknown state "{name}"; known states: {known}')

    @classmethod
    def params(cls, given):
        params = dict(cls.DEFAULTS)
        params.update(given)
        missing = [key for key in ('m', 'd') if key not in params]
        if missing:
            raise BadParams(f'{cls.NAME} needs {", ".join(missing)}')
        return params

    @classmethod
    def partition(cls, m):
        return plain_partition(m)


class GhzState(NamedState):
    NAME = 'ghz'

    @classmethod
    def build(cls, m, d):
        return ghz(m, d).to_density()


class FlowerState(NamedState):
    NAME = 'flower'

    @classmethod
    def build(cls, m, d):
        return flower(m, d).reduced

    @classmethod
    def partition(cls, m):
        return paired_partition(m)


class PditState(NamedState):
    NAME = 'pdit'
    DEFAULTS = {'seed': 0, 'shield': 2, 'rank': 2}

    @classmethod
    def build(cls, m, d, seed, shield, rank):
        return pdit(random_pdit_spec(m, d, seed, shield, rank))

    @classmethod
    def partition(cls, m):
        return paired_partition(m)


class KeyState(NamedState):
    NAME = 'key'

    @classmethod
    def build(cls, m, d):
        return ideal_key_state(m, d)


def parse_named_state(text):
    '''Split "name:key=value,..." into the name and integer parameters.'''
    name, _, rest = text.partition(':')
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(','))):
        key, eq, value = item.partition('=')
        if not eq:
            raise BadParams(f'bad parameter "{item}" in "{text}"')
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise BadParams(f'parameter {key} in "{text}" is not an '
                            f'integer') from None
    return name.strip(), params


def resolve_named_state(text):
    '''(DensityMatrix, default Partition) for a named state.'''
    name, given = parse_named_state(text)
    named = NamedState.lookup(name)
    params = named.params(given)
    try:
        state = named.build(**params)
    except TypeError:
        raise BadParams(f'unexpected parameters for {name}: '
                        f'{sorted(given)}') from None
    return state, named.partition(params['m'])
