# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Seeded random states, unitaries and channels.'''

import numpy as np

from entrolab.lib.qstate import (
    PureState, as_layout, channel_from_isometry, fresh_label, make_density,
    partial_trace, SystemLayout,
)
from entrolab.lib.util import make_rng


class BadParams(Exception):
    '''Raised when parameters are inconsistent with what they describe.'''


def _gaussian(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def haar_unitary(rng, dim):
    '''QR of a complex Gaussian matrix with the phases of R divided out.'''
    q, r = np.linalg.qr(_gaussian(rng, (dim, dim)))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def _pure(rng, layout):
    v = _gaussian(rng, layout.total_dim)
    return PureState(layout, v / np.linalg.norm(v))


def random_pure(layout, seed):
    return _pure(make_rng(seed), as_layout(layout))


def random_mixed(layout, rank, seed):
    '''Marginal of a random pure state on layout plus a rank-dim ancilla.'''
    layout = as_layout(layout)
    if rank < 1:
        raise BadParams(f'rank must be positive, got {rank}')
    ancilla = fresh_label(layout, 'R')
    big = layout.concat(SystemLayout([(ancilla, rank)]))
    reduced = partial_trace(_pure(make_rng(seed), big), {ancilla})
    return make_density(layout, reduced.matrix)


def random_unitary(dim, seed):
    if dim < 1:
        raise BadParams(f'dimension must be positive, got {dim}')
    return haar_unitary(make_rng(seed), dim)


def random_isometry(input_dim, rows, seed):
    if rows < input_dim:
        raise BadParams(f'no isometry from dimension {input_dim} into '
                        f'{rows}')
    return haar_unitary(make_rng(seed), rows)[:, :input_dim]


def random_channel(input_dim, output_dim, kraus_count, seed):
    '''Channel from a random Stinespring isometry.'''
    if min(input_dim, output_dim, kraus_count) < 1:
        raise BadParams('channel dimensions and Kraus count must be '
                        'positive')
    v = random_isometry(input_dim, output_dim * kraus_count, seed)
    return channel_from_isometry(v, output_dim)


_KINDS = {
    'pure': (random_pure, ('layout', )),
    'mixed': (random_mixed, ('layout', 'rank')),
    'mixed_rank_r': (random_mixed, ('layout', 'rank')),
    'unitary': (random_unitary, ('dim', )),
    'channel': (random_channel, ('input_dim', 'output_dim', 'kraus_count')),
}


def sample(kind, params, seed):
    '''Draw an object of the given kind deterministically from seed.

    kind is one of pure, mixed (alias mixed_rank_r), unitary or channel;
    params is a mapping holding the arguments named in _KINDS.'''
    try:
        func, names = _KINDS[kind]
    except KeyError:
        raise BadParams(f'unknown sample kind {kind}') from None
    missing = [name for name in names if name not in params]
    if missing:
        raise BadParams(f'{kind} sample needs {", ".join(missing)}')
    return func(*(params[name] for name in names), seed)
