# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Extensions of a state and conditional information evaluated at them.

A classical extension is an ensemble {p_i, rho_i} of the state, standing
for sum_i p_i rho_i (x) |i><i|_E.  A quantum extension is a state on the
original labels plus E whose marginal is the state; the channel form
applies a channel to the canonical purifying register of the state and
keeps its Stinespring environment as one more label.
'''

import math

import attr
import numpy as np
import pylru

from entrolab.lib.qstate import (
    DensityMatrix, DimensionMismatch, PureState, SystemLayout, as_matrix,
    channel_from_isometry, fresh_label, max_deviation, mixture,
    partial_trace, reduced_matrix, shannon_entropy, square_root_factor,
    stinespring, subsystem_entropy,
)
from entrolab.lib.sampling import BadParams
from entrolab.measures.entropic import EntropyTable, info_form


MISMATCH_TOL = 1e-7
RANK_FLOOR = 1e-10
WEIGHT_FLOOR = 1e-14
ISOMETRY_TOL = 1e-8
ENSEMBLE_CAP = 64


class ExtensionMismatch(Exception):
    '''Raised when an extension does not reduce to the state it extends.'''


@attr.s(slots=True, frozen=True, eq=False)
class ClassicalExtension(object):
    '''An ensemble decomposition {p_i, rho_i}.  Build with
    make_classical_extension or ensemble_from_povm.'''
    weights = attr.ib(converter=tuple)
    members = attr.ib(converter=tuple)

    def __repr__(self):
        return (f'ClassicalExtension({len(self.weights)} members on '
                f'{self.layout})')

    @property
    def layout(self):
        return self.members[0].layout

    @property
    def size(self):
        return len(self.weights)

    def mixture(self):
        return mixture(self.weights, self.members)

    def assemble(self, label='E'):
        '''The block-diagonal state sum_i p_i rho_i (x) |i><i|_label.'''
        k = self.size
        layout = self.layout.concat(SystemLayout([(label, k)]))
        matrix = 0
        for i, (p, member) in enumerate(zip(self.weights, self.members)):
            flag = np.zeros((k, k))
            flag[i, i] = 1
            matrix = matrix + p * np.kron(as_matrix(member), flag)
        return DensityMatrix(layout, matrix)

    def entropy_table(self, label='E'):
        return FlaggedEntropyTable(self, label)


class FlaggedEntropyTable(EntropyTable):
    '''Entropies of the assembled classical extension without building it.

    Subsets holding the flag use the joint entropy theorem,
    S(T E) = H(p) + sum_i p_i S_i(T).'''

    def __init__(self, extension, label, size=512):
        self.extension = extension
        self.label = label
        self.state = None
        self.layout = extension.layout.concat(
            SystemLayout([(label, extension.size)]))
        self.cache = pylru.lrucache(size)
        self.flag_entropy = shannon_entropy(extension.weights)
        self.mixed = extension.mixture()

    def compute(self, key):
        if self.label not in key:
            return subsystem_entropy(self.mixed, key)
        rest = key - {self.label}
        ext = self.extension
        return self.flag_entropy + sum(
            p * subsystem_entropy(member, rest)
            for p, member in zip(ext.weights, ext.members))


def make_classical_extension(weights, members, target=None):
    '''Validated ClassicalExtension, optionally checked against target.'''
    weights = np.asarray(weights, dtype=float)
    members = list(members)
    if len(weights) != len(members) or not members:
        raise BadParams('need one positive weight per member')
    if np.any(weights <= 0) or abs(weights.sum() - 1) > 1e-9:
        raise BadParams('weights must be positive and sum to 1')
    layout = members[0].layout
    if any(member.layout != layout for member in members):
        raise BadParams('ensemble members must share a layout')
    members = [m.to_density() if isinstance(m, PureState) else m
               for m in members]
    ext = ClassicalExtension(weights / weights.sum(), members)
    if target is not None:
        check_extends(ext, target)
    return ext


def purifier_factor(rho):
    '''W with W W^dag = rho; its columns index the canonical purifier.'''
    return square_root_factor(as_matrix(rho), RANK_FLOOR)


def ensemble_from_blocks(layout, w, blocks):
    weights, members = [], []
    for block in blocks:
        b = w @ block.T
        p = float(np.real(np.vdot(b, b)))
        if p <= WEIGHT_FLOOR:
            continue
        weights.append(p)
        members.append(DensityMatrix(layout, b @ b.conj().T / p))
    total = sum(weights)
    return ClassicalExtension([p / total for p in weights], members)


def ensemble_from_povm(rho, isometry, cap=ENSEMBLE_CAP):
    '''Ensemble of rho induced by a measurement on its canonical purifier.

    isometry stacks k blocks V_1 ... V_k of shape rank x rank, with
    sum_k V_k^dag V_k = 1.  Member k is proportional to
    W V_k^T V_k^* W^dag.'''
    w = purifier_factor(rho)
    rank = w.shape[1]
    v = np.asarray(isometry, dtype=complex)
    if v.ndim != 2 or v.shape[1] != rank or v.shape[0] % rank:
        raise BadParams(f'isometry shape {v.shape} does not stack '
                        f'{rank} x {rank} blocks')
    k = v.shape[0] // rank
    if k > cap:
        raise BadParams(f'{k} outcomes exceeds the cap {cap}')
    deviation = np.max(np.abs(v.conj().T @ v - np.eye(rank)))
    if deviation > ISOMETRY_TOL:
        raise BadParams(f'not an isometry (deviation {deviation:.3g})')
    return ensemble_from_blocks(rho.layout, w, v.reshape(k, rank, rank))


def trivial_ensemble(rho):
    return ClassicalExtension([1.0], [rho])


def spectral_ensemble(rho):
    '''Eigen-decomposition of rho as an ensemble of pure states.'''
    w = purifier_factor(rho)
    rank = w.shape[1]
    blocks = np.zeros((rank, rank, rank))
    for k in range(rank):
        blocks[k, k, k] = 1
    return ensemble_from_blocks(rho.layout, w, blocks)


def diagonal_ensemble(rho, tol=1e-12):
    '''Computational basis states of a diagonal rho, or None.'''
    m = as_matrix(rho)
    diag = np.real(np.diagonal(m))
    if np.max(np.abs(m - np.diag(diag))) > tol:
        return None
    weights, members = [], []
    for index in np.flatnonzero(diag > WEIGHT_FLOOR):
        projector = np.zeros_like(m)
        projector[index, index] = 1
        weights.append(diag[index])
        members.append(DensityMatrix(rho.layout, projector))
    total = sum(weights)
    return ClassicalExtension([p / total for p in weights], members)


@attr.s(slots=True, frozen=True, eq=False)
class QuantumExtension(object):
    '''A state on the target's labels plus label.

    In channel form state is the pure Stinespring dilation and also holds
    the environment label; channel is the map applied to the purifier.'''
    target = attr.ib()
    label = attr.ib()
    state = attr.ib()
    channel = attr.ib(default=None)
    environment = attr.ib(default=None)

    def __repr__(self):
        kind = 'channel' if self.channel is not None else 'explicit'
        return f'QuantumExtension({kind}, {self.state.layout})'

    @property
    def extension_dim(self):
        return self.state.layout.dim_of(self.label)

    @classmethod
    def explicit(cls, state, target, label='E'):
        if label not in state.layout.labels:
            raise ExtensionMismatch(f'extension has no label {label}')
        marginal = partial_trace(state, {label})
        if marginal.layout != target.layout:
            raise ExtensionMismatch(f'extension reduces to '
                                    f'{marginal.layout}, not '
                                    f'{target.layout}')
        deviation = max_deviation(marginal, target)
        if deviation > MISMATCH_TOL:
            raise ExtensionMismatch(f'marginal deviates by {deviation:.3g}')
        return cls(target, label, state)

    @classmethod
    def trivial(cls, target, label='E'):
        layout = target.layout.concat(SystemLayout([(label, 1)]))
        return cls(target, label, DensityMatrix(layout, as_matrix(target)))

    @classmethod
    def from_channel(cls, target, channel, label='E'):
        '''Apply channel to the canonical purifier of target.'''
        w = purifier_factor(target)
        if channel.input_dim != w.shape[1]:
            raise DimensionMismatch(f'channel input dimension '
                                    f'{channel.input_dim} does not match '
                                    f'the purifier dimension {w.shape[1]}')
        return cls.dilate(target, w, stinespring(channel),
                          channel.output_dim, label, channel)

    @classmethod
    def dilate(cls, target, w, isometry, output_dim, label='E',
               channel=None, check=True):
        '''Pure state (1 (x) V) psi for the purifier factor w.

        Searches that already checked w against target pass check=False.'''
        if label in target.layout.labels:
            raise ExtensionMismatch(f'label {label} already in '
                                    f'{target.layout}')
        rows = isometry.shape[0]
        env_dim = rows // output_dim
        with_label = target.layout.concat(SystemLayout([(label, output_dim)]))
        environment = fresh_label(with_label, label + '_env')
        layout = with_label.concat(SystemLayout([(environment, env_dim)]))
        omega = (w @ isometry.T).reshape(-1)
        norm = np.linalg.norm(omega)
        if check:
            deviation = max_deviation(target, DensityMatrix(target.layout,
                                                            w @ w.conj().T))
            if abs(norm - 1) > MISMATCH_TOL or deviation > MISMATCH_TOL:
                raise ExtensionMismatch('dilation does not reduce to the '
                                        'target')
        if channel is None:
            channel = _LazyChannel(isometry, output_dim)
        return cls(target, label, PureState(layout, omega / norm), channel,
                   environment)

    def kraus_channel(self):
        if isinstance(self.channel, _LazyChannel):
            return self.channel.build()
        return self.channel


@attr.s(slots=True, frozen=True, eq=False)
class _LazyChannel(object):
    '''An isometry whose Kraus form is built only on request.'''
    isometry = attr.ib()
    output_dim = attr.ib()

    def build(self):
        return channel_from_isometry(self.isometry, self.output_dim)


def measurement_isometry(ext, rho):
    '''Isometry on the purifier realizing a classical extension.

    Block k is sqrt(M_k) with M_k^T = W^+ p_k rho_k W^+dag.  The output
    register holds k and the environment keeps a copy of k, so tracing the
    environment leaves E classical.'''
    w = purifier_factor(rho)
    rank = w.shape[1]
    w_plus = np.linalg.pinv(w)
    k = ext.size
    blocks = np.zeros((k, k, rank, rank), dtype=complex)
    for n, (p, member) in enumerate(zip(ext.weights, ext.members)):
        element = (w_plus @ (p * as_matrix(member)) @ w_plus.conj().T).T
        element = (element + element.conj().T) / 2
        evals, evecs = np.linalg.eigh(element)
        root = (evecs * np.sqrt(np.clip(evals, 0, None))) @ evecs.conj().T
        blocks[n, n] = root
    return w, blocks.reshape(k * k * rank, rank), k


def extension_to_channel(ext, rho, label='E'):
    '''The channel-form QuantumExtension equivalent to ext.'''
    w, isometry, k = measurement_isometry(ext, rho)
    return QuantumExtension.dilate(rho, w, isometry, k, label)


def _marginal_deviation(state, rho):
    labels = rho.layout.labels
    if any(label not in state.layout.labels for label in labels):
        raise ExtensionMismatch(f'extension {state.layout} lacks labels of '
                                f'{rho.layout}')
    if tuple(state.layout.dim_of(label) for label in labels) != \
            rho.layout.dims:
        raise ExtensionMismatch(f'extension {state.layout} does not match '
                                f'the dimensions of {rho.layout}')
    marginal = reduced_matrix(state, labels)
    return float(np.max(np.abs(marginal - as_matrix(rho))))


def check_extends(ext, rho):
    '''Raise ExtensionMismatch unless ext is an extension of rho.'''
    if isinstance(ext, ClassicalExtension):
        if ext.layout != rho.layout:
            raise ExtensionMismatch(f'ensemble layout {ext.layout} is not '
                                    f'{rho.layout}')
        deviation = max_deviation(ext.mixture(), rho)
    elif isinstance(ext, QuantumExtension):
        if ext.target.layout != rho.layout:
            raise ExtensionMismatch(f'extension targets '
                                    f'{ext.target.layout}, not '
                                    f'{rho.layout}')
        deviation = max(max_deviation(ext.target, rho),
                        _marginal_deviation(ext.state, rho))
    else:
        raise TypeError(f'not an extension: {ext!r}')
    if deviation > MISMATCH_TOL:
        raise ExtensionMismatch(f'extension deviates by {deviation:.3g}')


def extension_table(ext, rho_layout):
    '''(EntropyTable, label of E) for an extension.'''
    if isinstance(ext, ClassicalExtension):
        label = fresh_label(rho_layout, 'E')
        return ext.entropy_table(label), label
    return EntropyTable(ext.state), ext.label


def value_at(table, label, part, which):
    '''Conditional information of part given label (and the conditioner).'''
    given = tuple(part.conditioner) + (label, )
    return info_form(part.parties, which).condition(given).evaluate(table)


def cmi_at_extension(rho, part, ext, which):
    '''Conditional I or S_m of rho's parties given the extension's E.'''
    part.check(rho.layout)
    check_extends(ext, rho)
    table, label = extension_table(ext, rho.layout)
    value = value_at(table, label, part, which)
    if not math.isfinite(value):
        raise ExtensionMismatch('non-finite value at extension')
    return value
