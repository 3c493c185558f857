# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Multipartite quantum states and the linear algebra on them.

States carry an ordered layout of labelled tensor factors.  Every value
is immutable once built; constructors validate, operations trust their
inputs and build results directly.  Information is measured in bits.
'''

import math
from collections import namedtuple

import attr
import numpy as np


EIGEN_FLOOR = 1e-12
VALIDATION_TOL = 1e-9
SYMMETRY_TOL = 1e-7
TRACE_TOL = 1e-7
NORM_TOL = 1e-9
SUPPORT_TOL = 1e-10
MAX_DIM = 1 << 14


class StateError(Exception):
    '''Base class of errors building or manipulating states.'''


class DimensionMismatch(StateError):
    '''Raised when array shapes disagree with a layout or with each other.'''


class NotHermitian(StateError):
    '''Raised when a density matrix is not Hermitian.'''


class NotPositive(StateError):
    '''Raised when a density matrix has a negative eigenvalue.'''


class TraceNotOne(StateError):
    '''Raised when a density matrix does not have unit trace.'''


class NotNormalized(StateError):
    '''Raised when a state vector does not have unit norm.'''


class NotTracePreserving(StateError):
    '''Raised when Kraus operators are not complete.'''


class LabelClash(StateError):
    '''Raised when a subsystem label would appear twice in a layout.'''


class UnknownLabel(StateError):
    '''Raised when a subsystem label is not in a layout.'''


class EmptyRemainder(StateError):
    '''Raised when a partial trace would discard every subsystem.'''


class TooLarge(StateError):
    '''Raised when a construction exceeds the dimension cap.'''


def check_size(dim, cap=MAX_DIM):
    if dim > cap:
        raise TooLarge(f'total dimension {dim:,d} exceeds the cap {cap:,d}')


class SystemLayout(namedtuple('SystemLayout', 'subsystems')):
    '''Ordered (label, dim) pairs naming the tensor factors of a state.'''

    def __new__(cls, subsystems):
        pairs = tuple((str(label), int(dim)) for label, dim in subsystems)
        if not pairs:
            raise StateError('a layout needs at least one subsystem')
        labels = [label for label, _ in pairs]
        if not all(labels):
            raise StateError('subsystem labels must be nonempty')
        if len(set(labels)) != len(labels):
            raise LabelClash(f'duplicate labels in {labels}')
        for label, dim in pairs:
            if dim < 1:
                raise StateError(f'subsystem {label} has dimension {dim}')
        return super().__new__(cls, pairs)

    def __str__(self):
        return ' '.join(f'{label}({dim})' for label, dim in self.subsystems)

    @property
    def labels(self):
        return tuple(label for label, _ in self.subsystems)

    @property
    def dims(self):
        return tuple(dim for _, dim in self.subsystems)

    @property
    def total_dim(self):
        return math.prod(self.dims)

    def index(self, label):
        for n, (name, _) in enumerate(self.subsystems):
            if name == label:
                return n
        raise UnknownLabel(f'label {label} not in layout {self}')

    def dim_of(self, label):
        return self.subsystems[self.index(label)][1]

    def dims_of(self, labels):
        '''Total dimension of a collection of labels.'''
        return math.prod(self.dim_of(label) for label in labels)

    def positions(self, labels):
        '''Layout positions of labels, in layout order.'''
        return sorted(self.index(label) for label in labels)

    def check_labels(self, labels):
        for label in labels:
            self.index(label)

    def keep(self, labels):
        '''The sub-layout on labels, in layout order.'''
        return SystemLayout(self.subsystems[n]
                            for n in self.positions(labels))

    def concat(self, other):
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise LabelClash(f'labels {sorted(clash)} in both layouts')
        return SystemLayout(self.subsystems + other.subsystems)

    def replace(self, label, new_label, new_dim):
        n = self.index(label)
        if new_label != label and new_label in self.labels:
            raise LabelClash(f'label {new_label} already in layout {self}')
        pairs = list(self.subsystems)
        pairs[n] = (new_label, new_dim)
        return SystemLayout(pairs)


def as_layout(layout):
    if isinstance(layout, SystemLayout):
        return layout
    return SystemLayout(layout)


def fresh_label(layout, base):
    '''Return base, or base with a numeric suffix, not used in layout.'''
    labels = set(layout.labels)
    if base not in labels:
        return base
    n = 1
    while f'{base}{n}' in labels:
        n += 1
    return f'{base}{n}'


def _frozen(array):
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@attr.s(slots=True, frozen=True, eq=False, repr=False)
class DensityMatrix(object):
    '''A validated mixed state.  Build with make_density.'''
    layout = attr.ib()
    matrix = attr.ib(converter=_frozen)

    def __repr__(self):
        return f'DensityMatrix({self.layout})'

    @property
    def dim(self):
        return self.layout.total_dim

    @property
    def labels(self):
        return self.layout.labels


@attr.s(slots=True, frozen=True, eq=False, repr=False)
class PureState(object):
    '''A normalized state vector.  Build with make_pure.'''
    layout = attr.ib()
    vector = attr.ib(converter=_frozen)

    def __repr__(self):
        return f'PureState({self.layout})'

    @property
    def dim(self):
        return self.layout.total_dim

    @property
    def labels(self):
        return self.layout.labels

    def to_density(self):
        return DensityMatrix(self.layout,
                             np.outer(self.vector, self.vector.conj()))


@attr.s(slots=True, frozen=True, eq=False)
class KrausChannel(object):
    '''A completely positive trace-preserving map in Kraus form.'''
    input_dim = attr.ib()
    output_dim = attr.ib()
    kraus = attr.ib(converter=tuple)

    def stacked(self):
        '''Kraus operators as an array of shape (count, out, in).'''
        return np.array(self.kraus, dtype=complex)


def make_density(layout, matrix):
    '''Return a validated DensityMatrix.

    The matrix is symmetrized; eigenvalues in [-1e-9, 0) are clamped to
    zero and the spectrum renormalized to unit trace.'''
    layout = as_layout(layout)
    m = np.asarray(matrix, dtype=complex)
    n = layout.total_dim
    if m.shape != (n, n):
        raise DimensionMismatch(f'matrix shape {m.shape} does not match '
                                f'layout {layout} of dimension {n}')
    if not np.all(np.isfinite(m)):
        raise StateError('matrix has non-finite entries')
    asymmetry = np.max(np.abs(m - m.conj().T))
    if asymmetry > SYMMETRY_TOL:
        raise NotHermitian(f'matrix asymmetry {asymmetry:.3g}')
    m = (m + m.conj().T) / 2
    trace = np.trace(m).real
    if abs(trace - 1) > TRACE_TOL:
        raise TraceNotOne(f'trace is {trace:.12g}')
    evals, evecs = np.linalg.eigh(m)
    if evals[0] < -VALIDATION_TOL:
        raise NotPositive(f'eigenvalue {evals[0]:.3g}')
    if evals[0] < 0:
        evals = np.clip(evals, 0, None)
        evals /= evals.sum()
        m = (evecs * evals) @ evecs.conj().T
    else:
        m = m / trace
    return DensityMatrix(layout, m)


def make_pure(layout, vector):
    '''Return a validated PureState.'''
    layout = as_layout(layout)
    v = np.asarray(vector, dtype=complex).reshape(-1)
    if v.shape[0] != layout.total_dim:
        raise DimensionMismatch(f'vector length {v.shape[0]} does not match '
                                f'layout {layout}')
    norm = np.linalg.norm(v)
    if abs(norm - 1) > NORM_TOL:
        raise NotNormalized(f'vector norm is {norm:.12g}')
    return PureState(layout, v / norm)


def basis_state(layout, indices):
    '''The computational basis PureState with the given digit per label.'''
    layout = as_layout(layout)
    v = np.zeros(layout.dims, dtype=complex)
    v[tuple(indices)] = 1
    return PureState(layout, v.reshape(-1))


def make_channel(kraus):
    '''Return a validated KrausChannel from a sequence of Kraus matrices.'''
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    if not ops:
        raise StateError('a channel needs at least one Kraus operator')
    shape = ops[0].shape
    if len(shape) != 2 or any(op.shape != shape for op in ops):
        raise DimensionMismatch('Kraus operators must share a 2-d shape')
    completeness = sum(op.conj().T @ op for op in ops)
    deviation = np.max(np.abs(completeness - np.eye(shape[1])))
    if deviation > VALIDATION_TOL:
        raise NotTracePreserving(f'completeness deviation {deviation:.3g}')
    return KrausChannel(shape[1], shape[0], ops)


def identity_channel(dim):
    return KrausChannel(dim, dim, [np.eye(dim, dtype=complex)])


def depolarizing_channel(dim):
    '''The completely depolarizing channel, output identity/dim.'''
    ops = []
    for i in range(dim):
        for j in range(dim):
            op = np.zeros((dim, dim), dtype=complex)
            op[i, j] = 1 / math.sqrt(dim)
            ops.append(op)
    return KrausChannel(dim, dim, ops)


def dephasing_channel(dim):
    '''Complete dephasing in the computational basis.'''
    ops = []
    for i in range(dim):
        op = np.zeros((dim, dim), dtype=complex)
        op[i, i] = 1
        ops.append(op)
    return KrausChannel(dim, dim, ops)


def channel_from_isometry(isometry, output_dim):
    '''Kraus form of the Stinespring isometry V: in -> out (x) env.

    Rows of V are indexed by (output, environment) with the environment
    index running fastest.'''
    v = np.asarray(isometry, dtype=complex)
    rows, input_dim = v.shape
    if rows % output_dim:
        raise DimensionMismatch(f'isometry with {rows} rows has no '
                                f'output factor of dimension {output_dim}')
    env_dim = rows // output_dim
    blocks = v.reshape(output_dim, env_dim, input_dim)
    return KrausChannel(input_dim, output_dim,
                        [blocks[:, k, :] for k in range(env_dim)])


def stinespring(channel):
    '''The isometry of a channel, inverse of channel_from_isometry.'''
    return np.stack(channel.kraus, axis=1).reshape(-1, channel.input_dim)


def _moved(dims, positions):
    '''Axis permutation bringing positions to the front, and the rest.'''
    rest = [n for n in range(len(dims)) if n not in positions]
    return list(positions), rest


def _reduced(state, positions):
    '''Marginal matrix on the given layout positions, in that order.'''
    dims = state.layout.dims
    n = len(dims)
    keep, rest = _moved(dims, positions)
    dk = math.prod(dims[i] for i in keep)
    dr = math.prod(dims[i] for i in rest)
    if isinstance(state, PureState):
        psi = state.vector.reshape(dims).transpose(keep + rest)
        psi = psi.reshape(dk, dr)
        return psi @ psi.conj().T
    perm = keep + rest + [n + i for i in keep] + [n + i for i in rest]
    t = state.matrix.reshape(dims + dims).transpose(perm)
    return np.einsum('ijkj->ik', t.reshape(dk, dr, dk, dr))


def reduced_matrix(state, labels):
    '''Marginal of a DensityMatrix or PureState on labels, in the order
    given.'''
    positions = [state.layout.index(label) for label in labels]
    return _reduced(state, positions)


def partial_trace(state, discard):
    '''Trace out the labels in discard; remaining order is preserved.'''
    layout = state.layout
    discard = {discard} if isinstance(discard, str) else set(discard)
    layout.check_labels(discard)
    keep = [label for label in layout.labels if label not in discard]
    if not keep:
        raise EmptyRemainder(f'cannot discard every label of {layout}')
    return DensityMatrix(layout.keep(keep),
                         _reduced(state, layout.positions(keep)))


def tensor(a, b):
    '''Tensor product; pure with pure stays pure.'''
    layout = a.layout.concat(b.layout)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(layout, np.kron(a.vector, b.vector))
    return DensityMatrix(layout, np.kron(as_matrix(a), as_matrix(b)))


def as_matrix(state):
    if isinstance(state, PureState):
        return np.outer(state.vector, state.vector.conj())
    return state.matrix


def as_density(state):
    if isinstance(state, PureState):
        return state.to_density()
    return state


def spectrum_entropy(evals):
    '''-sum p log2 p over eigenvalues or probabilities above the floor.'''
    p = np.asarray(evals, dtype=float).reshape(-1)
    p = p[p > EIGEN_FLOOR]
    return float(-np.sum(p * np.log2(p)))


def shannon_entropy(probs):
    return spectrum_entropy(probs)


def matrix_entropy(matrix):
    return spectrum_entropy(np.linalg.eigvalsh(matrix))


def entropy(state):
    '''Von Neumann entropy in bits.'''
    if isinstance(state, PureState):
        return 0.0
    return matrix_entropy(state.matrix)


def subsystem_entropy(state, labels):
    '''Entropy of the marginal of state on labels.

    For a pure state the smaller side of the cut is diagonalized.'''
    layout = state.layout
    labels = set(labels)
    if not labels:
        return 0.0
    layout.check_labels(labels)
    if isinstance(state, PureState):
        rest = [label for label in layout.labels if label not in labels]
        if not rest:
            return 0.0
        if layout.dims_of(rest) < layout.dims_of(labels):
            labels = rest
    return matrix_entropy(_reduced(state, layout.positions(labels)))


def _check_same_layout(rho, sigma):
    if rho.layout != sigma.layout:
        raise DimensionMismatch(f'layouts differ: {rho.layout} and '
                                f'{sigma.layout}')


def relative_entropy(rho, sigma):
    '''tr rho (log2 rho - log2 sigma), infinite off the support of sigma.'''
    _check_same_layout(rho, sigma)
    r, s = as_matrix(rho), as_matrix(sigma)
    mu, vecs = np.linalg.eigh(s)
    support = mu > EIGEN_FLOOR
    kernel = vecs[:, ~support]
    if kernel.size:
        leak = np.real(np.trace(kernel.conj().T @ r @ kernel))
        if leak > SUPPORT_TOL:
            return math.inf
    weights = np.real(np.sum(vecs.conj() * (r @ vecs), axis=0))
    cross = float(np.sum(weights[support] * np.log2(mu[support])))
    return -matrix_entropy(r) - cross


def trace_distance(rho, sigma):
    '''Unnormalized trace norm of rho - sigma, between 0 and 2.'''
    _check_same_layout(rho, sigma)
    diff = as_matrix(rho) - as_matrix(sigma)
    return float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def purify(rho, ancilla_label):
    '''Canonical purification sum_i sqrt(l_i) |e_i>|i>.

    Eigenvalues are sorted descending and those at the floor dropped, so
    the ancilla dimension is the rank.  The global phase makes the first
    nonzero amplitude real and positive.'''
    if ancilla_label in rho.layout.labels:
        raise LabelClash(f'ancilla label {ancilla_label} already in '
                         f'{rho.layout}')
    w = square_root_factor(as_matrix(rho))
    rank = w.shape[1]
    vector = w.reshape(-1)
    vector = vector / np.linalg.norm(vector)
    lead = vector[np.argmax(np.abs(vector) > EIGEN_FLOOR)]
    vector = vector * (abs(lead) / lead)
    layout = rho.layout.concat(SystemLayout([(ancilla_label, rank)]))
    return PureState(layout, vector)


def square_root_factor(matrix, floor=EIGEN_FLOOR):
    '''Return W (dim x rank) with W W^dag = matrix on its support.

    Columns are eigenvectors scaled by root eigenvalues, largest first.'''
    evals, evecs = np.linalg.eigh(matrix)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    rank = max(1, int(np.sum(evals > floor)))
    return evecs[:, :rank] * np.sqrt(np.clip(evals[:rank], 0, None))


def _apply_kraus(matrix, dims, positions, kraus, out_dims):
    '''Apply sum_k K rho K^dag on the joint factor at positions.'''
    n = len(dims)
    keep, rest = _moved(dims, positions)
    din = math.prod(dims[i] for i in keep)
    dr = math.prod(dims[i] for i in rest)
    perm = keep + rest + [n + i for i in keep] + [n + i for i in rest]
    t = matrix.reshape(dims + dims).transpose(perm).reshape(din, dr, din, dr)
    ops = np.asarray(kraus, dtype=complex)
    out = np.einsum('kai,ixjy,kbj->axby', ops, t, ops.conj(), optimize=True)
    rest_dims = tuple(dims[i] for i in rest)
    out = out.reshape(tuple(out_dims) + rest_dims + tuple(out_dims) +
                      rest_dims)
    new_dims = list(dims)
    for position, dim in zip(keep, out_dims):
        new_dims[position] = dim
    total = math.prod(new_dims)
    return out.transpose(np.argsort(perm)).reshape(total, total)


def apply_channel(state, ch, target, new_label=None):
    '''Apply ch on the factor target, relabelled new_label.'''
    layout = state.layout
    n = layout.index(target)
    if ch.input_dim != layout.dims[n]:
        raise DimensionMismatch(f'channel input dimension {ch.input_dim} '
                                f'does not match {target}({layout.dims[n]})')
    new_layout = layout.replace(target, new_label or target, ch.output_dim)
    matrix = _apply_kraus(as_matrix(state), layout.dims, [n],
                          ch.stacked(), [ch.output_dim])
    return DensityMatrix(new_layout, matrix)


def apply_local(state, labels, operator):
    '''Conjugate state by operator acting on the joint space of labels.

    The operator's tensor factors follow layout order.'''
    layout = state.layout
    layout.check_labels(labels)
    positions = layout.positions(labels)
    dim = math.prod(layout.dims[n] for n in positions)
    op = np.asarray(operator, dtype=complex)
    if op.shape != (dim, dim):
        raise DimensionMismatch(f'operator shape {op.shape} does not act on '
                                f'{sorted(labels)} of dimension {dim}')
    matrix = _apply_kraus(as_matrix(state), layout.dims, positions, [op],
                          [layout.dims[n] for n in positions])
    return DensityMatrix(layout, matrix)


def dephase(state, target):
    '''Zero the blocks off-diagonal in the computational basis of target.'''
    layout = state.layout
    n = layout.index(target)
    dims = layout.dims
    count = len(dims)
    shape = [1] * (2 * count)
    shape[n] = shape[count + n] = dims[n]
    mask = np.eye(dims[n]).reshape(shape)
    t = as_matrix(state).reshape(dims + dims) * mask
    return DensityMatrix(layout, t.reshape(layout.total_dim, -1))


def mixture(weights, states):
    '''sum_i p_i rho_i over states sharing a layout.'''
    layout = states[0].layout
    for state in states[1:]:
        _check_same_layout(states[0], state)
    matrix = sum(p * as_matrix(s) for p, s in zip(weights, states))
    return DensityMatrix(layout, matrix)


def max_deviation(a, b):
    '''Largest entrywise difference between two states' matrices.'''
    return float(np.max(np.abs(as_matrix(a) - as_matrix(b))))
