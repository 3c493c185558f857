# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''JSON encoding of states.

    {"layout": [{"label": "A", "dim": 2}, ...],
     "matrix_re": [[...]], "matrix_im": [[...]]}

Pure states use "vector_re" and "vector_im" instead.
'''

import json

import numpy as np

from entrolab.lib.qstate import (
    PureState, StateError, SystemLayout, make_density, make_pure,
)


def layout_to_json(layout):
    return [{'label': label, 'dim': dim} for label, dim in layout.subsystems]


def layout_from_json(items):
    try:
        return SystemLayout((item['label'], item['dim']) for item in items)
    except (KeyError, TypeError):
        raise StateError('layout entries need "label" and "dim"') from None


def state_to_json(state):
    result = {'layout': layout_to_json(state.layout)}
    if isinstance(state, PureState):
        result['vector_re'] = state.vector.real.tolist()
        result['vector_im'] = state.vector.imag.tolist()
    else:
        result['matrix_re'] = state.matrix.real.tolist()
        result['matrix_im'] = state.matrix.imag.tolist()
    return result


def _complex(obj, key):
    real = np.asarray(obj[f'{key}_re'], dtype=float)
    imag = obj.get(f'{key}_im')
    if imag is None:
        return real.astype(complex)
    return real + 1j * np.asarray(imag, dtype=float)


def state_from_json(obj):
    '''Build a validated DensityMatrix or PureState from decoded JSON.'''
    if not isinstance(obj, dict) or 'layout' not in obj:
        raise StateError('state JSON needs a "layout"')
    layout = layout_from_json(obj['layout'])
    try:
        if 'vector_re' in obj:
            return make_pure(layout, _complex(obj, 'vector'))
        if 'matrix_re' in obj:
            return make_density(layout, _complex(obj, 'matrix'))
    except ValueError as e:
        raise StateError(f'malformed state arrays: {e}') from None
    raise StateError('state JSON needs "matrix_re" or "vector_re"')


def read_state(path):
    with open(path, 'r') as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as e:
            raise StateError(f'{path} is not valid JSON: {e}') from None
    return state_from_json(obj)


def write_state(path, state):
    with open(path, 'w') as f:
        json.dump(state_to_json(state), f)
