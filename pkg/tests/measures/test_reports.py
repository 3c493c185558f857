import json
import math

import pytest

from entrolab.measures import reports
from entrolab.measures.classical import (
    constant_stochastic, ideal_key_dist,
)
from entrolab.measures.entropic import IdentityRecord, IdentityReport
from entrolab.measures.extensions import (
    QuantumExtension, make_classical_extension,
)
from entrolab.measures.harness import TrialRecord, AxiomReport, SuiteOutcome
from entrolab.measures.search import EXACT, UPPER, BoundReport
from entrolab.measures.states import ghz


def bound_report(witness=None):
    return BoundReport(value=1 / 3, witness=witness, certified=UPPER,
                       which='I', config={'seed': 0}, evals=12,
                       trajectory=(2.0, 1 / 3), notes={'source': 'search'})


def axiom_report(residuals, kind='eq'):
    records = [TrialRecord(n, 'trial', 1.0, 1.0 - r, r)
               for n, r in enumerate(residuals)]
    return AxiomReport('lui', kind, records, 1e-8)


def test_witness_json():
    assert reports.witness_json(None) is None
    state = ghz(2, 2)
    ext = make_classical_extension([1], [state])
    data = reports.witness_json(ext)
    assert data['kind'] == 'classical'
    assert data['weights'] == [1.0]
    assert len(data['members']) == 1
    data = reports.witness_json(QuantumExtension.trivial(state))
    assert data['kind'] == 'quantum'
    assert (data['label'], data['extension_dim']) == ('E', 1)
    data = reports.witness_json(constant_stochastic(2, 3))
    assert data == {'kind': 'stochastic', 'in_size': 2, 'out_size': 3,
                    'matrix': [[1, 1], [0, 0], [0, 0]]}
    with pytest.raises(TypeError):
        reports.witness_json(object())


def test_bound_report_json():
    data = reports.bound_report_json(bound_report(constant_stochastic(2)))
    assert data['value'] == 0.333333333333
    assert data['trajectory'] == [2.0, 0.333333333333]
    assert data['certified'] == UPPER
    assert data['witness']['kind'] == 'stochastic'
    assert 'witness' not in reports.bound_report_json(bound_report(),
                                                      witness=False)
    json.dumps(data)


def test_axiom_report_json():
    data = reports.axiom_report_json(axiom_report([0, 1e-3]))
    assert data['passed'] is False
    assert data['max_violation'] == 1e-3
    assert data['records'][1]['residual'] == 1e-3
    json.dumps(data)


def test_identity_report_json():
    records = [IdentityRecord(0, 'chain', 1.0, 1.0, 0.0, 'eq'),
               IdentityRecord(1, 'chain', 1.0, 0.5, 0.5, 'eq'),
               IdentityRecord(1, 'positivity', 0.0, 0.0, 0.1, 'ge')]
    data = reports.identity_report_json(IdentityReport(records))
    assert data['passed'] is False
    assert data['records'] == 3
    assert len(data['violations']) == 1
    assert data['violations'][0]['name'] == 'chain'


def test_distribution_json():
    data = reports.distribution_json(ideal_key_dist(2, 2))
    assert [a['label'] for a in data['alphabets']] == ['A', 'B', 'E']
    assert len(data['probs']) == 8
    assert math.fsum(data['probs']) == pytest.approx(1)


def test_suite_json():
    outcomes = [SuiteOutcome('lui', axiom_report([0]), True),
                SuiteOutcome('broken', axiom_report([0.5]), True)]
    data = reports.to_json(outcomes)
    assert [o['behaved'] for o in data] == [True, False]
    assert data[0]['report']['name'] == 'lui'
    assert reports.to_json(outcomes[0])['name'] == 'lui'


def test_to_json_fallbacks():
    assert reports.to_json({'x': 0.1 + 0.2}) == {'x': 0.3}
    assert reports.to_json(IdentityRecord(0, 'n', 1.0, 1.0, 0.0, 'eq')) \
        == {'sample': 0, 'name': 'n', 'left': 1.0, 'right': 1.0,
            'residual': 0.0, 'kind': 'eq'}
    assert reports.to_json(bound_report())['certified'] == UPPER


def test_report_rows():
    header, rows = reports.report_rows(bound_report())
    assert header == ['value', 'certified', 'which', 'evals', 'scale']
    assert rows == [[0.333333333333, UPPER, 'I', 12, 1.0]]

    header, rows = reports.report_rows(axiom_report([0, 0.25]))
    assert header == list(TrialRecord._fields)
    assert rows[1][-1] == 0.25

    header, rows = reports.report_rows({'value': 2.0,
                                        'certified': EXACT})
    assert header == ['value', 'certified']
    assert rows == [[2.0, EXACT]]

    outcomes = [SuiteOutcome('lui', axiom_report([0]), True)]
    header, rows = reports.report_rows(outcomes)
    assert rows == [['lui', True, True, 0.0]]

    header, rows = reports.report_rows([{'m': 2, 'value': 1.5}])
    assert (header, rows) == (['m', 'value'], [[2, 1.5]])

    with pytest.raises(TypeError):
        reports.report_rows(3.0)
