# Copyright (c) 2024, the entrolab developers
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''JSON and row encodings of reports.

Floats are rounded to 12 significant digits so identical runs give
byte-identical output.
'''

from entrolab.lib.stateio import state_to_json
from entrolab.lib.util import rounded
from entrolab.measures.classical import JointDistribution, StochasticChannel
from entrolab.measures.entropic import IdentityReport
from entrolab.measures.extensions import ClassicalExtension, QuantumExtension
from entrolab.measures.harness import AxiomReport, SuiteOutcome
from entrolab.measures.search import BoundReport


def witness_json(witness):
    if witness is None:
        return None
    if isinstance(witness, ClassicalExtension):
        return {'kind': 'classical',
                'weights': list(witness.weights),
                'members': [state_to_json(m) for m in witness.members]}
    if isinstance(witness, QuantumExtension):
        return {'kind': 'quantum',
                'label': witness.label,
                'environment': witness.environment,
                'extension_dim': witness.extension_dim,
                'state': state_to_json(witness.state)}
    if isinstance(witness, StochasticChannel):
        return {'kind': 'stochastic',
                'in_size': witness.in_size,
                'out_size': witness.out_size,
                'matrix': witness.matrix.tolist()}
    raise TypeError(f'cannot encode witness {witness!r}')


def bound_report_json(report, witness=True):
    result = {
        'value': report.value,
        'certified': report.certified,
        'which': report.which,
        'config': report.config,
        'evals': report.evals,
        'scale': report.scale,
        'trajectory': list(report.trajectory),
        'notes': report.notes,
    }
    if witness:
        result['witness'] = witness_json(report.witness)
    return rounded(result)


def axiom_report_json(report):
    return rounded({
        'name': report.name,
        'kind': report.kind,
        'tolerance': report.tolerance,
        'passed': report.passed,
        'max_violation': report.max_violation,
        'records': [r._asdict() for r in report.records],
        'notes': report.notes,
    })


def identity_report_json(report):
    return rounded({
        'tolerance': report.tolerance,
        'passed': report.passed,
        'max_violation': report.max_violation,
        'violations': [r._asdict() for r in report.violations()],
        'records': len(report.records),
    })


def distribution_json(dist):
    return rounded({
        'alphabets': [{'label': label, 'size': size}
                      for label, size in dist.alphabets.subsystems],
        'probs': dist.probs.reshape(-1).tolist(),
    })


def suite_json(outcomes):
    return [{'name': o.name, 'expected_pass': o.expected,
             'behaved': o.report.passed == o.expected,
             'report': to_json(o.report)} for o in outcomes]


def to_json(obj):
    '''JSON-ready encoding of any report the package produces.'''
    if isinstance(obj, BoundReport):
        return bound_report_json(obj)
    if isinstance(obj, AxiomReport):
        return axiom_report_json(obj)
    if isinstance(obj, IdentityReport):
        return identity_report_json(obj)
    if isinstance(obj, JointDistribution):
        return distribution_json(obj)
    if isinstance(obj, SuiteOutcome):
        return suite_json([obj])[0]
    if hasattr(obj, '_asdict'):
        return rounded(obj._asdict())
    if isinstance(obj, list) and all(isinstance(o, SuiteOutcome)
                                     for o in obj):
        return suite_json(obj)
    return rounded(obj)


def report_rows(obj):
    '''(header, rows) flattening a report for CSV and table output.'''
    if isinstance(obj, BoundReport):
        data = bound_report_json(obj, witness=False)
        header = ['value', 'certified', 'which', 'evals', 'scale']
        return header, [[data[key] for key in header]]
    if isinstance(obj, AxiomReport):
        header = list(obj.records[0]._fields) if obj.records else []
        return header, [list(rounded(list(r))) for r in obj.records]
    if isinstance(obj, IdentityReport):
        header = ['sample', 'name', 'left', 'right', 'residual', 'kind']
        return header, [rounded(list(r)) for r in obj.violations()]
    if hasattr(obj, '_asdict'):
        data = rounded(obj._asdict())
        return list(data), [list(data.values())]
    if isinstance(obj, dict):
        data = rounded(obj)
        return list(data), [list(data.values())]
    if isinstance(obj, list) and obj and isinstance(obj[0], SuiteOutcome):
        header = ['name', 'passed', 'expected', 'max_violation']
        return header, [[o.name, o.report.passed, o.expected,
                         rounded(o.report.max_violation)] for o in obj]
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        header = list(obj[0])
        return header, [[rounded(row[key]) for key in header] for row in obj]
    raise TypeError(f'no row encoding for {type(obj).__name__}')
