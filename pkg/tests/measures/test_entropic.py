import math

import numpy as np
import pytest

from entrolab.lib import qstate
from entrolab.lib.sampling import random_mixed
from entrolab.measures import entropic
from entrolab.measures.entropic import (
    BadBasis, BadPartition, EntropyForm, Partition,
)
from entrolab.measures.harness import chain_samples, identity_samples
from entrolab.measures.search import OptimizerConfig
from entrolab.measures.states import fourier, ghz, ideal_key_state


def parity_state():
    diag = np.zeros(8)
    diag[[0, 3, 5, 6]] = 0.25
    return qstate.make_density([('A', 2), ('B', 2), ('C', 2)],
                               np.diag(diag))


def bell():
    return ghz(2, 2)


def test_partition_from_string():
    part = Partition.from_string("A,A':B | E")
    assert part.parties == (('A', "A'"), ('B', ))
    assert part.conditioner == ('E', )
    assert part.m == 2
    assert part.labels == ('A', "A'", 'B', 'E')
    assert str(part) == "A,A':B|E"
    assert part.unconditioned() == Partition([('A', "A'"), 'B'])


@pytest.mark.parametrize('text', ('A', 'A:A', 'A:B|', 'A,:B', 'A:B|A'))
def test_partition_errors(text):
    with pytest.raises(BadPartition):
        Partition.from_string(text)


def test_partition_check():
    part = Partition(['A', 'Z'])
    with pytest.raises(BadPartition):
        part.check(ghz(3, 2).layout)


def test_form_algebra():
    a, ab = EntropyForm.entropy('A'), EntropyForm.entropy('AB')
    assert (a + ab) - ab == a
    assert (a - a).terms == {}
    assert 2 * a == a + a
    assert (a * 3).terms == {frozenset('A'): 3}
    assert EntropyForm.entropy([]).terms == {}
    assert (a + ab).labels() == {'A', 'B'}


def test_condition_independent_of_representation():
    a, ab = EntropyForm.entropy('A'), EntropyForm.entropy('AB')
    padded = a + ab - 2 * ab
    assert padded.condition('E') == (a - ab).condition('E')
    assert a.condition('E') == (EntropyForm.entropy('AE')
                                - EntropyForm.entropy('E'))


def test_forms():
    assert entropic.lindblad_form(['A', 'B']) == (
        EntropyForm.entropy('A') + EntropyForm.entropy('B')
        - EntropyForm.entropy('AB'))
    # for two parties I and S_m agree
    assert entropic.secrecy_form(['A', 'B']) == \
        entropic.lindblad_form(['A', 'B'])
    with pytest.raises(BadPartition):
        entropic.info_form(['A', 'B'], 'Q')


def test_ghz_values():
    psi = ghz(3, 2)
    part = Partition(['A', 'B', 'C'])
    assert entropic.multi_info_I(psi, part) == pytest.approx(3)
    assert entropic.multi_info_S(psi, part) == pytest.approx(3)
    assert entropic.venn_info(psi, part) == pytest.approx(0, abs=1e-9)


def test_key_values():
    rho = ideal_key_state(3, 2)
    part = Partition(['A', 'B', 'C'])
    assert entropic.multi_info(rho, part, 'I') == pytest.approx(2)
    assert entropic.multi_info(rho, part, 'S') == pytest.approx(1)
    assert entropic.venn_info(rho, part) == pytest.approx(1)
    given_c = Partition(['A', 'B'], 'C')
    assert entropic.cond_multi_info(rho, given_c, 'I') == \
        pytest.approx(0, abs=1e-9)


def test_venn_negative():
    part = Partition(['A', 'B', 'C'])
    assert entropic.venn_info(parity_state(), part) == pytest.approx(-1)
    assert entropic.multi_info_I(parity_state(), part) == pytest.approx(1)
    with pytest.raises(BadPartition):
        entropic.venn_info(parity_state(), Partition(['A', 'B'], 'C'))


def test_conditioner_rejected():
    part = Partition(['A', 'B'], 'C')
    with pytest.raises(BadPartition):
        entropic.multi_info_I(ghz(3, 2), part)
    with pytest.raises(BadPartition):
        entropic.multi_info_S(ghz(3, 2), part)


def test_uncovered_labels_traced_out():
    rho = ideal_key_state(3, 2)
    value = entropic.multi_info_I(rho, Partition(['A', 'B']))
    assert value == pytest.approx(1)


def test_bipartite_cmi():
    assert entropic.bipartite_cmi(bell(), 'A', 'B') == pytest.approx(2)
    with pytest.raises(BadPartition):
        entropic.bipartite_cmi(bell(), 'A', 'A')
    with pytest.raises(BadPartition):
        entropic.bipartite_cmi(bell(), 'A', 'Z')
    with pytest.raises(BadPartition):
        entropic.bipartite_cmi(bell(), (), 'B')


def test_entropy_table_cache():
    table = entropic.EntropyTable(ghz(3, 2))
    assert table.entropy(['A']) == pytest.approx(1)
    assert table.entropy(frozenset('A')) == table.entropy(['A'])
    assert table.entropy([]) == 0
    assert entropic.entropy_table(table) is table
    with pytest.raises(BadPartition):
        table.entropy(['Z'])


def test_identity_suite():
    report = entropic.identity_suite(identity_samples(4, 1),
                                     concurrent=False)
    assert report.passed
    assert report.max_violation < 1e-8
    names = {r.name for r in report.records}
    assert {'multi_bi', 'recur_I', 's_chain', 'duality', 'rule1', 'rule2',
            'rule3', 'rule4', 'cond_assoc_I', 'cond_assoc_S',
            'local_conditioning_I', 'ancilla_conditioning_I'} <= names


def test_identity_suite_bad_sample():
    psi = ghz(3, 2)
    with pytest.raises(BadPartition):
        entropic.identity_suite([(psi, Partition(['A', 'B']), 'A')],
                                concurrent=False)


def test_identity_report_violations():
    Record = entropic.IdentityRecord
    report = entropic.IdentityReport([
        Record(0, 'x', 1.0, 1.0, 0.0, 'eq'),
        Record(0, 'y', 1.0, 2.0, -1.0, 'ge'),
        Record(0, 'z', 2.0, 1.0, 1.0, 'ge'),
    ], 1e-8)
    assert not report.passed
    assert [r.name for r in report.violations()] == ['y']
    assert report.max_violation == 1.0


def test_chain_residuals():
    state, pairs, e = chain_samples(1, 3)[0]
    for which in ('I', 'S'):
        terms = entropic.chain_residuals(state, pairs, e, which)
        rebuilt = terms.conditioned + terms.primed + sum(terms.residuals)
        assert terms.total == pytest.approx(rebuilt, abs=1e-9)
        assert all(r > -1e-9 for r in terms.residuals)
    with pytest.raises(BadPartition):
        entropic.chain_residuals(state, pairs[:1], e)


def test_chain_suite():
    report = entropic.chain_suite(chain_samples(3, 2), concurrent=False)
    assert report.passed


def test_additivity_residuals():
    part1 = Partition(['A', 'B'], 'E')
    part2 = Partition(['A2', 'B2'], 'E2')
    first = random_mixed([('A', 2), ('B', 2), ('E', 2)], 2, 1)
    second = random_mixed([('A2', 2), ('B2', 2), ('E2', 2)], 2, 2)
    for which in ('I', 'S'):
        residual = entropic.additivity_residuals(first, part1, second,
                                                 part2, which)
        assert residual == pytest.approx(0, abs=1e-9)
    with pytest.raises(BadPartition):
        entropic.additivity_residuals(first, part1, second,
                                      Partition(['A2', 'B2', 'E2']), 'I')


def test_measured_mutual_info_bases():
    part = Partition(['A', 'B'])
    eye = np.eye(2)
    measured = entropic.measured_mutual_info(bell(), part, (eye, eye))
    assert measured.exact
    assert measured.value == pytest.approx(1)
    h = fourier(2)
    assert entropic.measured_mutual_info(bell(), part, (h, h)).value == \
        pytest.approx(1)
    with pytest.raises(BadBasis):
        entropic.measured_mutual_info(bell(), part, (2 * eye, eye))
    with pytest.raises(BadBasis):
        entropic.measured_mutual_info(bell(), part, (np.eye(3), eye))


def test_measured_mutual_info_search():
    cfg = OptimizerConfig(restarts=2, max_iters=5, max_evals=200,
                          concurrent=False)
    measured = entropic.measured_mutual_info(bell(), Partition(['A', 'B']),
                                             search=cfg)
    assert not measured.exact
    # never below the computational basis, never above log d
    assert 1 - 1e-9 <= measured.value <= 1 + 1e-9


def test_measured_mutual_info_partition():
    with pytest.raises(BadPartition):
        entropic.measured_mutual_info(ghz(3, 2), Partition(['A', 'B', 'C']))


def test_log_base():
    rho = ideal_key_state(2, 4)
    assert entropic.multi_info_I(rho, Partition(['A', 'B'])) == \
        pytest.approx(math.log2(4))


@pytest.mark.parametrize('seed', range(3))
def test_multi_info_is_relative_entropy_to_marginals(seed):
    rho = random_mixed([('A', 2), ('B', 2), ('C', 2)], 3, seed)
    product = qstate.tensor(
        qstate.tensor(qstate.partial_trace(rho, ['B', 'C']),
                      qstate.partial_trace(rho, ['A', 'C'])),
        qstate.partial_trace(rho, ['A', 'B']))
    assert entropic.multi_info_I(rho, Partition(['A', 'B', 'C'])) == \
        pytest.approx(qstate.relative_entropy(rho, product), abs=1e-9)


@pytest.mark.parametrize('which', ('I', 'S'))
def test_party_order_irrelevant(which):
    rho = random_mixed([('A', 2), ('B', 2), ('C', 2), ('D', 2)], 3, 8)
    value = entropic.multi_info(rho, Partition(['A', 'B', ('C', 'D')]),
                                which)
    for parties in ([('C', 'D'), 'A', 'B'], ['B', ('D', 'C'), 'A']):
        assert entropic.multi_info(rho, Partition(parties), which) == \
            pytest.approx(value, abs=1e-10)
    conditioned = entropic.cond_multi_info(
        rho, Partition(['A', 'B', 'C'], 'D'), which)
    assert entropic.cond_multi_info(
        rho, Partition(['C', 'A', 'B'], 'D'), which) == \
        pytest.approx(conditioned, abs=1e-10)
