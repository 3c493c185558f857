import math

import pytest

from entrolab.lib import qstate
from entrolab.lib.sampling import random_mixed
from entrolab.measures import squashed
from entrolab.measures.entropic import BadPartition, Partition, multi_info
from entrolab.measures.extensions import (
    ClassicalExtension, QuantumExtension, cmi_at_extension,
    make_classical_extension, spectral_ensemble,
)
from entrolab.measures.search import EXACT, UPPER, OptimizerConfig
from entrolab.measures.states import (
    flower, ghz, ideal_key_state, plain_partition,
)


CFG = OptimizerConfig(restarts=2, max_iters=3, max_evals=300,
                      concurrent=False)
ABC = Partition(['A', 'B', 'C'])


def random_abc(seed=3):
    return random_mixed([('A', 2), ('B', 2), ('C', 2)], 2, seed)


@pytest.mark.parametrize('which', ('I', 'S'))
def test_pure_state_is_exact(which):
    psi = ghz(3, 2)
    for report in (squashed.c_squashed_upper(psi, ABC, which, CFG),
                   squashed.q_squashed_upper(psi, ABC, which, CFG)):
        assert report.certified == EXACT
        assert report.value == pytest.approx(multi_info(psi, ABC, which))
        assert report.notes['rank'] == 1
        assert report.trajectory == ()


def test_separable_state_is_zero():
    rho = ideal_key_state(3, 2)
    c = squashed.c_squashed_upper(rho, ABC, 'I', CFG)
    assert c.value == pytest.approx(0, abs=1e-9)
    assert c.certified == EXACT
    assert isinstance(c.witness, ClassicalExtension)
    q = squashed.q_squashed_upper(rho, ABC, 'I', CFG, classical=c)
    assert q.value == pytest.approx(0, abs=1e-9)
    assert isinstance(q.witness, QuantumExtension)


def test_report_reproducible_from_witness():
    rho = random_abc()
    c = squashed.c_squashed_upper(rho, ABC, 'I', CFG)
    assert cmi_at_extension(rho, ABC, c.witness, 'I') == \
        pytest.approx(c.value, abs=1e-9)
    q = squashed.q_squashed_upper(rho, ABC, 'I', CFG, classical=c)
    assert cmi_at_extension(rho, ABC, q.witness, 'I') == \
        pytest.approx(q.value, abs=1e-9)


def test_quantum_never_above_classical():
    rho = random_abc()
    for which in ('I', 'S'):
        c = squashed.c_squashed_upper(rho, ABC, which, CFG)
        q = squashed.q_squashed_upper(rho, ABC, which, CFG, classical=c)
        assert q.value <= c.value + 1e-9
        assert q.value >= -1e-9


def test_never_worse_than_anchor():
    rho = random_abc(5)
    anchor = spectral_ensemble(rho)
    report = squashed.c_squashed_upper(rho, ABC, 'S', CFG,
                                       anchors=[anchor])
    assert report.value <= cmi_at_extension(rho, ABC, anchor, 'S') + 1e-12
    unconditioned = multi_info(rho, ABC, 'S')
    assert report.value <= unconditioned + 1e-12


def test_deterministic():
    rho = random_abc(7)
    first = squashed.c_squashed_upper(rho, ABC, 'I', CFG)
    second = squashed.c_squashed_upper(rho, ABC, 'I', CFG)
    assert first.value == second.value
    assert first.trajectory == second.trajectory
    assert first.config == CFG.as_dict()


def test_flower_at_purifying_register():
    m, d = 2, 2
    f = flower(m, d)
    known = m + math.log2(d)
    report = squashed.q_squashed_upper(f.reduced, f.partition(), 'I', CFG,
                                       known_value=known)
    assert report.value <= known + 1e-9
    assert report.value >= known - 1e-6
    assert report.certified == EXACT


def test_upper_bound_certification():
    rho = random_abc(9)
    report = squashed.c_squashed_upper(rho, ABC, 'I', CFG)
    assert report.value > 1e-6
    assert report.certified == UPPER
    matched = squashed.c_squashed_upper(rho, ABC, 'I', CFG,
                                        known_value=report.value)
    assert matched.certified == EXACT


def test_uncovered_labels_traced_out():
    rho = ideal_key_state(3, 2)
    report = squashed.c_squashed_upper(rho, Partition(['A', 'B']), 'I', CFG)
    assert report.value == pytest.approx(0, abs=1e-9)
    assert report.witness.layout.labels == ('A', 'B')


def test_reduced_anchor():
    rho = random_abc(2)
    anchor = spectral_ensemble(rho)
    report = squashed.q_squashed_upper(rho, Partition(['A', 'B']), 'I', CFG,
                                       anchors=[anchor])
    assert report.witness.target.layout.labels == ('A', 'B')


def test_conditioner_rejected():
    with pytest.raises(BadPartition):
        squashed.c_squashed_upper(random_abc(), Partition(['A', 'B'], 'C'),
                                  'I', CFG)


def test_bipartite_squashed():
    report = squashed.bipartite_squashed_upper(ghz(2, 2),
                                               Partition(['A', 'B']), CFG)
    assert report.scale == 0.5
    assert report.value == pytest.approx(1)
    with pytest.raises(BadPartition):
        squashed.bipartite_squashed_upper(ghz(3, 2), ABC, CFG)


def test_bipartite_halves_trajectory():
    rho = random_mixed([('A', 2), ('B', 2)], 2, 4)
    part = Partition(['A', 'B'])
    full = squashed.q_squashed_upper(rho, part, 'I', CFG)
    half = squashed.bipartite_squashed_upper(rho, part, CFG)
    assert half.value == pytest.approx(full.value / 2)
    assert half.trajectory == tuple(v / 2 for v in full.trajectory)


def test_mixed_convex_roof_of_entropy():
    rho = random_abc(4)
    report = squashed.mixed_convex_roof(qstate.entropy, rho, CFG)
    assert report.value == pytest.approx(0, abs=1e-9)
    assert report.certified == EXACT
    assert report.notes['source'] == 'spectral'


def test_too_large():
    with pytest.raises(qstate.TooLarge):
        squashed.c_squashed_upper(ghz(13, 2), plain_partition(13), 'I', CFG)


SMALL = OptimizerConfig(restarts=1, max_iters=2, max_evals=100,
                        concurrent=False)


@pytest.mark.parametrize('seed', range(30))
def test_quantum_below_classical_across_seeds(seed):
    rho = random_abc(100 + seed)
    c = squashed.c_squashed_upper(rho, ABC, 'I', SMALL)
    q = squashed.q_squashed_upper(rho, ABC, 'I', SMALL, classical=c)
    assert q.value <= c.value + 1e-6


@pytest.mark.parametrize('which', ('I', 'S'))
def test_classical_bound_convex(which):
    first, second = random_abc(11), ghz(3, 2)
    p = 0.3
    one = squashed.c_squashed_upper(first, ABC, which, CFG)
    two = squashed.c_squashed_upper(second, ABC, which, CFG)
    # the union of both witnesses is an ensemble of the mixture
    weights = [p * w for w in one.witness.weights] + \
        [(1 - p) * w for w in two.witness.weights]
    members = list(one.witness.members) + list(two.witness.members)
    mixed = qstate.mixture([p, 1 - p], [first, second.to_density()])
    anchor = make_classical_extension(weights, members, mixed)
    report = squashed.c_squashed_upper(mixed, ABC, which, CFG,
                                       anchors=[anchor])
    assert report.value <= p * one.value + (1 - p) * two.value + 1e-9


@pytest.mark.parametrize('seed', (1, 4, 8))
def test_roof_of_multi_info_is_classical_bound(seed):
    rho = random_abc(seed)
    for which in ('I', 'S'):
        def g(member):
            return multi_info(member, ABC, which)

        roof = squashed.mixed_convex_roof(g, rho, CFG)
        c = squashed.c_squashed_upper(rho, ABC, which, CFG)
        assert roof.value == pytest.approx(c.value, abs=1e-9)
