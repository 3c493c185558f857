import pytest

from entrolab.lib import qstate
from entrolab.lib.sampling import random_mixed
from entrolab.measures import entropic, harness
from entrolab.measures.entropic import Partition
from entrolab.measures.extensions import make_classical_extension
from entrolab.measures.search import OptimizerConfig
from entrolab.measures.states import ghz


CFG = OptimizerConfig(restarts=2, max_iters=3, max_evals=300,
                      concurrent=False)
LAYOUT = [('A', 2), ('B', 2), ('C', 2), ('E', 2)]
PART = Partition(['A', 'B', 'C'], 'E')


def random_abce(seed=1):
    return random_mixed(LAYOUT, 4, seed)


def test_monotone_fn():
    f = harness.info_monotone('I')
    assert f.name == 'multi_info_I'
    assert f(ghz(3, 2), Partition(['A', 'B', 'C'])) == pytest.approx(3)
    assert harness.trace_monotone()(ghz(2, 2), None) == pytest.approx(1)
    assert harness.rank_monotone()(ghz(2, 2), None) == 1
    assert isinstance(harness.rank_monotone()(ghz(2, 2), None), float)
    squashed = harness.c_squashed_monotone('I', CFG)
    assert squashed.budget is CFG
    assert squashed(ghz(3, 2), Partition(['A', 'B', 'C'])) == \
        pytest.approx(3)
    squashed = harness.q_squashed_monotone('S', CFG)
    assert squashed.name == 'q_squashed_S'
    assert squashed(ghz(3, 2), Partition(['A', 'B', 'C'])) == \
        pytest.approx(3)


def test_axiom_report():
    Record = harness.TrialRecord
    records = [Record(0, 'a', 1.0, 2.0, -1.0), Record(1, 'b', 2.0, 1.0, 1.0)]
    assert harness.AxiomReport('x', 'eq', records).max_violation == 1.0
    assert harness.AxiomReport('x', 'le', records).max_violation == 1.0
    ge = harness.AxiomReport('x', 'ge', records[1:])
    assert ge.passed and ge.max_violation == -1.0
    ratio = harness.AxiomReport('x', 'ratio', records, 2.0)
    assert ratio.passed and ratio.max_ratio == 1.0
    assert harness.AxiomReport('x', 'eq').passed is True


@pytest.mark.parametrize('which', ('I', 'S'))
def test_lui(which):
    report = harness.check_lui(harness.info_monotone(which), random_abce(),
                               PART, trials=4, concurrent=False)
    assert report.passed
    assert len(report.records) == 4


@pytest.mark.parametrize('which', ('I', 'S'))
def test_flags_with_local_unitary_members(which):
    ensemble = harness.flag_ensemble(LAYOUT, 3)
    report = harness.check_flags(harness.info_monotone(which), ensemble,
                                 PART, 'A')
    assert report.passed


def test_flags_fail_for_generic_members():
    members = [random_abce(5), random_abce(6)]
    ensemble = make_classical_extension([0.5, 0.5], members)
    report = harness.check_flags(harness.info_monotone('I'), ensemble, PART,
                                 'A')
    # the residual is the Holevo quantity of the members' marginals
    # without A, positive for generic members
    assert not report.passed


def test_flagged_state():
    ensemble = harness.flag_ensemble(LAYOUT, 1)
    flagged = harness.flagged_state(ensemble, 'F', 3)
    assert flagged.layout.labels[-1] == 'F'
    assert flagged.layout.dim_of('F') == 3
    with pytest.raises(qstate.DimensionMismatch):
        harness.flagged_state(ensemble, 'F', 1)
    with pytest.raises(qstate.DimensionMismatch):
        harness.check_flags(harness.info_monotone('I'), ensemble, PART, 'E')


def test_convexity():
    first = random_mixed([('A', 2), ('B', 2)], 1, 1)
    second = random_mixed([('A', 2), ('B', 2)], 1, 2)
    part = Partition(['A', 'B'])
    bad = harness.check_convexity(harness.entropy_monotone(), first, second,
                                  part, 0.5)
    assert not bad.passed
    good = harness.check_convexity(harness.trace_monotone(), first, second,
                                   part, 0.3)
    assert good.passed
    with pytest.raises(ValueError):
        harness.check_convexity(harness.trace_monotone(), first, second,
                                part, 1.5)
    with pytest.raises(qstate.DimensionMismatch):
        harness.check_convexity(harness.trace_monotone(), first,
                                ghz(3, 2), part, 0.5)


def test_continuity():
    pure = random_mixed([('A', 2), ('B', 2)], 1, 3)
    part = Partition(['A', 'B'])
    rank = harness.check_continuity(harness.rank_monotone(), pure, part,
                                    [1e-3], 2, 0, 16.0)
    assert not rank.passed
    assert rank.notes['max_ratio'] > 16
    trace = harness.check_continuity(harness.trace_monotone(), pure, part,
                                     [1e-3, 1e-6], 2, 0, 1e-6)
    assert trace.passed
    for record in trace.records:
        assert record.lhs <= record.rhs + 1e-12
    with pytest.raises(ValueError):
        harness.check_continuity(harness.trace_monotone(), pure, part, [2.5])


@pytest.mark.parametrize('which', ('I', 'S'))
def test_local_channels(which):
    report = harness.check_local_channels(harness.info_monotone(which),
                                          random_abce(2), PART, trials=3,
                                          seed=4, concurrent=False)
    assert report.passed


def test_additivity():
    part1 = Partition(['A', 'B'])
    part2 = Partition(['A2', 'B2'])
    first = random_mixed([('A', 2), ('B', 2)], 2, 1)
    second = random_mixed([('A2', 2), ('B2', 2)], 2, 2)
    assert harness.check_additivity(first, part1, second, part2).passed


def test_local_instrument():
    ops = harness.local_instrument(2, 0, outcomes=3)
    assert len(ops) == 3
    qstate.make_channel(ops)


def test_roof_average_on_pure_state():
    report = harness.check_roof_average(ghz(3, 2),
                                        Partition(['A', 'B', 'C']), CFG)
    assert report.passed


def test_identity_samples_per_party_count():
    samples = harness.identity_samples(3, 0)
    assert len(samples) == 6
    parties = [len(part.parties) for _, part, _ in samples]
    assert parties.count(3) == 3 and parties.count(2) == 3
    report = entropic.identity_suite(samples, concurrent=False)
    recursions = {r.sample for r in report.records
                  if r.name == 'recur_I'}
    assert len(recursions) == 3


def test_run_suites():
    outcomes = harness.run_suites(2, 0, concurrent=False)
    names = [o.name for o in outcomes]
    assert names[:4] == ['identities', 'chain', 'bipartite', 'additivity']
    assert 'flags[multi_info_S]' in names
    for outcome in outcomes:
        assert outcome.report.passed == outcome.expected, outcome.name
    assert sum(not o.expected for o in outcomes) == 2
