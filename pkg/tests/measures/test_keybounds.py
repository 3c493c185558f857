import math

import pytest

from entrolab.lib.sampling import random_mixed
from entrolab.measures import keybounds
from entrolab.measures.entropic import (
    BadPartition, EntropyTable, Partition, multi_info_I, mutual_form,
)
from entrolab.measures.extensions import QuantumExtension
from entrolab.measures.states import (
    PURIFIER, flower, ghz, ideal_key_state, pdit,
    plain_partition, random_pdit_spec,
)


@pytest.mark.parametrize('m, d', ((2, 2), (3, 2), (2, 4), (3, 4)))
def test_lockability_demo(m, d):
    record = keybounds.lockability_demo(m, d)
    log_d = math.log2(d)
    assert (record.m, record.d) == (m, d)
    assert record.full_value_I == pytest.approx(m + log_d, abs=1e-8)
    assert record.full_value_S == pytest.approx(m + log_d, abs=1e-8)
    assert record.measured_value_I == pytest.approx(m + m / 2 * log_d,
                                                    abs=1e-8)
    assert record.trivial_value_I == pytest.approx(m + (m - 1) * log_d,
                                                   abs=1e-8)
    assert record.locked_value == pytest.approx(0, abs=1e-9)


@pytest.mark.parametrize('d', (2, 4))
def test_lock_inequality_is_tight(d):
    f = flower(2, d)
    table = EntropyTable(f.purification)
    form = mutual_form(("A", "A'"), ("B", "B'"), [PURIFIER])
    assert form.evaluate(table) == pytest.approx(2 + math.log2(d), abs=1e-8)


def test_dw_rate():
    assert keybounds.dw_rate(ghz(3, 2).to_density(), plain_partition(3),
                             'ABC') == pytest.approx(1)
    assert keybounds.dw_rate(ghz(3, 4).to_density(), plain_partition(3),
                             'ABC') == pytest.approx(2)
    assert keybounds.dw_rate(ideal_key_state(3, 2), plain_partition(3),
                             'ABC') == pytest.approx(0, abs=1e-9)


def test_dw_rate_errors():
    rho = ideal_key_state(3, 2)
    with pytest.raises(BadPartition):
        keybounds.dw_rate(rho, plain_partition(3), 'AB')
    with pytest.raises(BadPartition):
        keybounds.dw_rate(rho, plain_partition(3), 'BAC')
    with pytest.raises(BadPartition):
        keybounds.dw_rate(rho, Partition(['A', 'B', 'Z']), 'ABZ')


def test_sample_channel_extensions():
    spec = random_pdit_spec(2, 2, 1)
    gamma = pdit(spec)
    extensions = keybounds.sample_channel_extensions(gamma, 3, 2, 5)
    assert len(extensions) == 3
    assert all(isinstance(ext, QuantumExtension) for ext in extensions)
    assert all(ext.extension_dim == 2 for ext in extensions)


def test_pdit_normalization_check():
    spec = random_pdit_spec(2, 2, 3)
    gamma = pdit(spec)
    extensions = keybounds.sample_channel_extensions(gamma, 4, 2, 1)
    extensions.append(QuantumExtension.trivial(gamma))
    report = keybounds.pdit_normalization_check(spec, extensions)
    assert report.passed
    assert report.notes['floor'] == pytest.approx(2)
    assert report.notes['min_value'] >= 2 - 1e-7
    assert report.notes['key_upper_bound'] == pytest.approx(
        report.notes['min_value'] / 2)
    assert len(report.records) == 5


def test_pdit_normalization_without_extensions():
    report = keybounds.pdit_normalization_check(random_pdit_spec(2, 2, 0),
                                                [])
    assert report.passed
    assert 'min_value' not in report.notes



@pytest.mark.parametrize('m', (2, 3))
def test_pdit_normalization_sweep(m):
    worst = math.inf
    for seed in range(50):
        spec = random_pdit_spec(m, 2, seed)
        extensions = keybounds.sample_channel_extensions(pdit(spec), 20, 2,
                                                         seed)
        report = keybounds.pdit_normalization_check(spec, extensions)
        assert report.passed, seed
        worst = min(worst, report.notes['min_value'])
    assert worst >= m - 1e-7


@pytest.mark.parametrize('seed', range(5))
def test_dw_rate_below_key_information(seed):
    rho = random_mixed([('A', 2), ('B', 2), ('C', 2)], 3, seed)
    part = plain_partition(3)
    rate = keybounds.dw_rate(rho, part, 'ABC')
    table = EntropyTable(rho)
    pairwise = min(mutual_form(['A'], [other]).evaluate(table)
                   for other in 'BC')
    assert rate <= pairwise + 1e-10
    assert rate <= multi_info_I(rho, part) + 1e-10
