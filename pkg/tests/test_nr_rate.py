import random
from dataclasses import replace
from fractions import Fraction

import pytest

from xradapt.errors import InvalidParameterError, ReservedIndexError
from xradapt.nr_rate import (
    CarrierConfig,
    carrier_rate,
    estimate_rate,
    format_mbps,
    max_data_rate,
    symbol_duration,
)
from xradapt.tables import KNOWN_SE_INVERSIONS, McsTableId, mcs_entries


def test_symbol_duration_reference_values():
    assert float(symbol_duration(0)) == pytest.approx(71.4286e-6, abs=1e-10)
    assert float(symbol_duration(1)) == pytest.approx(35.7143e-6, abs=1e-10)
    # exact form: 1e-3 / (14 * 2^mu)
    assert symbol_duration(2) == Fraction(1, 56000)
    assert symbol_duration(3) == Fraction(1, 112000)


def test_symbol_duration_rejects_bad_mu():
    for mu in (-1, 4, 1.5, "1"):
        with pytest.raises(InvalidParameterError):
            symbol_duration(mu)


def test_testbed_extreme_rates(testbed_cell):
    assert estimate_rate(testbed_cell, 27).mbps_text == "158.796162"
    assert estimate_rate(testbed_cell, 0).mbps_text == "5.025195"


def test_rate_is_exact_rational(testbed_cell):
    # 8 * (948/1024) * (1272 * 28000) * 0.86 * 0.7 * 1e-6, exactly
    assert carrier_rate(testbed_cell, 27) == Fraction(79398081, 500000)
    assert carrier_rate(testbed_cell, 0) == Fraction(1005039, 200000)


def test_frozen_spot_values(testbed_cell):
    qam64 = replace(testbed_cell, mcs_table=McsTableId.QAM64)
    low_se = replace(testbed_cell, mcs_table=McsTableId.QAM64_LOW_SE)
    assert estimate_rate(qam64, 28).mbps_text == "119.097122"
    assert estimate_rate(low_se, 0).mbps_text == "1.256299"
    assert estimate_rate(testbed_cell, 20).mbps_text == "114.323186"


def test_tdd_fraction_one_reproduces_plain_formula(testbed_cell):
    plain = replace(testbed_cell, tdd_dl_fraction=Fraction(1))
    assert carrier_rate(plain, 27) == carrier_rate(testbed_cell, 27) / Fraction(7, 10)
    assert estimate_rate(plain, 27).mbps_text == "226.851660"


def test_two_identical_carriers_double_exactly(testbed_cell):
    single = max_data_rate([(testbed_cell, 27)])
    double = max_data_rate([(testbed_cell, 27), (testbed_cell, 27)])
    assert double.total == 2 * single.total
    assert double.per_carrier == (single.total, single.total)


def test_appending_carrier_adds_standalone_rate(testbed_cell):
    other = replace(testbed_cell, mcs_table=McsTableId.QAM64, v_layers=2)
    combined = max_data_rate([(testbed_cell, 27), (other, 10)])
    assert combined.total == carrier_rate(testbed_cell, 27) + carrier_rate(other, 10)


def test_linearity_in_layers_and_scaling(testbed_cell):
    doubled = replace(testbed_cell, v_layers=2)
    assert carrier_rate(doubled, 12) == 2 * carrier_rate(testbed_cell, 12)
    scaled = replace(testbed_cell, scaling_factor=Fraction(4, 5))
    assert carrier_rate(scaled, 12) == Fraction(4, 5) * carrier_rate(testbed_cell, 12)


def test_overhead_boundary(testbed_cell):
    half = replace(testbed_cell, overhead=Fraction(1, 2))
    ratio = carrier_rate(half, 27) / carrier_rate(testbed_cell, 27)
    assert ratio == Fraction(1, 2) / Fraction(86, 100)
    nearly_one = replace(testbed_cell, overhead=Fraction(999, 1000))
    assert carrier_rate(nearly_one, 27) < Fraction(1, 100) * carrier_rate(testbed_cell, 27)


def test_monotone_in_mcs_index_with_documented_dip(testbed_cell):
    for table in McsTableId:
        cell = replace(testbed_cell, mcs_table=table)
        rates = [carrier_rate(cell, i) for i in range(len(mcs_entries(table)))]
        dips = [(i, i + 1) for i, (a, b) in enumerate(zip(rates, rates[1:])) if b <= a]
        assert dips == list(KNOWN_SE_INVERSIONS[table])
    # pin the one dip to its exact standard magnitude
    qam64 = replace(testbed_cell, mcs_table=McsTableId.QAM64)
    assert carrier_rate(qam64, 17) / carrier_rate(qam64, 16) == Fraction(2628, 2632)


def test_empty_carrier_list_rejected():
    with pytest.raises(InvalidParameterError):
        max_data_rate([])


def test_reserved_index_propagates(testbed_cell):
    with pytest.raises(ReservedIndexError):
        max_data_rate([(testbed_cell, 28)])


def test_carrier_config_validation():
    with pytest.raises(InvalidParameterError):
        CarrierConfig(scs_khz=30, numerology_mu=0)  # 30 kHz needs mu=1
    with pytest.raises(InvalidParameterError):
        CarrierConfig(scaling_factor=Fraction(1, 2))
    with pytest.raises(InvalidParameterError):
        CarrierConfig(overhead=Fraction(3, 2))
    with pytest.raises(InvalidParameterError):
        CarrierConfig(tdd_dl_fraction=Fraction(0))
    with pytest.raises(InvalidParameterError):
        CarrierConfig(v_layers=0)
    with pytest.raises(InvalidParameterError):
        CarrierConfig(n_prb=0)


def test_n_prb_override_beats_lookup(testbed_cell):
    overridden = replace(testbed_cell, n_prb=212)
    assert overridden.resolved_n_prb() == 212
    assert carrier_rate(overridden, 27) == 2 * carrier_rate(testbed_cell, 27)


def test_estimate_total_is_sum_of_carriers(testbed_cell):
    rng = random.Random(7)
    for _ in range(50):
        indices = [rng.randrange(0, 28) for _ in range(rng.randint(1, 4))]
        est = max_data_rate([(testbed_cell, i) for i in indices])
        assert est.total == sum(est.per_carrier, Fraction(0))
        assert est.total >= 0
        assert est.mcs_indices == tuple(indices)


def test_format_mbps_rounding():
    assert format_mbps(Fraction(79398081, 500000)) == "158.796162"
    assert format_mbps(Fraction(91458549, 800000)) == "114.323186"  # ...18625 rounds down
    assert format_mbps(Fraction(1, 3)) == "0.333333"
    assert format_mbps(Fraction(0)) == "0.000000"
