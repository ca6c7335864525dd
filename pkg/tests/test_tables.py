from fractions import Fraction

import pytest

from xradapt import tables
from xradapt.errors import ReservedIndexError, TableIntegrityError, UnsupportedConfigurationError
from xradapt.tables import McsEntry, McsTableId, mcs_entries, mcs_lookup, prb_lookup


def test_table_sizes():
    assert len(mcs_entries(McsTableId.QAM64)) == 29       # indices 0..28
    assert len(mcs_entries(McsTableId.QAM256)) == 28      # indices 0..27
    assert len(mcs_entries(McsTableId.QAM64_LOW_SE)) == 29


def test_mcs_lookup_known_entries():
    top = mcs_lookup(McsTableId.QAM256, 27)
    assert top.q_m == 8
    assert top.code_rate == Fraction(948, 1024)
    bottom = mcs_lookup(McsTableId.QAM64, 0)
    assert bottom.q_m == 2
    assert bottom.code_rate == Fraction(120, 1024)
    half = mcs_lookup(McsTableId.QAM256, 20)
    assert half.code_rate == Fraction("682.5") / 1024
    low = mcs_lookup(McsTableId.QAM64_LOW_SE, 0)
    assert low.code_rate == Fraction(30, 1024)


def test_spectral_efficiency_is_qm_times_rate():
    for table in McsTableId:
        for entry in mcs_entries(table):
            assert entry.spectral_efficiency == entry.q_m * entry.code_rate


def test_reserved_indices_rejected():
    with pytest.raises(ReservedIndexError):
        mcs_lookup(McsTableId.QAM256, 28)
    with pytest.raises(ReservedIndexError):
        mcs_lookup(McsTableId.QAM64, 29)
    with pytest.raises(ReservedIndexError):
        mcs_lookup(McsTableId.QAM64, -1)
    with pytest.raises(ReservedIndexError):
        mcs_lookup(McsTableId.QAM64, 31)


def test_spectral_efficiency_increasing_with_standard_exception():
    # Strictly increasing everywhere except the published table-1 dip at 16->17.
    for table in McsTableId:
        entries = mcs_entries(table)
        dips = [
            (a.index, b.index)
            for a, b in zip(entries, entries[1:])
            if b.spectral_efficiency <= a.spectral_efficiency
        ]
        assert dips == list(tables.KNOWN_SE_INVERSIONS[table])
    e16 = mcs_lookup(McsTableId.QAM64, 16)
    e17 = mcs_lookup(McsTableId.QAM64, 17)
    assert e16.spectral_efficiency == Fraction(2632, 1024)
    assert e17.spectral_efficiency == Fraction(2628, 1024)


def test_table_validation_catches_se_regression():
    bad = [
        McsEntry(0, 2, Fraction(300, 1024)),
        McsEntry(1, 2, Fraction(200, 1024)),
    ]
    with pytest.raises(TableIntegrityError):
        tables._validate_mcs_table(McsTableId.QAM256, bad)


def test_checksum_tamper_detected(monkeypatch):
    monkeypatch.setitem(tables._CHECKSUMS, "prb_fr1.csv", "0" * 64)
    tables._prb_table.cache_clear()
    try:
        with pytest.raises(TableIntegrityError):
            tables._prb_table()
    finally:
        monkeypatch.undo()
        tables._prb_table.cache_clear()


def test_prb_lookup_values():
    assert prb_lookup(40, 30) == 106
    assert prb_lookup(100, 30) == 273
    assert prb_lookup(20, 15) == 106
    assert prb_lookup(100, 60) == 135
    assert prb_lookup(5, 15) == 25


def test_prb_lookup_unsupported_names_both_inputs():
    with pytest.raises(UnsupportedConfigurationError, match="5 MHz.*60 kHz"):
        prb_lookup(5, 60)
    with pytest.raises(UnsupportedConfigurationError):
        prb_lookup(60, 15)
    with pytest.raises(UnsupportedConfigurationError):
        prb_lookup(37, 30)


def test_table_id_parse():
    assert McsTableId.parse("QAM256") is McsTableId.QAM256
    assert McsTableId.parse("qam64_low_se") is McsTableId.QAM64_LOW_SE
    with pytest.raises(ReservedIndexError):
        McsTableId.parse("qam1024")
