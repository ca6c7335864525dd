from fractions import Fraction

import pytest

from xradapt.controller import DEFAULT_LADDER, ControllerState
from xradapt.nr_rate import CarrierConfig
from xradapt.tables import McsTableId


@pytest.fixture
def testbed_cell() -> CarrierConfig:
    """The 40 MHz / 30 kHz / 256QAM / TDD-0.7 cell the bundled scenario uses."""
    return CarrierConfig(
        v_layers=1,
        mcs_table=McsTableId.QAM256,
        scaling_factor=Fraction(1),
        bandwidth_mhz=40,
        scs_khz=30,
        numerology_mu=1,
        overhead=Fraction(14, 100),
        tdd_dl_fraction=Fraction(7, 10),
    )


@pytest.fixture
def adaptive_state() -> ControllerState:
    return ControllerState(ladder=DEFAULT_LADDER, mode="adaptive")
