"""Maximum achievable data rate of an NR link (TS 38.306 section 4.1.2 formula).

Per carrier j the downlink rate is

    rate_j = 1e-6 * v_layers * Q_m * f * R * (N_PRB * 12 / T_s) * (1 - OH) * tdd_dl

and the total is the sum over aggregated carriers. All arithmetic is done on
exact rationals; floats and decimal strings are produced only at the API edge,
so table-driven products never accumulate rounding error.

The TDD downlink fraction is not part of the printed formula. It defaults to 1
and exists so cells that only schedule a share of slots for downlink (such as
the bundled testbed profile, which uses 0.7) report the rate actually
achievable on the downlink.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .errors import InvalidParameterError
from .tables import McsEntry, McsTableId, mcs_entries, mcs_lookup, prb_lookup

__all__ = [
    "ALLOWED_OVERHEADS",
    "ALLOWED_SCALING_FACTORS",
    "CarrierConfig",
    "RateEstimate",
    "estimate_rate",
    "format_mbps",
    "max_data_rate",
    "mcs_entries",
    "mcs_lookup",
    "prb_lookup",
    "symbol_duration",
]

# Standard overhead set from TS 38.306: DL FR1, DL FR2, UL FR1, UL FR2.
ALLOWED_OVERHEADS = (Fraction(14, 100), Fraction(18, 100), Fraction(8, 100), Fraction(10, 100))
ALLOWED_SCALING_FACTORS = (Fraction(1), Fraction(4, 5), Fraction(3, 4), Fraction(2, 5))

SUBCARRIERS_PER_PRB = 12


def symbol_duration(mu: int) -> Fraction:
    """OFDM symbol duration in seconds for numerology mu: 1e-3 / (14 * 2^mu)."""
    if not isinstance(mu, int) or isinstance(mu, bool) or not 0 <= mu <= 3:
        raise InvalidParameterError(f"numerology mu must be an integer in 0..3, got {mu!r}")
    return Fraction(1, 1000 * 14 * 2**mu)


def _as_fraction(value, name: str) -> Fraction:
    # str() round-trip keeps user-supplied floats like 0.75 exact in decimal terms.
    try:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InvalidParameterError(f"{name} is not a valid rational: {value!r}") from None


@dataclass(frozen=True)
class CarrierConfig:
    """Link-formula parameters for one component carrier.

    ``n_prb`` may be left as None to derive the PRB count from
    (bandwidth_mhz, scs_khz) via the FR1 table; give it explicitly to
    override. ``overhead`` normally comes from the standard set but any
    value in [0, 1) is accepted for experimentation.
    """

    v_layers: int = 1
    mcs_table: McsTableId = McsTableId.QAM64
    scaling_factor: Fraction = Fraction(1)
    bandwidth_mhz: int = 40
    scs_khz: int = 30
    numerology_mu: int = 1
    n_prb: int | None = None
    overhead: Fraction = Fraction(14, 100)
    tdd_dl_fraction: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "scaling_factor", _as_fraction(self.scaling_factor, "scaling_factor"))
        object.__setattr__(self, "overhead", _as_fraction(self.overhead, "overhead"))
        object.__setattr__(self, "tdd_dl_fraction", _as_fraction(self.tdd_dl_fraction, "tdd_dl_fraction"))
        if self.v_layers < 1:
            raise InvalidParameterError(f"v_layers must be >= 1, got {self.v_layers}")
        if self.scaling_factor not in ALLOWED_SCALING_FACTORS:
            raise InvalidParameterError(
                f"scaling factor must be one of {[str(f) for f in ALLOWED_SCALING_FACTORS]}, "
                f"got {self.scaling_factor}"
            )
        if self.scs_khz != 15 * 2**self.numerology_mu:
            raise InvalidParameterError(
                f"scs_khz {self.scs_khz} inconsistent with numerology mu={self.numerology_mu} "
                f"(expected {15 * 2 ** self.numerology_mu} kHz)"
            )
        symbol_duration(self.numerology_mu)  # range check on mu
        if not 0 <= self.overhead < 1:
            raise InvalidParameterError(f"overhead must be in [0, 1), got {self.overhead}")
        if not 0 < self.tdd_dl_fraction <= 1:
            raise InvalidParameterError(
                f"tdd_dl_fraction must be in (0, 1], got {self.tdd_dl_fraction}"
            )
        if self.n_prb is not None and self.n_prb <= 0:
            raise InvalidParameterError(f"n_prb must be positive, got {self.n_prb}")

    def resolved_n_prb(self) -> int:
        if self.n_prb is not None:
            return self.n_prb
        return prb_lookup(self.bandwidth_mhz, self.scs_khz)

    def mcs_entry(self, index: int) -> McsEntry:
        return mcs_lookup(self.mcs_table, index)


def format_mbps(value: Fraction) -> str:
    """Render an exact Mbps value as a 6-decimal string (the wire format)."""
    with localcontext() as ctx:
        ctx.prec = 50
        dec = Decimal(value.numerator) / Decimal(value.denominator)
        return str(dec.quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class RateEstimate:
    """A data-rate estimate, kept exact per carrier."""

    per_carrier: tuple[Fraction, ...]
    mcs_indices: tuple[int, ...]
    timestamp_s: float | None = None

    @property
    def total(self) -> Fraction:
        return sum(self.per_carrier, Fraction(0))

    @property
    def mbps(self) -> float:
        return float(self.total)

    @property
    def per_carrier_mbps(self) -> list[float]:
        return [float(r) for r in self.per_carrier]

    @property
    def mbps_text(self) -> str:
        return format_mbps(self.total)


def carrier_rate(carrier: CarrierConfig, mcs_index: int) -> Fraction:
    """Exact single-carrier rate in Mbps."""
    entry = carrier.mcs_entry(mcs_index)
    subcarrier_rate = Fraction(carrier.resolved_n_prb() * SUBCARRIERS_PER_PRB) / symbol_duration(
        carrier.numerology_mu
    )
    return (
        Fraction(1, 10**6)
        * carrier.v_layers
        * entry.q_m
        * carrier.scaling_factor
        * entry.code_rate
        * subcarrier_rate
        * (1 - carrier.overhead)
        * carrier.tdd_dl_fraction
    )


def max_data_rate(
    carriers: Sequence[tuple[CarrierConfig, int]],
    timestamp_s: float | None = None,
) -> RateEstimate:
    """Total maximum data rate over a list of (carrier, mcs_index) pairs."""
    if not carriers:
        raise InvalidParameterError("carrier list must be non-empty")
    rates = tuple(carrier_rate(cfg, idx) for cfg, idx in carriers)
    indices = tuple(idx for _, idx in carriers)
    return RateEstimate(per_carrier=rates, mcs_indices=indices, timestamp_s=timestamp_s)


def estimate_rate(cell: CarrierConfig, mcs_index: int, timestamp_s: float | None = None) -> RateEstimate:
    """Single-carrier convenience wrapper around max_data_rate."""
    return max_data_rate([(cell, mcs_index)], timestamp_s=timestamp_s)
