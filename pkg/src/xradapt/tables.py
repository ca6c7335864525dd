"""Standards lookup tables: MCS index tables and the FR1 PRB table.

The tables are shipped as plain-text data files under ``xradapt/data/`` (one
file per table, source cited in each header) and are validated against the
SHA-256 checksums below when first loaded. Code rates are carried as exact
rationals over 1024, never as floats.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .errors import ReservedIndexError, TableIntegrityError, UnsupportedConfigurationError

_CHECKSUMS = {
    "mcs_qam64.csv": "1437b192d196344092668c4ffe57fa77a43ee374fc1c162173586c7c5930d914",
    "mcs_qam256.csv": "40578b08102262b679fa2ba3c0b70654b0456294d742b4814b3064985164cda1",
    "mcs_qam64_low_se.csv": "b225cda5e37cda7624ae6cdc6ae585f156ae99bcfe5fb0610ddcd6a3d1c8c6e5",
    "prb_fr1.csv": "aceab3e98411fa80c60fbb5a34d51d5b6c4c943512e2f7eea2272428f532b45c",
}


class McsTableId(str, enum.Enum):
    """The three PDSCH MCS tables of TS 38.214."""

    QAM64 = "qam64"
    QAM256 = "qam256"
    QAM64_LOW_SE = "qam64_low_se"

    @classmethod
    def parse(cls, name: str) -> "McsTableId":
        try:
            return cls(name.lower())
        except ValueError:
            raise ReservedIndexError(
                f"unknown MCS table {name!r}; expected one of "
                f"{[t.value for t in cls]}"
            ) from None


_TABLE_FILES = {
    McsTableId.QAM64: "mcs_qam64.csv",
    McsTableId.QAM256: "mcs_qam256.csv",
    McsTableId.QAM64_LOW_SE: "mcs_qam64_low_se.csv",
}

# Spectral efficiency is strictly increasing with index within each table,
# with one exception published in the standard itself: table 1 dips at the
# 16->17 modulation-order transition. Validation allows exactly that pair.
KNOWN_SE_INVERSIONS = {
    McsTableId.QAM64: ((16, 17),),
    McsTableId.QAM256: (),
    McsTableId.QAM64_LOW_SE: (),
}


@dataclass(frozen=True)
class McsEntry:
    """One MCS table row: modulation order and exact code rate."""

    index: int
    q_m: int
    code_rate: Fraction

    @property
    def spectral_efficiency(self) -> Fraction:
        return self.q_m * self.code_rate


def _read_data_file(name: str) -> str:
    raw = resources.files(__package__).joinpath("data", name).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != _CHECKSUMS[name]:
        raise TableIntegrityError(
            f"checksum mismatch for bundled table {name}: "
            f"expected {_CHECKSUMS[name]}, got {digest}"
        )
    return raw.decode("utf-8")


def _data_rows(name: str) -> list[dict[str, str]]:
    text = _read_data_file(name)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


@lru_cache(maxsize=None)
def mcs_entries(table: McsTableId) -> tuple[McsEntry, ...]:
    """All defined entries of one MCS table, ascending by index."""
    entries = []
    for row in _data_rows(_TABLE_FILES[table]):
        # code_rate_x1024 may be half-integer (682.5); Fraction(str) is exact.
        rate = Fraction(row["code_rate_x1024"]) / 1024
        entries.append(McsEntry(int(row["index"]), int(row["q_m"]), rate))
    _validate_mcs_table(table, entries)
    return tuple(entries)


def _validate_mcs_table(table: McsTableId, entries: list[McsEntry]) -> None:
    allowed_dips = set(KNOWN_SE_INVERSIONS[table])
    for pos, entry in enumerate(entries):
        if entry.index != pos:
            raise TableIntegrityError(f"{table.value}: indices not contiguous at {entry.index}")
        if entry.q_m not in (2, 4, 6, 8):
            raise TableIntegrityError(f"{table.value}[{entry.index}]: bad Q_m {entry.q_m}")
        if not 0 < entry.code_rate < 1:
            raise TableIntegrityError(f"{table.value}[{entry.index}]: bad code rate {entry.code_rate}")
    for prev, cur in zip(entries, entries[1:]):
        if cur.spectral_efficiency <= prev.spectral_efficiency:
            if (prev.index, cur.index) not in allowed_dips:
                raise TableIntegrityError(
                    f"{table.value}: spectral efficiency not increasing at "
                    f"{prev.index}->{cur.index}"
                )


def mcs_lookup(table: McsTableId, index: int) -> McsEntry:
    """Exact (Q_m, code rate) pair for one MCS index.

    Reserved or out-of-range indices raise ReservedIndexError.
    """
    entries = mcs_entries(table)
    if not isinstance(index, int) or isinstance(index, bool):
        raise ReservedIndexError(f"MCS index must be an integer, got {index!r}")
    if not 0 <= index < len(entries):
        raise ReservedIndexError(
            f"MCS index {index} is reserved or undefined in table {table.value} "
            f"(defined range 0..{len(entries) - 1})"
        )
    return entries[index]


@lru_cache(maxsize=None)
def _prb_table() -> dict[tuple[int, int], int]:
    table = {}
    for row in _data_rows("prb_fr1.csv"):
        key = (int(row["bandwidth_mhz"]), int(row["scs_khz"]))
        table[key] = int(row["n_prb"])
    if table[(40, 30)] != 106 or table[(100, 30)] != 273:
        raise TableIntegrityError("PRB table failed anchor-value validation")
    return table


def prb_lookup(bandwidth_mhz: int, scs_khz: int) -> int:
    """N_RB for a channel bandwidth / subcarrier spacing pair (FR1)."""
    try:
        return _prb_table()[(bandwidth_mhz, scs_khz)]
    except KeyError:
        raise UnsupportedConfigurationError(
            f"no PRB entry for bandwidth {bandwidth_mhz} MHz at SCS {scs_khz} kHz "
            "(combination absent from TS 38.101-1 Table 5.3.2-1)"
        ) from None


def supported_prb_pairs() -> tuple[tuple[int, int], ...]:
    """All (bandwidth_mhz, scs_khz) pairs defined in the PRB table."""
    return tuple(sorted(_prb_table()))
