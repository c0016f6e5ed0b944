"""Transmission-mode catalog and transceiver characteristics.

A transmission mode is one line-side configuration a coherent transceiver
supports: modulation format, symbol rate, client line rate, the minimum
end-to-end GSNR it needs for error-free post-FEC operation, and its
declared back-to-back SNR (the pair's noise contribution with no line in
between).  The set of modes a transceiver offers, together with its
tunable frequency range and grid, forms its characteristics record --
the JSON document the controller gathers from every muxponder.

The characteristics schema is versioned (``schema: 1``); frequencies are
absolute THz so that vendors with different channel numbering schemes
interoperate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from wdmprov.qot import ModulationFormat

CHARACTERISTICS_SCHEMA_VERSION = 1

# ITU grid anchor used when checking that a frequency sits on a grid.
GRID_ANCHOR_THZ = 193.1


@dataclass(frozen=True)
class TransmissionMode:
    id: str
    modulation: ModulationFormat
    baud_gbd: float
    line_rate_gbps: float
    snr_trx_db: float        # declared back-to-back SNR of the pair
    required_gsnr_db: float  # minimum EtE GSNR for error-free operation

    def __post_init__(self):
        if self.line_rate_gbps <= 0:
            raise ValueError(f"mode {self.id}: line rate must be positive")
        if self.baud_gbd <= 0:
            raise ValueError(f"mode {self.id}: baud rate must be positive")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "modulation": self.modulation.name,
            "baud_gbd": self.baud_gbd,
            "line_rate_gbps": self.line_rate_gbps,
            "snr_trx_db": self.snr_trx_db,
            "required_gsnr_db": self.required_gsnr_db,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TransmissionMode":
        return cls(
            id=d["id"],
            modulation=ModulationFormat.from_name(d["modulation"]),
            baud_gbd=float(d["baud_gbd"]),
            line_rate_gbps=float(d["line_rate_gbps"]),
            snr_trx_db=float(d["snr_trx_db"]),
            required_gsnr_db=float(d["required_gsnr_db"]),
        )


@dataclass(frozen=True)
class TrxCharacteristics:
    vendor: str
    form_factor: str
    freq_range_thz: Tuple[float, float]
    grid_ghz: float
    modes: Tuple[TransmissionMode, ...] = field(default_factory=tuple)

    def __post_init__(self):
        lo, hi = self.freq_range_thz
        if not lo < hi:
            raise ValueError(f"invalid frequency range [{lo}, {hi}] THz")
        ids = [m.id for m in self.modes]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate mode ids in catalog: {ids}")

    def mode(self, mode_id: str) -> TransmissionMode:
        for m in self.modes:
            if m.id == mode_id:
                return m
        raise KeyError(f"unknown mode id {mode_id!r}")

    def mode_ids(self) -> List[str]:
        return [m.id for m in self.modes]

    def supports_freq(self, freq_thz: float) -> bool:
        lo, hi = self.freq_range_thz
        return lo - 1e-9 <= freq_thz <= hi + 1e-9

    def on_grid(self, freq_thz: float) -> bool:
        steps = (freq_thz - GRID_ANCHOR_THZ) * 1e3 / self.grid_ghz
        return abs(steps - round(steps)) < 1e-6

    def to_dict(self) -> dict:
        return {
            "schema": CHARACTERISTICS_SCHEMA_VERSION,
            "vendor": self.vendor,
            "form_factor": self.form_factor,
            "freq_range_thz": list(self.freq_range_thz),
            "grid_ghz": self.grid_ghz,
            "modes": [m.to_dict() for m in self.modes],
        }

    def canonical_json(self) -> str:
        """Byte-stable JSON rendering (sorted keys, fixed separators)."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "TrxCharacteristics":
        version = d.get("schema", CHARACTERISTICS_SCHEMA_VERSION)
        if version != CHARACTERISTICS_SCHEMA_VERSION:
            raise ValueError(f"unsupported characteristics schema {version}")
        return cls(
            vendor=d["vendor"],
            form_factor=d["form_factor"],
            freq_range_thz=(float(d["freq_range_thz"][0]),
                            float(d["freq_range_thz"][1])),
            grid_ghz=float(d["grid_ghz"]),
            modes=tuple(TransmissionMode.from_dict(m) for m in d["modes"]),
        )


def intersect_modes(a: TrxCharacteristics,
                    b: TrxCharacteristics) -> List[TransmissionMode]:
    """Modes offered by both transceivers, keyed by mode id.

    When the two ends declare different back-to-back SNR for the same mode
    the smaller (more conservative) value is kept for the pair.
    """
    by_id: Dict[str, TransmissionMode] = {m.id: m for m in b.modes}
    common = []
    for m in a.modes:
        other = by_id.get(m.id)
        if other is None:
            continue
        if other.snr_trx_db < m.snr_trx_db:
            m = other
        common.append(m)
    return common


# Reference catalog entries used by the bundled scenarios and tests.  The
# back-to-back SNR and GSNR threshold defaults are scenario-configurable.
MODE_400G_16QAM = TransmissionMode(
    id="DP-16QAM-400G", modulation=ModulationFormat.QAM16,
    baud_gbd=64.0, line_rate_gbps=400.0,
    snr_trx_db=17.51, required_gsnr_db=10.3)

MODE_200G_QPSK = TransmissionMode(
    id="DP-QPSK-200G", modulation=ModulationFormat.QPSK,
    baud_gbd=64.0, line_rate_gbps=200.0,
    snr_trx_db=17.1, required_gsnr_db=5.5)

# Probe transceivers characterise to slightly different back-to-back SNR.
PROBE_MODE_16QAM = TransmissionMode(
    id="DP-16QAM-400G", modulation=ModulationFormat.QAM16,
    baud_gbd=64.0, line_rate_gbps=400.0,
    snr_trx_db=17.35, required_gsnr_db=10.3)

PROBE_MODE_QPSK = MODE_200G_QPSK


def default_characteristics(vendor: str) -> TrxCharacteristics:
    """Reference user-transceiver catalogs for vendors A and B.

    Both offer the same two modes; the vendors differ in tunable range and
    grid granularity, which exercises the absolute-frequency protocol rule.
    """
    if vendor == "A":
        return TrxCharacteristics(
            vendor="A", form_factor="CFP2-DCO",
            freq_range_thz=(191.3, 196.1), grid_ghz=100.0,
            modes=(MODE_400G_16QAM, MODE_200G_QPSK))
    if vendor == "B":
        return TrxCharacteristics(
            vendor="B", form_factor="CFP2-DCO",
            freq_range_thz=(191.15, 196.1), grid_ghz=50.0,
            modes=(MODE_400G_16QAM, MODE_200G_QPSK))
    raise ValueError(f"no reference catalog for vendor {vendor!r}")
