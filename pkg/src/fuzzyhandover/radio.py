"""
Propagation and link-quality formulas for the macrocell/femtocell network.

Everything below works in the dB domain; use :func:`db_to_linear` and
:func:`linear_to_db` at the boundaries where linear powers have to be summed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import NonPositiveInput, NonPositiveSignal, ZeroDenominator

DEFAULT_FEMTO_EXPONENT = 28.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(ratio: float) -> float:
    return 10.0 * math.log10(ratio)


def dbm_to_mw(dbm: float) -> float:
    return db_to_linear(dbm)


def mw_to_dbm(mw: float) -> float:
    return linear_to_db(mw)


def _require_positive(**values):
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise NonPositiveInput(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class MacroLink:
    """Macrocell link. Frequency in MHz, heights in m, distance in km."""

    fc_m: float
    hb: float
    hm: float
    d: float
    lsh: float = 0.0
    pt_dbm: float = 46.0


@dataclass(frozen=True)
class FemtoLink:
    """Femtocell link. Frequency in MHz, distance in m."""

    fc_f: float
    d1: float
    n_exp: float = DEFAULT_FEMTO_EXPONENT
    pt_dbm: float = 20.0


@dataclass(frozen=True)
class InterferenceField:
    """Linear powers in mW seen by the mobile."""

    s_f0: float
    femto_interferers: Sequence[float] = field(default_factory=tuple)
    macro_interferers: Sequence[float] = field(default_factory=tuple)
    noise: float = 0.0


@dataclass(frozen=True)
class ChannelAllocation:
    bandwidth: float  # Hz


def hata_correction(fc_m: float, hm: float) -> float:
    """Mobile antenna height correction a(hm) in dB."""
    _require_positive(fc_m=fc_m, hm=hm)
    lf = math.log10(fc_m)
    return 1.1 * (lf - 0.7) * hm - (1.56 * lf - 0.8)


def macro_path_loss(link: MacroLink) -> float:
    """Okumura-Hata urban path loss in dB, plus the shadowing offset."""
    _require_positive(fc_m=link.fc_m, hb=link.hb, hm=link.hm, d=link.d)
    lf = math.log10(link.fc_m)
    lhb = math.log10(link.hb)
    return (
        69.55
        + 26.16 * lf
        - 13.82 * lhb
        - hata_correction(link.fc_m, link.hm)
        + (44.9 - 6.55 * lhb) * math.log10(link.d)
        + link.lsh
    )


def femto_path_loss(link: FemtoLink) -> float:
    """Indoor femtocell path loss in dB."""
    _require_positive(fc_f=link.fc_f, d1=link.d1, n_exp=link.n_exp)
    return 20.0 * math.log10(link.fc_f) + link.n_exp * math.log10(link.d1) - 28.0


def received_power_dbm(pt_dbm: float, loss_db: float) -> float:
    """RSSI in dBm; the dB form of P_R = P_T * 10^(-L/10)."""
    return pt_dbm - loss_db


def snir(fld: InterferenceField) -> float:
    """Signal to interference-plus-noise ratio in dB."""
    if not fld.s_f0 > 0:
        raise NonPositiveSignal(f"signal power must be positive, got {fld.s_f0}")
    powers = [*fld.femto_interferers, *fld.macro_interferers, fld.noise]
    if any(p < 0 for p in powers):
        raise NonPositiveInput("interferer and noise powers must be non-negative")
    denominator = math.fsum(powers)
    if not denominator > 0:
        raise ZeroDenominator("noise plus interference is zero")
    return linear_to_db(fld.s_f0 / denominator)


def channel_capacity(alloc: ChannelAllocation, snir_db: float) -> float:
    """Shannon capacity in bit/s for the allocated bandwidth."""
    _require_positive(bandwidth=alloc.bandwidth)
    return alloc.bandwidth * math.log2(1.0 + db_to_linear(snir_db))
