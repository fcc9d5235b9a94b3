"""Per-service, per-network input ranges and the fuzzy variables built from them."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Mapping, Optional, Tuple

from .errors import InvalidRange, MissingProfile, ParseError
from .fuzzy import Direction, FuzzyVariable


class ServiceType(str, enum.Enum):
    VOICE = "voice"
    VIDEO = "video"
    DATA = "data"


class NetworkKind(str, enum.Enum):
    MACROCELL = "macro"
    FEMTOCELL = "femto"


def parse_service(token: str) -> ServiceType:
    try:
        return ServiceType(token.strip().lower())
    except ValueError:
        choices = ", ".join(s.value for s in ServiceType)
        raise ValueError(f"unknown service {token!r} (expected one of: {choices})") from None


def parse_network(token: str) -> NetworkKind:
    t = token.strip().lower()
    aliases = {"macro": NetworkKind.MACROCELL, "macrocell": NetworkKind.MACROCELL,
               "femto": NetworkKind.FEMTOCELL, "femtocell": NetworkKind.FEMTOCELL}
    if t not in aliases:
        raise ValueError(f"unknown network {token!r} (expected macro or femto)")
    return aliases[t]


@dataclass(frozen=True)
class VariableRanges:
    """Universes for the four inputs; velocity also carries its direction."""

    rssi: Tuple[float, float]
    rate: Tuple[float, float]
    velocity: Tuple[float, float]
    snir: Tuple[float, float]
    velocity_direction: Direction = Direction.ASCENDING

    def __post_init__(self):
        for name in ("rssi", "rate", "velocity", "snir"):
            lo, hi = (float(v) for v in getattr(self, name))
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
                raise InvalidRange(f"{name}: need lo < hi, got [{lo}, {hi}]")
            object.__setattr__(self, name, (lo, hi))
        object.__setattr__(self, "velocity_direction", Direction(self.velocity_direction))


ProfileTable = Mapping[Tuple[ServiceType, NetworkKind], VariableRanges]

_ASC, _DESC = Direction.ASCENDING, Direction.DESCENDING

_BUILTIN: Dict[Tuple[ServiceType, NetworkKind], VariableRanges] = {
    (ServiceType.VOICE, NetworkKind.MACROCELL): VariableRanges(
        rssi=(-90, -35), rate=(1, 4), velocity=(0, 20), snir=(8, 90), velocity_direction=_ASC),
    (ServiceType.VOICE, NetworkKind.FEMTOCELL): VariableRanges(
        rssi=(-90, -35), rate=(1, 7), velocity=(0, 20), snir=(8, 90), velocity_direction=_DESC),
    (ServiceType.VIDEO, NetworkKind.MACROCELL): VariableRanges(
        rssi=(-62.5, -7.5), rate=(3, 9), velocity=(0, 20), snir=(49, 131), velocity_direction=_ASC),
    (ServiceType.VIDEO, NetworkKind.FEMTOCELL): VariableRanges(
        rssi=(-117.5, -62.5), rate=(1, 6), velocity=(0, 20), snir=(-33, 49), velocity_direction=_DESC),
}


def builtin_profiles() -> Dict[Tuple[ServiceType, NetworkKind], VariableRanges]:
    """Voice and video ranges for both networks (data has no built-in row)."""
    return dict(_BUILTIN)


def lookup(
    service: ServiceType,
    network: NetworkKind,
    profiles: Optional[ProfileTable] = None,
) -> VariableRanges:
    table = _BUILTIN if profiles is None else profiles
    key = (ServiceType(service), NetworkKind(network))
    if key not in table:
        raise MissingProfile(
            f"no profile for {key[0].value}/{key[1].value}; supply one with a profile file"
        )
    return table[key]


@lru_cache(maxsize=64)
def build_variables(profile: VariableRanges) -> Tuple[FuzzyVariable, ...]:
    """RSSI, rate, velocity and SNIR variables with the standard partition."""
    if not isinstance(profile, VariableRanges):
        raise InvalidRange("build_variables expects a VariableRanges")
    return (
        FuzzyVariable("rssi", *profile.rssi, units="dBm"),
        FuzzyVariable("rate", *profile.rate, units="Mbps"),
        FuzzyVariable("velocity", *profile.velocity, units="km/h", direction=profile.velocity_direction),
        FuzzyVariable("snir", *profile.snir, units="dB"),
    )


# ---------------------------------------------------------------------------
# Profile-file format
# ---------------------------------------------------------------------------

_KEYS = ("rssi", "rate", "velocity", "snir")


def _number(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"not a finite number: {token!r}", lineno)
    return value


def parse_profile_fields(source: str, extra_keys=()) -> Tuple[Dict[str, tuple], Dict[str, Tuple[str, int]]]:
    """Split profile text into range fields and any other ``key = value`` lines.

    Returns ``(ranges, extras)`` where ``extras`` maps a key from
    ``extra_keys`` to its raw value and line number.
    """
    ranges: Dict[str, tuple] = {}
    extras: Dict[str, Tuple[str, int]] = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if key in ranges or key in extras:
            raise ParseError(f"duplicate key {key!r}", lineno)
        if key in extra_keys:
            extras[key] = (value, lineno)
            continue
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", lineno)
        tokens = value.split()
        if key == "velocity":
            if len(tokens) != 3:
                raise ParseError("velocity needs 'lo hi asc|desc'", lineno)
            try:
                direction = Direction(tokens[2].lower())
            except ValueError:
                raise ParseError(f"velocity direction must be asc or desc, got {tokens[2]!r}", lineno) from None
            ranges[key] = (_number(tokens[0], lineno), _number(tokens[1], lineno), direction)
        else:
            if len(tokens) != 2:
                raise ParseError(f"{key} needs 'lo hi'", lineno)
            ranges[key] = (_number(tokens[0], lineno), _number(tokens[1], lineno))
    return ranges, extras


def ranges_from_fields(fields: Mapping[str, tuple]) -> VariableRanges:
    missing = [k for k in _KEYS if k not in fields]
    if missing:
        raise ParseError(f"missing line(s): {', '.join(missing)}")
    vel = fields["velocity"]
    return VariableRanges(
        rssi=fields["rssi"],
        rate=fields["rate"],
        velocity=vel[:2],
        snir=fields["snir"],
        velocity_direction=vel[2],
    )


def load_profile(source: str) -> VariableRanges:
    """Parse profile-file text (``rssi = lo hi`` ... ``velocity = lo hi asc|desc``)."""
    fields, _ = parse_profile_fields(source)
    return ranges_from_fields(fields)


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize_profile(profile: VariableRanges) -> str:
    return (
        f"rssi = {_fmt(profile.rssi[0])} {_fmt(profile.rssi[1])}\n"
        f"rate = {_fmt(profile.rate[0])} {_fmt(profile.rate[1])}\n"
        f"velocity = {_fmt(profile.velocity[0])} {_fmt(profile.velocity[1])} {profile.velocity_direction.value}\n"
        f"snir = {_fmt(profile.snir[0])} {_fmt(profile.snir[1])}\n"
    )
