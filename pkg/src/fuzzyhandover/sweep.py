"""Velocity sweeps of the femtocell and macrocell handover factors.

A sweep holds RSSI, data rate and SNIR fixed for each network (a condition
preset), walks the user velocity over a range and records both factors,
their crossings and the network preferred between crossings.
"""
from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from .decision import DecisionConfig, Verdict, decide_case2, default_rulebase
from .errors import InvalidSpec, ParseError
from .fuzzy import FuzzyInput, FuzzyVariable, InputLevel, RuleBase, evaluate
from .profiles import NetworkKind, ProfileTable, ServiceType, build_variables, lookup


class Sample(NamedTuple):
    velocity: float
    gamma_f: float
    gamma_m: float


class Segment(NamedTuple):
    start: float
    end: float
    network: NetworkKind


_FIXED = ("rssi", "rate", "snir")

# mirrored descending axes leave ~1e-16 noise where both curves coincide
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class ConditionPreset:
    """Level anchors for the fixed inputs of each network.

    ``femto`` and ``macro`` map ``rssi``/``rate``/``snir`` to an
    :class:`InputLevel`; each resolves to that level's peak in the
    variable's universe.
    """

    name: str
    femto: Mapping[str, InputLevel]
    macro: Mapping[str, InputLevel]
    description: str = ""
    varied: Mapping[str, str] = field(default_factory=dict)
    reference_intersections: Mapping[str, Tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for side in ("femto", "macro"):
            levels = getattr(self, side)
            if set(levels) != set(_FIXED):
                raise InvalidSpec(f"preset {self.name}: {side} needs exactly rssi, rate and snir")
            object.__setattr__(self, side, {k: _level(v) for k, v in levels.items()})

    def with_levels(self, network: NetworkKind, **levels) -> "ConditionPreset":
        """Copy with some anchors of one network replaced."""
        side = "femto" if NetworkKind(network) is NetworkKind.FEMTOCELL else "macro"
        current = dict(getattr(self, side))
        for key, level in levels.items():
            if key not in _FIXED:
                raise InvalidSpec(f"cannot pin {key!r}; only rssi, rate and snir are fixed")
            current[key] = _level(level)
        kwargs = {"femto": self.femto, "macro": self.macro, side: current}
        return ConditionPreset(self.name, description=self.description, varied=self.varied,
                               reference_intersections=self.reference_intersections, **kwargs)

    def resolve(self, network: NetworkKind, variables: Sequence[FuzzyVariable]) -> Dict[str, float]:
        """Crisp rssi/rate/snir values for ``network``."""
        levels = self.femto if NetworkKind(network) is NetworkKind.FEMTOCELL else self.macro
        rssi_var, rate_var, _, snir_var = variables
        return {
            "rssi": rssi_var.peak(levels["rssi"]),
            "rate": rate_var.peak(levels["rate"]),
            "snir": snir_var.peak(levels["snir"]),
        }


def _level(value) -> InputLevel:
    if isinstance(value, str):
        try:
            return InputLevel[value.strip().upper()]
        except KeyError:
            raise InvalidSpec(f"unknown level {value!r}") from None
    return InputLevel(value)


def load_presets() -> Dict[str, ConditionPreset]:
    """The checked-in condition presets behind the velocity figures."""
    text = resources.files(__package__).joinpath("data/presets.json").read_text(encoding="utf-8")
    raw = json.loads(text)
    return {
        name: ConditionPreset(
            name=name,
            femto=entry["femto"],
            macro=entry["macro"],
            description=entry.get("description", ""),
            varied=entry.get("varied", {}),
            reference_intersections={k: tuple(v) for k, v in entry.get("reference_intersections", {}).items()},
        )
        for name, entry in raw.items()
    }


@dataclass(frozen=True)
class SweepSpec:
    service: ServiceType
    preset: ConditionPreset
    v_min: float = 0.0
    v_max: float = 20.0
    step: float = 0.1
    rulebase: Optional[RuleBase] = None
    config: DecisionConfig = DecisionConfig()
    profiles: Optional[ProfileTable] = None

    def __post_init__(self):
        if not (math.isfinite(self.v_min) and math.isfinite(self.v_max)) or not self.v_min < self.v_max:
            raise InvalidSpec(f"need v_min < v_max, got [{self.v_min}, {self.v_max}]")
        if not self.step > 0:
            raise InvalidSpec(f"step must be positive, got {self.step}")
        if (self.v_max - self.v_min) / self.step < 2:
            raise InvalidSpec("sweep must contain at least three samples")

    def velocities(self) -> np.ndarray:
        n = int(math.floor((self.v_max - self.v_min) / self.step + 1e-9))
        v = self.v_min + self.step * np.arange(n + 1)
        if self.v_max - v[-1] > 1e-9 * max(1.0, abs(self.v_max)):
            v = np.append(v, self.v_max)
        v[-1] = min(v[-1], self.v_max)
        return v


@dataclass(frozen=True)
class SweepResult:
    samples: Tuple[Sample, ...]
    intersections: Tuple[float, ...]
    segments: Tuple[Segment, ...]


def find_intersections(samples: Sequence[Sequence[float]], atol: float = ZERO_TOL) -> List[float]:
    """Velocities where ``gamma_f - gamma_m`` changes sign.

    Crossings between samples are located by linear interpolation. A run of
    zeros is reported at each of its ends that borders a nonzero sample, so
    an isolated zero (tangent touch) is reported once. Differences within
    ``atol`` of zero count as zero.
    """
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    v = [float(s[0]) for s in samples]
    d = [float(s[1]) - float(s[2]) for s in samples]
    d = [0.0 if abs(x) <= atol else x for x in d]
    n = len(d)
    out: List[float] = []
    i = 0
    while i < n:
        if d[i] == 0.0:
            j = i
            while j + 1 < n and d[j + 1] == 0.0:
                j += 1
            if i > 0:
                out.append(v[i])
            if j < n - 1 and (j != i or i == 0):
                out.append(v[j])
            i = j + 1
            continue
        if i + 1 < n and d[i + 1] != 0.0 and (d[i] > 0) != (d[i + 1] > 0):
            out.append(v[i] + (v[i + 1] - v[i]) * d[i] / (d[i] - d[i + 1]))
        i += 1
    return out


def preferred_segments(
    samples: Sequence[Sequence[float]],
    intersections: Sequence[float],
    cfg: DecisionConfig = DecisionConfig(),
) -> List[Segment]:
    """Split the sweep at the intersections; label each piece with the case-2 verdict at its midpoint."""
    v = np.array([float(s[0]) for s in samples])
    gf = np.array([float(s[1]) for s in samples])
    gm = np.array([float(s[2]) for s in samples])
    lo, hi = float(v[0]), float(v[-1])
    bounds = sorted({lo, hi, *(float(x) for x in intersections if lo < x < hi)})
    segments = []
    for a, b in zip(bounds, bounds[1:]):
        mid = 0.5 * (a + b)
        f = float(np.interp(mid, v, gf))
        m = float(np.interp(mid, v, gm))
        verdict = decide_case2(f, m, cfg).verdict
        network = NetworkKind.FEMTOCELL if verdict is Verdict.HANDOVER_TO_FEMTO else NetworkKind.MACROCELL
        segments.append(Segment(a, b, network))
    return segments


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate both handover factors across the velocity range of ``spec``.

    Raises:
        MissingProfile: the service lacks a femtocell or macrocell profile.
    """
    rb = spec.rulebase or default_rulebase()
    fvars = build_variables(lookup(spec.service, NetworkKind.FEMTOCELL, spec.profiles))
    mvars = build_variables(lookup(spec.service, NetworkKind.MACROCELL, spec.profiles))
    fixed_f = spec.preset.resolve(NetworkKind.FEMTOCELL, fvars)
    fixed_m = spec.preset.resolve(NetworkKind.MACROCELL, mvars)

    samples = []
    for v in spec.velocities():
        v = float(v)
        gf = evaluate(rb, FuzzyInput(fixed_f["rssi"], fixed_f["rate"], v, fixed_f["snir"]), fvars)
        gm = evaluate(rb, FuzzyInput(fixed_m["rssi"], fixed_m["rate"], v, fixed_m["snir"]), mvars)
        samples.append(Sample(v, gf, gm))

    crossings = find_intersections(samples)
    segments = preferred_segments(samples, crossings, spec.config)
    return SweepResult(tuple(samples), tuple(crossings), tuple(segments))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

CSV_HEADER = "velocity_kmh,gamma_femto,gamma_macro"


def format_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for s in result.samples:
        buf.write(f"{s.velocity:.6f},{s.gamma_f:.6f},{s.gamma_m:.6f}\n")
    if result.intersections:
        buf.write("# intersections: " + ",".join(f"{x:.6f}" for x in result.intersections) + "\n")
    else:
        buf.write("# intersections: none\n")
    return buf.getvalue()


def export_csv(result: SweepResult, destination: Union[str, os.PathLike, TextIO]) -> None:
    """Write ``result`` to a path or an open text stream."""
    text = format_csv(result)
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def parse_csv(text: str) -> Tuple[List[Sample], List[float]]:
    """Read back samples and intersections written by :func:`export_csv`."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ParseError("missing sweep CSV header", 1)
    samples: List[Sample] = []
    crossings: List[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("intersections:"):
                rest = body.split(":", 1)[1].strip()
                if rest != "none":
                    crossings.extend(float(x) for x in rest.split(","))
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected three columns, got {len(parts)}", lineno)
        try:
            samples.append(Sample(*(float(p) for p in parts)))
        except ValueError:
            raise ParseError(f"non-numeric row {line!r}", lineno) from None
    return samples, crossings
