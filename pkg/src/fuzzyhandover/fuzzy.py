"""
Mamdani fuzzy inference core.

Inputs are partitioned into three triangular levels (Low, Medium, High); the
output, the handover factor on [0, 1], is split into six Gaussian categories.
Rules combine antecedents with AND = min, implication clips the consequent at
the rule strength, clipped sets are aggregated by max and the result is
defuzzified with a discrete centroid.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DuplicateAntecedent,
    IncompleteRuleBase,
    ParseError,
    ResolutionTooCoarse,
    ZeroMass,
)

DEFAULT_RESOLUTION = 1001
OUTPUT_SIGMA = 0.10


class InputLevel(enum.IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return self.name.lower()


class OutputCategory(enum.IntEnum):
    LOWER = 0
    LOW = 1
    LOWER_MEDIUM = 2
    HIGHER_MEDIUM = 3
    HIGH = 4
    HIGHER = 5

    @property
    def label(self) -> str:
        return self.name.lower()


class Direction(str, enum.Enum):
    ASCENDING = "asc"
    DESCENDING = "desc"


# ---------------------------------------------------------------------------
# Membership functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Triangular:
    """Triangular hat with feet ``a``, ``c`` and peak ``b``.

    ``a == b`` or ``b == c`` gives a shoulder whose flat side sits at the peak.
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c) or not self.a < self.c:
            raise ValueError(f"invalid triangle ({self.a}, {self.b}, {self.c})")

    @property
    def peak(self) -> float:
        return self.b

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, b, c = self.a, self.b, self.c
        with np.errstate(divide="ignore", invalid="ignore"):
            rise = (x - a) / (b - a) if b > a else np.ones_like(x)
            fall = (c - x) / (c - b) if c > b else np.ones_like(x)
        out = np.where(x <= b, rise, fall)
        out = np.where((x < a) | (x > c), 0.0, out)
        out = np.where(x == b, 1.0, out)
        out = np.clip(out, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Gaussian:
    center: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"gaussian sigma must be positive, got {self.sigma}")

    @property
    def peak(self) -> float:
        return self.center

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.exp(-((x - self.center) ** 2) / (2.0 * self.sigma**2))
        return float(out) if out.ndim == 0 else out


MembershipFunction = Union[Triangular, Gaussian]


def membership_degree(mf: MembershipFunction, x: float) -> float:
    """Degree of ``x`` in ``mf``, always within [0, 1]."""
    return float(mf(float(x)))


OUTPUT_MFS: Dict[OutputCategory, Gaussian] = {
    cat: Gaussian(center=0.2 * cat.value, sigma=OUTPUT_SIGMA) for cat in OutputCategory
}


# ---------------------------------------------------------------------------
# Linguistic variables
# ---------------------------------------------------------------------------


def standard_partition(lo: float, hi: float) -> Dict[InputLevel, Triangular]:
    """Half-overlapping Low/Medium/High triangles over ``[lo, hi]``."""
    mid = (lo + hi) / 2.0
    return {
        InputLevel.LOW: Triangular(lo, lo, mid),
        InputLevel.MEDIUM: Triangular(lo, mid, hi),
        InputLevel.HIGH: Triangular(mid, hi, hi),
    }


@dataclass(frozen=True)
class FuzzyVariable:
    """A crisp universe split into the three input levels.

    Partitions are laid out on the ascending axis. A descending variable
    mirrors its input before evaluation, so its High level peaks at ``lo``.
    """

    name: str
    lo: float
    hi: float
    units: str = ""
    direction: Direction = Direction.ASCENDING
    partitions: Mapping[InputLevel, MembershipFunction] = field(default=None, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValueError(f"{self.name}: universe needs lo < hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "direction", Direction(self.direction))
        if self.partitions is None:
            object.__setattr__(self, "partitions", standard_partition(self.lo, self.hi))
        if set(self.partitions) != set(InputLevel):
            raise ValueError(f"{self.name}: partitions must cover Low, Medium and High")
        for level, mf in self.partitions.items():
            if not self.lo <= mf.peak <= self.hi:
                raise ValueError(f"{self.name}: {level.label} peak outside universe")

    @property
    def descending(self) -> bool:
        return self.direction is Direction.DESCENDING

    def clamp(self, x: float) -> float:
        return min(max(float(x), self.lo), self.hi)

    def _axis(self, x: float) -> float:
        x = self.clamp(x)
        return self.lo + self.hi - x if self.descending else x

    def peak(self, level: InputLevel) -> float:
        """Crisp value at which ``level`` reaches degree 1."""
        p = self.partitions[InputLevel(level)].peak
        return self.lo + self.hi - p if self.descending else p

    def fuzzify(self, x: float) -> Dict[InputLevel, float]:
        return fuzzify(self, x)


def fuzzify(var: FuzzyVariable, x: float) -> Dict[InputLevel, float]:
    """Degree of each level at ``x`` (clamped into the universe first)."""
    if not math.isfinite(x):
        raise ValueError(f"{var.name}: input must be finite, got {x}")
    u = var._axis(x)
    return {level: membership_degree(mf, u) for level, mf in var.partitions.items()}


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

Antecedent = Tuple[InputLevel, InputLevel, InputLevel, InputLevel]
INPUT_ORDER = ("rssi", "rate", "velocity", "snir")
ALL_ANTECEDENTS: Tuple[Antecedent, ...] = tuple(
    tuple(a) for a in itertools.product(InputLevel, repeat=4)
)


@dataclass(frozen=True)
class Rule:
    antecedent: Antecedent
    consequent: OutputCategory

    def __post_init__(self):
        ante = tuple(InputLevel(a) for a in self.antecedent)
        if len(ante) != 4:
            raise ValueError("a rule needs exactly four antecedent levels")
        object.__setattr__(self, "antecedent", ante)
        object.__setattr__(self, "consequent", OutputCategory(self.consequent))

    @property
    def number(self) -> int:
        """1-based position in the RSSI-major enumeration of {L,M,H}^4."""
        r, d, v, s = self.antecedent
        return 27 * r + 9 * d + 3 * v + s + 1


class RuleBase:
    """Complete, immutable 81-entry table from antecedents to categories."""

    __slots__ = ("_table", "_array")

    def __init__(self, rules: Iterable[Rule]):
        table: Dict[Antecedent, OutputCategory] = {}
        for rule in rules:
            if rule.antecedent in table:
                raise DuplicateAntecedent(f"duplicate antecedent {_fmt_antecedent(rule.antecedent)}")
            table[rule.antecedent] = rule.consequent
        if len(table) != len(ALL_ANTECEDENTS):
            raise IncompleteRuleBase(f"incomplete: {len(table)}/{len(ALL_ANTECEDENTS)}")
        arr = np.empty((3, 3, 3, 3), dtype=np.int8)
        for ante, cons in table.items():
            arr[ante] = cons
        arr.setflags(write=False)
        self._table = {a: table[a] for a in ALL_ANTECEDENTS}
        self._array = arr

    def __len__(self) -> int:
        return len(self._table)

    def __iter__(self) -> Iterator[Rule]:
        return (Rule(a, c) for a, c in self._table.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, RuleBase) and self._table == other._table

    def __hash__(self):
        return hash(tuple(self._table.values()))

    def __repr__(self):
        return f"RuleBase({len(self)} rules)"

    def consequent(self, antecedent: Sequence[int]) -> OutputCategory:
        return self._table[tuple(InputLevel(a) for a in antecedent)]

    @property
    def table(self) -> np.ndarray:
        """Read-only (3, 3, 3, 3) array of consequent indices."""
        return self._array


# score = rssi + rate + velocity + 2 * snir, in [0, 10]
_SCORE_TO_CATEGORY = (
    OutputCategory.LOWER,
    OutputCategory.LOW,
    OutputCategory.LOW,
    OutputCategory.LOWER_MEDIUM,
    OutputCategory.LOWER_MEDIUM,
    OutputCategory.HIGHER_MEDIUM,
    OutputCategory.HIGH,
    OutputCategory.HIGH,
    OutputCategory.HIGH,
    OutputCategory.HIGHER,
    OutputCategory.HIGHER,
)

PUBLISHED_RULES: Dict[int, Rule] = {
    1: Rule((InputLevel.LOW,) * 4, OutputCategory.LOWER),
    25: Rule((InputLevel.LOW, InputLevel.HIGH, InputLevel.HIGH, InputLevel.LOW), OutputCategory.LOWER_MEDIUM),
    50: Rule((InputLevel.MEDIUM, InputLevel.HIGH, InputLevel.MEDIUM, InputLevel.MEDIUM), OutputCategory.HIGH),
    81: Rule((InputLevel.HIGH,) * 4, OutputCategory.HIGHER),
}


def synthesize_default_rulebase() -> RuleBase:
    """Weighted-score rule table with SNIR counted twice."""
    rules = []
    for ante in ALL_ANTECEDENTS:
        r, d, v, s = ante
        rules.append(Rule(ante, _SCORE_TO_CATEGORY[r + d + v + 2 * s]))
    return RuleBase(rules)


def rule_strength(rule: Rule, degrees: Sequence[Mapping[InputLevel, float]]) -> float:
    """AND of the antecedent degrees (min)."""
    if len(degrees) != 4:
        raise ValueError("degrees must hold one level map per input variable")
    return min(float(deg[level]) for deg, level in zip(degrees, rule.antecedent))


def monotonicity_violations(rb: RuleBase) -> List[Tuple[Antecedent, int, OutputCategory, OutputCategory]]:
    """Single-level raises that lower the consequent.

    Each entry is ``(antecedent, input_slot, before, after)``.
    """
    bad = []
    for ante in ALL_ANTECEDENTS:
        before = rb.consequent(ante)
        for slot in range(4):
            if ante[slot] == InputLevel.HIGH:
                continue
            raised = list(ante)
            raised[slot] = InputLevel(ante[slot] + 1)
            after = rb.consequent(raised)
            if after < before:
                bad.append((ante, slot, before, after))
    return bad


# ---------------------------------------------------------------------------
# Rule-file format
# ---------------------------------------------------------------------------

_LEVEL_TOKENS = {lvl.label: lvl for lvl in InputLevel}
_CATEGORY_TOKENS = {cat.label: cat for cat in OutputCategory}


def _fmt_antecedent(ante: Sequence[InputLevel]) -> str:
    return ",".join(InputLevel(a).label for a in ante)


def parse_rule_lines(source: str) -> List[Tuple[int, Rule]]:
    """Parse rule-file text into ``(lineno, rule)`` pairs without checking completeness."""
    out = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count("->") != 1:
            raise ParseError(f"expected 'RSSI,RATE,VEL,SNIR -> CATEGORY', got {raw.strip()!r}", lineno)
        lhs, rhs = (part.strip() for part in line.split("->"))
        tokens = [t.strip().lower() for t in lhs.split(",")]
        if len(tokens) != 4:
            raise ParseError(f"expected four antecedent levels, got {len(tokens)}", lineno)
        levels = []
        for tok in tokens:
            if tok not in _LEVEL_TOKENS:
                raise ParseError(f"unknown level {tok!r}", lineno)
            levels.append(_LEVEL_TOKENS[tok])
        cat = rhs.lower()
        if cat not in _CATEGORY_TOKENS:
            raise ParseError(f"unknown category {rhs!r}", lineno)
        out.append((lineno, Rule(tuple(levels), _CATEGORY_TOKENS[cat])))
    return out


def load_rulebase(source: str) -> RuleBase:
    """Parse rule-file text into a validated :class:`RuleBase`."""
    seen: Dict[Antecedent, int] = {}
    rules = []
    for lineno, rule in parse_rule_lines(source):
        if rule.antecedent in seen:
            raise DuplicateAntecedent(
                f"line {lineno}: antecedent {_fmt_antecedent(rule.antecedent)} "
                f"already defined on line {seen[rule.antecedent]}"
            )
        seen[rule.antecedent] = lineno
        rules.append(rule)
    return RuleBase(rules)


def serialize_rulebase(rb: RuleBase) -> str:
    lines = ["# RSSI,RATE,VEL,SNIR -> CATEGORY"]
    for rule in rb:
        lines.append(f"{_fmt_antecedent(rule.antecedent)} -> {rule.consequent.label}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Inference
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FuzzyInput:
    rssi: float
    data_rate: float
    velocity: float
    snir: float

    def __post_init__(self):
        for name in ("rssi", "data_rate", "velocity", "snir"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.rssi, self.data_rate, self.velocity, self.snir)


@dataclass(frozen=True)
class AggregatedOutput:
    """Aggregated output set sampled uniformly on [0, 1]."""

    x: np.ndarray
    mu: np.ndarray

    def __iter__(self):
        return iter(zip(self.x.tolist(), self.mu.tolist()))

    @property
    def max_degree(self) -> float:
        return float(self.mu.max())


_GRID_CACHE: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}


def output_grid(resolution: int = DEFAULT_RESOLUTION) -> Tuple[np.ndarray, np.ndarray]:
    """Sample points and the (6, resolution) matrix of output MF values."""
    if resolution < 3:
        raise ResolutionTooCoarse(f"resolution must be at least 3 samples, got {resolution}")
    if resolution not in _GRID_CACHE:
        xs = np.linspace(0.0, 1.0, resolution)
        mfs = np.vstack([OUTPUT_MFS[cat](xs) for cat in OutputCategory])
        xs.setflags(write=False)
        mfs.setflags(write=False)
        _GRID_CACHE[resolution] = (xs, mfs)
    return _GRID_CACHE[resolution]


def category_strengths(rb: RuleBase, degrees: Sequence[Mapping[InputLevel, float]]) -> np.ndarray:
    """Strongest firing rule per output category, shape (6,)."""
    d = [np.array([deg[lvl] for lvl in InputLevel], dtype=float) for deg in degrees]
    fire = np.minimum.outer(np.minimum.outer(d[0], d[1]), np.minimum.outer(d[2], d[3]))
    strengths = np.zeros(len(OutputCategory))
    np.maximum.at(strengths, rb.table.ravel(), fire.ravel())
    return strengths


def infer(
    rb: RuleBase,
    inp: FuzzyInput,
    variables: Sequence[FuzzyVariable],
    resolution: int = DEFAULT_RESOLUTION,
) -> AggregatedOutput:
    """Fuzzify ``inp``, fire every rule and aggregate the clipped consequents.

    Clipping each rule and taking the pointwise max equals clipping each
    category once at its strongest rule, which is what is computed here.
    """
    if len(variables) != 4:
        raise ValueError("infer needs the four input variables (rssi, rate, velocity, snir)")
    xs, mfs = output_grid(resolution)
    degrees = [fuzzify(var, x) for var, x in zip(variables, inp.as_tuple())]
    strengths = category_strengths(rb, degrees)
    mu = np.minimum(strengths[:, None], mfs).max(axis=0)
    return AggregatedOutput(x=xs, mu=mu)


def defuzzify_centroid(agg: AggregatedOutput) -> float:
    """Discrete centroid of the aggregated set."""
    mass = float(np.sum(agg.mu))
    if not mass > 0.0:
        raise ZeroMass("aggregated output has zero mass")
    value = float(np.dot(agg.x, agg.mu) / mass)
    return min(max(value, 0.0), 1.0)


def evaluate(
    rb: RuleBase,
    inp: FuzzyInput,
    variables: Sequence[FuzzyVariable],
    resolution: int = DEFAULT_RESOLUTION,
) -> float:
    """Crisp handover factor for ``inp``."""
    return defuzzify_centroid(infer(rb, inp, variables, resolution))


def validate_rule_text(source: str) -> List[str]:
    """Problems found in rule-file text, one message per finding.

    Unlike :func:`load_rulebase` this keeps going after the first problem so
    every malformed line, duplicate, gap and monotonicity break is listed.
    """
    problems: List[str] = []
    table: Dict[Antecedent, OutputCategory] = {}
    first_seen: Dict[Antecedent, int] = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        try:
            parsed = parse_rule_lines(raw)
        except ParseError as exc:
            problems.append(f"line {lineno}: {str(exc).split(': ', 1)[1]}")
            continue
        for _, rule in parsed:
            if rule.antecedent in first_seen:
                problems.append(
                    f"line {lineno}: duplicate antecedent {_fmt_antecedent(rule.antecedent)} "
                    f"(first on line {first_seen[rule.antecedent]})"
                )
                continue
            first_seen[rule.antecedent] = lineno
            table[rule.antecedent] = rule.consequent

    if len(table) != len(ALL_ANTECEDENTS):
        problems.append(f"incomplete: {len(table)}/{len(ALL_ANTECEDENTS)}")
        missing = [a for a in ALL_ANTECEDENTS if a not in table]
        for ante in missing[:10]:
            problems.append(f"missing antecedent {_fmt_antecedent(ante)}")
        if len(missing) > 10:
            problems.append(f"... and {len(missing) - 10} more missing")

    for number, rule in PUBLISHED_RULES.items():
        got = table.get(rule.antecedent)
        if got is not None and got != rule.consequent:
            problems.append(
                f"published rule {number} mismatch: {_fmt_antecedent(rule.antecedent)} "
                f"should be {rule.consequent.label}, got {got.label}"
            )

    if len(table) == len(ALL_ANTECEDENTS):
        rb = RuleBase(Rule(a, c) for a, c in table.items())
        for ante, slot, before, after in monotonicity_violations(rb):
            problems.append(
                f"not monotone: raising {INPUT_ORDER[slot]} at {_fmt_antecedent(ante)} "
                f"drops {before.label} to {after.label}"
            )
    return problems
