"""Handover factors and the two decision flows.

Case 1: the mobile is served by a macrocell and may move to a femtocell.
Case 2: the mobile is served by a femtocell and picks between another
femtocell and the macrocell.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from .fuzzy import FuzzyInput, RuleBase, evaluate, synthesize_default_rulebase
from .profiles import NetworkKind, ProfileTable, ServiceType, build_variables, lookup

DEFAULT_GAMMA = 0.6
DEFAULT_K = 1.0


class Verdict(str, enum.Enum):
    HANDOVER_TO_FEMTO = "HandoverToFemto"
    HANDOVER_TO_MACRO = "HandoverToMacro"
    STAY_IN_MACRO = "StayInMacro"


@dataclass(frozen=True)
class DecisionConfig:
    gamma_threshold: float = DEFAULT_GAMMA
    k_weight: float = DEFAULT_K

    def __post_init__(self):
        if not 0.0 <= self.gamma_threshold <= 1.0:
            raise ValueError(f"gamma threshold must lie in [0, 1], got {self.gamma_threshold}")
        if not self.k_weight > 0.0:
            raise ValueError(f"K must be positive, got {self.k_weight}")


@dataclass(frozen=True)
class HandoverFactor:
    value: float
    target: NetworkKind

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"handover factor must lie in [0, 1], got {self.value}")
        object.__setattr__(self, "target", NetworkKind(self.target))


@dataclass(frozen=True)
class HandoverOutcome:
    verdict: Verdict
    gamma_f: float
    gamma_m: float


Factor = Union[HandoverFactor, float]

_default_rb: Optional[RuleBase] = None


def default_rulebase() -> RuleBase:
    global _default_rb
    if _default_rb is None:
        _default_rb = synthesize_default_rulebase()
    return _default_rb


def handover_factor(
    service: ServiceType,
    target: NetworkKind,
    inp: FuzzyInput,
    rb: Optional[RuleBase] = None,
    profiles: Optional[ProfileTable] = None,
) -> HandoverFactor:
    """Crisp handover factor of ``target`` for the given service and measurements.

    Raises:
        MissingProfile: no ranges are known for ``(service, target)``.
    """
    variables = build_variables(lookup(service, target, profiles))
    value = evaluate(rb or default_rulebase(), inp, variables)
    return HandoverFactor(value, NetworkKind(target))


def _value(g: Factor, expected: NetworkKind) -> float:
    if isinstance(g, HandoverFactor):
        if g.target is not expected:
            raise ValueError(f"expected a {expected.value} handover factor, got {g.target.value}")
        return g.value
    return float(g)


def decide_case1(gamma_f: Factor, gamma_m: Factor, cfg: DecisionConfig = DecisionConfig()) -> HandoverOutcome:
    """Mobile in the macrocell: move to the femtocell or stay."""
    f = _value(gamma_f, NetworkKind.FEMTOCELL)
    m = _value(gamma_m, NetworkKind.MACROCELL)
    if f >= cfg.gamma_threshold or f >= m:
        verdict = Verdict.HANDOVER_TO_FEMTO
    else:
        verdict = Verdict.STAY_IN_MACRO
    return HandoverOutcome(verdict, f, m)


def decide_case2(gamma_f: Factor, gamma_m: Factor, cfg: DecisionConfig = DecisionConfig()) -> HandoverOutcome:
    """Mobile in a femtocell: target femtocell unless the macro factor beats K * gamma_f."""
    f = _value(gamma_f, NetworkKind.FEMTOCELL)
    m = _value(gamma_m, NetworkKind.MACROCELL)
    if m <= f or cfg.k_weight * f >= m:
        verdict = Verdict.HANDOVER_TO_FEMTO
    else:
        verdict = Verdict.HANDOVER_TO_MACRO
    return HandoverOutcome(verdict, f, m)


def decide(
    case: int,
    service: ServiceType,
    femto: FuzzyInput,
    macro: FuzzyInput,
    cfg: DecisionConfig = DecisionConfig(),
    rb: Optional[RuleBase] = None,
    profiles: Optional[ProfileTable] = None,
) -> HandoverOutcome:
    """Compute both factors from measurements and run the case-1 or case-2 flow."""
    if case not in (1, 2):
        raise ValueError(f"case must be 1 or 2, got {case}")
    gf = handover_factor(service, NetworkKind.FEMTOCELL, femto, rb, profiles)
    gm = handover_factor(service, NetworkKind.MACROCELL, macro, rb, profiles)
    flow = decide_case1 if case == 1 else decide_case2
    return flow(gf, gm, cfg)
