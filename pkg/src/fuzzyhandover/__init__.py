"""Service-aware fuzzy handover decisions for macrocell/femtocell networks."""
from .decision import (
    DecisionConfig,
    HandoverFactor,
    HandoverOutcome,
    Verdict,
    decide,
    decide_case1,
    decide_case2,
    handover_factor,
)
from .fuzzy import (
    FuzzyInput,
    FuzzyVariable,
    InputLevel,
    OutputCategory,
    Rule,
    RuleBase,
    defuzzify_centroid,
    fuzzify,
    infer,
    load_rulebase,
    serialize_rulebase,
    synthesize_default_rulebase,
)
from .profiles import NetworkKind, ServiceType, VariableRanges, build_variables, builtin_profiles, load_profile
from .sweep import SweepSpec, find_intersections, load_presets, run_sweep

__version__ = "0.1.0"
