import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzyhandover.errors import DuplicateAntecedent, IncompleteRuleBase, ParseError, ResolutionTooCoarse, ZeroMass
from fuzzyhandover.fuzzy import (
    ALL_ANTECEDENTS,
    OUTPUT_MFS,
    PUBLISHED_RULES,
    AggregatedOutput,
    FuzzyInput,
    FuzzyVariable,
    Gaussian,
    InputLevel,
    OutputCategory,
    Rule,
    RuleBase,
    Triangular,
    defuzzify_centroid,
    evaluate,
    fuzzify,
    infer,
    load_rulebase,
    membership_degree,
    monotonicity_violations,
    output_grid,
    rule_strength,
    serialize_rulebase,
    synthesize_default_rulebase,
    validate_rule_text,
)
from fuzzyhandover.profiles import build_variables, builtin_profiles

from oracles import truncated_gaussian_centroid

L, M, H = InputLevel.LOW, InputLevel.MEDIUM, InputLevel.HIGH


@pytest.fixture(scope="module")
def rb():
    return synthesize_default_rulebase()


# -- membership functions ---------------------------------------------------


@pytest.mark.parametrize(
    "mf, x, expected",
    [
        (Triangular(0, 5, 10), 5, 1.0),
        (Triangular(0, 5, 10), 12, 0.0),
        (Gaussian(1.0, 0.1), 1.0, 1.0),
        (Triangular(0, 5, 10), 2.5, (2.5 - 0) / (5 - 0)),
        (Triangular(0, 5, 10), 7.5, 0.5),
        (Triangular(0, 0, 5), 0, 1.0),
        (Triangular(0, 0, 5), -1, 0.0),
        (Triangular(5, 10, 10), 10, 1.0),
        (Triangular(5, 10, 10), 11, 0.0),
    ],
)
def test_membership_degree(mf, x, expected):
    assert membership_degree(mf, x) == pytest.approx(expected, abs=1e-12)


def test_gaussian_formula():
    g = Gaussian(0.4, 0.1)
    assert membership_degree(g, 0.5) == pytest.approx(math.exp(-0.01 / 0.02))


def test_invalid_shapes_rejected():
    with pytest.raises(ValueError):
        Triangular(5, 0, 10)
    with pytest.raises(ValueError):
        Triangular(1, 1, 1)
    with pytest.raises(ValueError):
        Gaussian(0.5, 0.0)


@given(
    a=st.floats(-100, 100),
    w1=st.one_of(st.just(0.0), st.floats(1e-3, 50)),
    w2=st.one_of(st.just(0.0), st.floats(1e-3, 50)),
    x=st.floats(-500, 500),
)
def test_triangular_degree_in_unit_interval(a, w1, w2, x):
    if w1 + w2 == 0:
        return
    mf = Triangular(a, a + w1, a + w1 + w2)
    assert 0.0 <= membership_degree(mf, x) <= 1.0


@given(c=st.floats(-2, 2), s=st.floats(0.01, 5), x=st.floats(-10, 10))
def test_gaussian_degree_in_unit_interval(c, s, x):
    assert 0.0 <= membership_degree(Gaussian(c, s), x) <= 1.0


def test_output_mfs_ordered():
    centers = [OUTPUT_MFS[c].center for c in OutputCategory]
    assert centers == pytest.approx([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert all(0 <= c <= 1 for c in centers)


# -- variables ---------------------------------------------------------------


def test_fuzzify_voice_macro_rssi():
    var = build_variables(builtin_profiles()[("voice", "macro")])[0]
    assert (var.lo, var.hi) == (-90, -35)
    assert fuzzify(var, -90) == {L: 1.0, M: 0.0, H: 0.0}
    assert fuzzify(var, -62.5) == {L: 0.0, M: 1.0, H: 0.0}
    assert fuzzify(var, -35) == {L: 0.0, M: 0.0, H: 1.0}


def test_fuzzify_descending_velocity():
    var = build_variables(builtin_profiles()[("voice", "femto")])[2]
    assert var.descending
    assert fuzzify(var, 0) == {L: 0.0, M: 0.0, H: 1.0}
    assert fuzzify(var, 20) == {L: 1.0, M: 0.0, H: 0.0}
    assert var.peak(H) == 0 and var.peak(L) == 20


def test_out_of_universe_clamped():
    var = FuzzyVariable("rssi", -90, -35)
    assert fuzzify(var, -120) == fuzzify(var, -90)
    assert fuzzify(var, 0) == fuzzify(var, -35)


def test_fuzzify_rejects_nan():
    with pytest.raises(ValueError):
        fuzzify(FuzzyVariable("x", 0, 1), float("nan"))


@pytest.mark.parametrize("key", list(builtin_profiles()))
def test_coverage_and_peaks(key):
    for var in build_variables(builtin_profiles()[key]):
        xs = np.linspace(var.lo, var.hi, 1000)
        assert min(max(fuzzify(var, x).values()) for x in xs) > 0
        for level in InputLevel:
            deg = fuzzify(var, var.peak(level))
            assert deg[level] == 1.0
            assert sum(deg.values()) == 1.0


# -- rules ------------------------------------------------------------------


def test_rule_strength_is_min():
    rule = Rule((L, M, H, L), OutputCategory.LOW)
    ones = [{lvl: 1.0 for lvl in InputLevel}] * 4
    assert rule_strength(rule, ones) == 1.0
    degs = [{L: 0.2}, {M: 0.9}, {H: 0.7}, {L: 0.4}]
    assert rule_strength(rule, degs) == 0.2
    degs[2] = {H: 0.0}
    assert rule_strength(rule, degs) == 0.0


@pytest.mark.parametrize(
    "number, antecedent, consequent",
    [
        (1, (L, L, L, L), OutputCategory.LOWER),
        (25, (L, H, H, L), OutputCategory.LOWER_MEDIUM),
        (50, (M, H, M, M), OutputCategory.HIGH),
        (81, (H, H, H, H), OutputCategory.HIGHER),
    ],
)
def test_published_rules(rb, number, antecedent, consequent):
    assert rb.consequent(antecedent) is consequent
    assert Rule(antecedent, consequent).number == number
    assert PUBLISHED_RULES[number] == Rule(antecedent, consequent)


def test_default_rulebase_shape(rb):
    assert len(rb) == 81
    assert {r.antecedent for r in rb} == set(itertools.product(InputLevel, repeat=4))
    assert {r.consequent for r in rb} == set(OutputCategory)
    assert monotonicity_violations(rb) == []


def test_rulebase_rejects_duplicates_and_gaps(rb):
    rules = list(rb)
    with pytest.raises(IncompleteRuleBase):
        RuleBase(rules[:80])
    with pytest.raises(DuplicateAntecedent):
        RuleBase(rules + [rules[0]])


def test_monotonicity_violation_detected(rb):
    rules = [Rule(r.antecedent, OutputCategory.HIGHER) if r.antecedent == (L, L, L, L) else r for r in rb]
    bad = monotonicity_violations(RuleBase(rules))
    assert len(bad) == 4
    assert {slot for _, slot, _, _ in bad} == {0, 1, 2, 3}


# -- rule file --------------------------------------------------------------


def test_rule_file_round_trip(rb):
    text = serialize_rulebase(rb)
    assert load_rulebase(text) == rb
    assert serialize_rulebase(load_rulebase(text)) == text


def test_rule_file_80_lines(rb):
    lines = serialize_rulebase(rb).splitlines()
    with pytest.raises(IncompleteRuleBase):
        load_rulebase("\n".join(lines[:-1]))


def test_rule_file_duplicate(rb):
    lines = serialize_rulebase(rb).splitlines()
    lines[2] = lines[1].split("->")[0] + "-> higher"
    with pytest.raises(DuplicateAntecedent):
        load_rulebase("\n".join(lines))


@pytest.mark.parametrize(
    "line",
    ["low,low,low -> lower", "low,low,low,low lower", "low,low,low,huge -> lower", "low,low,low,low -> best"],
)
def test_rule_file_parse_errors(line):
    with pytest.raises(ParseError):
        load_rulebase(line)


def test_rule_file_comments_and_case(rb):
    text = "# header\n\n" + serialize_rulebase(rb).upper().replace("# RSSI", "#") + "  # trailing\n"
    assert load_rulebase(text) == rb


rule_tables = st.lists(st.sampled_from(list(OutputCategory)), min_size=81, max_size=81)


@given(rule_tables)
@settings(max_examples=50)
def test_round_trip_any_rulebase(cats):
    rb = RuleBase(Rule(a, c) for a, c in zip(ALL_ANTECEDENTS, cats))
    assert load_rulebase(serialize_rulebase(rb)) == rb


def test_validate_rule_text_reports(rb):
    assert validate_rule_text(serialize_rulebase(rb)) == []
    text = serialize_rulebase(rb).replace("low,low,low,low -> lower", "low,low,low,low -> higher")
    problems = validate_rule_text(text)
    assert any("published rule 1" in p for p in problems)
    assert any("not monotone" in p for p in problems)
    short = "\n".join(serialize_rulebase(rb).splitlines()[:-1])
    assert "incomplete: 80/81" in validate_rule_text(short)
    assert any("line 1:" in p for p in validate_rule_text("nonsense\n" + serialize_rulebase(rb)))


# -- inference ----------------------------------------------------------------


def _voice(net):
    return build_variables(builtin_profiles()[("voice", net)])


def test_single_rule_full_activation(rb):
    # every variable at a level peak fires exactly one rule at strength 1
    variables = _voice("macro")
    inp = FuzzyInput(-90, 1, 0, 8)
    agg = infer(rb, inp, variables)
    expected = OUTPUT_MFS[OutputCategory.LOWER](agg.x)
    np.testing.assert_allclose(agg.mu, expected, atol=1e-15)


def test_two_rules_same_consequent_take_max():
    # consequent depends only on SNIR; both Low and Medium map to LOW
    table = {L: OutputCategory.LOW, M: OutputCategory.LOW, H: OutputCategory.HIGH}
    rb = RuleBase(Rule(a, table[a[3]]) for a in ALL_ANTECEDENTS)
    snir = FuzzyVariable("snir", 0, 10)
    others = [FuzzyVariable(n, 0, 1) for n in ("rssi", "rate", "velocity")]
    # snir=3.0 -> Low 0.4, Medium 0.6
    agg = infer(rb, FuzzyInput(0, 0, 0, 3.0), [*others, snir])
    expected = np.minimum(0.6, OUTPUT_MFS[OutputCategory.LOW](agg.x))
    np.testing.assert_allclose(agg.mu, expected, atol=1e-12)


def test_aggregate_mass_everywhere(rb):
    for key, prof in builtin_profiles().items():
        variables = build_variables(prof)
        for frac in np.linspace(0, 1, 101):
            vals = [v.lo + frac * (v.hi - v.lo) for v in variables]
            assert infer(rb, FuzzyInput(*vals), variables).max_degree > 0


def test_resolution_too_coarse(rb):
    with pytest.raises(ResolutionTooCoarse):
        infer(rb, FuzzyInput(-90, 1, 0, 8), _voice("macro"), resolution=2)
    assert evaluate(rb, FuzzyInput(-90, 1, 0, 8), _voice("macro"), resolution=3) >= 0


def test_zero_mass():
    x = np.linspace(0, 1, 11)
    with pytest.raises(ZeroMass):
        defuzzify_centroid(AggregatedOutput(x, np.zeros_like(x)))


def _clip(cat, s, x):
    return np.minimum(s, OUTPUT_MFS[cat](x))


def test_centroid_symmetric_pair():
    x, _ = output_grid()
    mu = np.maximum(_clip(OutputCategory.LOWER, 0.7, x), _clip(OutputCategory.HIGHER, 0.7, x))
    assert defuzzify_centroid(AggregatedOutput(x, mu)) == pytest.approx(0.5, abs=1e-9)


def test_centroid_single_categories():
    x, _ = output_grid()
    higher = defuzzify_centroid(AggregatedOutput(x, _clip(OutputCategory.HIGHER, 1.0, x)))
    assert 0.8 < higher < 1.0
    assert higher == pytest.approx(truncated_gaussian_centroid(1.0, 0.1), abs=1e-3)
    lm = defuzzify_centroid(AggregatedOutput(x, _clip(OutputCategory.LOWER_MEDIUM, 1.0, x)))
    assert lm == pytest.approx(0.4, abs=0.01)
    assert lm == pytest.approx(truncated_gaussian_centroid(0.4, 0.1), abs=1e-3)


def test_aggregated_output_iterates_pairs(rb):
    agg = infer(rb, FuzzyInput(-90, 1, 0, 8), _voice("macro"), resolution=5)
    pairs = list(agg)
    assert [p[0] for p in pairs] == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_endpoint_anchors(rb):
    for prof in builtin_profiles().values():
        variables = build_variables(prof)
        low = evaluate(rb, FuzzyInput(*[v.peak(L) for v in variables]), variables)
        high = evaluate(rb, FuzzyInput(*[v.peak(H) for v in variables]), variables)
        assert low < high


@pytest.mark.parametrize("key", list(builtin_profiles()))
def test_continuity_along_lines(rb, key):
    variables = build_variables(builtin_profiles()[key])
    rng = np.random.default_rng(7)
    lo = np.array([v.lo for v in variables])
    hi = np.array([v.hi for v in variables])
    paths = [(lo, hi), (hi, lo)] + [tuple(lo + rng.random((2, 4)) * (hi - lo)) for _ in range(3)]
    for start, end in paths:
        prev = None
        for t in np.linspace(0, 1, 1001):
            g = evaluate(rb, FuzzyInput(*(start + t * (end - start))), variables)
            if prev is not None:
                assert abs(g - prev) < 0.05
            prev = g


@given(
    st.sampled_from(list(builtin_profiles())),
    st.lists(st.floats(0, 1), min_size=4, max_size=4),
)
@settings(max_examples=200, deadline=None)
def test_output_bound(key, fracs):
    variables = build_variables(builtin_profiles()[key])
    vals = [v.lo + f * (v.hi - v.lo) for v, f in zip(variables, fracs)]
    assert 0.0 <= evaluate(synthesize_default_rulebase(), FuzzyInput(*vals), variables) <= 1.0
