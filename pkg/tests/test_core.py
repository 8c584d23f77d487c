import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mec import (
    MERGED_KEY,
    Action,
    CoverageError,
    DecisionSituation,
    MecError,
    NonFiniteScoreError,
    ScoreTable,
    TheoryKind,
    TheorySpec,
    aggregate,
    borda,
    merge_comparable,
    normalize,
    ordinalize,
    run_mec,
    select,
)

CC = TheoryKind.CARDINAL_COMPARABLE
CI = TheoryKind.CARDINAL_INCOMPARABLE
ORD = TheoryKind.ORDINAL


def pairwise_borda(scores, over):
    return {a: sum(scores[x] < scores[a] for x in over) - sum(scores[x] > scores[a] for x in over)
            for a in over}


def situation(theories, actions=None, general=None):
    """theories: list of (id, kind, credence, scores)."""
    actions = actions or list(theories[0][3])
    return DecisionSituation(
        actions=[Action(a) for a in actions],
        theories=[TheorySpec(t, k, c) for t, k, c, _ in theories],
        score_tables={t: s for t, _, _, s in theories},
        general_set=general,
    )


# --- domain types ---------------------------------------------------------

@pytest.mark.parametrize("credence", [-0.1, 1.5, math.nan])
def test_theory_rejects_bad_credence(credence):
    with pytest.raises(MecError, match="credence"):
        TheorySpec("util", CC, credence)


def test_theory_defaults_to_full_credence():
    assert TheorySpec("util").credence == 1.0


def test_score_table_rejects_nonfinite():
    with pytest.raises(NonFiniteScoreError):
        ScoreTable({"a": math.inf})


def test_situation_requires_coverage_of_general_set():
    with pytest.raises(CoverageError):
        situation([("u", CC, 1.0, {"a": 1, "b": 2})], general=["a", "b", "z"])


def test_situation_rejects_duplicate_ids():
    with pytest.raises(MecError):
        DecisionSituation([Action("a"), Action("a")], [TheorySpec("u")], {"u": {"a": 1}})
    with pytest.raises(MecError):
        DecisionSituation([Action("a")], [TheorySpec("u"), TheorySpec("u")], {"u": {"a": 1}})


def test_situation_requires_a_theory():
    with pytest.raises(MecError):
        DecisionSituation([Action("a")], [], {})


# --- merge_comparable -----------------------------------------------------

def test_merge_two_equal_credences():
    c, merged = merge_comparable([(1, {"a": 0.8, "b": 0.2}), (1, {"a": 0.6, "b": 0.4})])
    assert c == 2.0
    assert merged["a"] == pytest.approx(0.7)
    assert merged["b"] == pytest.approx(0.3)


def test_merge_single_theory_is_identity():
    assert merge_comparable([(0.4, {"a": 5, "b": 3})]) == (0.4, {"a": 5.0, "b": 3.0})


def test_merge_unequal_credences_matches_fractions():
    c, merged = merge_comparable([(0.5, {"a": 1, "b": 0}), (0.25, {"a": 0, "b": 1})])
    assert c == 0.75
    assert merged["a"] == pytest.approx(float(Fraction(2, 3)), abs=1e-12)
    assert merged["b"] == pytest.approx(float(Fraction(1, 3)), abs=1e-12)


def test_merge_zero_total_credence():
    c, merged = merge_comparable([(0.0, {"a": 3, "b": 1}), (0.0, {"a": 0, "b": 9})])
    assert c == 0.0 and merged == {"a": 0.0, "b": 0.0}


def test_merge_rejects_mismatched_coverage():
    with pytest.raises(CoverageError, match="inconsistent score coverage"):
        merge_comparable([(1, {"a": 1}), (1, {"b": 1})])


def test_merge_rejects_nonfinite():
    with pytest.raises(NonFiniteScoreError):
        merge_comparable([(1, {"a": math.nan})])


# --- borda ----------------------------------------------------------------

def test_borda_distinct():
    assert borda({"a": 3, "b": 1, "c": 2}, "abc") == {"a": 2, "b": -2, "c": 0}


def test_borda_ties():
    assert borda({"a": 1, "b": 1, "c": 0}, "abc") == {"a": 1, "b": 1, "c": -2}


def test_borda_singleton_is_zero():
    assert borda({"a": 7}, ["a"]) == {"a": 0}


def test_borda_exhaustive_small_tables():
    ids = ["a", "b", "c", "d"]
    for values in itertools.product(range(3), repeat=4):
        scores = dict(zip(ids, values))
        assert borda(scores, ids) == pairwise_borda(scores, ids)


def test_borda_missing_id():
    with pytest.raises(CoverageError):
        borda({"a": 1}, ["a", "b"])


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=7))
def test_borda_sums_to_zero(values):
    ids = [f"x{i}" for i in range(len(values))]
    assert sum(borda(dict(zip(ids, values)), ids).values()) == 0


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=7))
def test_borda_ordinal_invariance(values):
    ids = [f"x{i}" for i in range(len(values))]
    base = borda(dict(zip(ids, values)), ids)
    for f in (lambda x: 2 * x + 7, lambda x: x ** 3):
        assert borda({a: f(v) for a, v in zip(ids, values)}, ids) == base


# --- ordinalize -----------------------------------------------------------

@pytest.mark.parametrize("probs, expected", [
    ({"a1": 0.8, "a2": 0.6}, {"a1": 1, "a2": 1}),
    ({"a": 0.5}, {"a": 1}),
    ({"a": 0.49, "b": 0.51}, {"a": 0, "b": 1}),
])
def test_ordinalize(probs, expected):
    assert ordinalize(probs, 0.5) == expected


def test_ordinalize_rejects_non_probability():
    with pytest.raises(MecError):
        ordinalize({"a": 1.2}, 0.5)
    with pytest.raises(MecError):
        ordinalize({"a": 0.2}, 1.0)


# --- normalize ------------------------------------------------------------

def test_normalize_symmetric():
    out = normalize({"a": 2, "b": 0, "c": -2}, "abc")
    sigma = math.sqrt(float(Fraction(8, 3)))
    assert out["a"] == pytest.approx(2 / sigma, abs=1e-12)
    assert out["a"] == pytest.approx(1.224745, abs=1e-6)
    assert out["b"] == 0.0
    assert out["c"] == pytest.approx(-1.224745, abs=1e-6)


def test_normalize_constant_is_zero():
    assert normalize({"a": 5, "b": 5, "c": 5}, "abc") == {"a": 0, "b": 0, "c": 0}


def test_normalize_constant_with_float_noise_is_zero():
    assert normalize({"a": 0.1, "b": 0.1, "c": 0.1}, "abc") == {"a": 0, "b": 0, "c": 0}


def test_normalize_does_not_center():
    out = normalize({"a": 0.7, "b": 0.3}, "ab")
    assert out["a"] == pytest.approx(3.5)
    assert out["b"] == pytest.approx(1.5)


def test_normalize_against_general_set():
    # sigma over {g1, g2} = 1; "a" is outside the general set
    out = normalize({"a": 4, "g1": 0, "g2": 2}, ["g1", "g2"], ["a"])
    assert out == {"a": 4.0}


def test_normalize_empty_general_set():
    with pytest.raises(MecError):
        normalize({"a": 1}, [])


@settings(max_examples=200)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=6),
       st.floats(1e-3, 1e3))
def test_normalize_scale_invariance(values, k):
    ids = [f"x{i}" for i in range(len(values))]
    base = normalize(dict(zip(ids, values)), ids)
    scaled = normalize({a: k * v for a, v in zip(ids, values)}, ids)
    if all(v == 0 for v in base.values()) or all(v == 0 for v in scaled.values()):
        return  # flat before or after scaling
    for a in ids:
        assert scaled[a] == pytest.approx(base[a], abs=1e-9)


# --- aggregate / select ---------------------------------------------------

def test_aggregate_weighted_sum():
    out = aggregate([(0.6, {"a": 1, "b": -1}), (0.4, {"a": -1, "b": 1})])
    assert out["a"] == pytest.approx(0.2)
    assert out["b"] == pytest.approx(-0.2)


def test_aggregate_identity():
    assert aggregate([(1.0, {"a": 0.3, "b": 0.9})]) == {"a": 0.3, "b": 0.9}


def test_aggregate_merged_credence_above_one():
    assert aggregate([(2.0, {"a": 0.5}), (1.0, {"a": -0.25})]) == {"a": 0.75}


def test_aggregate_coverage_mismatch():
    with pytest.raises(CoverageError):
        aggregate([(1.0, {"a": 1}), (1.0, {"b": 1})])


@pytest.mark.parametrize("table, winner", [
    ({"a": 0.2, "b": -0.2}, "a"),
    ({"a": 0.5, "b": 0.5}, "a"),
    ({"z": 1.0, "aa": 1.0, "m": 0.9}, "aa"),
])
def test_select(table, winner):
    assert select(table) == winner


def test_select_empty():
    with pytest.raises(MecError):
        select({})


# --- run_mec --------------------------------------------------------------

def test_run_single_comparable():
    result = run_mec(situation([("u", CC, 1.0, {"a": 0.7, "b": 0.3})]))
    assert result.ranking == ["a", "b"]
    assert result.selected == "a"
    assert result.expected["a"] == pytest.approx(3.5)
    assert result.expected["b"] == pytest.approx(1.5)
    assert result.merged_credence == 1.0
    assert set(result.contributions) == {MERGED_KEY}


def test_run_single_ordinal():
    result = run_mec(situation([("d", ORD, 1.0, {"a": 2, "b": 1, "c": 0})]))
    assert result.ranking == ["a", "b", "c"]
    assert result.merged_credence is None


def test_run_cardinal_plus_ordinal_tie():
    # cardinal: sigma 0.5 -> {a: 2, b: 0}; ordinal: Borda {a: -1, b: 1}, sigma 1
    result = run_mec(situation([("u", CC, 1.0, {"a": 1, "b": 0}),
                                ("d", ORD, 1.0, {"a": 0, "b": 1})]))
    assert result.expected == {"a": 1.0, "b": 1.0}
    assert result.selected == "a"
    assert result.contributions[MERGED_KEY] == {"a": 2.0, "b": 0.0}
    assert result.contributions["d"] == {"a": -1.0, "b": 1.0}


def test_run_ordinalizes_probabilities_only_with_threshold():
    sit = DecisionSituation(
        actions=[Action("a"), Action("b"), Action("c")],
        theories=[TheorySpec("d", ORD, 1.0, scores_are_probabilities=True)],
        score_tables={"d": {"a": 0.8, "b": 0.6, "c": 0.1}})
    assert run_mec(sit).ranking == ["a", "b", "c"]
    cut = run_mec(sit, threshold=0.5)
    assert cut.expected["a"] == cut.expected["b"] > cut.expected["c"]


def test_run_borda_over_general_set():
    # Borda over {a, b, g}: a=2, b=-2, g=0; sigma over G=a,b,g is sqrt(8/3)
    sit = situation([("d", ORD, 1.0, {"a": 3, "b": 1, "g": 2})],
                    actions=["a", "b"], general=["a", "b", "g"])
    result = run_mec(sit)
    assert result.expected["a"] == pytest.approx(2 / math.sqrt(8 / 3))
    assert list(result.expected) == ["a", "b"]


def test_contributions_add_up(rng, situation_factory):
    for _ in range(200):
        result = run_mec(situation_factory(rng))
        for a, value in result.expected.items():
            assert value == pytest.approx(
                math.fsum(c[a] for c in result.contributions.values()), abs=1e-9)
        assert result.selected == result.ranking[0]


def test_run_is_deterministic(rng, situation_factory):
    for _ in range(50):
        sit = situation_factory(rng)
        assert run_mec(sit).to_dict() == run_mec(sit).to_dict()


def test_indifferent_theory_is_neutral():
    base = situation([("u", CC, 1.0, {"a": 1, "b": 3}), ("v", CI, 0.5, {"a": 2, "b": 0})])
    more = situation([("u", CC, 1.0, {"a": 1, "b": 3}), ("v", CI, 0.5, {"a": 2, "b": 0}),
                      ("flat", ORD, 1.0, {"a": 4, "b": 4})])
    assert run_mec(more).expected == run_mec(base).expected
    assert run_mec(more).contributions["flat"] == {"a": 0.0, "b": 0.0}


def test_identity_needs_general_set_to_cover_actions():
    # flat over the reference set {a, g} -> indifferent, even though b stands out
    sit = situation([("d", ORD, 1.0, {"a": 0, "b": 3, "g": 0})],
                    actions=["a", "b"], general=["a", "g"])
    assert run_mec(sit).expected == {"a": 0.0, "b": 0.0}


def test_general_set_ids_unique():
    with pytest.raises(MecError):
        situation([("u", CC, 1.0, {"a": 1, "b": 2})], general=["a", "a"])


def test_flat_comparable_theory_is_not_neutral_once_merged():
    # Merging adds its credence to the group and flattens the average.
    base = situation([("u", CC, 1.0, {"a": 1, "b": 3})])
    more = situation([("u", CC, 1.0, {"a": 1, "b": 3}), ("flat", CC, 1.0, {"a": 2, "b": 2})])
    assert run_mec(more).merged_credence == 2.0
    assert run_mec(more).expected != run_mec(base).expected
    assert run_mec(more).ranking == run_mec(base).ranking
