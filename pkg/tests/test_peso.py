import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codeperturb.core import CodeSample, Language, MethodCategory, PesoConfig, build_catalog
from codeperturb.peso import (
    OptimizerState,
    boltzmann_probabilities,
    derive_seed,
    gain_update,
    initialize,
    run,
    run_random_baseline,
    select_method,
)
from codeperturb.similarity import score_pair
from codeperturb.transform import RuleEngine
from codeperturb.verify import VerificationReport, VerifyPolicy, verify

from .synthetic import MarkerEngine, halving_scorer, make_verifier, noisy_scorer, triple

CATALOG = build_catalog()


def sample(text="x = 1\n" * 3, sid="s"):
    return CodeSample(id=sid, language=Language.PYTHON, text=text)


def fresh_state(seed=0):
    return OptimizerState.fresh(sample(), CATALOG, PesoConfig(rng_seed=seed))


def passing_report():
    return VerificationReport(True, None, (), True, ())


def failing_report():
    return VerificationReport(True, None, (), False, ())


# ---------------------------------------------------------------------------
# Boltzmann probabilities
# ---------------------------------------------------------------------------

def test_boltzmann_zero_gains_uniform():
    probs = boltzmann_probabilities([0.0] * 6, 2.0)
    assert all(abs(p - 1 / 6) < 1e-12 for p in probs)


def test_boltzmann_single_gain_closed_form():
    probs = boltzmann_probabilities([0.3, 0, 0, 0, 0, 0], 2.0)
    expected = math.exp(0.15) / (math.exp(0.15) + 5)
    assert abs(probs[0] - expected) < 1e-9
    assert all(abs(p - (1 - expected) / 5) < 1e-9 for p in probs[1:])


@given(st.lists(st.floats(0, 5), min_size=6, max_size=6), st.floats(0.01, 100))
@settings(max_examples=200, deadline=None)
def test_boltzmann_probability_law(gains, temperature):
    probs = boltzmann_probabilities(gains, temperature)
    assert all(p > 0 for p in probs)
    assert abs(sum(probs) - 1.0) < 1e-9


@given(st.lists(st.floats(0, 3), min_size=6, max_size=6), st.floats(0.1, 2))
@settings(max_examples=100, deadline=None)
def test_boltzmann_shift_invariance(gains, shift):
    a = boltzmann_probabilities(gains, 2.0)
    b = boltzmann_probabilities([g + shift for g in gains], 2.0)
    assert all(abs(x - y) < 1e-9 for x, y in zip(a, b))


def test_boltzmann_high_temperature_limit():
    probs = boltzmann_probabilities([1, 0.5, 0, 0.2, 0.9, 0.1], 1e6)
    assert max(abs(p - 1 / 6) for p in probs) < 1e-4


def test_boltzmann_monotone_in_own_gain():
    low = boltzmann_probabilities([0.1, 0, 0, 0, 0, 0], 2.0)
    high = boltzmann_probabilities([0.4, 0, 0, 0, 0, 0], 2.0)
    assert high[0] > low[0]


# ---------------------------------------------------------------------------
# gain_update
# ---------------------------------------------------------------------------

def test_gain_update_accepts_and_records():
    state = fresh_state()
    cand = state.current.derive("y = 2\n", "div_loop")
    og, accepted = gain_update(state, cand, passing_report(), triple(0.765))
    assert og == pytest.approx(0.235, abs=1e-12)
    assert accepted and state.mss == 0.765
    assert state.current.text == "y = 2\n"
    assert state.gains[MethodCategory.LOOP.index] == og


def test_gain_update_rejects_similarity_increase():
    state = fresh_state()
    state.mss = 0.765
    before = state.current
    cand = before.derive("z = 3\n", "div_loop")
    og, accepted = gain_update(state, cand, passing_report(), triple(0.9))
    assert (og, accepted) == (0.0, False)
    assert state.mss == 0.765 and state.current is before


def test_gain_update_equality_retained():
    state = fresh_state()
    state.mss = 0.5
    cand = state.current.derive("w = 4\n", "extract_if")
    og, accepted = gain_update(state, cand, passing_report(), triple(0.5))
    assert og == 0.0 and accepted
    assert state.current.text == "w = 4\n"


def test_gain_update_failed_verification_changes_nothing():
    state = fresh_state()
    before = state.current
    cand = before.derive("q = 5\n", "div_loop")
    og, accepted = gain_update(state, cand, failing_report(), None)
    assert (og, accepted) == (0.0, False)
    assert state.current is before and state.mss == 1.0


def test_gain_ledger_overwrite_is_memoryless():
    state = fresh_state()
    idx = MethodCategory.LOOP.index
    cand = state.current.derive("a = 1\n", "div_loop")
    gain_update(state, cand, passing_report(), triple(0.8))
    assert state.gains[idx] == pytest.approx(0.2)
    cand2 = state.current.derive("b = 2\n", "for_while_transformation")
    gain_update(state, cand2, passing_report(), triple(0.9))
    assert state.gains[idx] == 0.0


# ---------------------------------------------------------------------------
# initialize
# ---------------------------------------------------------------------------

def test_initialize_trace_prefix_order():
    state = fresh_state(seed=5)
    initialize(state, MarkerEngine(), CATALOG, PesoConfig(rng_seed=5), make_verifier(), noisy_scorer)
    ids = [r.method_id for r in state.trace]
    assert ids[:2] == ["function_rename", "variables_rename"]
    assert [r.category for r in state.trace[2:8]] == list(MethodCategory)
    assert [r.phase for r in state.trace] == ["rename"] * 2 + ["init"] * 6


def test_initialize_all_failures_zero_gains():
    state = fresh_state(seed=1)
    initialize(state, MarkerEngine(), CATALOG, PesoConfig(rng_seed=1), make_verifier(False), noisy_scorer)
    assert state.gains == [0.0] * 6
    assert state.mss == 1.0
    assert state.current.text == state.original.text


def test_initialize_gain_arithmetic():
    def scorer(original, candidate):
        from .synthetic import marker_lines

        n = len(marker_lines(candidate.text))
        return triple(0.9 if n >= 3 else 1.0)  # first init perturbation dips

    state = fresh_state(seed=2)
    initialize(state, MarkerEngine(), CATALOG, PesoConfig(rng_seed=2), make_verifier(), scorer)
    assert state.gains[0] == pytest.approx(0.1)
    assert state.mss == pytest.approx(0.9)


def test_initialize_requires_fresh_state():
    state = fresh_state()
    state.iter = 3
    with pytest.raises(ValueError):
        initialize(state, MarkerEngine(), CATALOG, PesoConfig(), make_verifier(), noisy_scorer)


# ---------------------------------------------------------------------------
# select_method
# ---------------------------------------------------------------------------

def test_select_method_deterministic_under_seed():
    cfg = PesoConfig(rng_seed=9)
    picks_a = [select_method(fresh_state(9), CATALOG, cfg).id for _ in range(1)]
    picks_b = [select_method(fresh_state(9), CATALOG, cfg).id for _ in range(1)]
    assert picks_a == picks_b


def test_select_method_respects_category():
    state = fresh_state(3)
    for _ in range(50):
        m = select_method(state, CATALOG, PesoConfig())
        assert m in CATALOG.by_category[m.category]


def test_select_method_concentrates_on_high_gain():
    state = fresh_state(4)
    state.gains = [10.0, 0, 0, 0, 0, 0]
    hits = sum(
        select_method(state, CATALOG, PesoConfig()).category is MethodCategory.BASIC
        for _ in range(10_000)
    )
    expected = math.exp(5) / (math.exp(5) + 5)
    assert hits / 10_000 > 0.95
    assert abs(hits / 10_000 - expected) < 0.02


# ---------------------------------------------------------------------------
# run / run_random_baseline
# ---------------------------------------------------------------------------

def test_run_always_failing_engine_uses_all_iterations():
    cfg = PesoConfig(rng_seed=11)
    result = run(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(False), noisy_scorer)
    main_records = [r for r in result.records if r.phase == "main"]
    assert len(main_records) == 15
    assert result.summary.main_iterations == 15
    assert result.final.text == sample().text
    assert not result.summary.halted_early


def test_run_halving_engine_halts_after_three_steps():
    cfg = PesoConfig(rng_seed=21)
    result = run(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(), halving_scorer)
    main_records = [r for r in result.records if r.phase == "main"]
    assert len(main_records) == 3
    assert [r.score.ss for r in main_records] == [0.5, 0.25, 0.125]
    assert result.summary.final_ss == 0.125
    assert result.summary.halted_early


def test_run_mss_sequence_non_increasing():
    for seed in range(10):
        cfg = PesoConfig(rng_seed=seed)
        result = run(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(), noisy_scorer)
        accepted = [r.score.ss for r in result.records if r.accepted]
        assert accepted == sorted(accepted, reverse=True)


def test_run_final_consistent_with_rescoring():
    for seed in range(5):
        cfg = PesoConfig(rng_seed=seed)
        result = run(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(), noisy_scorer)
        assert abs(noisy_scorer(sample(), result.final).ss - result.summary.final_ss) < 1e-12


def test_run_deterministic_trace():
    cfg = PesoConfig(rng_seed=42)
    a = run(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(), noisy_scorer)
    b = run(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(), noisy_scorer)
    assert [r.to_dict() for r in a.records] == [r.to_dict() for r in b.records]
    assert a.final.text == b.final.text


def test_random_baseline_deterministic_and_uniform():
    cfg = PesoConfig(rng_seed=7, max_iter=15)
    a = run_random_baseline(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(False), noisy_scorer)
    b = run_random_baseline(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(False), noisy_scorer)
    assert [r.to_dict() for r in a.records] == [r.to_dict() for r in b.records]
    ids = [r.method_id for r in a.records]
    assert ids[:2] == ["function_rename", "variables_rename"]
    assert len([r for r in a.records if r.phase == "main"]) == 15
    assert all(r.phase != "init" for r in a.records)


def test_random_baseline_category_frequencies():
    counts = {c: 0 for c in MethodCategory}
    total = 0
    for seed in range(700):
        cfg = PesoConfig(rng_seed=seed, max_iter=15)
        result = run_random_baseline(
            sample(), MarkerEngine(), CATALOG, cfg, make_verifier(False), noisy_scorer
        )
        for r in result.records:
            if r.phase == "main":
                counts[r.category] += 1
                total += 1
    for category, methods in CATALOG.by_category.items():
        expected = len(methods) / 26
        sigma = math.sqrt(expected * (1 - expected) / total)
        assert abs(counts[category] / total - expected) < 3 * sigma + 1e-9


def test_probabilities_in_records_sum_to_one():
    cfg = PesoConfig(rng_seed=3)
    result = run(sample(), MarkerEngine(), CATALOG, cfg, make_verifier(), noisy_scorer)
    for record in result.records:
        assert abs(sum(record.probabilities) - 1.0) < 1e-9
        assert all(p > 0 for p in record.probabilities)


def test_derive_seed_stable_and_spread():
    assert derive_seed(42, "a") == derive_seed(42, "a")
    assert derive_seed(42, "a") != derive_seed(42, "b")
    assert derive_seed(1, "a") != derive_seed(2, "a")


# ---------------------------------------------------------------------------
# End-to-end with the real rule engine and scorer
# ---------------------------------------------------------------------------

REAL_SRC = """def scale(values, factor):
    out = []
    for v in values:
        if v > 0 and factor > 1:
            out.append(v * factor)
        else:
            out.append(v)
    return out


def main():
    data = [1, -2, 3]
    k = 2
    total = 0
    for item in scale(data, k):
        total += item
    print(total)


main()
"""


def test_run_with_real_engine_and_scorer():
    cfg = PesoConfig(rng_seed=13, max_iter=5, ss_threshold=0.2)
    original = CodeSample(id="real.py", language=Language.PYTHON, text=REAL_SRC)
    engine = RuleEngine(CATALOG)
    policy = VerifyPolicy()
    verifier = lambda o, c: verify(o, c, policy)
    result = run(original, engine, CATALOG, cfg, verifier)
    assert result.final.text != REAL_SRC
    rescored = score_pair(original, result.final, cfg)
    assert abs(rescored.ss - result.summary.final_ss) < 1e-12
    accepted = [r.score.ss for r in result.records if r.accepted]
    assert accepted == sorted(accepted, reverse=True)
    assert result.summary.methods_applied
    assert result.summary.function_map
