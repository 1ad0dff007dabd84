import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aftbound import asp, gen
from aftbound.asp import SUBSTITUTE, brute_force_stable_models
from aftbound.errors import UsageError
from aftbound.lattice import AtomSet, Interval

COLORING_BOUND = {"lower": ["red(1)", "green(4)"], "excluded": ["blue(2)"]}


def visible_interval(rng, prog):
    """A random valid bound that leaves hidden constraint atoms free."""
    b = gen.random_interval(rng, prog.universe)
    return Interval(b.lo - prog.hidden, b.hi | prog.hidden)


def models_of(pe_prog, original):
    return asp.project_models(brute_force_stable_models(pe_prog), original.universe)


def restricted(models, b):
    return [m for m in models if m in b]


def test_coloring_bound_preserves_models(coloring, coloring_models):
    b = asp.bound_from_json(coloring.universe, COLORING_BOUND, coloring.hidden)
    pe = asp.partial_eval(coloring, b)
    want = restricted(coloring_models, b)
    assert len(want) == 3
    assert models_of(pe.program, coloring) == want
    # the emitted text parses back to the same models
    again = asp.load_program(asp.format_program(pe.program))
    assert models_of(again, coloring) == want


def test_coloring_partial_evaluation_is_smaller(coloring):
    b = asp.bound_from_json(coloring.universe, COLORING_BOUND, coloring.hidden)
    pe = asp.partial_eval(coloring, b).program
    assert len(pe.rules) < len(coloring.rules)
    assert len(pe.negative_atoms) < len(coloring.negative_atoms) + 3


def test_whole_space_bound_is_a_no_op(coloring):
    pe = asp.partial_eval(coloring, coloring.universe.interval()).program
    assert pe.canonical() == coloring.canonical()


def test_rule_with_excluded_positive_body_is_dropped():
    prog = asp.load_program("a :- b. b :- not c. c :- not b.")
    u = prog.universe
    pe = asp.partial_eval(prog, Interval(u.bottom, u.top.without_atom("b"))).program
    assert all(r.key()[0] != "a" for r in pe.rules)


def test_invalid_bound_is_rejected(four):
    u = four.universe
    with pytest.raises(UsageError):
        asp.partial_eval(four, Interval(u.top, u.bottom))
    with pytest.raises(UsageError):
        asp.partial_eval(four, u.interval(), mode="guess")


def test_random_sound_bounds_preserve_models(corpus, corpus_models):
    rng = random.Random(31)
    pairs = 0
    for prog, models in zip(corpus, corpus_models):
        if not models:
            continue
        m = rng.choice(models)
        b = visible_interval(rng, prog)
        b = Interval(b.lo & m, b.hi | m)
        assert m in b
        assert models_of(asp.partial_eval(prog, b).program, prog) == restricted(models, b)
        pairs += 1
    assert pairs >= 100


@given(st.integers(0, 2**32))
def test_safe_mode_is_exact_for_any_bound(seed):
    rng = random.Random(seed)
    prog = gen.random_ground_program(rng)
    b = visible_interval(rng, prog)
    want = restricted(brute_force_stable_models(prog), b)
    assert models_of(asp.partial_eval(prog, b).program, prog) == want


@given(st.integers(0, 2**32))
def test_substitute_mode_is_exact_when_accepted(seed):
    rng = random.Random(seed)
    prog = gen.random_ground_program(rng)
    b = visible_interval(rng, prog)
    try:
        pe = asp.partial_eval(prog, b, SUBSTITUTE).program
    except UsageError:
        return
    want = restricted(brute_force_stable_models(prog), b)
    assert restricted(models_of(pe, prog), b) == want


def test_substitute_mode_refuses_unsupported_lower_atoms():
    # p is required but only q supports it, and q is not derivable in the whole bound
    prog = asp.load_program("p :- q. q :- not r. r :- not q.")
    u = prog.universe
    with pytest.raises(UsageError):
        asp.partial_eval(prog, u.interval(["p"]), SUBSTITUTE)
    safe = asp.partial_eval(prog, u.interval(["p"])).program
    assert [m.names() for m in models_of(safe, prog)] == [["p", "q"]]


def test_substitute_mode_refuses_derivable_excluded_atoms():
    # a loop a <-> b with a support through c; excluding a while c can be derived
    prog = asp.load_program("a :- b. b :- a. a :- c. c :- not d. d :- not c.")
    u = prog.universe
    b = Interval(u.bottom, u.top.without_atom("a"))
    with pytest.raises(UsageError):
        asp.partial_eval(prog, b, SUBSTITUTE)
    safe = asp.partial_eval(prog, b).program
    assert [m.names() for m in models_of(safe, prog)] == [["d"]]


def test_substitute_mode_on_a_well_founded_bound(corpus, corpus_models):
    for prog, models in zip(corpus, corpus_models):
        wf = asp.well_founded_bound(prog)
        wf = Interval(wf.lo - prog.hidden, wf.hi | prog.hidden)
        pe = asp.partial_eval(prog, wf, SUBSTITUTE).program
        assert restricted(models_of(pe, prog), wf) == models


# -- composition -------------------------------------------------------------------------


def test_compose_from_the_whole_space(coloring):
    b = asp.bound_from_json(coloring.universe, COLORING_BOUND, coloring.hidden)
    cached = asp.partial_eval(coloring, coloring.universe.interval())
    assert asp.compose_partial_eval(cached, b).program.canonical() == asp.partial_eval(coloring, b).program.canonical()


def test_compose_nested_bounds(coloring):
    u = coloring.universe
    b1 = asp.bound_from_json(u, {"lower": ["red(1)"], "excluded": []}, coloring.hidden)
    b2 = asp.bound_from_json(u, COLORING_BOUND, coloring.hidden)
    cached = asp.partial_eval(coloring, b1)
    composed = asp.compose_partial_eval(cached, b2).program
    assert composed.canonical() == asp.partial_eval(coloring, b2).program.canonical()


def test_compose_rejects_non_nested_bounds(coloring):
    u = coloring.universe
    b1 = asp.bound_from_json(u, {"lower": ["red(1)"]}, coloring.hidden)
    b2 = asp.bound_from_json(u, {"lower": ["green(4)"]}, coloring.hidden)
    with pytest.raises(UsageError):
        asp.compose_partial_eval(asp.partial_eval(coloring, b1), b2)


@given(st.integers(0, 2**32))
def test_compose_matches_direct_evaluation(seed):
    rng = random.Random(seed)
    prog = gen.random_ground_program(rng)
    b1 = visible_interval(rng, prog)
    inner = gen.random_interval(rng, prog.universe, within=b1)
    b2 = Interval(inner.lo - prog.hidden, inner.hi | prog.hidden)
    composed = asp.compose_partial_eval(asp.partial_eval(prog, b1), b2).program
    assert composed.canonical() == asp.partial_eval(prog, b2).program.canonical()


# -- assumptions and bounds files ---------------------------------------------------------------


def test_emit_assumptions_examples(four, coloring):
    u = four.universe
    assert asp.emit_assumptions(u.interval(["p"], ["p", "r"])) == "p\n-q\n-s\n"
    assert asp.emit_assumptions(u.interval()) == ""
    cu = coloring.universe
    b = Interval(cu.set(["red(1)"]), cu.top.without_atom("blue(2)"))
    assert asp.emit_assumptions(b, coloring.hidden) == "red(1)\n-blue(2)\n"
    b = asp.bound_from_json(cu, COLORING_BOUND, coloring.hidden)
    assert asp.emit_assumptions(b, coloring.hidden) == "red(1)\ngreen(4)\n-blue(2)\n"
    with pytest.raises(UsageError):
        asp.emit_assumptions(Interval(u.top, u.bottom))


def test_bounds_file_validation(coloring):
    u, h = coloring.universe, coloring.hidden
    assert asp.bound_from_json(u, {}, h) == u.interval()
    for bad in ({"lower": ["purple(1)"]}, {"lower": ["_c0"]}, {"upper": []}, [],
                {"lower": ["red(1)"], "excluded": ["red(1)"]}):
        with pytest.raises(UsageError):
            asp.bound_from_json(u, bad, h)


def test_new_atoms_keep_original_positions(coloring):
    b = asp.bound_from_json(coloring.universe, COLORING_BOUND, coloring.hidden)
    pe = asp.partial_eval(coloring, b).program
    n = len(coloring.universe)
    assert pe.universe.atoms[:n] == coloring.universe.atoms
    m = AtomSet(pe.universe, 0)
    assert pe.visible(m) == []
