import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from aftbound import asp, gen

DATA = Path(__file__).resolve().parent.parent / "data"

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FOUR_RULES = "p :- not q.\nr :- p.\nq :- not p.\ns :- q.\n"


@pytest.fixture
def four():
    return asp.load_program(FOUR_RULES)


@pytest.fixture(scope="session")
def coloring():
    return asp.load_program((DATA / "coloring.lp").read_text())


@pytest.fixture(scope="session")
def coloring_models(coloring):
    return asp.brute_force_stable_models(coloring)


@pytest.fixture(scope="session")
def corpus():
    """200 random ground programs: at most 10 atoms, 25 rules, mixed negation."""
    return gen.program_corpus(seed=0, count=200)


@pytest.fixture(scope="session")
def corpus_models(corpus):
    return [asp.brute_force_stable_models(p) for p in corpus]


@pytest.fixture
def rng():
    return random.Random(1234)
