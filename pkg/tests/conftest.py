import numpy as np
import pytest

from qobsnet import (
    CouplingScheme,
    PlantSpec,
    assemble_augmented,
    build_realization,
    complete_graph,
)

# Augmented drift printed for the five-observer example (complete graph,
# alpha1 = [1, 0], all weights 1), state order [z_p, q1, p1, ..., q5, p5].
PRINTED_A_A = np.array([
    [0,   0,  0,   0,  0,   0,  0,   0,  0,   0,  0],
    [0,   0, 10,   0,  0,   0,  0,   0,  0,   0,  0],
    [2, -10,  0,   2,  0,   2,  0,   2,  0,   2,  0],
    [0,   0,  0,   0, 10,   0,  0,   0,  0,   0,  0],
    [2,   2,  0, -10,  0,   2,  0,   2,  0,   2,  0],
    [0,   0,  0,   0,  0,   0, 10,   0,  0,   0,  0],
    [2,   2,  0,   2,  0, -10,  0,   2,  0,   2,  0],
    [0,   0,  0,   0,  0,   0,  0,   0, 10,   0,  0],
    [2,   2,  0,   2,  0,   2,  0, -10,  0,   2,  0],
    [0,   0,  0,   0,  0,   0,  0,   0,  0,   0, 10],
    [2,   2,  0,   2,  0,   2,  0,   2,  0, -10,  0],
], dtype=float)


@pytest.fixture(scope="session")
def sec4_plant():
    return PlantSpec(r_p=[0, 0, 0], C_p=[1, 0, 0])


@pytest.fixture(scope="session")
def sec4_graph():
    return complete_graph(5, 1.0)


@pytest.fixture(scope="session")
def sec4_real(sec4_plant, sec4_graph):
    return build_realization(sec4_graph, CouplingScheme.for_plant(sec4_plant, [1.0, 0.0]))


@pytest.fixture(scope="session")
def sec4_aug(sec4_plant, sec4_real):
    return assemble_augmented(sec4_plant, sec4_real)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(test_acceptance.RESULTS.values()):
        terminalreporter.write_line(line)
