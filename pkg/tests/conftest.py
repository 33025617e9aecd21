import numpy as np
import pytest

from ridgelaw.pipeflow import builtin_model

# the textbook null basis for the pipe system (columns: relative roughness
# and the rho D^3 dPdL / mu^2 group), used as a reference column space
CLASSICAL_PIPE_W = np.array(
    [
        [0.0, 1.0],
        [0.0, -2.0],
        [-1.0, 3.0],
        [1.0, 0.0],
        [0.0, 1.0],
    ]
)


@pytest.fixture(scope="session")
def laminar_model():
    return builtin_model("laminar")


@pytest.fixture(scope="session")
def turbulent_model():
    return builtin_model("turbulent")
