import numpy as np
import pytest
from hypothesis import settings

from lookahead_admission.paths import ModelParams, generate_initial_path, reflect

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


def q_from_steps(steps):
    """Queue path (q[0] = 0) for a list of +1 / -1 steps, reflected at zero."""
    return reflect(np.asarray(steps, dtype=np.int64))


@pytest.fixture(scope="session")
def mid_load_path():
    """Heavy-traffic path at p=0.5, lambda=0.9 shared by the statistical tests."""
    return generate_initial_path(ModelParams(0.9, 0.5), 2_000_000, 11)
