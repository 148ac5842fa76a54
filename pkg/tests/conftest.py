import numpy as np
import pytest

from synthetic import make_database, make_exemplar, make_skeleton


@pytest.fixture(scope="session")
def skeleton():
    return make_skeleton()


@pytest.fixture(scope="session")
def exemplar(skeleton):
    return make_exemplar(skeleton)


@pytest.fixture(scope="session")
def small_db(skeleton):
    """6 subjects x 12 cycles; enough classes for both setups."""
    return make_database(skeleton, n_subjects=6, samples_per_subject=12,
                         rng=np.random.default_rng(7), noise=2.0)


@pytest.fixture(scope="session")
def walk_sample(small_db):
    return small_db.samples[0]
