import warnings

import numpy as np
import pytest

from hybridcast.bench import descriptor, load_dataset


@pytest.fixture(scope="session")
def sunspot():
    return load_dataset(descriptor("sunspot"))


@pytest.fixture(scope="session")
def lynx():
    return load_dataset(descriptor("lynx"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_nonstationary_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*unit circle.*")
        yield
