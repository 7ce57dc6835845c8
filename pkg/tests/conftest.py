import os

import pytest
from minkord.order import saturate
from minkord.structure import load_structure


@pytest.fixture
def data_dir():
    # returns the path to the data directory
    return os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def line5(data_dir):
    # a < b < c < d < e on Q, plus R through c and x
    return load_structure(os.path.join(data_dir, "line5.struct"))


@pytest.fixture
def line5_sb(line5):
    return saturate(line5)
