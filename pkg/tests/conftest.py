#
# Copyright (c) 2026, schrolab authors
# Released under MIT license, see `LICENSE` for details.
#


import os.path
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, 'src'))

from schrolab.grid import make_grid, Field
import numpy as np
import pytest


@pytest.fixture
def line():
    """1-D grid with spacing 1/2."""
    return make_grid(1, 64, 32.0)


@pytest.fixture
def plane():
    """2-D grid with unit spacing."""
    return make_grid(2, 16, 16.0)


@pytest.fixture
def rng():
    return np.random.default_rng(2026)


@pytest.fixture
def noise(line, rng):
    """Seeded complex field on the line."""
    return Field(line, rng.normal(size=line.shape) +
                       1j*rng.normal(size=line.shape))


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Empty working directory; artifacts go to its `out` subdirectory."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv('SCHROLAB_OUT', str(tmp_path/'out'))
    return tmp_path
