from __future__ import annotations

import pytest

from qsa import load_builtin


@pytest.fixture(scope="session")
def catalog():
    return load_builtin()
