import os
import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def cli():
    path = os.environ.get("VAS360_CLI")
    if not path:
        pytest.skip("VAS360_CLI not set")
    return path
