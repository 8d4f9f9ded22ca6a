"""Gemeinsame pytest-Fixtures für mimkit."""
import pytest

from verification import load_golden

@pytest.fixture(scope="session")
def golden():
    """Referenzwerte aus reference-values/golden.json."""
    return load_golden()
