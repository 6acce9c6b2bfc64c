import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running checks (heavy enumerations, genus-4 contexts)")
