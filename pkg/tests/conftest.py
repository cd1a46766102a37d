"""
Shared fixtures and hypothesis profiles for the test suite
"""

import os

import pytest
from hypothesis import HealthCheck, settings

from core.vn_algebra import block_algebra, diagonal_masa, full_algebra, scalar_algebra

settings.register_profile(
    'qrel',
    deadline=None,
    derandomize=True,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large]
)
settings.register_profile('thorough', deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'qrel'))


@pytest.fixture(autouse=True)
def testing_env(monkeypatch):
    monkeypatch.setenv('QREL_ENV', 'testing')


@pytest.fixture
def masa2():
    return diagonal_masa(2)


@pytest.fixture
def masa3():
    return diagonal_masa(3)


@pytest.fixture
def full2():
    return full_algebra(2)


@pytest.fixture
def scalars2():
    return scalar_algebra(2)


@pytest.fixture
def blocks21():
    return block_algebra([2, 1])
