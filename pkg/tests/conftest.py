import pytest

from normalsets import build_spf

# one shared table; big enough for every N used anywhere in the suite,
# including offsets hanging past the largest cut-off
TABLE_LIMIT = 1_000_100


@pytest.fixture(scope="session")
def table():
    return build_spf(TABLE_LIMIT)


@pytest.fixture(scope="session")
def small_table():
    return build_spf(10_000)
