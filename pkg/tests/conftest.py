import pytest

from rtgdiag import build_complete_test, build_extended_fdt, enumerate_paths
from rtgdiag.fixtures import fig1_graph, listing31_source, example_fault


@pytest.fixture
def g():
    return fig1_graph()


@pytest.fixture
def paths(g):
    return enumerate_paths(g)


@pytest.fixture
def suite(g, paths):
    return build_complete_test(g, paths)


@pytest.fixture
def extended(g, suite):
    return build_extended_fdt(g, suite)


@pytest.fixture
def fault():
    return example_fault()


@pytest.fixture
def source():
    return listing31_source()
