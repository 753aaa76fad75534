import pytest

from assemblykit.classes import BUILTIN_NAMES, builtin_class


@pytest.fixture(scope="session")
def classes():
    return {name: builtin_class(name) for name in BUILTIN_NAMES}


@pytest.fixture(scope="session")
def perm():
    return builtin_class("permutations")
