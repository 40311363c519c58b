import doctest

import pytest

import genjac.abelian


@pytest.mark.parametrize("mod", [genjac.abelian], ids=lambda m: m.__name__)
def test_doctests(mod):
    failed, tried = doctest.testmod(mod, optionflags=doctest.NORMALIZE_WHITESPACE)
    assert tried > 0 and failed == 0
