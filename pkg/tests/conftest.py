import os

import pytest
import sympy as sp

from fricke.core import to_ab_form
from fricke.fricke_series import compute_fricke_polynomial
from fricke.volcano import find_volcano_prime, load_classpoly, partial_volcano

X, E4, E6, D, A, B = sp.symbols("X E4 E6 D A B")


def pytest_configure(config):
    # keep the CLI cache out of the home directory during test runs
    os.environ.setdefault("FRICKE_CACHE", str(config.rootpath / ".pytest_cache" / "fricke"))


def as_sympy(poly):
    """TriPoly or ABPoly as an expanded sympy expression."""
    return sp.expand(sp.sympify(poly.to_text().replace("^", "**")))


def parse(text):
    return sp.expand(sp.sympify(text))


def ab_sympy(poly):
    return as_sympy(to_ab_form(poly))


@pytest.fixture(scope="session")
def U5():
    return compute_fricke_polynomial(5, "U")


@pytest.fixture(scope="session")
def params1811():
    return find_volcano_prime(5, -71)


@pytest.fixture(scope="session")
def sites1811(params1811):
    return sorted(partial_volcano(params1811, load_classpoly(-71)),
                  key=lambda s: (s.curve.A, s.curve.B))
