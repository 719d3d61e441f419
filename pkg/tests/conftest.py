import pytest

from catrot import certify_primitive

SMALL_POLYS = {
    3: "x^3 + x + 1",
    4: "x^4 + x + 1",
    5: "x^5 + x^2 + 1",
    6: "x^6 + x + 1",
}


@pytest.fixture
def f3():
    return certify_primitive("x^3 + x + 1")


@pytest.fixture(params=sorted(SMALL_POLYS))
def small_f(request):
    return certify_primitive(SMALL_POLYS[request.param])
