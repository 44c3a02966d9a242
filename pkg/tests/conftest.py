import pytest

from ikchain.kernel import ModelParams

THETAS = (0.1 + 0.05j, -0.2 + 0.1j, 0.25 - 0.1j, 0.4 + 0.3j)
ETA = 0.3 + 0.1j


def chain(n: int, eta: complex = ETA) -> ModelParams:
    return ModelParams(eta, n, THETAS[:n])


@pytest.fixture(params=[1, 2, 3], ids=lambda n: f"N={n}")
def params(request):
    return chain(request.param)


@pytest.fixture
def params2():
    return chain(2)
