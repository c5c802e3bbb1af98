import pytest

from activevars import build_spectrum, custom_kernel, korobov_kernel, wiener_kernel


@pytest.fixture(scope="session")
def wiener():
    return build_spectrum(wiener_kernel(), 10_000)


@pytest.fixture(scope="session")
def wiener_half():
    return build_spectrum(wiener_kernel(), 10_000, "paper_bound")


@pytest.fixture(scope="session")
def korobov1():
    return build_spectrum(korobov_kernel(1.0), 10_000)


@pytest.fixture(scope="session")
def korobov1_deep():
    # Deep enough that demands down to eps = 1e-5 stay tail-certified at d = 2.
    return build_spectrum(korobov_kernel(1.0), 40_000)


@pytest.fixture(scope="session")
def custom_pair():
    return build_spectrum(custom_kernel([0.5, 0.125]))


@pytest.fixture(scope="session")
def custom_quad():
    return build_spectrum(custom_kernel([0.5, 0.25, 0.125, 0.0625]))
