import pytest

from glasner._kernels import backends


@pytest.fixture(params=sorted(backends()))
def kern(request):
    """Each available kernel backend in turn."""
    return backends()[request.param]
