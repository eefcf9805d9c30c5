from __future__ import annotations

import pytest

from hashmine.lexicon import load_packaged_seed


@pytest.fixture(scope="session")
def seed_lexicon():
    return load_packaged_seed()


def backend_params():
    """Parametrize kernel-sensitive tests over available backends."""
    from hashmine.kernels import _pykernels

    params = [pytest.param(_pykernels, id="python")]
    try:
        from hashmine.kernels import _ckernels

        params.append(pytest.param(_ckernels, id="c"))
    except ImportError:
        pass
    return params
