"""Shared fixtures: example surfaces with trivial bundles."""

import numpy as np
import pytest

from tilelap import catalog
from tilelap.bundle import FlatUnitaryBundle
from tilelap.discretize import Discretization

SURFACE_NAMES = ["torus", "rectangle2x1", "square", "lshape", "pillowcase",
                 "genus2"]


@pytest.fixture(params=SURFACE_NAMES)
def named_surface(request):
    return request.param, catalog.BUILTIN[request.param]()


def make_disc(name, n, bundle=None, rank=1):
    surface = catalog.BUILTIN[name]()
    if bundle is None:
        bundle = FlatUnitaryBundle.trivial(surface, rank)
    return Discretization(surface, bundle, n)


def random_unitary(rng, r):
    mat = rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r))
    q, _ = np.linalg.qr(mat)
    return q
