"""Backend equivalence and kernel-level behavior."""

import math

import numpy as np
import pytest

from floqspin import IntegrationError, propagate_period
from floqspin._core import BACKEND, get_kernel
from floqspin._core.fallback import propagate_grid as python_kernel
from conftest import system

try:
    from floqspin._core._kernels import propagate_grid as compiled_kernel
    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED,
                                    reason="compiled kernel not built")


def test_backend_selected():
    assert BACKEND in ("compiled", "python")


def test_get_kernel_rejects_unknown():
    with pytest.raises(ValueError):
        get_kernel("fortran")


@needs_compiled
@pytest.mark.parametrize("h_z1,omega", [(0.0, 40.0), (96.2, 40.0),
                                        (240.0, 40.0), (13.0, 9.0)])
def test_backends_agree(h_z1, omega):
    a = compiled_kernel(1.0, 0.1, h_z1, omega, 512)
    b = python_kernel(1.0, 0.1, h_z1, omega, 512)
    assert np.abs(a - b).max() < 1e-12


@needs_compiled
def test_backend_parameter_of_propagate_period():
    p = system(h_z1=50.0)
    a = propagate_period(p, 256, backend="compiled").propagators
    b = propagate_period(p, 256, backend="python").propagators
    assert np.abs(a - b).max() < 1e-12


@pytest.mark.parametrize("kernel_name", ["python", "compiled"])
def test_nonfinite_input_raises_with_step_index(kernel_name):
    if kernel_name == "compiled" and not HAVE_COMPILED:
        pytest.skip("compiled kernel not built")
    kernel = get_kernel(kernel_name)
    with pytest.raises(IntegrationError) as err:
        kernel(math.nan, 0.0, 1.0, 40.0, 128)
    assert err.value.step is not None


def test_identity_at_t0_exact():
    grid = propagate_period(system(h_z1=30.0), 128)
    assert np.array_equal(grid.propagators[0], np.eye(2, dtype=complex))


def test_unitarity_structural_even_for_strong_drive():
    grid = propagate_period(system(h_z1=240.0), 2048)
    assert grid.unitarity_defect() < 1e-10
