"""The numba-jitted kernels and the pure-numpy fallback must agree
bitwise; the fallback is selected with TANKSIM_DISABLE_NUMBA=1."""

import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from tanksim import kernels, sloshfem
from tanksim.model import bundled_spec


def test_both_paths_exist():
    assert kernels._sdof_newmark_py is not None
    assert kernels._assemble_quads_py is not None


def test_sdof_paths_agree_bitwise():
    rng = np.random.default_rng(3)
    accel = rng.standard_normal(500)
    a = kernels.sdof_newmark(accel, 0.01, 12.0, 0.05, 0.25, 0.5)
    b = kernels._sdof_newmark_py(accel, 0.01, 12.0, 0.05, 0.25, 0.5)
    np.testing.assert_array_equal(a, b)


def test_assemble_paths_agree():
    # the jitted path may fuse operations differently, so agreement is
    # to rounding (few ulp), while each path is individually deterministic
    spec = bundled_spec("broad")
    mesh = sloshfem.build_mesh(spec.geometry, 0.1)
    nodes = np.ascontiguousarray(mesh.nodes)
    elems = np.ascontiguousarray(mesh.elements)
    fast = kernels.assemble_quads(nodes, elems, 1)
    slow = kernels._assemble_quads_py(nodes, elems, 1)
    np.testing.assert_array_equal(fast[0], slow[0])
    np.testing.assert_array_equal(fast[1], slow[1])
    np.testing.assert_allclose(fast[2], slow[2], rtol=1e-13, atol=1e-16)
    np.testing.assert_allclose(fast[3], slow[3], rtol=1e-13, atol=1e-18)


def test_assemble_deterministic_within_path():
    spec = bundled_spec("broad")
    mesh = sloshfem.build_mesh(spec.geometry, 0.08)
    nodes = np.ascontiguousarray(mesh.nodes)
    elems = np.ascontiguousarray(mesh.elements)
    a = kernels.assemble_quads(nodes, elems, 1)
    b = kernels.assemble_quads(nodes, elems, 1)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_env_flag_selects_fallback():
    code = textwrap.dedent("""
        import os
        os.environ["TANKSIM_DISABLE_NUMBA"] = "1"
        from tanksim import kernels
        assert not kernels.USE_NUMBA
        import numpy as np
        u = kernels.sdof_newmark(np.ones(10), 0.01, 5.0, 0.02, 0.25, 0.5)
        print(repr(float(u[-1])))
    """)
    env = dict(os.environ, TANKSIM_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    u_fallback = float(out.stdout.strip())
    u_here = float(kernels.sdof_newmark(np.ones(10), 0.01, 5.0, 0.02,
                                        0.25, 0.5)[-1])
    assert u_fallback == u_here


def test_sdof_static_limit():
    # constant load, very stiff oscillator: u -> p / w^2 = -a / w^2
    omega = 200.0
    u = kernels.sdof_newmark(np.ones(4000), 1e-3, omega, 0.7, 0.25, 0.5)
    assert float(u[-1]) == pytest.approx(-1.0 / omega ** 2, rel=1e-3)
