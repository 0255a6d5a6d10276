import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sspc import _kernels_py as python
from sspc import kernels

BACKENDS = [python] + ([kernels.compiled] if kernels.compiled is not None else [])
IDS = ["python"] + (["compiled"] if kernels.compiled is not None else [])

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def hadamard(n):
    h = np.array([[1.0]])
    for _ in range(n):
        h = np.kron(h, [[1, 1], [1, -1]])
    return h


def test_extension_is_built():
    # the compiled core should be available in a normal editable install
    assert kernels.compiled is not None
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
@pytest.mark.parametrize("bits", [1, 2, 4, 6])
def test_fwht_matches_dense_hadamard(impl, bits, rng):
    data = rng.standard_normal((3, 2**bits))
    expected = data @ hadamard(bits).T
    impl.fwht(data)
    np.testing.assert_allclose(data, expected, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_fwht_rejects_non_power_of_two(impl):
    with pytest.raises(ValueError):
        impl.fwht(np.zeros((1, 6)))


@given(arrays(np.float64, 16, elements=finite))
def test_fwht_twice_scales_by_length(x):
    np.testing.assert_allclose(kernels.fwht(kernels.fwht(x)), 16 * x, atol=1e-9)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_xor_convolve_against_double_loop(impl, rng):
    a, b = rng.random(16), rng.random(16)
    expected = np.zeros(16)
    for s in range(16):
        for t in range(16):
            expected[s] += a[t] * b[s ^ t]
    np.testing.assert_allclose(impl.xor_convolve(a, b), expected, rtol=1e-14)


@given(
    arrays(np.float64, 64, elements=st.floats(0, 1, allow_nan=False)),
    arrays(np.float64, 64, elements=st.floats(0, 1, allow_nan=False)),
)
@settings(max_examples=50)
def test_backends_agree_bitwise_on_convolution(a, b):
    ref = python.xor_convolve(a, b)
    for impl in BACKENDS:
        np.testing.assert_array_equal(impl.xor_convolve(a, b), ref)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_prefix_and_suffix_products(impl, rng):
    mats = rng.standard_normal((5, 3, 3)) + 1j * rng.standard_normal((5, 3, 3))
    pre = impl.prefix_products(np.ascontiguousarray(mats))
    suf = impl.suffix_products(np.ascontiguousarray(mats))
    np.testing.assert_allclose(pre[-1], mats[4] @ mats[3] @ mats[2] @ mats[1] @ mats[0], rtol=1e-12)
    np.testing.assert_allclose(pre[1], mats[1] @ mats[0], rtol=1e-12)
    np.testing.assert_allclose(suf[0], pre[-1], rtol=1e-12)
    np.testing.assert_allclose(suf[3], mats[4] @ mats[3], rtol=1e-12)


def test_products_agree_across_backends(rng):
    mats = rng.standard_normal((200, 8, 8)) + 1j * rng.standard_normal((200, 8, 8))
    mats /= np.linalg.norm(mats, axis=(1, 2), keepdims=True)
    ref = python.prefix_products(mats)
    for impl in BACKENDS:
        np.testing.assert_allclose(impl.prefix_products(mats), ref, atol=1e-13)
        np.testing.assert_allclose(impl.suffix_products(mats), python.suffix_products(mats), atol=1e-13)


def test_wrapper_does_not_mutate_input(rng):
    x = rng.random((2, 8))
    before = x.copy()
    kernels.fwht(x)
    np.testing.assert_array_equal(x, before)
