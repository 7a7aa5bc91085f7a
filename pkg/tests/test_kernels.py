"""Both kernel back ends must agree bit for bit."""

import itertools
import os

import numpy as np
import pytest

from avnlab import _pykernels, kernels

BACKENDS = kernels.available_backends()


def test_compiled_backend_built():
    # the extension is part of the normal build; the fallback is for broken toolchains
    assert "cython" in BACKENDS
    forced = os.environ.get("AVNLAB_PURE_PYTHON", "") not in ("", "0")
    assert kernels.BACKEND == ("python" if forced else "cython")


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return BACKENDS[request.param]


def _brute_parity(a, m):
    return bin(a & m).count("1") & 1


def test_pauli_apply_matches_definition(backend, rng):
    amps = rng.normal(size=16) + 1j * rng.normal(size=16)
    for xmask, zmask in itertools.product(range(16), repeat=2):
        n_y = bin(xmask & zmask).count("1")
        out = backend.pauli_apply(amps, xmask, zmask, n_y)
        expected = np.zeros(16, dtype=complex)
        for j in range(16):
            expected[j ^ xmask] = (1j ** n_y) * (-1) ** _brute_parity(j, zmask) * amps[j]
        np.testing.assert_allclose(out, expected, atol=1e-15)


def test_scan_equations_matches_brute_force(backend, rng):
    for _ in range(20):
        n_vars = int(rng.integers(1, 11))
        masks = rng.integers(0, 1 << n_vars, size=int(rng.integers(1, 6))).astype(np.uint64)
        rhs = rng.integers(0, 2, size=masks.size).astype(np.uint8)
        sat = [a for a in range(1 << n_vars)
               if all(_brute_parity(a, int(m)) == r for m, r in zip(masks, rhs))]
        count, wit = backend.scan_equations(masks, rhs, n_vars, 5)
        assert count == len(sat)
        assert list(wit) == sat[:5]


def test_scan_bound_matches_brute_force(backend, rng):
    for _ in range(20):
        n_vars = int(rng.integers(1, 9))
        masks = rng.integers(0, 1 << n_vars, size=4).astype(np.uint64)
        signs = rng.choice([-1, 1], size=4).astype(np.int64)
        cmask = int(rng.integers(0, 1 << n_vars))
        cbit = int(rng.integers(-1, 2))
        best, best_idx = None, -1
        for a in range(1 << n_vars):
            if cbit >= 0 and _brute_parity(a, cmask) != cbit:
                continue
            v = sum(int(s) * (-1) ** _brute_parity(a, int(m)) for m, s in zip(masks, signs))
            if best is None or v > best:
                best, best_idx = v, a
        got = backend.scan_bound(masks, signs, n_vars, cmask, cbit)
        if best is None:
            assert got[1] == -1
        else:
            assert got == (best, best_idx)


def test_sample_outcomes_inverse_cdf(backend, rng):
    cdf_first = np.cumsum(np.full(8, 1 / 8))
    cdf_second = np.ascontiguousarray(np.cumsum(rng.dirichlet(np.ones(8), size=(4, 2)), axis=2))
    cdf_second[..., -1] = 1.0
    n = 2000
    settings = (np.arange(n) % 4).astype(np.int64)
    u1, u2 = rng.random(n), rng.random(n)
    first, second = backend.sample_outcomes(settings, u1, u2, cdf_first, 2, cdf_second)
    np.testing.assert_array_equal(first, np.searchsorted(cdf_first, u1, side="right"))
    for i in range(n):
        if first[i] < 2:
            assert second[i] == np.searchsorted(cdf_second[settings[i], first[i]], u2[i], side="right")
        else:
            assert second[i] == -1


def test_backends_agree_on_shared_inputs(rng):
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend unavailable")
    c = BACKENDS["cython"]
    amps = rng.normal(size=64) + 1j * rng.normal(size=64)
    np.testing.assert_array_equal(c.pauli_apply(amps, 21, 42, 2), _pykernels.pauli_apply(amps, 21, 42, 2))
    masks = np.array([3, 12, 48, 15], dtype=np.uint64)
    rhs = np.array([1, 0, 1, 0], dtype=np.uint8)
    a = c.scan_equations(masks, rhs, 8, 100)
    b = _pykernels.scan_equations(masks, rhs, 8, 100)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1], b[1])
