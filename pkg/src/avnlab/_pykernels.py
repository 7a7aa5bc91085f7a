"""Pure-Python implementations of the hot loops.

These mirror ``_ckernels.pyx`` function for function and are used whenever the
compiled extension is unavailable (or ``AVNLAB_PURE_PYTHON=1`` is set).
Inputs and outputs are numpy arrays so both back ends share one calling
convention; the loops themselves are plain Python.
"""

from __future__ import annotations

import numpy as np

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


def pauli_apply(amps: np.ndarray, xmask: int, zmask: int, n_y: int) -> np.ndarray:
    """Apply the Pauli string encoded by (xmask, zmask, n_y) to ``amps``.

    ``P|j> = i**n_y * (-1)**popcount(j & zmask) |j ^ xmask>``.
    """
    src = [complex(a) for a in amps]
    out = [0j] * len(src)
    phase = _I_POWERS[n_y % 4]
    for j, a in enumerate(src):
        if _parity(j & zmask):
            out[j ^ xmask] = -phase * a
        else:
            out[j ^ xmask] = phase * a
    return np.array(out, dtype=np.complex128)


def scan_equations(
    masks: np.ndarray, rhs_bits: np.ndarray, n_vars: int, max_witnesses: int
) -> tuple[int, np.ndarray]:
    """Count assignments satisfying every parity equation.

    Assignment ``a`` gives variable ``i`` the value -1 iff bit ``i`` of ``a``
    is set, so an equation holds iff ``parity(a & mask) == rhs_bit``.
    Returns the count and the first ``max_witnesses`` satisfying indices.
    """
    eqs = [(int(m), int(r)) for m, r in zip(masks, rhs_bits)]
    count = 0
    witnesses: list[int] = []
    for a in range(1 << n_vars):
        for m, r in eqs:
            if _parity(a & m) != r:
                break
        else:
            count += 1
            if len(witnesses) < max_witnesses:
                witnesses.append(a)
    return count, np.array(witnesses, dtype=np.int64)


def scan_bound(
    term_masks: np.ndarray,
    term_signs: np.ndarray,
    n_vars: int,
    constraint_mask: int,
    constraint_bit: int,
) -> tuple[int, int]:
    """Maximize sum(sign * prod(v)) over assignments; first index wins ties.

    ``constraint_bit < 0`` disables the constraint. Returns ``(best, index)``;
    ``index`` is -1 if no assignment satisfies the constraint.
    """
    terms = [(int(m), int(s)) for m, s in zip(term_masks, term_signs)]
    best = 0
    best_idx = -1
    for a in range(1 << n_vars):
        if constraint_bit >= 0 and _parity(a & constraint_mask) != constraint_bit:
            continue
        total = 0
        for m, s in terms:
            total += -s if _parity(a & m) else s
        if best_idx < 0 or total > best:
            best = total
            best_idx = a
    return best, best_idx


def _search(cdf, u: float) -> int:
    k = 0
    last = len(cdf) - 1
    while k < last and u >= cdf[k]:
        k += 1
    return k


def sample_outcomes(
    settings: np.ndarray,
    u_first: np.ndarray,
    u_second: np.ndarray,
    cdf_first: np.ndarray,
    accept_upto: int,
    cdf_second: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Two-stage categorical sampling by inverse CDF.

    Stage one draws an outcome ``g`` from ``cdf_first``. If ``g < accept_upto``
    stage two draws from ``cdf_second[setting, g]``; otherwise the second
    outcome is recorded as -1.
    """
    first_cdf = [float(c) for c in cdf_first]
    second_cdf = cdf_second.tolist()
    n = len(settings)
    first = [0] * n
    second = [-1] * n
    for i in range(n):
        g = _search(first_cdf, float(u_first[i]))
        first[i] = g
        if g < accept_upto:
            second[i] = _search(second_cdf[int(settings[i])][g], float(u_second[i]))
    return np.array(first, dtype=np.int64), np.array(second, dtype=np.int64)
