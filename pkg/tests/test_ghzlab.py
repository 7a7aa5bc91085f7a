import math

import numpy as np
import pytest

from avnlab import avn, ghzlab
from avnlab.errors import DimensionError, InsufficientStatisticsError, NoSupportError
from avnlab.ghzlab import AnalyzerOutcome, GhzIndex
from avnlab.qcore import PauliAxis, StateVector, expectation, kron_all, random_state, PauliString
from conftest import dense

S = 1 / math.sqrt(2)
X, Y = PauliAxis.X, PauliAxis.Y

SIGN_TUPLES = [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]


def test_ghz_basis_definitions():
    basis = ghzlab.ghz_basis()
    assert len(basis) == 8
    np.testing.assert_allclose(basis[0].amplitudes[[0, 7]], [S, S])
    phi2m = basis[GhzIndex(2, -1).position].amplitudes
    assert phi2m[2] == pytest.approx(S) and phi2m[5] == pytest.approx(-S)
    assert np.count_nonzero(phi2m) == 2
    gram = np.array([[np.vdot(a.amplitudes, b.amplitudes) for b in basis] for a in basis])
    np.testing.assert_allclose(gram, np.eye(8), atol=1e-12)


def test_ghz_labels():
    assert [g.ascii for g in ghzlab.GHZ_ORDER][:3] == ["Phi0+", "Phi0-", "Phi1+"]
    assert GhzIndex(0, 1).unicode == "Φ₀⁺"
    assert GhzIndex.parse("Phi3-") == GhzIndex(3, -1)
    with pytest.raises(ValueError):
        GhzIndex(4, 1)


def test_basis_completeness(rng):
    for _ in range(50):
        coeffs = ghzlab.ghz_expand(random_state(3, rng))
        assert np.sum(np.abs(coeffs) ** 2) == pytest.approx(1, abs=1e-12)


def test_eigen_table_matches_printed_table():
    table = ghzlab.ghz_eigen_table()
    np.testing.assert_array_equal(table, ghzlab.PRINTED_EIGEN_TABLE)
    assert list(table[0]) == [1, -1, -1, -1]
    assert list(table[GhzIndex(2, -1).position]) == [-1, -1, 1, -1]
    assert all(np.prod(row) == -1 for row in table)


def test_eigen_table_against_dense_expectations():
    ops = {"x2x4x6": dense("XXX"), "x2y4y6": dense("XYY"), "y2x4y6": dense("YXY"), "y2y4x6": dense("YYX")}
    table = ghzlab.ghz_eigen_table()
    for g, state in zip(ghzlab.GHZ_ORDER, ghzlab.ghz_basis()):
        for col, label in enumerate(ghzlab.TABLE_COLUMNS):
            v = state.amplitudes
            assert np.vdot(v, ops[label] @ v).real == pytest.approx(table[g.position, col], abs=1e-12)
            assert expectation(PauliString.parse(label, avn.DEBBIE), state) == pytest.approx(
                table[g.position, col], abs=1e-12)


def test_swap_decomposition():
    psi = avn.build_psi()
    dec = ghzlab.decompose_swap(psi)
    support = dec.support()
    assert len(support) == 8
    for _, _, c in support:
        assert abs(c) == pytest.approx(1 / math.sqrt(8), abs=1e-12)
    assert np.sum(np.abs(dec.coefficients) ** 2) == pytest.approx(1, abs=1e-12)
    assert {(g, h) for g, h, _ in support} == set(ghzlab.PRINTED_SWAP_SIGNS)
    matches, phase = ghzlab.match_printed_swap(dec)
    assert matches
    assert phase == pytest.approx(-1, abs=1e-12)
    np.testing.assert_allclose(dec.reconstruct().amplitudes, psi.amplitudes, atol=1e-12)


def test_swap_coefficients_by_direct_contraction():
    # oracle: contract the full 64-vector against each product basis state without permute()
    psi = avn.build_psi().amplitudes
    basis = [s.amplitudes for s in ghzlab.ghz_basis()]
    dec = ghzlab.decompose_swap(avn.build_psi())
    for i, g in enumerate(basis):
        for j, h in enumerate(basis):
            vec = np.zeros(64, dtype=complex)
            for d in range(8):
                for a in range(8):
                    # interleave bits: qubit order 1..6 = a0 d0 a1 d1 a2 d2
                    bits = [(a >> 2) & 1, (d >> 2) & 1, (a >> 1) & 1, (d >> 1) & 1, a & 1, d & 1]
                    vec[int("".join(map(str, bits)), 2)] = g[d] * h[a]
            assert np.vdot(vec, psi) == pytest.approx(dec.coefficients[i, j], abs=1e-12)


def test_swap_requires_six_qubits():
    with pytest.raises(DimensionError):
        ghzlab.decompose_swap(ghzlab.ghz_basis()[0])


def test_postselect_on_psi():
    psi = avn.build_psi()
    rec = ghzlab.postselect(psi, GhzIndex(0, -1))
    assert rec.probability == pytest.approx(0.125, abs=1e-12)
    overlap = abs(ghzlab.ghz_state(GhzIndex(0, 1)).inner(rec.conditional_state))
    assert overlap == pytest.approx(1, abs=1e-12)
    total = 0.0
    for g in ghzlab.GHZ_ORDER:
        r = ghzlab.postselect(psi, g)
        assert r.probability == pytest.approx(0.125, abs=1e-12)
        total += r.probability
    assert total == pytest.approx(1, abs=1e-12)


def test_each_swap_component_obeys_the_correlations():
    dec = ghzlab.decompose_swap(avn.build_psi())
    for g, h, _ in dec.support():
        coeffs = np.zeros((8, 8), dtype=complex)
        coeffs[g.position, h.position] = 1
        component = ghzlab.SwapDecomposition(coeffs).reconstruct()
        component = StateVector(component.amplitudes)
        assert all(r.residual < 1e-12 for r in avn.verify_eigenequations(component))


def test_postselect_no_support():
    state = ghzlab.ghz_state(GhzIndex(1, 1))
    with pytest.raises(NoSupportError):
        ghzlab.postselect(state, GhzIndex(0, 1))


def test_analyzer_on_psi():
    recs = ghzlab.analyzer_measure(avn.build_psi())
    assert [r.outcome for r in recs] == [AnalyzerOutcome.PHI0_PLUS, AnalyzerOutcome.PHI0_MINUS,
                                         AnalyzerOutcome.FAIL]
    probs = [r.probability for r in recs]
    np.testing.assert_allclose(probs, [0.125, 0.125, 0.75], atol=1e-12)
    assert sum(probs) == pytest.approx(1, abs=1e-12)


def test_analyzer_on_three_qubit_inputs():
    recs = ghzlab.analyzer_measure(ghzlab.ghz_state(GhzIndex(0, 1)))
    assert recs[0].probability == pytest.approx(1, abs=1e-12)
    recs = ghzlab.analyzer_measure(ghzlab.product_eigenstate((X, Y, Y), (1, 1, 1)))
    np.testing.assert_allclose([r.probability for r in recs], [0, 0.25, 0.75], atol=1e-12)
    assert recs[0].conditional_state is None


def test_analyzer_probabilities_sum_to_one(rng):
    for _ in range(20):
        recs = ghzlab.analyzer_measure(random_state(6, rng))
        assert sum(r.probability for r in recs) == pytest.approx(1, abs=1e-12)


def test_product_eigenstate():
    plus_rr = ghzlab.product_eigenstate((X, Y, Y), (1, 1, 1))
    expected = np.kron(np.kron([S, S], [S, 1j * S]), [S, 1j * S])
    np.testing.assert_allclose(plus_rr.amplitudes, expected, atol=1e-15)
    ppp = ghzlab.product_eigenstate("XXX", (1, 1, 1))
    np.testing.assert_allclose(ghzlab.ghz_expand(ppp), [0.5, 0, 0.5, 0, 0.5, 0, 0.5, 0], atol=1e-12)
    minus = ghzlab.product_eigenstate((X, Y, Y), (-1, -1, -1))
    assert abs(plus_rr.inner(minus)) < 1e-12
    assert np.count_nonzero(np.abs(ghzlab.ghz_expand(minus)) > 1e-12) == 4
    with pytest.raises(ValueError):
        ghzlab.product_eigenstate("XZY", (1, 1, 1))


@pytest.mark.parametrize("identity", [1, 2, 3, 4])
def test_printed_expansions(identity):
    run = ghzlab.contextuality_run(identity, (1, 1, 1))
    printed = ghzlab.PRINTED_EXPANSIONS[identity]
    assert run.support == frozenset(printed)
    want = [printed.get(g, 0) for g in ghzlab.GHZ_ORDER]
    np.testing.assert_allclose(run.coefficients, want, atol=1e-12)
    assert run.identifiable_probability == pytest.approx(0.25, abs=1e-12)
    assert run.triple_value == 1 and run.identity_holds


def test_contextuality_examples():
    r1 = ghzlab.contextuality_run(1, (1, 1, 1))
    assert r1.support == {GhzIndex(0, -1), GhzIndex(1, -1), GhzIndex(2, 1), GhzIndex(3, 1)}
    r4 = ghzlab.contextuality_run(4, (1, 1, 1))
    assert r4.support == {GhzIndex(k, 1) for k in range(4)}


@pytest.mark.parametrize("identity", [1, 2, 3, 4])
@pytest.mark.parametrize("signs", SIGN_TUPLES)
def test_all_contextuality_runs(identity, signs):
    run = ghzlab.contextuality_run(identity, signs)
    col = ghzlab.TABLE_COLUMNS.index(run.triple)
    table = ghzlab.ghz_eigen_table()
    assert {int(table[g.position, col]) for g in run.support} == {run.triple_value}
    assert run.triple_value == math.prod(signs)
    assert run.identity_holds
    assert len(run.support) == 4


def test_contextuality_bad_identity():
    with pytest.raises(ValueError):
        ghzlab.contextuality_run(5, (1, 1, 1))


def test_sample_ideal():
    res = ghzlab.sample_shots(100_000, 7, avn.NoiseParams(1.0))
    assert res.estimate == -4.0
    assert res.std_error == 0.0
    assert all(s.product == -1 for s in res.shots if s.accepted)
    se = math.sqrt(0.25 * 0.75 / res.n_shots)
    assert abs(res.acceptance_fraction - 0.25) < 5 * se


def test_sample_noisy():
    res = ghzlab.sample_shots(100_000, 11, avn.NoiseParams(0.9))
    assert abs(res.estimate - (-4 * 0.9 ** 3)) < 5 * res.std_error
    assert res.std_error > 0


def test_sample_fixed_policy():
    res = ghzlab.sample_shots(20_000, 3, avn.NoiseParams(0.9), "fixed", fixed_setting=2)
    assert {s.setting for s in res.shots} == {2}
    assert abs(res.estimate - (-4 * 0.9 ** 3)) < 5 * res.std_error


def test_sample_shot_records():
    res = ghzlab.sample_shots(400, 5, avn.NoiseParams(0.95))
    assert [s.setting for s in res.shots[:5]] == [1, 2, 3, 4, 1]
    for s in res.shots:
        if s.accepted:
            assert s.debbie_outcome in (AnalyzerOutcome.PHI0_PLUS, AnalyzerOutcome.PHI0_MINUS)
            assert s.product == ghzlab.triple_value(s.ghz_outcome, avn.TRIPLES[s.setting - 1]) * math.prod(s.local_values)
        else:
            assert s.debbie_outcome is AnalyzerOutcome.FAIL and s.product is None
    assert res.accepted == sum(s.accepted for s in res.shots)


def test_sample_determinism():
    a = ghzlab.sample_shots(5000, 99, avn.NoiseParams(0.8))
    b = ghzlab.sample_shots(5000, 99, avn.NoiseParams(0.8))
    c = ghzlab.sample_shots(5000, 100, avn.NoiseParams(0.8))
    assert a.shots == b.shots and a.estimate == b.estimate
    assert a.shots != c.shots


def test_sample_insufficient_statistics():
    with pytest.raises(InsufficientStatisticsError):
        ghzlab.sample_shots(3, 1, avn.NoiseParams(1.0))


def test_sample_argument_validation():
    with pytest.raises(ValueError):
        ghzlab.sample_shots(0, 1, avn.NoiseParams(1.0))
    with pytest.raises(ValueError):
        ghzlab.sample_shots(10, 1, avn.NoiseParams(1.0), "random")


def test_sampling_tables_match_exact_conditional_statistics():
    # exact conditional <term> given acceptance equals -F^3 for every setting
    F = 0.85
    cdf_first, cdf_second = ghzlab._shot_tables(F)
    p_first = np.diff(np.concatenate([[0], cdf_first]))
    np.testing.assert_allclose(p_first, np.full(8, 1 / 8), atol=1e-12)
    table = ghzlab.ghz_eigen_table()
    for s in range(4):
        col = ghzlab.TABLE_COLUMNS.index(avn.TRIPLES[s])
        mean = 0.0
        for gi in range(2):
            p_local = np.diff(np.concatenate([[0], cdf_second[s, gi]]))
            local_prod = [(-1) ** bin(k).count("1") for k in range(8)]
            mean += 0.5 * table[gi, col] * float(np.dot(p_local, local_prod))
        assert mean == pytest.approx(-F ** 3, abs=1e-12)
