import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leibniz_multiway.engine import build_multiway, graph_from_layers
from leibniz_multiway.smatrix import (
    Infeasible,
    UnitarityError,
    WeightMatrix,
    build_smatrix,
    compose,
    delta_m,
    diagonal_hamiltonian,
    euler_omega,
    extend_for_unitarity,
    free_param_count,
    layer_system,
    mutual_interaction_check,
    normalize_columns,
    phase,
    rotation_weights,
    smatrix_spec,
    solve_unitary_weights,
    tensor_decompose_check,
    unitarity_residual,
)


def _system(pattern, varieties=None):
    """Two-layer synthetic graph whose connectivity is ``pattern`` (out x in)."""
    pattern = np.asarray(pattern, dtype=bool)
    m, n = pattern.shape
    varieties = varieties or [[1] * n, [1] * m]
    edges = [((0, i), (1, j)) for j in range(m) for i in range(n) if pattern[j, i]]
    g = graph_from_layers([[f"i{i}" for i in range(n)], [f"o{j}" for j in range(m)]], edges, varieties)
    return g, layer_system(g, 0, 1)


def test_phase_and_k():
    assert phase(0) == 1
    assert phase(-np.pi, 1.0) == pytest.approx(-1)
    assert phase(-np.pi, 2.0) == pytest.approx(-1j)
    assert phase(1, 1.0, gamma=2.0) == pytest.approx(np.exp(2j))
    with pytest.raises(ValueError):
        phase(1, 0.0)


def test_rotation_family_is_the_closed_form():
    for lam in np.linspace(-1, 1, 11):
        w = solve_unitary_weights(np.ones((2, 2), bool), lam=lam)
        assert w.feasible and w.method == "rotation"
        c = np.sqrt(1 - lam ** 2)
        assert np.allclose(w.entries, [[c, lam], [-lam, c]], atol=0)
        s1, s2 = -3.0, -7.5
        u = w.entries * np.array([np.exp(1j * s1), np.exp(1j * s2)])[None, :]
        assert unitarity_residual(u) <= 1e-12
    with pytest.raises(ValueError):
        rotation_weights(1.5)


def test_factored_equals_dense():
    g = build_multiway(["AABBDCABABDC", "ABABCDABABDC"], ["BA->AB", "DC->CD"], 1, canon_mode="rotation")
    ls = layer_system(g, 0, 1)
    assert ls.connected.all() and ls.shape == (2, 2)
    w = solve_unitary_weights(ls.connected)
    spec = smatrix_spec(ls, w, k=1.3)
    assert np.array_equal(spec.dense, build_smatrix(ls, w, k=1.3))
    assert unitarity_residual(spec) <= 1e-9


def test_support_violation_rejected():
    g, ls = _system([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        build_smatrix(ls, [[1, 1], [0, 1]])
    with pytest.raises(ValueError):
        WeightMatrix(np.ones((2, 2)), np.eye(2, dtype=bool))


def test_no_zero_rows_on_generated_graphs():
    for root, rules in [("AABAABBABAB", ["BA->AB"]), ("BADCBADC", ["BA->AB", "DC->CD"])]:
        g = build_multiway(root, rules, 3)
        for a in range(3):
            try:
                ls = layer_system(g, a, a + 1)
            except ValueError:
                continue
            assert ls.connected.any(axis=1).all()


def test_two_in_three_out_feasible_three_in_two_out_not():
    ok = solve_unitary_weights(np.ones((3, 2), bool), restarts=32, seed=0)
    assert ok.feasible and ok.residual <= 1e-9
    bad = solve_unitary_weights(np.ones((2, 3), bool), restarts=32, seed=0)
    assert isinstance(bad, Infeasible) and bad.residual >= 1e-3
    # parameter counting alone does not see this: the count is 0 and no extra
    # row is asked for, but two rows cannot hold three orthonormal columns
    assert free_param_count(3, 2) == 0 and delta_m(3, 2) == 0


def test_unconnected_in_word_infeasible():
    bad = solve_unitary_weights(np.array([[1, 0], [1, 0]], bool))
    assert not bad.feasible
    assert "no connection" in bad.reason


def test_parameter_counting():
    assert free_param_count(4, 4) == 6
    assert free_param_count(1, 1) == 0
    assert free_param_count(2, 3) == 3
    for n in range(1, 9):
        for m in range(1, 9):
            assert 2 * free_param_count(n, m) == n * (2 * m - n - 1)


def test_delta_m_formulas():
    for n in range(2, 9):
        for m in range(1, 5):
            formula = n // 2 + 1 - m if n % 2 == 0 else (n + 1) // 2 - m
            if 2 * m < n + 1:
                assert delta_m(n, m) == formula
                assert 2 * (m + delta_m(n, m)) >= n + 1
            else:
                assert delta_m(n, m) == 0
    assert (delta_m(4, 2), delta_m(3, 2), delta_m(5, 1)) == (1, 0, 2)


def test_permutation_patterns_are_pm_one():
    rng = np.random.default_rng(3)
    for n in range(1, 7):
        p = np.eye(n, dtype=bool)[rng.permutation(n)]
        w = solve_unitary_weights(p)
        assert w.method == "permutation"
        assert set(np.abs(w.entries[p])) == {1.0}


def test_blocks_and_mutual_interaction():
    pat = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]], bool)
    blocks = tensor_decompose_check(pat)
    assert sorted(b.in_indices for b in blocks) == [(0, 1), (2,)]
    assert mutual_interaction_check(pat)
    assert not mutual_interaction_check(np.array([[1, 1], [0, 1]], bool))
    with pytest.raises(ValueError):
        mutual_interaction_check(np.ones((2, 3), bool))


def test_numeric_patterns_feasible():
    for pat in [np.ones((4, 4)), np.ones((6, 6)),
                [[1, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 1]],
                [[1, 1, 0], [1, 0, 1], [0, 1, 1]]]:
        pat = np.asarray(pat, bool)
        w = solve_unitary_weights(pat, seed=1)
        assert w.feasible, pat
        assert np.max(np.abs(w.entries.T @ w.entries - np.eye(pat.shape[1]))) <= 1e-9
        assert np.all(w.entries[~pat] == 0)


def test_solver_is_seeded():
    a = solve_unitary_weights(np.ones((4, 4), bool), seed=7)
    b = solve_unitary_weights(np.ones((4, 4), bool), seed=7)
    assert np.array_equal(a.entries, b.entries)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(0, 3), st.integers(0, 10_000))
def test_norm_preservation(n, extra, seed):
    rng = np.random.default_rng(seed)
    m = n + extra
    pat = rng.random((m, n)) < 0.7
    pat[rng.permutation(m)[:n], np.arange(n)] = True
    w = solve_unitary_weights(pat, seed=seed, restarts=6)
    if not w.feasible:
        return
    phases = np.exp(1j * rng.uniform(-5, 5, n))
    u = w.entries * phases[None, :]
    assert unitarity_residual(u) <= 1e-9
    for _ in range(5):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert abs(np.linalg.norm(u @ x) - np.linalg.norm(x)) <= 1e-9 * max(1, np.linalg.norm(x))


def _random_three_layer(rng):
    sizes = [int(rng.integers(1, 7)) for _ in range(3)]
    edges = []
    for d in range(2):
        a, b = sizes[d], sizes[d + 1]
        # every node of the next layer gets at least one parent
        for j in range(b):
            edges.append(((d, int(rng.integers(a))), (d + 1, j)))
        for i in range(a):
            for j in range(b):
                if rng.random() < 0.4:
                    edges.append(((d, i), (d + 1, j)))
    edges = sorted(set(edges))
    var = [[int(rng.integers(1, 20)) for _ in range(s)] for s in sizes]
    words = [[f"w{d}_{i}" for i in range(s)] for d, s in enumerate(sizes)]
    return graph_from_layers(words, edges, var)


def test_composition_identity_randomized():
    rng = np.random.default_rng(2024)
    for trial in range(150):
        g = _random_three_layer(rng)
        ew = {(e.source, e.target): float(rng.normal()) for e in g.events}
        k = float(rng.uniform(0.5, 3))
        l01, l12, l02 = layer_system(g, 0, 1), layer_system(g, 1, 2), layer_system(g, 0, 2)
        assert l01.out_ids == l12.in_ids
        u = compose(build_smatrix(l12, k=k, edge_weights=ew), build_smatrix(l01, k=k, edge_weights=ew))
        direct = build_smatrix(l02, k=k, edge_weights=ew)
        assert l02.out_ids == l12.out_ids
        assert np.max(np.abs(u - direct)) <= 1e-12, trial


def test_compose_shape_mismatch():
    with pytest.raises(ValueError):
        compose(np.eye(2), np.eye(3))


def test_extension_closed_form():
    # three in-words, two out-words, one out-word shared
    g, ls = _system([[1, 1, 0], [0, 0, 1]])
    w = np.array([[0.6, 0.8, 0], [0, 0, 1.0]])
    spec = smatrix_spec(ls, WeightMatrix(w, ls.connected))
    assert delta_m(3, 2) == 0
    uc = extend_for_unitarity(spec, 1)
    assert uc.shape == (3, 3) and uc.out_ids[-1] == -1
    assert unitarity_residual(uc) <= 1e-9
    assert np.array_equal(uc.weights.entries[:2], w)
    assert extend_for_unitarity(uc, 0) is uc


def test_extension_of_four_to_two():
    g, ls = _system([[1, 0, 0, 0], [0, 0, 0, 1]])
    w = solve_unitary_weights(ls.connected)
    assert not w.feasible
    spec = smatrix_spec(ls, w.best)
    assert delta_m(4, 2) == 1
    with pytest.raises(UnitarityError) as err:
        extend_for_unitarity(spec, 1)
    assert err.value.rows_needed == 2
    uc = extend_for_unitarity(spec, 2)
    assert unitarity_residual(uc) <= 1e-9


def test_extension_with_pinned_entries():
    g, ls = _system([[1, 1], [0, 1]])
    w = WeightMatrix(np.array([[0.6, 0.3], [0, 0.5]]), ls.connected)
    spec = smatrix_spec(ls, w)
    pinned = np.array([[True, False], [False, False]])
    uc = extend_for_unitarity(spec, 1, pinned=pinned, seed=0)
    assert uc.weights.entries[0, 0] == 0.6
    assert unitarity_residual(uc) <= 1e-9


def test_euler_omega_orthogonal():
    rng = np.random.default_rng(0)
    for _ in range(20):
        psi, theta, phi = rng.uniform(-np.pi, np.pi, 3)
        for sign in (1, -1):
            w = euler_omega(psi, theta, phi, sign)
            assert np.allclose(w.T @ w, np.eye(3), atol=1e-12)
    assert np.allclose(euler_omega(0, 0, 0), np.eye(3))


def test_normalize_and_hamiltonian():
    u = normalize_columns([[3, 0], [4, 0]])
    assert np.allclose(u, [[0.6, 0], [0.8, 0]])
    h = diagonal_hamiltonian(np.diag([1, np.exp(-0.5j)]), dt=0.5)
    assert np.allclose(h, np.diag([0, 1.0]))
    with pytest.raises(ValueError):
        diagonal_hamiltonian(np.ones((2, 2)))
