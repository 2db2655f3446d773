import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leibniz_multiway.engine import graph_from_layers
from leibniz_multiway.gates import (
    CNOT,
    HADAMARD,
    PI_8,
    QUTRIT_SWAP,
    SPIDER_ANGLES,
    SWAP,
    gate_catalog,
    recognize_gate,
    sign_solutions,
    x_spider,
    x_spider_explicit,
    z_spider,
)
from leibniz_multiway.smatrix import layer_system, smatrix_spec, solve_unitary_weights


def _names(matches):
    return [m.gate for m in matches]


def test_theta_minus_quarter_pi_is_hadamard():
    th = -np.pi / 4
    u = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert np.allclose(u, np.array([[1, 1], [-1, 1]]) / np.sqrt(2))
    (m,) = [m for m in recognize_gate(u) if m.gate == "H"]
    assert m.residual <= 1e-9
    assert np.allclose(u[list(m.row_perm)][:, list(m.col_perm)], m.global_phase * HADAMARD)


def test_global_phase_ignored():
    u = np.exp(0.7j) * HADAMARD
    (m,) = recognize_gate(u)
    assert m.gate == "H" and m.moved == 0
    assert m.global_phase == pytest.approx(np.exp(0.7j))


def test_pi_8():
    u = np.diag([1, np.exp(1j * np.pi / 4)])
    assert "pi/8" in _names(recognize_gate(u))
    # with a common phase e^{iS1/k} in front
    assert "pi/8" in _names(recognize_gate(np.exp(-3j) * u))


def _two_layer(edges, n):
    g = graph_from_layers([[f"i{i}" for i in range(n)], [f"o{j}" for j in range(n)]],
                          [((0, i), (1, j)) for i, j in edges], [[8] * n, [8] * n])
    ls = layer_system(g, 0, 1)
    w = solve_unitary_weights(ls.connected)
    return smatrix_spec(ls, w).dense


def test_cnot_and_swap_patterns():
    cnot = _two_layer([(0, 0), (1, 1), (2, 3), (3, 2)], 4)
    found = recognize_gate(cnot)
    assert found[0].gate == "CNOT" and found[0].moved == 0
    swap = _two_layer([(0, 0), (1, 2), (2, 1), (3, 3)], 4)
    found = recognize_gate(swap)
    assert found[0].gate == "SWAP" and found[0].moved == 0
    # any 4x4 permutation matrix is either gate after relabelling words
    assert {"CNOT", "SWAP"} <= set(_names(found))


def test_qutrit():
    pattern = np.abs(QUTRIT_SWAP.real) > 0
    sols = sign_solutions(pattern)
    assert len(sols) == 8
    for w in sols:
        assert np.allclose(w.T @ w, np.eye(3))
    assert "qutrit-SWAP" in _names(recognize_gate(QUTRIT_SWAP))
    # the general support admits none with every entry +-1
    assert sign_solutions([[1, 1, 0], [1, 0, 1], [0, 1, 1]]) == []
    assert len(sign_solutions([[1, 1, 0], [1, 0, 1], [0, 1, 1]], values=(-1, 0, 1))) == 16


def test_spiders():
    z = z_spider(np.pi / 2)
    assert z[0, 0] == 1 and z[3, 3] == pytest.approx(1j)
    assert np.count_nonzero(z) == 2
    hh = np.kron(HADAMARD, HADAMARD)
    for a in SPIDER_ANGLES:
        x = x_spider(a)
        assert np.allclose(x, hh @ z_spider(a) @ hh, atol=1e-15)
        # X spider is |++><++| + e^{ia}|--><--|
        plus = np.array([1, 1]) / np.sqrt(2)
        minus = np.array([1, -1]) / np.sqrt(2)
        pp, mm = np.kron(plus, plus), np.kron(minus, minus)
        assert np.allclose(x, np.outer(pp, pp) + np.exp(1j * a) * np.outer(mm, mm))


def test_explicit_x_table_is_gray_ordered():
    """The printed 1/4 table is the Hadamard conjugate with basis order 00, 01, 11, 10."""
    gray = [0, 1, 3, 2]
    for a in SPIDER_ANGLES:
        printed = x_spider_explicit(a)
        assert np.max(np.abs(printed - x_spider(a))) > 0.4
        assert np.allclose(printed, x_spider(a)[np.ix_(gray, gray)], atol=1e-15)


def test_catalog_entries():
    cat = gate_catalog()
    names = [e.name for e in cat]
    assert names[:5] == ["H", "pi/8", "CNOT", "SWAP", "qutrit-SWAP"]
    assert {"Z(0)", "X(pi/4)", "Z(pi/2)", "X(pi)"} <= set(names)
    for e in cat:
        if e.unitary:
            n = e.matrix.shape[0]
            assert np.allclose(e.matrix.conj().T @ e.matrix, np.eye(n))


def test_random_unitary_matches_nothing():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    assert recognize_gate(q) == []
    assert recognize_gate(np.eye(5)) == []


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["H", "pi/8", "CNOT", "SWAP", "qutrit-SWAP"]), st.integers(0, 10_000),
       st.floats(-np.pi, np.pi))
def test_recognition_invariant_under_relabelling(name, seed, theta):
    gate = {"H": HADAMARD, "pi/8": PI_8, "CNOT": CNOT, "SWAP": SWAP, "qutrit-SWAP": QUTRIT_SWAP}[name]
    rng = np.random.default_rng(seed)
    n = gate.shape[0]
    rp, cp = rng.permutation(n), rng.permutation(n)
    u = np.empty_like(gate)
    # u[rp][:, cp] = e^{i theta} gate
    u[np.ix_(rp, cp)] = np.exp(1j * theta) * gate
    found = {m.gate: m for m in recognize_gate(u)}
    assert name in found
    m = found[name]
    assert m.residual <= 1e-9
    assert np.allclose(u[list(m.row_perm)][:, list(m.col_perm)], m.global_phase * gate)
