import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leibniz_multiway.stats import (
    EnsembleSpec,
    EnumerationLimitError,
    View,
    chemical_potential,
    ensemble_report,
    entropy_variety_scan,
    enumerate_leibnizian,
    fd_prediction,
    fermi_dirac,
    idealized_fd_oracle,
    occupation_expectation,
    occupation_table,
    partition_function,
    random_leibnizian,
    views_of,
)
from leibniz_multiway.strcore import is_leibnizian, variety


# --- brute-force oracles ---------------------------------------------------

def _a_brute(word):
    n = len(word)
    big = word * 3
    mmax = n // 2 - 1 if n % 2 == 0 else (n - 1) // 2

    def nb(i, m):
        return big[n + i - m:n + i + m + 1]

    res = []
    for i in range(n):
        best = 0
        for j in range(n):
            if j == i:
                continue
            r = next(m for m in range(1, mmax + 1) if nb(i, m) not in (nb(j, m), nb(j, m)[::-1]))
            best = max(best, r)
        res.append(best)
    return res


_BRUTE = {}


def _brute(word):
    """(variety, views) read straight off the tripled word; independent of the package."""
    if word not in _BRUTE:
        n = len(word)
        big = word * 3
        a = _a_brute(word)
        views = [(ai, big[n + i - ai:n + i + ai + 1]) for i, ai in enumerate(a)]
        _BRUTE[word] = (sum(1 / ai for ai in a), views)
    return _BRUTE[word]


def _occupation_brute(view, words, beta, gamma):
    num = 0.0
    den = 0.0
    for w in words:
        v_w, views = _brute(w)
        wt = math.exp(-beta * gamma * v_w)
        den += wt
        for v in views:
            if v == view:
                num += wt
    return num / den


def _ensemble_brute(n):
    return ["".join(t) for t in itertools.product("AB", repeat=n) if is_leibnizian(t)]


def _dp_free_occupations(energies, n, beta):
    """Canonical occupations by summing over every n-subset (small M only)."""
    m = len(energies)
    z = 0.0
    occ = np.zeros(m)
    for subset in itertools.combinations(range(m), n):
        w = math.exp(-beta * sum(energies[s] for s in subset))
        z += w
        occ[list(subset)] += w
    return occ / z


# --- tests -----------------------------------------------------------------

def test_enumeration_examples():
    six = enumerate_leibnizian("AB", 6)
    assert tuple("AABABB") in six and tuple("AAABBB") not in six
    assert enumerate_leibnizian("AB", 3) == []
    assert enumerate_leibnizian("A", 7) == []
    assert len(six) == 12
    assert set(six) == {tuple(w) for w in _ensemble_brute(6)}
    rot = enumerate_leibnizian("AB", 6, "rotation")
    assert len(rot) < len(six)
    with pytest.raises(EnumerationLimitError):
        enumerate_leibnizian("AB", 30)


def test_views_of_aababb():
    views = views_of("AABABB")
    assert views[2] == View(1, tuple("ABA"))
    assert len(set(views)) == 6
    with pytest.raises(ValueError):
        views_of("AAABBB")
    with pytest.raises(ValueError):
        View(0, ("A",))


def test_partition_function_trivial():
    assert partition_function(["AABABB"], beta=0.0) == 1
    assert partition_function(["AABABB", "ABAABB"], beta=0.0) == 2
    with pytest.raises(ValueError):
        partition_function([])


def test_partition_function_n8():
    words = enumerate_leibnizian("AB", 8)
    direct = sum(math.exp(-float(variety(w))) for w in _ensemble_brute(8))
    assert partition_function(words) == pytest.approx(direct, rel=1e-13)


def test_occupation_extremes():
    words = ["AABABB"]
    assert occupation_expectation(View(1, tuple("ABA")), words) == 1.0
    assert occupation_expectation(View(1, tuple("CCC")), words) == 0.0


def test_occupation_against_double_loop():
    words = enumerate_leibnizian("AB", 8)
    brute_words = _ensemble_brute(8)
    aba = View(1, tuple("ABA"))
    assert occupation_expectation(aba, words, 1.0, 1.0) == pytest.approx(
        _occupation_brute((1, "ABA"), brute_words, 1.0, 1.0), abs=1e-12)


@pytest.mark.parametrize("n", [8, 9])
def test_report_properties(n):
    rep = ensemble_report("AB", n)
    assert abs(rep.total_occupation - n) <= 1e-10
    words = _ensemble_brute(n)
    for row in rep.rows:
        assert 0 <= row["n_expected"] <= 1
        seq = row["view"]
        brute = _occupation_brute((row["radius"], seq), words, 1.0, 1.0)
        assert abs(row["n_expected"] - brute) <= 1e-12
        assert row["abs_dev"] == abs(row["n_expected"] - row["fd_predicted"])
    assert rep.mu == pytest.approx(math.log(rep.Z_Nminus1 / rep.Z_N))
    assert rep.mu == pytest.approx(chemical_potential("AB", n))


def test_ensemble_spec():
    spec = EnsembleSpec(("A", "B"), 8)
    assert spec.report().size == len(enumerate_leibnizian("AB", 8))
    with pytest.raises(ValueError):
        EnsembleSpec(("A", "B"), 8, beta=0)


def test_chemical_potential_checks():
    with pytest.raises(ValueError):
        chemical_potential("AB", 4)  # nothing of length 3
    with pytest.raises(ValueError):
        chemical_potential("AB", 8, beta=-1)


def test_fd_prediction():
    assert fd_prediction(2, 1.0, 1.0, 0.5) == pytest.approx(0.5)
    assert fd_prediction(1, 1e-12, 1.0, 0.0) == pytest.approx(0.5)
    assert fd_prediction(1, 200.0, 1.0, 0.0) < 1e-80
    with pytest.raises(ValueError):
        fd_prediction(0)


def test_idealized_oracle_trivial_cases():
    occ, _ = idealized_fd_oracle([0.3, 0.3], 1)
    assert np.allclose(occ, [0.5, 0.5])
    occ, _ = idealized_fd_oracle([0.1, 0.5, 2.0], 3)
    assert np.allclose(occ, 1)
    with pytest.raises(ValueError):
        idealized_fd_oracle([0.1, 0.2], 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.0, 3.0), min_size=2, max_size=8), st.data(), st.floats(0.1, 3.0))
def test_idealized_oracle_against_subset_sum(energies, data, beta):
    n = data.draw(st.integers(1, len(energies)))
    occ, mu = idealized_fd_oracle(energies, n, beta)
    assert np.allclose(occ, _dp_free_occupations(energies, n, beta), atol=1e-12)
    assert occ.sum() == pytest.approx(n)


def test_idealized_convergence():
    devs = []
    for m in (10, 20, 40, 80):
        e = np.linspace(0.1, 1.0, m)
        occ, mu = idealized_fd_oracle(e, m // 2)
        devs.append(np.max(np.abs(occ - fermi_dirac(e, 1.0, mu))))
    assert all(b <= a for a, b in zip(devs, devs[1:]))


def test_random_sampling_seeded():
    a = random_leibnizian("AB", range(8, 21), 20, seed=5)
    b = random_leibnizian("AB", range(8, 21), 20, seed=5)
    assert a == b
    assert all(is_leibnizian(w) and 8 <= len(w) <= 20 for w in a)
    with pytest.raises(RuntimeError):
        random_leibnizian("A", [5], 1, max_tries=50)


def test_scan():
    words = random_leibnizian("AB", range(8, 21), 200, seed=0)
    rep = entropy_variety_scan(words, seed=0)
    assert rep.r > 0.1
    twice = entropy_variety_scan(words + words)
    assert twice.r == pytest.approx(rep.r, abs=1e-12)
    flat = entropy_variety_scan(["AABABB"] * 30)
    assert flat.r is None and not flat.defined
    with pytest.raises(ValueError):
        entropy_variety_scan(words[:10])


def test_occupation_table_matches_single_calls():
    words = enumerate_leibnizian("AB", 8)
    table = occupation_table(words, 0.7, 1.3)
    for view, occ in list(table.items())[:10]:
        assert occ == pytest.approx(occupation_expectation(view, words, 0.7, 1.3), abs=1e-14)
