"""Dense-matrix oracle tests: synthesis, logarithms, Pauli expansion.

The orbit-report goldens freeze the L=4 and L=6 profiles.  Both show the
point of the whole exercise: coefficients do not decay with diameter (on
L=6 the largest coefficients sit at maximal diameter), while every orbit
is exactly flat, so the generator is translation invariant but nonlocal.
"""

from __future__ import annotations

import csv

import numpy as np
import pytest

from qcalab.clifford import fractal_rule, identity_rule, step
from qcalab.dense import (
    BranchChoice,
    BranchMismatchError,
    commutant_check,
    exp_minus_i,
    log_hamiltonian,
    orbit_coefficient_report,
    pauli_coefficients,
    synthesize_unitary,
    term_matrix,
)
from qcalab.pauli import PauliTerm


def _translation_matrix(L: int) -> np.ndarray:
    # site r occupies bit L-1-r; shifts every site by +1 around the ring
    n = 1 << L
    perm = np.zeros(n, dtype=int)
    for b in range(n):
        bits = [(b >> (L - 1 - r)) & 1 for r in range(L)]
        shifted = bits[-1:] + bits[:-1]
        perm[b] = sum(v << (L - 1 - r) for r, v in enumerate(shifted))
    T = np.zeros((n, n))
    T[perm, np.arange(n)] = 1.0
    return T


# -- synthesis ----------------------------------------------------------


def test_identity_rule_synthesizes_identity():
    W = synthesize_unitary(identity_rule(), 3)
    assert np.array_equal(W.matrix, np.eye(8))


def test_synthesized_unitary_implements_conjugation():
    rule = fractal_rule()
    W = synthesize_unitary(rule, 5)
    for text in ["@1:XZY", "@0:Z", "@3:YX"]:
        t = PauliTerm.from_text(text, ring=5)
        lhs = term_matrix(step(rule, t), 5)
        rhs = W.matrix.conj().T @ term_matrix(t, 5) @ W.matrix
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_translation_is_conserved():
    W = synthesize_unitary(fractal_rule(), 5)
    assert commutant_check(_translation_matrix(5), W) < 1e-12
    # single-site strings are moved by the rule, so they cannot commute
    x0 = term_matrix(PauliTerm.from_text("@0:X", ring=5), 5)
    assert commutant_check(x0, W) > 0.1


def test_commutant_check_rejects_shape_mismatch():
    W = synthesize_unitary(fractal_rule(), 4)
    with pytest.raises(ValueError):
        commutant_check(np.eye(8), W)


# -- logarithm branches -------------------------------------------------


def test_log_exp_round_trip():
    W = synthesize_unitary(fractal_rule(), 5)
    H = log_hamiltonian(W)
    assert np.max(np.abs(H - H.conj().T)) < 1e-12
    assert np.max(np.abs(exp_minus_i(H) - W.matrix)) < 1e-12


def test_random_branch_changes_h_but_not_exp():
    W = synthesize_unitary(fractal_rule(), 5)
    principal = log_hamiltonian(W)
    rng = np.random.default_rng(7)
    shifted = log_hamiltonian(W, BranchChoice.random(W.cluster_count, rng))
    assert np.max(np.abs(shifted - principal)) > 1.0
    assert np.max(np.abs(exp_minus_i(shifted) - W.matrix)) < 1e-12


def test_branch_offsets_must_match_clusters():
    W = synthesize_unitary(fractal_rule(), 4)
    with pytest.raises(BranchMismatchError):
        log_hamiltonian(W, BranchChoice(offsets=(0,)))


# -- Pauli expansion ----------------------------------------------------


def test_pauli_coefficients_recover_hand_built_sum():
    L = 3
    wanted = {"@0:XIZ": 0.7, "@1:YZ": -0.25, "@0:ZZZ": 0.125}
    H = np.zeros((8, 8), dtype=complex)
    for text, c in wanted.items():
        H += c * term_matrix(PauliTerm.from_text(text, ring=L), L)
    spec = pauli_coefficients(H, L)
    for text, c in wanted.items():
        assert spec.coefficient(PauliTerm.from_text(text, ring=L)) == pytest.approx(c, abs=1e-14)
    assert len(spec.significant()) == 3
    assert np.max(np.abs(spec.reconstruct() - H)) < 1e-13


def test_expansion_round_trips_a_generator():
    W = synthesize_unitary(fractal_rule(), 4)
    H = log_hamiltonian(W)
    spec = pauli_coefficients(H, 4)
    assert np.max(np.abs(spec.reconstruct() - H)) < 1e-12


# -- orbit report goldens -----------------------------------------------


def _report(L: int):
    rule = fractal_rule()
    W = synthesize_unitary(rule, L)
    spec = pauli_coefficients(log_hamiltonian(W), L)
    return orbit_coefficient_report(spec, rule)


def test_orbit_report_four_sites():
    rep = _report(4)
    assert len(rep.rows) == 33
    assert rep.max_spread < 1e-12
    assert rep.trace_coefficient == pytest.approx(np.pi / 8, abs=1e-9)
    expected = [(0, 0.15115), (1, 0.1309), (2, 0.15115), (3, 0.1309)]
    assert [d for d, _ in rep.decay] == [d for d, _ in expected]
    for (_, got), (_, want) in zip(rep.decay, expected):
        assert got == pytest.approx(want, abs=1e-4)


def test_orbit_report_six_sites_profile_rises():
    rep = _report(6)
    assert len(rep.rows) == 113
    assert rep.max_spread < 1e-12
    assert rep.trace_coefficient == pytest.approx(0.294524, abs=1e-5)
    values = dict(rep.decay)
    expected = {0: 0.0, 1: 0.06545, 2: 0.056681, 3: 0.098175, 4: 0.132256, 5: 0.163625}
    for d, want in expected.items():
        assert values[d] == pytest.approx(want, abs=1e-5)
    # far coefficients dominate near ones; nothing decays
    far = max(v for d, v in values.items() if d >= 3)
    near = max(v for d, v in values.items() if d <= 2)
    assert far >= 0.5 * near


def test_orbit_report_csv_schemas(tmp_path):
    rep = _report(4)
    orbit_path = tmp_path / "orbit_coefficients.csv"
    decay_path = tmp_path / "decay_profile.csv"
    rep.write_orbit_csv(orbit_path)
    rep.write_decay_csv(decay_path)
    with open(orbit_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [
        "orbit_id",
        "representative",
        "orbit_length",
        "min_diameter",
        "max_diameter",
        "coeff_mean",
        "coeff_spread",
    ]
    assert len(rows) == 1 + len(rep.rows)
    with open(decay_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["diameter", "max_abs_coeff"]
    assert len(rows) == 1 + len(rep.decay)
