"""Coin-family layer: constraints, symbols, ring assembly, parity."""

from __future__ import annotations

import numpy as np
import pytest

from qcalab.fermion import (
    CoinSet,
    CoinValidationError,
    build_ring_operator,
    builtin_model,
    parity_determinant,
    symbol_at,
    symbol_derivative_at,
    validate,
    zoo,
)

ZOO_NAMES = {
    "identity",
    "shift",
    "dirac_massless",
    "dirac_gapped",
    "half_shift",
    "brickwork",
}


def test_zoo_members_all_validate():
    models = zoo()
    assert set(models) == ZOO_NAMES
    for name, coins in models.items():
        rep = validate(coins)
        assert rep.ok, name
        assert rep.worst_violation < 1e-10


def test_zoo_parity_all_even():
    for name, coins in zoo().items():
        op = build_ring_operator(coins, 9)
        assert parity_determinant(op) == 1, name


def test_reflection_coin_parity_alternates():
    # A_0 = diag(1, -1) flips one Majorana per site: det = (-1)^L
    refl = CoinSet(n=1, R=0, blocks=(np.diag([1.0, -1.0]),))
    for L in range(3, 7):
        assert parity_determinant(build_ring_operator(refl, L)) == (-1) ** L


def test_symbol_unitary_on_dense_k_grid():
    for name, coins in zoo().items():
        for k in np.linspace(0.0, 2 * np.pi, 17):
            m = symbol_at(coins, k)
            assert np.max(np.abs(m.conj().T @ m - np.eye(2 * coins.n))) < 1e-12, name


def test_shift_symbol_closed_form():
    coins = builtin_model("shift")
    for k in (0.0, 0.7, 2.2):
        assert np.allclose(symbol_at(coins, k), np.exp(-1j * k) * np.eye(2))


def test_dirac_symbol_closed_forms():
    massless = builtin_model("dirac", theta=0.0)
    for k in (0.3, 1.9):
        assert np.allclose(
            symbol_at(massless, k), np.diag([np.exp(-1j * k), np.exp(1j * k)])
        )
    # at k=0 the gapped symbol is the plain mass rotation
    theta = np.pi / 4
    gapped = builtin_model("dirac", theta=theta)
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    assert np.allclose(symbol_at(gapped, 0.0), rot)


def test_symbol_derivative_matches_finite_difference():
    coins = zoo()["brickwork"]
    h = 1e-6
    for k in (0.4, 2.9):
        numeric = (symbol_at(coins, k + h) - symbol_at(coins, k - h)) / (2 * h)
        assert np.max(np.abs(symbol_derivative_at(coins, k) - numeric)) < 1e-6


def test_scaled_blocks_fail_validation():
    bad = CoinSet(n=1, R=0, blocks=(1.1 * np.eye(2),))
    rep = validate(bad)
    assert not rep.ok
    assert rep.worst_m == 0
    assert rep.worst_violation == pytest.approx(1.1**2 - 1.0, abs=1e-12)


def test_complex_blocks_rejected_at_construction():
    with pytest.raises(CoinValidationError):
        CoinSet(n=1, R=0, blocks=(1j * np.eye(2),))


def test_ring_operator_needs_room_for_blocks():
    coins = builtin_model("dirac", theta=0.3)
    with pytest.raises(ValueError):
        build_ring_operator(coins, 2)


def test_ring_operator_matches_symbol_determinant():
    # det O = prod_j det M(2 pi j / L): block circulants diagonalize in k
    coins = builtin_model("dirac", theta=0.3)
    L = 7
    op = build_ring_operator(coins, L)
    sign, logabs = np.linalg.slogdet(op.matrix)
    dets = [np.linalg.det(symbol_at(coins, 2 * np.pi * j / L)) for j in range(L)]
    prod = np.prod(dets)
    assert abs(logabs) < 1e-10
    assert sign == pytest.approx(prod.real, abs=1e-8)


def test_json_round_trip():
    for name, coins in zoo().items():
        clone = CoinSet.from_json(coins.to_json())
        assert clone.n == coins.n and clone.R == coins.R, name
        for a, b in zip(clone.blocks, coins.blocks):
            assert np.array_equal(a, b)


def test_builtin_model_rejects_unknown_names_and_params():
    with pytest.raises(ValueError):
        builtin_model("nonsense")
    with pytest.raises(ValueError):
        builtin_model("identity", theta=0.2)
