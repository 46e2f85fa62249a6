"""Exactness checks for the sparse Pauli-string layer.

Products are verified against dense matrix products on small rings, so
every phase convention below is pinned by an independent oracle rather
than by the implementation under test.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcalab.dense import term_matrix
from qcalab.pauli import (
    DiameterUndefinedError,
    GeometryMismatchError,
    PauliTerm,
    compose,
    diameter,
    equal_mod_phase,
    symplectic_product,
)


def _signature(t: PauliTerm) -> tuple:
    return (t.ring, t.key(), t.phase_exp)


@st.composite
def ring_terms(draw, L: int = 6) -> PauliTerm:
    letters = draw(st.lists(st.sampled_from("IXYZ"), min_size=L, max_size=L))
    phase = draw(st.integers(min_value=0, max_value=3))
    term = PauliTerm.from_text("@0:" + "".join(letters), ring=L)
    return term.with_phase((term.phase_exp + phase) % 4)


@st.composite
def line_terms(draw, span: int = 8) -> PauliTerm:
    sites = draw(
        st.dictionaries(
            st.integers(min_value=-span, max_value=span),
            st.sampled_from([(1, 0), (0, 1), (1, 1)]),
            max_size=5,
        )
    )
    phase = draw(st.integers(min_value=0, max_value=3))
    return PauliTerm(sites, phase, ring=None)


# -- text form ----------------------------------------------------------


def test_text_round_trip_with_phase():
    for text in ["@0:Z", "@3:XYX", "-i@2:ZYZ", "i@0:Y", "@7:XX"]:
        t = PauliTerm.from_text(text, ring=8)
        assert PauliTerm.from_text(t.to_text(with_phase=True), ring=8) == t


def test_parse_matches_dense_tensor_product():
    # "@0:ZY" must be the literal matrix Z (x) Y, including the i from Y.
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    t = PauliTerm.from_text("@0:ZY", ring=2)
    assert np.allclose(term_matrix(t, 2), np.kron(z, y))


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        PauliTerm.from_text("@0:ABC")
    with pytest.raises(ValueError):
        PauliTerm.from_text("XYZ", ring=2)  # wraps onto site 0 twice


@given(ring_terms())
def test_round_trip_on_ring(t: PauliTerm):
    assert PauliTerm.from_text(t.to_text(with_phase=True), ring=t.ring) == t


# -- composition against the dense oracle -------------------------------


@given(ring_terms(L=2), ring_terms(L=2))
def test_compose_matches_matrix_product(a: PauliTerm, b: PauliTerm):
    lhs = term_matrix(compose(a, b), 2)
    rhs = term_matrix(a, 2) @ term_matrix(b, 2)
    assert np.allclose(lhs, rhs, atol=1e-14)


@given(ring_terms(), ring_terms(), ring_terms())
def test_compose_associative(a, b, c):
    assert _signature(compose(compose(a, b), c)) == _signature(compose(a, compose(b, c)))


@given(ring_terms(), ring_terms())
def test_commutation_phase_is_symplectic_product(a, b):
    ab, ba = compose(a, b), compose(b, a)
    assert ab.key() == ba.key()
    assert (ab.phase_exp - ba.phase_exp) % 4 == 2 * symplectic_product(a, b)


@given(ring_terms(), ring_terms(), ring_terms())
def test_symplectic_product_is_bilinear(a, b, c):
    lhs = symplectic_product(a, compose(b, c))
    assert lhs == symplectic_product(a, b) ^ symplectic_product(a, c)


def test_geometry_mismatch_raises():
    a = PauliTerm.from_text("@0:X", ring=4)
    b = PauliTerm.from_text("@0:X", ring=6)
    with pytest.raises(GeometryMismatchError):
        compose(a, b)
    with pytest.raises(GeometryMismatchError):
        symplectic_product(a, PauliTerm.from_text("@0:X"))


# -- diameter -----------------------------------------------------------


def test_diameter_wraps_around_ring():
    # support {7, 0} on L=8 spans a single bond through the seam
    assert diameter(PauliTerm.from_text("@7:XX", ring=8)) == 1
    assert diameter(PauliTerm.from_text("@6:XIIX", ring=8)) == 3
    assert diameter(PauliTerm.from_text("@0:X", ring=8)) == 0


def test_diameter_on_line_is_extent():
    assert diameter(PauliTerm.from_text("@-2:XIIZ")) == 3


def test_diameter_undefined_for_identity():
    with pytest.raises(DiameterUndefinedError):
        diameter(PauliTerm.identity(ring=4))


@given(ring_terms(), st.integers(min_value=-12, max_value=12))
def test_diameter_translation_invariant(t: PauliTerm, shift: int):
    if t.is_identity():
        return
    assert diameter(t.translate(shift)) == diameter(t)


# -- misc queries -------------------------------------------------------


def test_hermiticity_tracks_y_count():
    assert PauliTerm.from_text("@0:Y", ring=4).is_hermitian()
    # same-site product X.Z = -iY is anti-Hermitian until an i restores it
    xz = compose(PauliTerm.single(0, "X", 4), PauliTerm.single(0, "Z", 4))
    assert not xz.is_hermitian()
    assert xz.with_phase((xz.phase_exp + 1) % 4).is_hermitian()


@given(line_terms())
def test_equal_mod_phase_ignores_phase_only(t: PauliTerm):
    assert equal_mod_phase(t, t.with_phase((t.phase_exp + 1) % 4))
    if not t.is_identity():
        assert not equal_mod_phase(t, t.translate(1))
