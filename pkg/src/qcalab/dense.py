"""Dense matrix oracle for Clifford rules on small rings.

Builds the 2^L unitary realizing a rule, takes matrix logarithms under
explicit branch choices, expands Hamiltonians over the Hermitian Pauli
basis with a fast transform, and groups coefficients by conjugation
orbit.  Everything here is exact linear algebra; the phase-space modules
never see these matrices.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .clifford import CliffordRule, Orbit, inverse_rule, orbit, step
from .pauli import DiameterUndefinedError, PauliTerm, diameter

MAX_DENSE_L = 12  # 4^L coefficient tables; 268 MB of matrix at the cap

UNITARITY_TOL = 1e-12
CONJUGATION_TOL = 1e-10
CLUSTER_TOL = 1e-9
HERMITICITY_TOL = 1e-10
SIGNIFICANCE = 1e-9

# basis index convention: site r occupies bit L-1-r, so site 0 is the
# most significant bit and tensor factors read left to right
_PAULI_2X2 = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)
_CODE_OF_BITS = {(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}
_BITS_OF_CODE = {v: k for k, v in _CODE_OF_BITS.items()}


class SynthesisError(RuntimeError):
    """The synthesized matrix failed its conjugation self-check."""


class BranchMismatchError(ValueError):
    """Branch offsets do not line up with the eigenvalue clusters."""


def _term_permutation(term: PauliTerm, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (perm, coef) with sigma|b> = coef[b] |perm[b]>."""
    q_mask = 0
    p_mask = 0
    for r, (q, p) in term.sites.items():
        bit = 1 << (L - 1 - (r % L))
        if q:
            q_mask |= bit
        if p:
            p_mask |= bit
    idx = np.arange(1 << L, dtype=np.intp)
    perm = idx ^ q_mask
    # Z part acts before X: (-1)^{p.b} on the incoming basis state
    pop = np.zeros(1 << L, dtype=np.int64)
    bits = idx & p_mask
    while bits.any():
        pop += bits & 1
        bits >>= 1
    coef = np.where(pop % 2 == 0, 1.0, -1.0).astype(np.complex128)
    coef *= 1j ** (term.phase_exp % 4)
    return perm, coef


def term_matrix(term: PauliTerm, L: int | None = None) -> np.ndarray:
    """Dense matrix of a Pauli term, phase prefactor included."""
    if L is None:
        if term.ring is None:
            raise ValueError("line term needs an explicit length")
        L = term.ring
    perm, coef = _term_permutation(term, L)
    m = np.zeros((1 << L, 1 << L), dtype=np.complex128)
    m[perm, np.arange(1 << L)] = coef
    return m


def _apply_term_columns(term: PauliTerm, L: int, mat: np.ndarray) -> np.ndarray:
    """sigma @ mat without forming sigma."""
    perm, coef = _term_permutation(term, L)
    out = np.empty_like(mat)
    out[perm] = mat * coef[:, None]
    return out


def _apply_term_rows(term: PauliTerm, L: int, mat: np.ndarray) -> np.ndarray:
    """mat @ sigma without forming sigma."""
    perm, coef = _term_permutation(term, L)
    return mat[:, perm] * coef[None, :]


@dataclass(frozen=True, eq=False)
class DenseUnitary:
    """A 2^L unitary with lazily cached spectral data."""

    matrix: np.ndarray
    L: int

    def __post_init__(self) -> None:
        n = 1 << self.L
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} is not 2^{self.L} square")
        gram = self.matrix.conj().T @ self.matrix
        err = np.max(np.abs(gram - np.eye(n)))
        if err > UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary to {UNITARITY_TOL} (defect {err:.3e})")

    @cached_property
    def _spectral(self) -> tuple[np.ndarray, np.ndarray, tuple[np.ndarray, ...]]:
        """(phases, vectors, clusters) with W = V diag(e^{-i phi}) V^dag.

        Schur of a normal matrix gives an orthonormal eigenbasis, which
        eig does not guarantee under degeneracy.  Clusters group phases
        closer than CLUSTER_TOL on the circle; members of a wrapped
        cluster are expressed relative to the cluster mean so exact
        degeneracies never straddle a 2 pi cut.
        """
        from scipy.linalg import schur

        t, v = schur(self.matrix, output="complex")
        lam = np.diag(t)
        phases = -np.angle(lam)
        phases[phases <= -np.pi] += 2 * np.pi

        n = phases.size
        order = np.argsort(phases, kind="stable")
        sorted_ph = phases[order]
        gaps = np.diff(sorted_ph)
        wrap_gap = 2 * np.pi - (sorted_ph[-1] - sorted_ph[0])
        breaks = np.nonzero(gaps > CLUSTER_TOL)[0]
        if breaks.size == 0:
            groups = [order]
        else:
            edges = [0, *(int(b) + 1 for b in breaks), n]
            groups = [order[edges[i] : edges[i + 1]] for i in range(len(edges) - 1)]
            if wrap_gap <= CLUSTER_TOL and len(groups) > 1:
                groups[0] = np.concatenate([groups[-1], groups[0]])
                groups.pop()

        adjusted = phases.copy()
        clusters: list[np.ndarray] = []
        for g in groups:
            mean = float(np.angle(np.sum(np.exp(1j * phases[g]))))
            rel = np.angle(np.exp(1j * (phases[g] - mean)))
            adjusted[g] = mean + rel
            clusters.append(np.sort(g))
        clusters.sort(key=lambda g: float(np.min(adjusted[g])))
        return adjusted, v, tuple(clusters)

    @property
    def eigenphases(self) -> np.ndarray:
        return self._spectral[0]

    @property
    def cluster_count(self) -> int:
        return len(self._spectral[2])


@dataclass(frozen=True)
class BranchChoice:
    """Integer 2 pi offsets, one per eigenvalue cluster."""

    offsets: tuple[int, ...]

    @classmethod
    def principal(cls, n_clusters: int) -> "BranchChoice":
        return cls(offsets=(0,) * n_clusters)

    @classmethod
    def random(cls, n_clusters: int, rng: np.random.Generator) -> "BranchChoice":
        return cls(offsets=tuple(int(m) for m in rng.integers(-2, 3, size=n_clusters)))


def synthesize_unitary(rule: CliffordRule, L: int) -> DenseUnitary:
    """Build the dense unitary whose conjugation action is the rule.

    Column W|0> is the state stabilized by the conjugated Z generators,
    obtained by projector products; the other columns follow in Gray
    code order by applying conjugated X generators, so each column costs
    one Pauli action.  The global phase makes the first nonzero entry of
    column 0 real positive.  Every generator image is then re-checked by
    direct conjugation.
    """
    if L > MAX_DENSE_L:
        raise ValueError(f"dense synthesis capped at L = {MAX_DENSE_L}")
    if L <= 2 * rule.radius:
        raise ValueError(f"ring of length {L} too small for radius {rule.radius}")
    inv = inverse_rule(rule)
    n = 1 << L

    # W Z_r W^dag and W X_r W^dag come from the inverse rule
    z_images = [step(inv, PauliTerm.single(r, "Z", ring=L)) for r in range(L)]
    x_images = [step(inv, PauliTerm.single(r, "X", ring=L)) for r in range(L)]
    z_actions = [_term_permutation(t, L) for t in z_images]
    x_actions = [_term_permutation(t, L) for t in x_images]

    col0 = None
    for b in range(n):
        psi = np.zeros(n, dtype=np.complex128)
        psi[b] = 1.0
        for perm, coef in z_actions:
            moved = np.empty_like(psi)
            moved[perm] = psi * coef
            psi = (psi + moved) / 2.0
        norm = np.linalg.norm(psi)
        if norm > 1e-6:
            col0 = psi / norm
            break
    if col0 is None:
        raise SynthesisError("no basis state overlaps the stabilized column")

    w = np.zeros((n, n), dtype=np.complex128)
    w[:, 0] = col0
    col = col0
    prev_gray = 0
    for m in range(1, n):
        gray = m ^ (m >> 1)
        bit = (gray ^ prev_gray).bit_length() - 1
        perm, coef = x_actions[L - 1 - bit]
        nxt = np.empty_like(col)
        nxt[perm] = col * coef
        w[:, gray] = nxt
        col = nxt
        prev_gray = gray

    first = int(np.flatnonzero(np.abs(w[:, 0]) > 1e-9)[0])
    w *= np.conj(w[first, 0]) / np.abs(w[first, 0])

    for r in range(L):
        for letter, images in (("Z", z_images), ("X", x_images)):
            g = PauliTerm.single(r, letter, ring=L)
            img = step(rule, g)
            lhs = _apply_term_columns(g, L, w)
            rhs = _apply_term_rows(img, L, w)
            err = np.max(np.abs(lhs - rhs))
            if err > CONJUGATION_TOL:
                raise SynthesisError(
                    f"conjugation check failed on {letter}_{r} (defect {err:.3e})"
                )
    return DenseUnitary(matrix=w, L=L)


def log_hamiltonian(W: DenseUnitary, branch: BranchChoice | None = None) -> np.ndarray:
    """Hermitian H with e^{-iH} = W under the given branch choice."""
    phases, v, clusters = W._spectral
    if branch is None:
        branch = BranchChoice.principal(len(clusters))
    if len(branch.offsets) != len(clusters):
        raise BranchMismatchError(
            f"{len(branch.offsets)} offsets for {len(clusters)} clusters"
        )
    shifted = phases.copy()
    for g, m in zip(clusters, branch.offsets):
        shifted[g] += 2 * np.pi * m
    h = (v * shifted) @ v.conj().T
    defect = np.max(np.abs(h - h.conj().T))
    if defect > HERMITICITY_TOL:
        raise RuntimeError(f"log lost Hermiticity (defect {defect:.3e})")
    return (h + h.conj().T) / 2.0


def exp_minus_i(H: np.ndarray) -> np.ndarray:
    """e^{-iH} through an independent eigh factorization."""
    w, u = np.linalg.eigh(H)
    return (u * np.exp(-1j * w)) @ u.conj().T


def commutant_check(A: np.ndarray, W: DenseUnitary) -> float:
    """Max-norm of [A, W]; zero certifies a conserved quantity."""
    if A.shape != W.matrix.shape:
        raise ValueError("dimension mismatch")
    return float(np.max(np.abs(A @ W.matrix - W.matrix @ A)))


# -- Pauli basis transform --------------------------------------------


def _analysis_map() -> np.ndarray:
    """4x4 map from a vectorized site block (i j) to coefficients."""
    return _PAULI_2X2.conj().reshape(4, 4) / 2.0


def _synthesis_map() -> np.ndarray:
    return _PAULI_2X2.reshape(4, 4)


def _site_transform(H: np.ndarray, L: int, site_map: np.ndarray) -> np.ndarray:
    t = H.reshape((2,) * (2 * L))
    order = [ax for r in range(L) for ax in (r, L + r)]
    t = np.transpose(t, order).reshape((4,) * L)
    for r in range(L):
        t = np.moveaxis(np.tensordot(site_map, t, axes=([1], [r])), 0, r)
    return t


@dataclass(frozen=True, eq=False)
class PauliSpectrum:
    """Real coefficients of H over the Hermitian Pauli strings.

    values[u] with u = sum_r code_r 4^r and codes I=0 X=1 Y=2 Z=3.
    """

    values: np.ndarray
    L: int

    def index_of(self, term: PauliTerm) -> int:
        u = 0
        for r, bits in term.sites.items():
            u += _CODE_OF_BITS[bits] * 4 ** (r % self.L)
        return u

    def term_for(self, u: int) -> PauliTerm:
        sites: dict[int, tuple[int, int]] = {}
        y = 0
        for r in range(self.L):
            code = (u >> (2 * r)) & 3
            if code:
                sites[r] = _BITS_OF_CODE[code]
                y += code == 2
        return PauliTerm(sites, y, self.L)

    def coefficient(self, term: PauliTerm) -> float:
        return float(self.values[self.index_of(term)])

    def significant(self, threshold: float = SIGNIFICANCE) -> np.ndarray:
        return np.flatnonzero(np.abs(self.values) > threshold)

    def reconstruct(self) -> np.ndarray:
        """Dense sum h_u sigma_u; inverse of pauli_coefficients."""
        L = self.L
        t = self.values.astype(np.complex128).reshape((4,) * L, order="F")
        for r in range(L):
            t = np.moveaxis(np.tensordot(_synthesis_map(), t, axes=([0], [r])), 0, r)
        t = t.reshape((2, 2) * L)
        order = [*range(0, 2 * L, 2), *range(1, 2 * L, 2)]
        return np.transpose(t, order).reshape(1 << L, 1 << L)


def pauli_coefficients(H: np.ndarray, L: int) -> PauliSpectrum:
    """Expand a Hermitian matrix over Pauli strings in O(L 4^L).

    One 4x4 tensor contraction per site replaces the naive trace against
    all 4^L strings.  Imaginary residue beyond 1e-10 signals a
    non-Hermitian input and raises.
    """
    if H.shape != (1 << L, 1 << L):
        raise ValueError(f"matrix shape {H.shape} is not 2^{L} square")
    t = _site_transform(H, L, _analysis_map())
    resid = float(np.max(np.abs(t.imag)))
    if resid > HERMITICITY_TOL:
        raise ValueError(f"coefficients are not real (residue {resid:.3e})")
    return PauliSpectrum(values=t.real.reshape(-1, order="F"), L=L)


# -- orbit grouping ---------------------------------------------------


@dataclass(frozen=True)
class OrbitRow:
    orbit_id: int
    representative: str
    orbit_length: int
    min_diameter: int
    max_diameter: int
    coeff_mean: float
    coeff_spread: float


@dataclass(frozen=True)
class OrbitCoefficientReport:
    """Coefficient statistics per conjugation orbit plus a decay profile."""

    L: int
    rows: tuple[OrbitRow, ...]
    decay: tuple[tuple[int, float], ...]
    trace_coefficient: float
    threshold: float

    @property
    def max_spread(self) -> float:
        return max((row.coeff_spread for row in self.rows), default=0.0)

    def write_orbit_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(
                [
                    "orbit_id",
                    "representative",
                    "orbit_length",
                    "min_diameter",
                    "max_diameter",
                    "coeff_mean",
                    "coeff_spread",
                ]
            )
            for row in self.rows:
                out.writerow(
                    [
                        row.orbit_id,
                        row.representative,
                        row.orbit_length,
                        row.min_diameter,
                        row.max_diameter,
                        repr(row.coeff_mean),
                        repr(row.coeff_spread),
                    ]
                )

    def write_decay_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["diameter", "max_abs_coeff"])
            for d, v in self.decay:
                out.writerow([d, repr(v)])


def orbit_coefficient_report(
    spectrum: PauliSpectrum,
    rule: CliffordRule,
    threshold: float = SIGNIFICANCE,
) -> OrbitCoefficientReport:
    """Group significant coefficients by orbit and profile decay.

    The identity component carries no locality information and is
    reported separately as trace_coefficient.  Orbit ids follow the
    ascending index of the first significant member encountered, which
    makes reports byte-stable.
    """
    L = spectrum.L
    h = spectrum.values
    significant = [int(u) for u in spectrum.significant(threshold) if u != 0]
    visited: set[int] = set()
    rows: list[OrbitRow] = []
    decay_max = np.zeros(L, dtype=np.float64)

    for u in significant:
        try:
            d = diameter(spectrum.term_for(u))
        except DiameterUndefinedError:
            continue
        decay_max[d] = max(decay_max[d], abs(float(h[u])))

    for u in significant:
        if u in visited:
            continue
        orb: Orbit = orbit(rule, spectrum.term_for(u))
        indices = [spectrum.index_of(m) for m in orb.members]
        visited.update(indices)
        mags = np.abs(h[indices])
        diams = [diameter(m) for m in orb.members]
        rows.append(
            OrbitRow(
                orbit_id=len(rows),
                representative=orb.representative.to_text(),
                orbit_length=len(orb.members),
                min_diameter=min(diams),
                max_diameter=max(diams),
                coeff_mean=float(np.mean(mags)),
                coeff_spread=float(np.max(mags) - np.min(mags)),
            )
        )

    return OrbitCoefficientReport(
        L=L,
        rows=tuple(rows),
        decay=tuple((d, float(decay_max[d])) for d in range(L)),
        trace_coefficient=float(h[0]),
        threshold=threshold,
    )
