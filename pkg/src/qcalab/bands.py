"""Band structure of a fermionic symbol over the Brillouin zone.

The eigenphases of M_k are continued in k by eigenvector overlap, glued
across the zone boundary into closed quasi-particle curves Theta(kk)
over an extended momentum kk in [0, 2 pi n_mult), and characterized by
an integer winding computed two independent ways.  Quasi-energies are
the winding-free part of the phase and stay continuous rather than being
folded into a principal interval.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import schur
from scipy.optimize import linear_sum_assignment

from .fermion import CoinSet, symbol_at, symbol_derivative_at

OVERLAP_THRESHOLD = 0.7
MAX_REFINEMENT = 4
DEGENERACY_TOL = 1e-9
WINDING_RESIDUAL = 0.01
PERIODICITY_TOL = 1e-8
PROJECTOR_TOL = 1e-9


class ContinuationError(RuntimeError):
    """Band labels could not be continued across a k-interval."""


class GluingError(RuntimeError):
    """Ambiguous matching at the zone boundary."""


class UndersampledError(RuntimeError):
    """Phase steps too large for reliable unwrapping."""


class PipelineInconsistencyError(RuntimeError):
    """Two independent computations of the same quantity disagree."""


def _eigensystem(coins: CoinSet, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors of M_k, degeneracies split.

    Schur of the unitary symbol gives an orthonormal basis; inside any
    eigenvalue cluster the basis is arbitrary, so it is rotated to
    diagonalize the Hermitian velocity operator -i M^dag dM/dk projected
    onto the cluster.  Cluster members are ordered by velocity, which
    pins the gauge at exact crossings.  Velocity degeneracy inside an
    eigenvalue cluster has no canonical resolution and raises.
    """
    m = symbol_at(coins, k)
    t, v = schur(m, output="complex")
    lam = np.diag(t).copy()
    d = lam.size

    order = np.argsort(np.angle(lam), kind="stable")
    lam, v = lam[order], v[:, order]

    # cluster equal eigenvalues on the circle, including the -pi/+pi seam
    groups: list[list[int]] = []
    for i in range(d):
        if groups and abs(lam[i] - lam[groups[-1][-1]]) <= DEGENERACY_TOL:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and abs(lam[0] - lam[-1]) <= DEGENERACY_TOL:
        groups[0] = groups.pop() + groups[0]

    need_split = [g for g in groups if len(g) > 1]
    if need_split:
        g_op = -1j * (m.conj().T @ symbol_derivative_at(coins, k))
        g_op = (g_op + g_op.conj().T) / 2.0
        for g in need_split:
            idx = np.array(g)
            vc = v[:, idx]
            gc = vc.conj().T @ g_op @ vc
            vel, u = np.linalg.eigh(gc)
            if np.min(np.diff(vel)) <= DEGENERACY_TOL and len(g) > 1:
                raise ContinuationError(
                    f"bands degenerate beyond first order at k = {k:.6f}"
                )
            v[:, idx] = vc @ u
        # re-sort so cluster members sit at consecutive slots in velocity order
        keys = []
        for gi, g in enumerate(groups):
            for pos, i in enumerate(g):
                keys.append((i, (gi, pos)))
        perm = [i for i, _ in sorted(keys, key=lambda t: t[1])]
        lam, v = lam[perm], v[:, perm]
    return lam, v


def _match(
    coins: CoinSet,
    k_a: float,
    v_a: np.ndarray,
    k_b: float,
    v_b: np.ndarray,
    depth: int = 0,
) -> np.ndarray:
    """Permutation p with band s at k_a continuing as band p[s] at k_b."""
    overlap = np.abs(v_a.conj().T @ v_b)
    rows, cols = linear_sum_assignment(overlap, maximize=True)
    perm = np.empty_like(cols)
    perm[rows] = cols
    if float(np.min(overlap[rows, cols])) >= OVERLAP_THRESHOLD:
        return perm
    if depth >= MAX_REFINEMENT:
        raise ContinuationError(
            f"overlap below {OVERLAP_THRESHOLD} on [{k_a:.6f}, {k_b:.6f}] "
            f"after {MAX_REFINEMENT} refinements"
        )
    k_m = (k_a + k_b) / 2.0
    _, v_m = _eigensystem(coins, k_m)
    first = _match(coins, k_a, v_a, k_m, v_m, depth + 1)
    second = _match(coins, k_m, v_m, k_b, v_b, depth + 1)
    return second[first]


@dataclass(frozen=True, eq=False)
class BandGrid:
    """Continued eigendata on the momentum grid k_j = 2 pi j / N_k."""

    coins: CoinSet
    N_k: int
    ks: np.ndarray
    thetas: np.ndarray  # (N_k, 2n) unit complex, continuation-ordered
    vectors: np.ndarray  # (N_k, 2n, 2n), columns are band eigenvectors
    scalar: bool


def diagonalize_grid(coins: CoinSet, N_k: int) -> BandGrid:
    """Diagonalize the symbol on a uniform grid with continued band labels."""
    if N_k < 64:
        raise ValueError("need at least 64 grid points")
    if N_k <= 8 * coins.R * coins.n:
        raise ValueError(f"N_k = {N_k} too coarse for R = {coins.R}, n = {coins.n}")
    d = 2 * coins.n
    ks = 2 * np.pi * np.arange(N_k) / N_k

    if coins.is_scalar:
        scal = np.array(
            [sum(coins.coin(q)[0, 0] * np.exp(-1j * q * k)
                 for q in range(-coins.R, coins.R + 1)) for k in ks]
        )
        thetas = np.repeat(scal[:, None], d, axis=1)
        vectors = np.repeat(np.eye(d, dtype=np.complex128)[None], N_k, axis=0)
        return BandGrid(coins=coins, N_k=N_k, ks=ks, thetas=thetas,
                        vectors=vectors, scalar=True)

    thetas = np.empty((N_k, d), dtype=np.complex128)
    vectors = np.empty((N_k, d, d), dtype=np.complex128)
    lam, v = _eigensystem(coins, float(ks[0]))
    thetas[0], vectors[0] = lam, v
    for j in range(1, N_k):
        lam, v = _eigensystem(coins, float(ks[j]))
        perm = _match(coins, float(ks[j - 1]), vectors[j - 1], float(ks[j]), v)
        thetas[j], vectors[j] = lam[perm], v[:, perm]
    return BandGrid(coins=coins, N_k=N_k, ks=ks, thetas=thetas,
                    vectors=vectors, scalar=False)


@dataclass(frozen=True, eq=False)
class QuasiParticle:
    """A closed eigenvalue curve over extended momentum [0, 2 pi n_mult)."""

    n_mult: int
    kk: np.ndarray  # extended momenta, n_mult * N_k samples
    theta: np.ndarray  # unit complex samples
    proj: np.ndarray  # (samples, 2n, 2n) Hermitian idempotent
    bands: tuple[int, ...]  # grid band indices along the cycle
    winding: int | None = None
    energy: np.ndarray | None = None

    def __post_init__(self) -> None:
        if np.max(np.abs(np.abs(self.theta) - 1.0)) > 1e-10:
            raise ValueError("theta samples must lie on the unit circle")
        herm = np.max(np.abs(self.proj - np.transpose(self.proj, (0, 2, 1)).conj()))
        idem = np.max(np.abs(np.einsum("jab,jbc->jac", self.proj, self.proj) - self.proj))
        if herm > PROJECTOR_TOL or idem > PROJECTOR_TOL:
            raise ValueError("projector samples must be Hermitian idempotents")
        if self.energy is not None:
            if self.winding is None:
                raise ValueError("energy without winding")
            model = np.exp(-1j * self.energy + 1j * (self.winding / self.n_mult) * self.kk)
            if np.max(np.abs(model - self.theta)) > PROJECTOR_TOL:
                raise ValueError("energy/winding factorization does not reproduce theta")

    @property
    def drift_speed(self) -> float:
        if self.winding is None:
            raise ValueError("winding not yet computed")
        return self.winding / self.n_mult


def glue_bands(grid: BandGrid) -> list[QuasiParticle]:
    """Close the band curves across the zone boundary.

    The permutation matching bands at k -> 2 pi against k = 0 is computed
    with the same refinable overlap continuation used inside the zone;
    its cycles are the quasi-particles, each unrolled over an extended
    zone of n_mult turns.
    """
    d = grid.thetas.shape[1]
    if grid.scalar:
        wrap = np.arange(d)
    else:
        last_k = float(grid.ks[-1])
        try:
            wrap = _match(grid.coins, last_k, grid.vectors[-1],
                          2 * np.pi, grid.vectors[0])
        except ContinuationError as exc:
            raise GluingError(str(exc)) from exc

    qps: list[QuasiParticle] = []
    seen: set[int] = set()
    for s0 in range(d):
        if s0 in seen:
            continue
        cycle = [s0]
        seen.add(s0)
        nxt = int(wrap[s0])
        while nxt != s0:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = int(wrap[nxt])
        n_mult = len(cycle)
        kk = np.concatenate([grid.ks + 2 * np.pi * m for m in range(n_mult)])
        theta = np.concatenate([grid.thetas[:, s] for s in cycle])
        cols = [grid.vectors[:, :, s] for s in cycle]  # each (N_k, 2n)
        proj = np.concatenate(
            [c[:, :, None] * c[:, None, :].conj() for c in cols], axis=0
        )
        qps.append(
            QuasiParticle(n_mult=n_mult, kk=kk, theta=theta, proj=proj,
                          bands=tuple(cycle))
        )
    return qps


def winding_unwrap(qp: QuasiParticle) -> int:
    """Net phase turns of Theta over its extended zone, by unwrapping."""
    phases = np.angle(qp.theta)
    steps = np.diff(phases)
    steps = np.mod(steps + np.pi, 2 * np.pi) - np.pi
    if np.max(np.abs(steps)) >= np.pi / 2:
        raise UndersampledError("phase step of pi/2 or more between samples")
    closing = float(np.angle(qp.theta[0] * np.conj(qp.theta[-1])))
    total = float(np.sum(steps)) + closing
    w = total / (2 * np.pi)
    rounded = int(np.round(w))
    if abs(w - rounded) > WINDING_RESIDUAL:
        raise UndersampledError(f"winding estimate {w:.4f} too far from integer")
    return rounded


def winding_fourier(qp: QuasiParticle) -> int:
    """Winding as sum_r r |fhat(r)|^2 of the unit-modulus curve."""
    N = qp.theta.size
    fhat = np.fft.fft(qp.theta) / N
    r = np.fft.fftfreq(N, d=1.0 / N)
    w = float(np.sum(r * np.abs(fhat) ** 2))
    rounded = int(np.round(w))
    if abs(w - rounded) > WINDING_RESIDUAL:
        raise UndersampledError(f"Fourier winding {w:.4f} too far from integer")
    return rounded


def energy_extract(qp: QuasiParticle) -> QuasiParticle:
    """Split Theta = exp(-iE + i (w/n) kk) with E continuous and periodic.

    Both winding routes are evaluated and must agree.  E is anchored at
    kk = 0 inside (-pi, pi] and then follows the unwrapped phase, so
    curves may leave the principal interval; the closure residual over
    the extended zone certifies periodicity.
    """
    w = winding_unwrap(qp)
    wf = winding_fourier(qp)
    if w != wf:
        raise PipelineInconsistencyError(
            f"winding disagreement: unwrap {w} vs fourier {wf}"
        )
    phases = np.angle(qp.theta)
    steps = np.mod(np.diff(phases) + np.pi, 2 * np.pi) - np.pi
    unwrapped = phases[0] + np.concatenate([[0.0], np.cumsum(steps)])
    energy = -unwrapped + (w / qp.n_mult) * qp.kk
    if energy[0] <= -np.pi:
        energy = energy + 2 * np.pi
    closing = float(np.angle(qp.theta[0] * np.conj(qp.theta[-1])))
    e_close = -(unwrapped[-1] + closing) + (w / qp.n_mult) * (2 * np.pi * qp.n_mult)
    e_close += energy[0] - (-unwrapped[0])  # same anchor shift as the curve
    if abs(e_close - energy[0]) > PERIODICITY_TOL:
        raise PipelineInconsistencyError(
            f"energy periodicity residual {abs(e_close - energy[0]):.3e}"
        )
    return replace(qp, winding=w, energy=energy)


def drift_check(
    coins: CoinSet, qp: QuasiParticle, k_samples: int = 64
) -> float:
    """Residual of M_k v = exp(-iE + i (w/n) kk) v at sampled momenta.

    Only rank-one projectors are supported; higher rank has no single
    drifting vector to check.
    """
    if qp.energy is None or qp.winding is None:
        raise ValueError("extract energy before checking drift")
    traces = np.einsum("jaa->j", qp.proj).real
    if np.max(np.abs(traces - 1.0)) > PROJECTOR_TOL:
        raise ValueError("drift check requires rank-one projectors")
    n_tot = qp.kk.size
    stride = max(1, n_tot // k_samples)
    worst = 0.0
    for j in range(0, n_tot, stride):
        pi_j = qp.proj[j]
        col = int(np.argmax(np.linalg.norm(pi_j, axis=0)))
        v = pi_j[:, col]
        v = v / np.linalg.norm(v)
        m = symbol_at(coins, float(qp.kk[j]) % (2 * np.pi))
        phase = np.exp(-1j * qp.energy[j] + 1j * (qp.winding / qp.n_mult) * qp.kk[j])
        worst = max(worst, float(np.max(np.abs(m @ v - phase * v))))
    return worst


def index(qps: list[QuasiParticle]) -> int:
    """Sum of windings over a complete quasi-particle set.

    Bands here are Majorana bands: a single fermionic mode contributes
    two of them, so the plain shift model scores -2 (minus one per
    Majorana band).
    """
    if not qps:
        raise ValueError("empty band set")
    d = qps[0].proj.shape[-1]
    if sum(qp.n_mult for qp in qps) != d:
        raise ValueError("incomplete band set")
    total = 0
    for qp in qps:
        total += qp.winding if qp.winding is not None else winding_unwrap(qp)
    return total


def symbol_reconstruction_residual(coins: CoinSet, qps: list[QuasiParticle]) -> float:
    """Max deviation of sum_nu Theta Pi folded to the base zone from M_k."""
    if not qps:
        raise ValueError("empty band set")
    N_k = qps[0].kk.size // qps[0].n_mult
    d = qps[0].proj.shape[-1]
    rec = np.zeros((N_k, d, d), dtype=np.complex128)
    for qp in qps:
        for m in range(qp.n_mult):
            sl = slice(m * N_k, (m + 1) * N_k)
            rec += qp.theta[sl, None, None] * qp.proj[sl]
    worst = 0.0
    for j in range(N_k):
        m_k = symbol_at(coins, 2 * np.pi * j / N_k)
        worst = max(worst, float(np.max(np.abs(rec[j] - m_k))))
    return worst


def write_band_csv(qps: list[QuasiParticle], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("nu,k_extended,re_theta,im_theta,energy,winding,n_mult\n")
        for nu, qp in enumerate(qps):
            w = "" if qp.winding is None else qp.winding
            for j in range(qp.kk.size):
                e = "" if qp.energy is None else repr(float(qp.energy[j]))
                fh.write(
                    f"{nu},{float(qp.kk[j])!r},{float(qp.theta[j].real)!r},"
                    f"{float(qp.theta[j].imag)!r},{e},{w},{qp.n_mult}\n"
                )


def write_projector_csv(qps: list[QuasiParticle], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("nu,k_extended,l,lp,re,im\n")
        for nu, qp in enumerate(qps):
            d = qp.proj.shape[-1]
            for j in range(qp.kk.size):
                for a in range(d):
                    for b in range(d):
                        v = qp.proj[j, a, b]
                        fh.write(
                            f"{nu},{float(qp.kk[j])!r},{a},{b},"
                            f"{float(v.real)!r},{float(v.imag)!r}\n"
                        )


@dataclass(frozen=True)
class FourierDecay:
    slope: float
    r_squared: float
    n_points: int


def fourier_decay(samples: np.ndarray, floor: float = 1e-12) -> FourierDecay:
    """Exponential-decay fit of Fourier magnitudes of a periodic series.

    Magnitudes at +-r are combined by max and the fit runs over every
    r >= 1 above the noise floor, in log-linear coordinates.  Bins below
    the floor are skipped rather than terminating the window, since
    parity structure can zero out alternating harmonics exactly.
    """
    from scipy.stats import linregress

    N = samples.size
    fhat = np.abs(np.fft.fft(samples) / N)
    half = N // 2
    mags = [max(fhat[r], fhat[-r]) for r in range(1, half)]
    rs = [r for r, mag in enumerate(mags, start=1) if mag > floor]
    if len(rs) < 3:
        raise ValueError("fewer than 3 Fourier magnitudes above the floor")
    ys = np.log([mags[r - 1] for r in rs])
    fit = linregress(np.array(rs, dtype=float), ys)
    return FourierDecay(slope=float(fit.slope),
                        r_squared=float(fit.rvalue**2),
                        n_points=len(rs))
