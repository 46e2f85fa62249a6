"""Real-space generator of a quasi-free walk, built from glued band data.

Per momentum the generator is sum_nu (-i E + i (w/n) s(kk)) Pi, where s
is the zone-centered sawtooth equal to kk on (-pi n, pi n] and continued
2 pi n periodically.  Centering the winding ramp makes the real-space
field real antisymmetric; the zone-edge ramp kk on [0, 2 pi n) is an
equally valid logarithm (it differs by 2 pi i Pi on half the zone) but
leaves an imaginary pi n w defect on the diagonal blocks.  The analytic
quasi-energy part transforms by plain DFT, spectrally accurate for
analytic periodic integrands; the discontinuous ramp part uses its
closed-form transform convolved with the projector DFT, with no
numerical quadrature of the jump.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, schur

from .bands import (
    PipelineInconsistencyError,
    QuasiParticle,
    diagonalize_grid,
    energy_extract,
    glue_bands,
)
from .fermion import CoinSet, build_ring_operator, symbol_at

NOISE_FLOOR = 1e-12
REALNESS_TOL = 1e-9
ANTISYMMETRY_TOL = 1e-9
RING_LOG_TOL = 1e-9
MIN_FIT_POINTS = 5


def ramp_transform(q: int, s: int, n: int) -> complex:
    """Closed form of (1/2pi) int_0^{2 pi n} (kk/n) e^{i mu kk} dkk.

    The combined frequency is mu = q + s/n with integer q, s.  Off the
    zero mode this is i/(r'-r)-like: -i/mu; the zero mode carries pi n.
    """
    m = n * q + s
    if m == 0:
        return complex(np.pi * n)
    return n / (1j * m)


def sawtooth_transform(q: int, s: int, n: int) -> complex:
    """Same integral for the zone-centered sawtooth in place of kk/n.

    Shifting the ramp by half a zone multiplies mode m by (-1)^m and
    kills the zero mode, which is exactly what keeps the assembled
    couplings real.
    """
    m = n * q + s
    if m == 0:
        return 0j
    sign = 1.0 if m % 2 == 0 else -1.0
    return sign * n / (1j * m)


@dataclass(frozen=True, eq=False)
class CouplingField:
    """Translation-invariant real antisymmetric generator blocks.

    blocks[r_max + delta] holds <r + delta, l| Z |r, l'> for
    delta in [-r_max, r_max].
    """

    r_max: int
    n: int
    blocks: np.ndarray  # (2 r_max + 1, 2n, 2n) real
    windings: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.blocks.shape != (2 * self.r_max + 1, 2 * self.n, 2 * self.n):
            raise ValueError("block array shape mismatch")
        if np.iscomplexobj(self.blocks):
            raise ValueError("blocks must be real")
        flipped = -np.transpose(self.blocks[::-1], (0, 2, 1))
        gap = float(np.max(np.abs(self.blocks - flipped)))
        if gap > ANTISYMMETRY_TOL:
            raise ValueError(f"antisymmetry violated by {gap:.3e}")

    def block(self, delta: int) -> np.ndarray:
        if abs(delta) > self.r_max:
            raise ValueError(f"|delta| exceeds r_max = {self.r_max}")
        return self.blocks[self.r_max + delta]

    def magnitude_profile(self) -> np.ndarray:
        """Max block-entry magnitude at each distance 0..r_max."""
        out = np.empty(self.r_max + 1)
        for d in range(self.r_max + 1):
            m = np.max(np.abs(self.block(d)))
            if d:
                m = max(m, np.max(np.abs(self.block(-d))))
            out[d] = m
        return out


def build_couplings(qps: list[QuasiParticle], r_max: int) -> CouplingField:
    """Assemble the translation-invariant generator blocks.

    Each quasi-particle contributes a spectrally converged DFT of
    E(kk) Pi(kk) plus, when it winds, the closed-form sawtooth transform
    convolved with the Fourier series of its projector entries.
    """
    if not qps:
        raise ValueError("empty band set")
    d = qps[0].proj.shape[-1]
    n = d // 2
    N_k = qps[0].kk.size // qps[0].n_mult
    if r_max >= N_k / 2:
        raise ValueError(f"r_max = {r_max} aliases on an N_k = {N_k} grid")
    for qp in qps:
        if qp.energy is None or qp.winding is None:
            raise ValueError("extract energies before building couplings")

    qs = np.arange(-r_max, r_max + 1)
    blocks = np.zeros((qs.size, d, d), dtype=np.complex128)
    for qp in qps:
        N = qp.kk.size
        nm = qp.n_mult
        fhat = np.fft.fft(qp.energy[:, None, None] * qp.proj, axis=0)
        for qi, q in enumerate(qs):
            blocks[qi] += -1j * (nm / N) * fhat[(-q * nm) % N]
        if qp.winding != 0:
            pihat = np.fft.fft(qp.proj, axis=0) / N
            s = np.rint(np.fft.fftfreq(N, d=1.0 / N)).astype(np.int64)
            for qi, q in enumerate(qs):
                m = nm * q + s
                sign = np.where(m % 2 == 0, 1.0, -1.0)
                weight = np.where(m == 0, 0.0, sign / np.where(m == 0, 1, m))
                blocks[qi] += qp.winding * np.tensordot(weight, pihat, axes=(0, 0))

    worst = float(np.max(np.abs(blocks.imag)))
    if worst > REALNESS_TOL:
        raise PipelineInconsistencyError(
            f"coupling blocks not real: max imaginary part {worst:.3e}"
        )
    return CouplingField(
        r_max=r_max,
        n=n,
        blocks=np.ascontiguousarray(blocks.real),
        windings=tuple(
            int(qp.winding) for qp in qps if qp.winding is not None
        ),
    )


@dataclass(frozen=True)
class DecayFit:
    model: str  # "exponential" | "inverse_distance"
    C: float
    beta: float | None
    exponent: float | None
    r_squared: float
    classification: str  # "gapped" | "critical"
    n_points: int


def fit_decay(field: CouplingField) -> DecayFit:
    """Classify the coupling decay and corroborate it against the windings.

    Fits both log m vs d (exponential) and log m vs log d (power law)
    over the longest prefix of distances above the noise floor, keeps
    the better fit, and requires it to agree with the topological
    verdict: all-zero windings must look exponential (R^2 >= 0.99),
    a non-zero winding must look like 1/d (exponent within 0.15 of -1).
    """
    from scipy.stats import linregress

    if field.r_max < 10:
        raise ValueError("r_max < 10 leaves too little to fit")
    profile = field.magnitude_profile()
    ds: list[int] = []
    for dist in range(1, field.r_max + 1):
        if profile[dist] <= NOISE_FLOOR:
            break
        ds.append(dist)
    if len(ds) < MIN_FIT_POINTS:
        raise ValueError(
            f"fit window has {len(ds)} points above the noise floor; need {MIN_FIT_POINTS}"
        )
    xs = np.array(ds, dtype=float)
    ys = np.log(profile[ds])
    exp_fit = linregress(xs, ys)
    pow_fit = linregress(np.log(xs), ys)
    r2_exp = float(exp_fit.rvalue**2)
    r2_pow = float(pow_fit.rvalue**2)

    gapped = all(w == 0 for w in field.windings)
    if r2_exp >= r2_pow:
        fit = DecayFit(
            model="exponential",
            C=float(np.exp(exp_fit.intercept)),
            beta=float(-exp_fit.slope),
            exponent=None,
            r_squared=r2_exp,
            classification="gapped" if gapped else "critical",
            n_points=len(ds),
        )
    else:
        fit = DecayFit(
            model="inverse_distance",
            C=float(np.exp(pow_fit.intercept)),
            beta=None,
            exponent=float(pow_fit.slope),
            r_squared=r2_pow,
            classification="gapped" if gapped else "critical",
            n_points=len(ds),
        )

    if gapped:
        if fit.model != "exponential" or fit.r_squared < 0.99 or fit.beta <= 0:
            raise PipelineInconsistencyError(
                "all windings are zero but the couplings do not fit a clean "
                f"exponential (model {fit.model}, R^2 {fit.r_squared:.4f})"
            )
    else:
        if fit.model != "inverse_distance" or abs(fit.exponent + 1.0) > 0.15:
            raise PipelineInconsistencyError(
                "non-zero winding but the couplings do not fall off as 1/d "
                f"(model {fit.model}, exponent {fit.exponent})"
            )
    return fit


def _real_log_orthogonal(m: np.ndarray) -> np.ndarray:
    """Real antisymmetric logarithm of a real orthogonal matrix.

    Real Schur form is block diagonal for an orthogonal matrix: planar
    rotations log to angle blocks, +1 stays zero, and -1 eigenvalues are
    paired into pi rotations.  An odd count of -1 means determinant -1,
    which has no real logarithm.
    """
    t, q = schur(m, output="real")
    d = m.shape[0]
    log_t = np.zeros((d, d))
    minus_ones: list[int] = []
    i = 0
    while i < d:
        if i + 1 < d and abs(t[i + 1, i]) > 1e-12:
            ang = float(np.arctan2(t[i + 1, i], t[i, i]))
            log_t[i, i + 1] = -ang
            log_t[i + 1, i] = ang
            i += 2
            continue
        val = t[i, i]
        if abs(val - 1.0) < 1e-7:
            pass
        elif abs(val + 1.0) < 1e-7:
            minus_ones.append(i)
        else:
            raise ValueError(f"matrix is not orthogonal: stray eigenvalue {val:.6f}")
        i += 1
    if len(minus_ones) % 2:
        raise ValueError("determinant -1: no real logarithm exists")
    for a, b in zip(minus_ones[::2], minus_ones[1::2]):
        log_t[a, b] = -np.pi
        log_t[b, a] = np.pi
    return q @ log_t @ q.T


def _ring_band_data(
    coins: CoinSet, qps: list[QuasiParticle], L: int
) -> list[QuasiParticle]:
    """Band data whose grid contains every ring momentum 2 pi j / L."""
    N_k = qps[0].kk.size // qps[0].n_mult
    ok = N_k % L == 0
    if ok and all(qp.energy is not None for qp in qps):
        return qps
    if not ok:
        mult = 1
        while L * mult < 64 or L * mult <= 8 * coins.R * coins.n:
            mult += 1
        grid = diagonalize_grid(coins, L * mult)
        qps = glue_bands(grid)
    return [energy_extract(qp) if qp.energy is None else qp for qp in qps]


def verify_exponentiation(
    coins: CoinSet, qps: list[QuasiParticle], L: int
) -> float:
    """Max-norm residual of e^Z = O on a ring of L cells.

    Z is assembled from the spectral data at the ring's own discrete
    momenta, so the identity is exact up to floating point and isolates
    truncation effects entirely.  Self-conjugate momenta (k = 0 and pi)
    take the real Schur logarithm directly, which pairs any -1
    eigenvalues into pi rotations; other momenta use the band branch at
    +k and its mirror by conjugation at -k, keeping Z exactly real.
    """
    if L <= 2 * coins.R:
        raise ValueError(f"ring of {L} cells cannot hold radius {coins.R} coins")
    d = 2 * coins.n
    if L * d > 512:
        raise ValueError("ring exceeds the dense-matrix budget")
    qps = _ring_band_data(coins, qps, L)
    N_k = qps[0].kk.size // qps[0].n_mult
    stride = N_k // L

    zhat = np.zeros((L, d, d), dtype=np.complex128)
    self_conjugate = [0] + ([L // 2] if L % 2 == 0 else [])
    for j in self_conjugate:
        m_k = symbol_at(coins, 2 * np.pi * j / L)
        if np.max(np.abs(m_k.imag)) > 1e-10:
            raise PipelineInconsistencyError(
                f"symbol not real at self-conjugate momentum index {j}"
            )
        zhat[j] = _real_log_orthogonal(m_k.real)
        if np.max(np.abs(expm(zhat[j]) - m_k)) > RING_LOG_TOL:
            raise PipelineInconsistencyError(
                f"Schur logarithm failed at momentum index {j}"
            )
    for j in range(1, (L + 1) // 2):
        acc = np.zeros((d, d), dtype=np.complex128)
        for qp in qps:
            nm = qp.n_mult
            for copy in range(nm):
                e = copy * N_k + j * stride
                kk = float(qp.kk[e])
                saw = kk - 2 * np.pi * nm * (kk > np.pi * nm)
                phase = -qp.energy[e] + (qp.winding / nm) * saw
                acc += 1j * phase * qp.proj[e]
        zhat[j] = acc
        zhat[L - j] = acc.conj()
        if np.max(np.abs(expm(acc) - symbol_at(coins, 2 * np.pi * j / L))) > RING_LOG_TOL:
            raise PipelineInconsistencyError(
                f"band logarithm failed at momentum index {j}"
            )

    ring = np.zeros((L * d, L * d), dtype=np.complex128)
    eye = np.eye(L)
    ks = 2 * np.pi * np.arange(L) / L
    for delta in range(L):
        b = np.tensordot(np.exp(1j * delta * ks), zhat, axes=(0, 0)) / L
        ring += np.kron(np.roll(eye, delta, axis=0), b)
    worst_imag = float(np.max(np.abs(ring.imag)))
    if worst_imag > REALNESS_TOL:
        raise PipelineInconsistencyError(
            f"assembled ring generator not real: {worst_imag:.3e}"
        )
    z = ring.real
    if np.max(np.abs(z + z.T)) > ANTISYMMETRY_TOL:
        raise PipelineInconsistencyError("assembled ring generator not antisymmetric")
    o = build_ring_operator(coins, L).matrix
    return float(np.max(np.abs(expm(z) - o)))


def truncation_error(
    field: CouplingField, coins: CoinSet, L: int
) -> list[tuple[int, float]]:
    """Residual of e^{Z_rho} = O as blocks are truncated at radius rho.

    Gapped models drop exponentially with rho, critical ones only
    polynomially; either way the curve quantifies quasi-locality of the
    translation-invariant field on a finite ring.
    """
    if L <= 2 * coins.R:
        raise ValueError(f"ring of {L} cells cannot hold radius {coins.R} coins")
    d = 2 * coins.n
    o = build_ring_operator(coins, L).matrix
    eye = np.eye(L)
    rho_cap = min(field.r_max, (L - 1) // 2)
    out: list[tuple[int, float]] = []
    z = np.kron(eye, field.block(0))
    out.append((0, float(np.max(np.abs(expm(z) - o)))))
    for rho in range(1, rho_cap + 1):
        for delta in (rho, -rho):
            z = z + np.kron(np.roll(eye, delta, axis=0), field.block(delta))
        out.append((rho, float(np.max(np.abs(expm(z) - o)))))
    return out


def write_couplings_csv(field: CouplingField, path: str) -> None:
    d = 2 * field.n
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("delta_r,l,lp,value\n")
        for delta in range(-field.r_max, field.r_max + 1):
            b = field.block(delta)
            for l in range(d):
                for lp in range(d):
                    fh.write(f"{delta},{l},{lp},{float(b[l, lp])!r}\n")


def write_decay_summary_csv(field: CouplingField, fit: DecayFit, path: str) -> None:
    profile = field.magnitude_profile()
    beta = "" if fit.beta is None else repr(fit.beta)
    expo = "" if fit.exponent is None else repr(fit.exponent)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            "distance,max_abs,fitted_model,param_c,param_beta,param_exponent,"
            "r_squared,classification\n"
        )
        for dist in range(1, field.r_max + 1):
            fh.write(
                f"{dist},{float(profile[dist])!r},{fit.model},{fit.C!r},{beta},{expo},"
                f"{fit.r_squared!r},{fit.classification}\n"
            )


def write_residual_csv(curve: list[tuple[int, float]], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("rho,residual\n")
        for rho, res in curve:
            fh.write(f"{rho},{res!r}\n")
