"""Translation-invariant quasi-free fermionic QCAs at the Majorana level.

A model is a finite family of real coin matrices A_q, q in [-R, R], with
the orthogonality constraints that make the symbol M_k = sum_q A_q e^{-iqk}
unitary at every momentum.  The same coins assemble into a real orthogonal
block-circulant operator on any ring with L > 2R.  Everything downstream
(bands, windings, generators) reads models only through this module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

ORTHOGONALITY_TOL = 1e-10
DET_TOL = 1e-8


class CoinValidationError(ValueError):
    """A coin family violates reality, causality, or orthogonality."""


@dataclass(frozen=True, eq=False)
class CoinSet:
    """Real coin matrices A_q indexed by q in [-R, R]; n modes per site."""

    n: int
    R: int
    blocks: tuple[np.ndarray, ...]  # blocks[q + R], each 2n x 2n

    def __post_init__(self) -> None:
        if len(self.blocks) != 2 * self.R + 1:
            raise ValueError(f"need {2 * self.R + 1} blocks for radius {self.R}")
        d = 2 * self.n
        frozen = []
        for a in self.blocks:
            a = np.asarray(a)
            if np.iscomplexobj(a):
                if np.max(np.abs(a.imag)) > 0:
                    raise CoinValidationError("coin blocks must be real")
                a = a.real
            a = np.array(a, dtype=np.float64)
            if a.shape != (d, d):
                raise ValueError(f"coin block shape {a.shape}, expected {(d, d)}")
            a.setflags(write=False)
            frozen.append(a)
        object.__setattr__(self, "blocks", tuple(frozen))

    def coin(self, q: int) -> np.ndarray:
        if abs(q) > self.R:
            return np.zeros((2 * self.n, 2 * self.n))
        return self.blocks[q + self.R]

    @cached_property
    def is_scalar(self) -> bool:
        """True when every coin is a multiple of the identity."""
        d = 2 * self.n
        eye = np.eye(d)
        return all(
            np.allclose(a, a[0, 0] * eye, atol=1e-14, rtol=0.0) for a in self.blocks
        )

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "R": self.R,
            "A": {str(q): self.coin(q).tolist() for q in range(-self.R, self.R + 1)},
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CoinSet":
        payload = json.loads(text)
        R = int(payload["R"])
        blocks = tuple(np.array(payload["A"][str(q)]) for q in range(-R, R + 1))
        return cls(n=int(payload["n"]), R=R, blocks=blocks)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    orthogonality: dict[int, float]  # m -> max violation of sum_q A_q A_{q+m}^T
    worst_m: int
    worst_violation: float


def validate(coins: CoinSet) -> ValidationReport:
    """Check the constraints making M_k unitary for all k.

    Reality and causality hold by construction of CoinSet (real dtype,
    finite block table), so the content is the orthogonality family
    sum_q A_q A_{q+m}^T = delta_{m0} I for m in [-2R, 2R].
    """
    d = 2 * coins.n
    eye = np.eye(d)
    violations: dict[int, float] = {}
    for m in range(-2 * coins.R, 2 * coins.R + 1):
        acc = np.zeros((d, d))
        for q in range(-coins.R, coins.R + 1):
            if abs(q + m) <= coins.R:
                acc += coins.coin(q) @ coins.coin(q + m).T
        target = eye if m == 0 else 0.0
        violations[m] = float(np.max(np.abs(acc - target)))
    worst_m = max(violations, key=lambda m: (violations[m], m))
    worst = violations[worst_m]
    return ValidationReport(
        ok=worst <= ORTHOGONALITY_TOL,
        orthogonality=violations,
        worst_m=worst_m,
        worst_violation=worst,
    )


def symbol_at(coins: CoinSet, k: float) -> np.ndarray:
    """M_k = sum_q A_q e^{-iqk}."""
    d = 2 * coins.n
    m = np.zeros((d, d), dtype=np.complex128)
    for q in range(-coins.R, coins.R + 1):
        m += coins.coin(q) * np.exp(-1j * q * k)
    return m


def symbol_derivative_at(coins: CoinSet, k: float) -> np.ndarray:
    """dM_k/dk, exact from the coins."""
    d = 2 * coins.n
    m = np.zeros((d, d), dtype=np.complex128)
    for q in range(-coins.R, coins.R + 1):
        m += coins.coin(q) * (-1j * q) * np.exp(-1j * q * k)
    return m


@dataclass(frozen=True, eq=False)
class RingOperator:
    """Block-circulant real orthogonal operator on a ring of L sites."""

    L: int
    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        d = 2 * self.n * self.L
        if self.matrix.shape != (d, d):
            raise ValueError(f"matrix shape {self.matrix.shape}, expected {(d, d)}")
        defect = np.max(np.abs(self.matrix.T @ self.matrix - np.eye(d)))
        if defect > ORTHOGONALITY_TOL:
            raise ValueError(f"operator not orthogonal to {ORTHOGONALITY_TOL} "
                             f"(defect {defect:.3e})")


def build_ring_operator(coins: CoinSet, L: int) -> RingOperator:
    """Place A_q on circular block diagonal q = r' - r (mod L)."""
    if L <= 2 * coins.R:
        raise ValueError(f"ring of length {L} overlaps blocks of radius {coins.R}")
    d = 2 * coins.n
    mat = np.zeros((d * L, d * L))
    for q in range(-coins.R, coins.R + 1):
        a = coins.coin(q)
        for r in range(L):
            rp = (r + q) % L
            mat[rp * d : rp * d + d, r * d : r * d + d] += a
    return RingOperator(L=L, n=coins.n, matrix=mat)


def parity_determinant(op: RingOperator) -> int:
    """Sign of det O; +1 certifies the many-body unitary preserves parity."""
    sign, logabs = np.linalg.slogdet(op.matrix)
    if abs(logabs) > DET_TOL:
        raise ValueError(f"|det| deviates from 1 (log|det| = {logabs:.3e})")
    return int(round(sign))


# -- model zoo --------------------------------------------------------


def _rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _random_so4(rng: np.random.Generator) -> np.ndarray:
    g, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    if np.linalg.det(g) < 0:
        g[:, 0] = -g[:, 0]
    return g


def _convolve_coins(second: CoinSet, first: CoinSet) -> CoinSet:
    """Coins of the product operator O2 O1."""
    if second.n != first.n:
        raise ValueError("mode count mismatch")
    R = second.R + first.R
    d = 2 * first.n
    blocks = [np.zeros((d, d)) for _ in range(2 * R + 1)]
    for q2 in range(-second.R, second.R + 1):
        for q1 in range(-first.R, first.R + 1):
            blocks[q2 + q1 + R] += second.coin(q2) @ first.coin(q1)
    return CoinSet(n=first.n, R=R, blocks=tuple(blocks))


def _trim_radius(coins: CoinSet) -> CoinSet:
    """Drop all-zero edge blocks so R reflects the true support."""
    R = coins.R
    while R > 0:
        if np.any(coins.coin(R)) or np.any(coins.coin(-R)):
            break
        R -= 1
    if R == coins.R:
        return coins
    blocks = tuple(coins.coin(q) for q in range(-R, R + 1))
    return CoinSet(n=coins.n, R=R, blocks=blocks)


def _brickwork(seed: int, depth: int) -> CoinSet:
    """Alternating layers of shared random SO(4) rotations, n = 2.

    Even layers rotate the four Majorana components inside a site; odd
    layers rotate the upper half of one site with the lower half of the
    next.  Every layer is an orthogonal block rotation with determinant
    +1 on any ring, so the product preserves parity by construction.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    rng = np.random.default_rng(seed)
    zero = np.zeros((4, 4))
    coins = CoinSet(n=2, R=0, blocks=(np.eye(4),))
    for layer in range(depth):
        g = _random_so4(rng)
        if layer % 2 == 0:
            step = CoinSet(n=2, R=0, blocks=(g,))
        else:
            a0 = np.zeros((4, 4))
            a0[2:, 2:] = g[:2, :2]
            a0[:2, :2] = g[2:, 2:]
            am = np.zeros((4, 4))
            am[2:, :2] = g[:2, 2:]
            ap = np.zeros((4, 4))
            ap[:2, 2:] = g[2:, :2]
            step = CoinSet(n=2, R=1, blocks=(am, a0, ap))
        coins = _convolve_coins(step, coins)
    return _trim_radius(coins)


def builtin_model(name: str, **params) -> CoinSet:
    """Construct a named model; every return value passes validate().

    identity            A_0 = I, n = 1.
    shift               A_1 = I, n = 1.
    dirac(theta)        M_k = R(theta) diag(e^{-ik}, e^{ik}); gapped with
                        zero windings for theta in (0, pi), critical with
                        windings {-1, +1} at theta = 0.
    half_shift          two counter-moving Majorana half-shifts, n = 2;
                        glues into two cycles of length 2 with windings
                        {-1, +1} and drift speeds -+1/2.
    random_brickwork    seeded staggered SO(4) layers, n = 2, R = depth//2.
    """
    zero2 = np.zeros((2, 2))
    if name == "identity":
        coins = CoinSet(n=1, R=0, blocks=(np.eye(2),))
    elif name == "shift":
        coins = CoinSet(n=1, R=1, blocks=(zero2, zero2, np.eye(2)))
    elif name == "dirac":
        theta = float(params.pop("theta"))
        rot = _rotation(theta)
        coins = CoinSet(
            n=1,
            R=1,
            blocks=(rot @ np.diag([0.0, 1.0]), zero2, rot @ np.diag([1.0, 0.0])),
        )
    elif name == "half_shift":
        am = np.zeros((4, 4))
        am[2, 3] = 1.0
        a0 = np.zeros((4, 4))
        a0[1, 0] = 1.0
        a0[3, 2] = 1.0
        ap = np.zeros((4, 4))
        ap[0, 1] = 1.0
        coins = CoinSet(n=2, R=1, blocks=(am, a0, ap))
    elif name == "random_brickwork":
        coins = _brickwork(int(params.pop("seed")), int(params.pop("depth", 2)))
    else:
        raise ValueError(f"unknown model {name!r}")
    if params:
        raise ValueError(f"unused parameters for {name!r}: {sorted(params)}")
    report = validate(coins)
    if not report.ok:
        raise CoinValidationError(
            f"builtin {name!r} failed validation at m={report.worst_m} "
            f"({report.worst_violation:.3e})"
        )
    return coins


def zoo() -> dict[str, CoinSet]:
    """The fixed model set exercised by tests and the CLI."""
    return {
        "identity": builtin_model("identity"),
        "shift": builtin_model("shift"),
        "dirac_massless": builtin_model("dirac", theta=0.0),
        "dirac_gapped": builtin_model("dirac", theta=np.pi / 4),
        "half_shift": builtin_model("half_shift"),
        "brickwork": builtin_model("random_brickwork", seed=1, depth=2),
    }
