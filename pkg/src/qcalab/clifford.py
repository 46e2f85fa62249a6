"""Translation-invariant Clifford automaton rules and their dynamics.

A rule is given by the line-geometry images of the two single-site
generators: conjugation sends X at site r to ``image_of_x`` translated by
r, Z likewise.  Conjugation is an algebra homomorphism, so the image of a
general term is the ordered product of generator images; phases come out
exact because :mod:`qcalab.pauli` tracks them exactly.

On phase space the rule acts as a 2x2 matrix over F2 Laurent polynomials
(the symbol).  Inversion of the symbol (unit determinant = single
monomial) produces the inverse rule, with phases fixed afterwards so that
the round trip is the identity including phase.

Two search engines work on the phase-space level only, where signs are
irrelevant by construction:

* a glider search that enumerates all strings of bounded support as bit
  masks and compares each stepped vector against its own translates, and
* an orbit-growth check on rings that certifies, exhaustively over seeds
  of bounded diameter, that no conjugation orbit sits at constant
  diameter below L-2.  Any diameter change along an orbit certifies
  max > min for that orbit, so each seed can stop at the first change; a
  violation is exactly an orbit that closes at its seed diameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .pauli import (
    DiameterUndefinedError,
    PauliTerm,
    compose,
    diameter,
    equal_mod_phase,
    symplectic_product,
)

__all__ = [
    "CliffordRule",
    "Orbit",
    "GrowthReport",
    "SpacetimeDiagram",
    "NonInvertibleRuleError",
    "SearchBudgetError",
    "fractal_rule",
    "identity_rule",
    "shift_rule",
    "step",
    "inverse_rule",
    "compose_rules",
    "orbit",
    "find_gliders",
    "glider_reduction",
    "support_growth_check",
    "spacetime_diagram",
]


class NonInvertibleRuleError(ValueError):
    """The phase-space symbol has no Laurent inverse."""


class SearchBudgetError(RuntimeError):
    """Enumeration would exceed the configured candidate budget."""


@dataclass(frozen=True)
class CliffordRule:
    """Images of the generators under conjugation, on line geometry."""

    image_of_x: PauliTerm
    image_of_z: PauliTerm

    def __post_init__(self) -> None:
        for name, img in (("image_of_x", self.image_of_x), ("image_of_z", self.image_of_z)):
            if img.ring is not None:
                raise ValueError(f"{name} must use line geometry")
            if img.is_identity():
                raise ValueError(f"{name} cannot be the identity")
        if symplectic_product(self.image_of_x, self.image_of_z) != 1:
            raise ValueError("images of X and Z at the same site must anticommute")
        R = self.radius
        for d in range(1, 2 * R + 1):
            # (x, z) at +d and (z, x) at +d encode opposite-sign offsets
            # of the same cross pair, so both orders must be listed
            for a, b in (
                (self.image_of_x, self.image_of_x),
                (self.image_of_x, self.image_of_z),
                (self.image_of_z, self.image_of_x),
                (self.image_of_z, self.image_of_z),
            ):
                if symplectic_product(a, b.translate(d)) != 0:
                    raise ValueError(f"generator images at distance {d} fail to commute")

    @property
    def radius(self) -> int:
        extent = [abs(r) for r in self.image_of_x.support] + [
            abs(r) for r in self.image_of_z.support
        ]
        return max(extent)

    def symbol(self) -> tuple[frozenset[int], frozenset[int], frozenset[int], frozenset[int]]:
        """(a, b, c, d) offset sets: image of X has q-poly a, p-poly c;
        image of Z has q-poly b, p-poly d."""
        a = frozenset(r for r, (q, _) in self.image_of_x.sites.items() if q)
        c = frozenset(r for r, (_, p) in self.image_of_x.sites.items() if p)
        b = frozenset(r for r, (q, _) in self.image_of_z.sites.items() if q)
        d = frozenset(r for r, (_, p) in self.image_of_z.sites.items() if p)
        return a, b, c, d


def fractal_rule() -> CliffordRule:
    """The self-similar rule: Z -> X and X -> X.Y.X on nearest neighbours."""
    return CliffordRule(
        image_of_x=PauliTerm.from_text("@-1:XYX"),
        image_of_z=PauliTerm.from_text("@0:X"),
    )


def identity_rule() -> CliffordRule:
    return CliffordRule(
        image_of_x=PauliTerm.from_text("@0:X"),
        image_of_z=PauliTerm.from_text("@0:Z"),
    )


def shift_rule(offset: int = 1) -> CliffordRule:
    """Pure translation by ``offset`` sites."""
    if offset == 0:
        return identity_rule()
    return CliffordRule(
        image_of_x=PauliTerm.from_text(f"@{offset}:X"),
        image_of_z=PauliTerm.from_text(f"@{offset}:Z"),
    )


def step(rule: CliffordRule, term: PauliTerm) -> PauliTerm:
    """One conjugation step W^dag (term) W.

    Works on the line or on a ring with L > 2*radius (so a single image
    never wraps onto itself).
    """
    L = term.ring
    if L is not None and L <= 2 * rule.radius:
        raise ValueError(f"ring of length {L} too small for radius {rule.radius}")

    def translated(img: PauliTerm, r: int) -> PauliTerm:
        if L is None:
            return img.translate(r)
        return img.on_ring(L).translate(r)

    out = PauliTerm.identity(L)
    for r in term.support:
        q, p = term.sites[r]
        if q:
            out = compose(out, translated(rule.image_of_x, r))
        if p:
            out = compose(out, translated(rule.image_of_z, r))
    return out.with_phase(out.phase_exp + term.phase_exp)


# -- symbol algebra over F2 Laurent polynomials -----------------------


def _poly_mul(f: frozenset[int], g: frozenset[int]) -> frozenset[int]:
    acc: set[int] = set()
    for u in f:
        for v in g:
            acc ^= {u + v}
    return frozenset(acc)


def _poly_add(f: frozenset[int], g: frozenset[int]) -> frozenset[int]:
    return f ^ g


def _poly_shift(f: frozenset[int], s: int) -> frozenset[int]:
    return frozenset(u + s for u in f)


def inverse_rule(rule: CliffordRule) -> CliffordRule:
    """Invert the phase-space symbol and fix phases exactly.

    The symbol matrix [[a, b], [c, d]] is invertible over F2[x, 1/x] iff
    its determinant a*d + b*c is a single monomial x^m; the inverse is
    then x^-m * [[d, b], [c, a]].  Candidate images get their phase set
    so that the forward rule maps them exactly onto X_0 / Z_0.
    """
    a, b, c, d = rule.symbol()
    det = _poly_add(_poly_mul(a, d), _poly_mul(b, c))
    if len(det) != 1:
        raise NonInvertibleRuleError(f"symbol determinant has {len(det)} terms")
    m = next(iter(det))

    def build(qpoly: frozenset[int], ppoly: frozenset[int]) -> PauliTerm:
        sites: dict[int, tuple[int, int]] = {}
        for r in qpoly | ppoly:
            sites[r] = (1 if r in qpoly else 0, 1 if r in ppoly else 0)
        return PauliTerm(sites, 0, None)

    cand_x = build(_poly_shift(d, -m), _poly_shift(c, -m))
    cand_z = build(_poly_shift(b, -m), _poly_shift(a, -m))

    def fix_phase(cand: PauliTerm, target: PauliTerm) -> PauliTerm:
        image = step(rule, cand)
        if image.sites != target.sites:
            raise NonInvertibleRuleError("symbol inverse failed the round trip")
        return cand.with_phase(cand.phase_exp - image.phase_exp + target.phase_exp)

    return CliffordRule(
        image_of_x=fix_phase(cand_x, PauliTerm.from_text("@0:X")),
        image_of_z=fix_phase(cand_z, PauliTerm.from_text("@0:Z")),
    )


def compose_rules(first: CliffordRule, second: CliffordRule) -> CliffordRule:
    """Rule whose step is step(first) after step(second)."""
    return CliffordRule(
        image_of_x=step(first, second.image_of_x),
        image_of_z=step(first, second.image_of_z),
    )


# -- orbits on rings --------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    """A closed conjugation orbit on a ring."""

    members: tuple[PauliTerm, ...]
    representative: PauliTerm
    length: int
    min_diameter: int
    max_diameter: int


def orbit(rule: CliffordRule, seed: PauliTerm, L: int | None = None) -> Orbit:
    """Iterate the step until the phase-space vector recurs.

    The phase-space map is invertible, so the first recurrence is the seed
    itself and the members form a closed cycle.
    """
    if seed.ring is None:
        if L is None:
            raise ValueError("ring length required for a line seed")
        seed = seed.on_ring(L)
    if seed.is_identity():
        raise ValueError("orbit of the identity is trivial")
    members = [seed]
    seen = {seed.key()}
    current = seed
    while True:
        current = step(rule, current)
        if current.key() == seed.key():
            break
        if current.key() in seen:  # cannot happen for an invertible map
            raise RuntimeError("orbit re-entered off the seed; map not invertible")
        seen.add(current.key())
        members.append(current)
    diams = [diameter(t) for t in members]
    rep = min(
        members, key=lambda t: (diameter(t), t._interval_start()[1], t._interval_start()[0])
    )
    return Orbit(
        members=tuple(members),
        representative=rep,
        length=len(members),
        min_diameter=min(diams),
        max_diameter=max(diams),
    )


# -- bitmask engines --------------------------------------------------


def _symbol_offsets(rule: CliffordRule) -> tuple[list[int], list[int], list[int], list[int]]:
    a, b, c, d = rule.symbol()
    return sorted(a), sorted(b), sorted(c), sorted(d)


def _enumerate_window(
    length: int, chunk: int = 1 << 22
) -> Iterable[tuple[np.ndarray, np.ndarray]]:
    """Yield (q, p) mask chunks over a window of ``length`` sites with
    both boundary sites non-identity (interior arbitrary)."""
    total = 4 ** length
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(lo + chunk, total), dtype=np.uint64)
        site0 = codes & np.uint64(3)
        keep = site0 != 0
        if length > 1:
            last = (codes >> np.uint64(2 * (length - 1))) & np.uint64(3)
            keep &= last != 0
        codes = codes[keep]
        if codes.size == 0:
            continue
        q = np.zeros_like(codes)
        p = np.zeros_like(codes)
        for i in range(length):
            q |= ((codes >> np.uint64(2 * i)) & np.uint64(1)) << np.uint64(i)
            p |= ((codes >> np.uint64(2 * i + 1)) & np.uint64(1)) << np.uint64(i)
        yield q, p


def _mask_to_term(q: int, p: int) -> PauliTerm:
    sites: dict[int, tuple[int, int]] = {}
    r = 0
    while q or p:
        bits = (q & 1, p & 1)
        if bits != (0, 0):
            sites[r] = bits
        q >>= 1
        p >>= 1
        r += 1
    term = PauliTerm(sites, 0, None)
    # report the literal Pauli string (adds i per Y, making it Hermitian)
    return term.with_phase(term.y_count())


def find_gliders(
    rule: CliffordRule,
    max_support_len: int,
    max_shift: int | None = None,
    budget: int = 1 << 26,
) -> list[tuple[PauliTerm, int]]:
    """Exhaustive phase-space search for strings with step(v) = translate(v, k).

    Signs are ignored by construction: the search runs on F2 bit masks.
    ``max_shift`` defaults to the rule radius, which is the causality
    bound on any glider shift; larger values are accepted but cannot
    match beyond the light cone.  Raises :class:`SearchBudgetError` if
    the enumeration would exceed ``budget`` candidates, so an empty
    result always means a completed search.
    """
    R = rule.radius
    if max_shift is None:
        max_shift = R
    total = sum(4 ** l for l in range(1, max_support_len + 1))
    if total > budget:
        raise SearchBudgetError(f"{total} candidates exceed budget {budget}")
    a, b, c, d = _symbol_offsets(rule)
    found: list[tuple[PauliTerm, int]] = []
    for length in range(1, max_support_len + 1):
        for q, p in _enumerate_window(length):
            new_q = np.zeros_like(q)
            new_p = np.zeros_like(p)
            # images are computed in a frame shifted by +R so all shifts are left shifts
            for off in a:
                new_q ^= q << np.uint64(off + R)
            for off in b:
                new_q ^= p << np.uint64(off + R)
            for off in c:
                new_p ^= q << np.uint64(off + R)
            for off in d:
                new_p ^= p << np.uint64(off + R)
            for k in range(-max_shift, max_shift + 1):
                if k + R < 0:
                    continue
                hit = (new_q == (q << np.uint64(k + R))) & (new_p == (p << np.uint64(k + R)))
                for idx in np.nonzero(hit)[0]:
                    found.append((_mask_to_term(int(q[idx]), int(p[idx])), k))
    return found


def glider_reduction(rule: CliffordRule, term: PauliTerm, k: int) -> PauliTerm:
    """Product of the time-shifted evolute with the original string.

    For a rigid glider this collapses to the identity; for a string whose
    step is a translate of a *different* string of equal support length,
    the frontier sites cancel and the product is strictly shorter.  Used
    in tests as the minimality certificate for glider counterexamples.
    """
    return compose(step(rule, term).translate(-k), term)


@dataclass(frozen=True)
class GrowthReport:
    """Result of the exhaustive orbit-growth check on a ring."""

    L: int
    max_seed_diameter: int
    seeds_checked: int
    violations: tuple[tuple[int, int], ...]  # (q_mask, p_mask) of offending seeds
    max_orbit_steps: int

    @property
    def ok(self) -> bool:
        return not self.violations


def _diameter_lut(L: int) -> np.ndarray:
    """diameter of each support mask on a ring of length L (0 for empty)."""
    lut = np.zeros(1 << L, dtype=np.int16)
    for mask in range(1, 1 << L):
        sites = [r for r in range(L) if (mask >> r) & 1]
        if len(sites) == 1:
            continue
        max_gap = 0
        for i, r in enumerate(sites):
            nxt = sites[(i + 1) % len(sites)]
            gap = (nxt - r) % L or L
            max_gap = max(max_gap, gap)
        lut[mask] = L - max_gap
    return lut


def _ring_step_masks(
    rule: CliffordRule, L: int, q: np.ndarray, p: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    a, b, c, d = _symbol_offsets(rule)
    mask = np.uint64((1 << L) - 1)

    def rotl(v: np.ndarray, s: int) -> np.ndarray:
        s %= L
        if s == 0:
            return v
        return ((v << np.uint64(s)) | (v >> np.uint64(L - s))) & mask

    nq = np.zeros_like(q)
    np_ = np.zeros_like(p)
    for off in a:
        nq ^= rotl(q, off)
    for off in b:
        nq ^= rotl(p, off)
    for off in c:
        np_ ^= rotl(q, off)
    for off in d:
        np_ ^= rotl(p, off)
    return nq, np_


def support_growth_check(
    rule: CliffordRule,
    L: int,
    max_seed_diameter: int | None = None,
    chunk: int = 1 << 22,
    max_steps: int = 1 << 20,
) -> GrowthReport:
    """Exhaustively search a ring for orbits frozen at constant diameter.

    Seeds are every phase-space vector whose support starts at site 0 and
    has diameter at most ``max_seed_diameter`` (default L-3).  Orbits of
    translated vectors are translates with identical diameters, so this
    covers every orbit whose minimum diameter is at most the bound.  Each
    seed stops at the first diameter change, which proves its orbit holds
    a member wider than the representative, or when the orbit closes at
    constant diameter, which is recorded as a violation.

    Constant-diameter orbits do exist whenever the rule's symbol admits an
    eigenvector of some monomial eigenvalue mod (x^L - 1): the orbit then
    recurs as a translate of itself without ever growing, a closure effect
    of the ring that has no counterpart on the line.
    """
    if L > 28:
        raise ValueError("ring too large for the bitmask engine")
    if L <= 2 * rule.radius:
        raise ValueError(f"ring of length {L} too small for radius {rule.radius}")
    if max_seed_diameter is None:
        max_seed_diameter = L - 3
    max_seed_diameter = min(max_seed_diameter, L - 2)
    lut = _diameter_lut(L)
    half = np.uint64((1 << L) - 1)
    violations: list[tuple[int, int]] = []
    seeds_checked = 0
    max_steps_seen = 0
    for length in range(1, max_seed_diameter + 2):
        for q0, p0 in _enumerate_window(length, chunk):
            seeds_checked += q0.size
            d0 = lut[(q0 | p0) & half]
            q, p = q0.copy(), p0.copy()
            steps = 0
            while q.size:
                steps += 1
                if steps > max_steps:
                    raise RuntimeError("orbit exceeded the step cap")
                q, p = _ring_step_masks(rule, L, q, p)
                diam = lut[(q | p) & half]
                grown = diam != d0
                closed = (~grown) & (q == q0) & (p == p0)
                bad = closed & (d0 < L - 2)
                if bad.any():
                    for i in np.nonzero(bad)[0]:
                        violations.append((int(q0[i]), int(p0[i])))
                done = grown | closed
                if done.any():
                    keep = ~done
                    q, p, q0, p0, d0 = q[keep], p[keep], q0[keep], p0[keep], d0[keep]
                max_steps_seen = max(max_steps_seen, steps)
    return GrowthReport(
        L=L,
        max_seed_diameter=max_seed_diameter,
        seeds_checked=seeds_checked,
        violations=tuple(violations),
        max_orbit_steps=max_steps_seen,
    )


# -- spacetime rendering ----------------------------------------------


@dataclass(frozen=True)
class SpacetimeDiagram:
    """Support bitmap of an evolving string, one row per time step."""

    origin: int  # site index of the leftmost column
    grid: np.ndarray  # bool, shape (T+1, width)

    def to_pbm(self) -> str:
        rows, cols = self.grid.shape
        lines = ["P1", f"{cols} {rows}"]
        for row in self.grid:
            lines.append(" ".join("1" if v else "0" for v in row))
        return "\n".join(lines) + "\n"


def spacetime_diagram(rule: CliffordRule, seed: PauliTerm, steps: int) -> SpacetimeDiagram:
    if seed.ring is not None:
        raise ValueError("spacetime diagrams are drawn on the line")
    if seed.is_identity():
        raise ValueError("seed must be non-identity")
    history = [seed]
    for _ in range(steps):
        history.append(step(rule, history[-1]))
    lo = min(min(t.support) for t in history if not t.is_identity())
    hi = max(max(t.support) for t in history if not t.is_identity())
    grid = np.zeros((len(history), hi - lo + 1), dtype=bool)
    for t, term in enumerate(history):
        for r in term.support:
            grid[t, r - lo] = True
    return SpacetimeDiagram(origin=lo, grid=grid)
