"""Exact Pauli-string arithmetic in the binary symplectic phase space.

A Pauli string is stored sparsely as ``{site: (q, p)}`` with ``q, p`` in
{0, 1} together with an integer power of i tracking the global phase.  The
operator encoded by a term is

    i**phase_exp * prod_r (X_r)**q_r (Z_r)**p_r

with the product over increasing site index and X before Z on each site.
Every product below updates ``phase_exp`` exactly, so terms compose without
any sign ambiguity.

Geometry is either a finite ring (``ring=L``, sites stored in 0..L-1) or
the infinite line (``ring=None``, arbitrary integer sites).  Rule images
and the glider search live on the line; everything dense lives on rings.

The text form ``"@r:LETTERS"`` denotes the literal tensor product of
I/X/Y/Z matrices starting at site r.  Since Y = i*X*Z in the internal
convention, parsing adds one power of i per Y so that the parsed term
equals the written operator exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

__all__ = [
    "PauliTerm",
    "GeometryMismatchError",
    "DiameterUndefinedError",
    "compose",
    "diameter",
    "symplectic_product",
    "equal_mod_phase",
]

LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
BITS_LETTER = {bits: letter for letter, bits in LETTER_BITS.items()}
PHASE_PREFIX = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
PREFIX_OF_PHASE = {0: "", 1: "i", 2: "-", 3: "-i"}

_TEXT_RE = re.compile(r"^([+-]?i?)?(?:@(-?\d+):)?([IXYZ]+)$")


class GeometryMismatchError(ValueError):
    """Raised when two terms live on different geometries."""


class DiameterUndefinedError(ValueError):
    """Raised when asking for the diameter of the identity term."""


@dataclass(frozen=True)
class PauliTerm:
    """One Pauli string with an exact i-power phase.

    ``sites`` maps site index to (q, p) bits; (0, 0) entries are dropped
    at construction.  ``ring`` is the ring length L, or None for the line.
    """

    sites: dict[int, tuple[int, int]] = field(default_factory=dict)
    phase_exp: int = 0
    ring: int | None = None

    def __post_init__(self) -> None:
        cleaned = {}
        for r, (q, p) in self.sites.items():
            if q not in (0, 1) or p not in (0, 1):
                raise ValueError(f"site {r}: bits must be 0 or 1, got {(q, p)}")
            if (q, p) == (0, 0):
                continue
            if self.ring is not None and not 0 <= r < self.ring:
                raise ValueError(f"site {r} outside ring of length {self.ring}")
            cleaned[int(r)] = (q, p)
        object.__setattr__(self, "sites", cleaned)
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)
        if self.ring is not None and self.ring < 1:
            raise ValueError("ring length must be positive")

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, ring: int | None = None) -> "PauliTerm":
        return cls({}, 0, ring)

    @classmethod
    def single(cls, site: int, letter: str, ring: int | None = None) -> "PauliTerm":
        """Single-site I/X/Y/Z as the literal Pauli matrix on that site."""
        q, p = LETTER_BITS[letter]
        phase = 1 if letter == "Y" else 0
        if ring is not None:
            site %= ring
        return cls({site: (q, p)}, phase, ring)

    @classmethod
    def from_text(cls, text: str, ring: int | None = None) -> "PauliTerm":
        """Parse ``"@r:LETTERS"`` (optionally phase-prefixed) exactly.

        Examples
        --------
        >>> PauliTerm.from_text("@0:ZYYZ").sites[1]
        (1, 1)
        >>> PauliTerm.from_text("-i@2:X", ring=8).phase_exp
        3
        """
        m = _TEXT_RE.match(text.strip())
        if not m:
            raise ValueError(f"unparseable Pauli text {text!r}")
        prefix, start, letters = m.group(1) or "", m.group(2), m.group(3)
        phase = PHASE_PREFIX[prefix]
        start = int(start) if start is not None else 0
        sites: dict[int, tuple[int, int]] = {}
        for offset, letter in enumerate(letters):
            bits = LETTER_BITS[letter]
            if bits == (0, 0):
                continue
            r = start + offset
            if ring is not None:
                r %= ring
                if r in sites:
                    raise ValueError(f"text {text!r} wraps onto site {r} twice")
            sites[r] = bits
            if letter == "Y":
                phase += 1
        return cls(sites, phase, ring)

    # -- queries ------------------------------------------------------

    def is_identity(self) -> bool:
        return not self.sites

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.sites))

    def key(self) -> tuple:
        """Phase-blind hashable key for orbit bookkeeping."""
        return tuple(sorted(self.sites.items()))

    def letter_at(self, site: int) -> str:
        return BITS_LETTER[self.sites.get(site, (0, 0))]

    def y_count(self) -> int:
        return sum(1 for bits in self.sites.values() if bits == (1, 1))

    def is_hermitian(self) -> bool:
        # dagger flips the phase and contributes (-1) per Y site
        return (2 * self.phase_exp - 2 * self.y_count()) % 4 == 0

    # -- transforms ---------------------------------------------------

    def translate(self, shift: int) -> "PauliTerm":
        if self.ring is not None:
            moved = {(r + shift) % self.ring: bits for r, bits in self.sites.items()}
        else:
            moved = {r + shift: bits for r, bits in self.sites.items()}
        return PauliTerm(moved, self.phase_exp, self.ring)

    def with_phase(self, phase_exp: int) -> "PauliTerm":
        return PauliTerm(dict(self.sites), phase_exp, self.ring)

    def on_ring(self, L: int) -> "PauliTerm":
        """Reinterpret a line term on a ring of length L (sites reduced mod L)."""
        sites: dict[int, tuple[int, int]] = {}
        for r, bits in self.sites.items():
            rr = r % L
            if rr in sites:
                raise ValueError(f"support wraps onto site {rr} twice on ring {L}")
            sites[rr] = bits
        return PauliTerm(sites, self.phase_exp, L)

    def __mul__(self, other: "PauliTerm") -> "PauliTerm":
        return compose(self, other)

    # -- text ---------------------------------------------------------

    def _interval_start(self) -> tuple[int, str]:
        """Canonical (start, letters) of the minimal covering interval."""
        supp = self.support
        if self.ring is None:
            start = supp[0]
            letters = "".join(self.letter_at(r) for r in range(start, supp[-1] + 1))
            return start, letters
        L = self.ring
        if len(supp) == 1:
            return supp[0], self.letter_at(supp[0])
        gaps = []
        for i, r in enumerate(supp):
            nxt = supp[(i + 1) % len(supp)]
            gaps.append(((nxt - r) % L or L, nxt))
        max_gap = max(g for g, _ in gaps)
        width = L - max_gap + 1
        best: tuple[str, int] | None = None
        for g, start in gaps:
            if g != max_gap:
                continue
            letters = "".join(self.letter_at((start + j) % L) for j in range(width))
            cand = (letters, start)
            if best is None or cand < best:
                best = cand
        assert best is not None
        return best[1], best[0]

    def to_text(self, with_phase: bool = False) -> str:
        if self.is_identity():
            body = "I"
            residual = self.phase_exp
        else:
            start, letters = self._interval_start()
            body = f"@{start}:{letters}"
            residual = (self.phase_exp - letters.count("Y")) % 4
        if not with_phase:
            return body
        return PREFIX_OF_PHASE[residual] + body

    def __str__(self) -> str:
        return self.to_text(with_phase=True)


def _check_same_geometry(a: PauliTerm, b: PauliTerm) -> None:
    if a.ring != b.ring:
        raise GeometryMismatchError(f"ring {a.ring} vs {b.ring}")


def compose(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Operator product a*b with the exact phase.

    Per site, X**qa Z**pa X**qb Z**pb = (-1)**(pa*qb) X**(qa+qb) Z**(pa+pb),
    so the product contributes 2*pa*qb to the power of i on each site.
    """
    _check_same_geometry(a, b)
    sites = dict(a.sites)
    phase = a.phase_exp + b.phase_exp
    for r, (qb, pb) in b.sites.items():
        qa, pa = sites.get(r, (0, 0))
        phase += 2 * (pa & qb)
        merged = ((qa + qb) % 2, (pa + pb) % 2)
        if merged == (0, 0):
            sites.pop(r, None)
        else:
            sites[r] = merged
    return PauliTerm(sites, phase, a.ring)


def symplectic_product(a: PauliTerm, b: PauliTerm) -> int:
    """0 if the strings commute, 1 if they anticommute."""
    _check_same_geometry(a, b)
    total = 0
    small, large = (a, b) if len(a.sites) <= len(b.sites) else (b, a)
    for r, (q1, p1) in small.sites.items():
        q2, p2 = large.sites.get(r, (0, 0))
        total ^= (q1 & p2) ^ (p1 & q2)
    return total


def diameter(a: PauliTerm) -> int:
    """Length of the minimal (circular) interval containing the support.

    On a ring this is L minus the largest circular gap between consecutive
    support sites; a single site has diameter 0.  On the line it is simply
    max - min.  The identity has no diameter.
    """
    if a.is_identity():
        raise DiameterUndefinedError("identity term has no diameter")
    supp = a.support
    if a.ring is None:
        return supp[-1] - supp[0]
    L = a.ring
    if len(supp) == 1:
        return 0
    max_gap = 0
    for i, r in enumerate(supp):
        nxt = supp[(i + 1) % len(supp)]
        gap = (nxt - r) % L or L
        max_gap = max(max_gap, gap)
    return L - max_gap


def equal_mod_phase(a: PauliTerm, b: PauliTerm) -> bool:
    return a.ring == b.ring and a.sites == b.sites
