"""Conjugacy witnesses between positive homomorphisms.

Two positive maps f, g are trope related when f(x) = a^-1 g(x) a for a single
group element a.  Such an a is necessarily a positive or a negative word, so
the search reduces to the monoid equation w * a = a * v per generator, whose
solution set has the classical closed form {p^k u : k >= 0} with p the
primitive root of w.  Intersecting these sets per generator decides the
relation exactly; no search bound is guessed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .errors import NotPositive, PpsRejection, RankMismatch
from .freegroup import (GroupHom, GroupWord, compose_hom, conjugate_hom,
                        hom_from_substitution, is_positive_hom)
from .symbolic import (PrimitiveVerdict, ProperVerdict, SequenceSpec,
                       sequence_is_primitive, sequence_is_proper)


def _primitive_root(w: tuple[int, ...]) -> tuple[int, ...]:
    """Shortest p with w = p^k."""
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w == w[:d] * (n // d):
            return w[:d]
    raise AssertionError("unreachable")


def _rotation_offset(w: tuple[int, ...], v: tuple[int, ...],
                     root: tuple[int, ...]) -> Optional[int]:
    """The unique r in [0, |root|) with w rotated by r equal to v, if any."""
    for r in range(len(root)):
        if w[r:] + w[:r] == v:
            return r
    return None


@dataclass(frozen=True)
class _SolutionSet:
    """{root^k * stub : k >= 0}, i.e. prefixes of root^inf of the right
    length class."""

    root: tuple[int, ...]
    stub: tuple[int, ...]

    def contains(self, a: tuple[int, ...]) -> bool:
        if (len(a) - len(self.stub)) % len(self.root) != 0 \
                or len(a) < len(self.stub):
            return False
        reps = -(-len(a) // len(self.root))  # ceil
        return a == (self.root * reps)[:len(a)]

    def element(self, k: int) -> tuple[int, ...]:
        return self.root * k + self.stub


def _positive_conjugator(f: GroupHom, g: GroupHom) -> Optional[tuple[int, ...]]:
    """Least positive word a (possibly empty) with g conjugated by a equal
    to f, or None.

    Per generator the constraint g(e) * a = a * f(e) holds exactly when a is
    a prefix of g(e) repeated forever whose length rotates g(e) onto f(e);
    with p the primitive root of g(e) that is the set {p^k u}.  When all
    roots agree the sets intersect exactly when the stubs agree and the stub
    is the least witness.  When two roots differ, periodicity interaction
    caps any common element below the sum of the root lengths, so a bounded
    scan of the first set decides.
    """
    if f.domain_rank == 0:
        return ()
    sets = []
    for i in range(f.domain_rank):
        w = tuple(idx for idx, _ in g.images[i].letters)
        v = tuple(idx for idx, _ in f.images[i].letters)
        if len(w) != len(v):
            return None
        root = _primitive_root(w)
        r = _rotation_offset(w, v, root)
        if r is None:
            return None
        sets.append(_SolutionSet(root, root[:r]))
    first = sets[0]
    if all(s.root == first.root for s in sets):
        stub = first.stub
        if all(s.stub == stub for s in sets):
            return stub
        return None
    bound = min(len(first.root) + len(s.root)
                for s in sets if s.root != first.root)
    k = 0
    while len(first.element(k)) <= bound:
        a = first.element(k)
        if all(s.contains(a) for s in sets):
            return a
        k += 1
    return None


def _positive_group_word(rank: int, letters: tuple[int, ...]) -> GroupWord:
    return GroupWord(rank, tuple((i, 1) for i in letters))


def solve_conjugator(f: GroupHom, g: GroupHom) -> Optional[GroupWord]:
    """Some a with conjugate_hom(g, a) = f, or None.

    A witness conjugating one positive map to another is itself positive or
    negative; the negative case is the positive problem with the maps
    swapped.  The minimal-length witness is returned, ties broken
    lexicographically, and every witness is re-verified by direct
    conjugation before being returned.
    """
    if f.domain_rank != g.domain_rank or f.codomain_rank != g.codomain_rank:
        raise RankMismatch("homomorphisms must share domain and codomain")
    for h in (f, g):
        if not is_positive_hom(h):
            raise NotPositive("solve_conjugator needs positive maps")
    rank = f.codomain_rank
    candidates = []
    pos = _positive_conjugator(f, g)
    if pos is not None:
        candidates.append(_positive_group_word(rank, pos))
    neg = _positive_conjugator(g, f)
    if neg is not None and neg != ():
        candidates.append(_positive_group_word(rank, neg).inverse())
    if not candidates:
        return None
    witness = min(candidates, key=lambda w: (len(w), w.lex_key()))
    assert conjugate_hom(g, witness) == f
    return witness


def are_trope_related(f: GroupHom, g: GroupHom) -> bool:
    return solve_conjugator(f, g) is not None


# -- conjugate zigzag diagrams -------------------------------------------------

@dataclass(frozen=True)
class CzzWitness:
    """A finite conjugate zigzag ladder between two hom sequences.

    With L levels: downs d_1..d_L, top bondings s_1..s_{L-1} (each s_i maps
    level i+1 to level i), bottom bondings t_1..t_{L-1}, ups u_1..u_{L-1}
    (u_i maps bottom level i+1 to top level i), and per-level conjugators.
    The triangles to check are u_i . d_{i+1} = c[up_conjugators[i]] . s_i and
    d_i . u_i = c[down_conjugators[i]] . t_i.
    """

    top: tuple[GroupHom, ...]
    bottom: tuple[GroupHom, ...]
    downs: tuple[GroupHom, ...]
    ups: tuple[GroupHom, ...]
    down_conjugators: tuple[GroupWord, ...]
    up_conjugators: tuple[GroupWord, ...]

    def __post_init__(self):
        levels = len(self.downs)
        if levels < 2:
            raise ValueError("need at least two levels")
        for name, seq in (("top", self.top), ("bottom", self.bottom),
                          ("ups", self.ups),
                          ("down conjugators", self.down_conjugators),
                          ("up conjugators", self.up_conjugators)):
            if len(seq) != levels - 1:
                raise ValueError(f"{name} must have {levels - 1} entries")
        g_rank = [d.domain_rank for d in self.downs]
        h_rank = [d.codomain_rank for d in self.downs]
        for i in range(levels - 1):
            t = self.top[i]
            if (t.domain_rank, t.codomain_rank) != (g_rank[i + 1], g_rank[i]):
                raise RankMismatch(f"top bonding {i + 1} does not chain")
            t = self.bottom[i]
            if (t.domain_rank, t.codomain_rank) != (h_rank[i + 1], h_rank[i]):
                raise RankMismatch(f"bottom bonding {i + 1} does not chain")
            u = self.ups[i]
            if (u.domain_rank, u.codomain_rank) != (h_rank[i + 1], g_rank[i]):
                raise RankMismatch(f"up map {i + 1} does not chain")
            if self.up_conjugators[i].rank != g_rank[i]:
                raise RankMismatch(f"up conjugator {i + 1} has wrong rank")
            if self.down_conjugators[i].rank != h_rank[i]:
                raise RankMismatch(f"down conjugator {i + 1} has wrong rank")
        for name, seq in (("top", self.top), ("bottom", self.bottom),
                          ("down", self.downs), ("up", self.ups)):
            for i, h in enumerate(seq):
                if not is_positive_hom(h):
                    raise NotPositive(f"{name} map {i + 1} is not positive")

    @property
    def levels(self) -> int:
        return len(self.downs)


@dataclass(frozen=True)
class CzzReport:
    ok: bool
    first_failure: Optional[tuple[str, int, str]] = None  # kind, level, why


def verify_czz(w: CzzWitness) -> CzzReport:
    """Check every triangle of the ladder by exact equality of reduced images.

    Only the levels present are checked; nothing is extrapolated to an
    infinite diagram.
    """
    for i in range(w.levels - 1):
        lhs = compose_hom(w.ups[i], w.downs[i + 1])
        rhs = conjugate_hom(w.top[i], w.up_conjugators[i])
        if lhs != rhs:
            return CzzReport(False, ("up", i + 1,
                                     "u.d does not match the conjugated "
                                     "top bonding"))
        lhs = compose_hom(w.downs[i], w.ups[i])
        rhs = conjugate_hom(w.bottom[i], w.down_conjugators[i])
        if lhs != rhs:
            return CzzReport(False, ("down", i + 1,
                                     "d.u does not match the conjugated "
                                     "bottom bonding"))
    return CzzReport(True)


# -- sequence validation ---------------------------------------------------------

@dataclass(frozen=True)
class PpsSpec:
    """A sequence that passed both the proper and the primitive check,
    carried together with its lift to free-group homomorphisms."""

    sequence: SequenceSpec
    prefix_homs: tuple[GroupHom, ...]
    cycle_homs: tuple[GroupHom, ...]
    proper_verdict: ProperVerdict
    primitive_verdict: PrimitiveVerdict


def validate_pps(seq: SequenceSpec, window: int = 8) -> PpsSpec:
    """Accept a sequence as primitive and proper, or raise PpsRejection.

    The rejection records which property failed; the level reported is the
    first level at which no witnessing composition was found.
    """
    proper = sequence_is_proper(seq, window)
    if proper is not ProperVerdict.PROPER:
        raise PpsRejection("proper", _first_failing_level(seq, window, True),
                           proper)
    primitive = sequence_is_primitive(seq, window)
    if primitive is not PrimitiveVerdict.PRIMITIVE:
        raise PpsRejection("primitive",
                           _first_failing_level(seq, window, False),
                           primitive)
    return PpsSpec(
        sequence=seq,
        prefix_homs=tuple(hom_from_substitution(s) for s in seq.prefix),
        cycle_homs=tuple(hom_from_substitution(s) for s in seq.cycle),
        proper_verdict=proper,
        primitive_verdict=primitive,
    )


def _first_failing_level(seq: SequenceSpec, window: int,
                         proper: bool) -> int:
    from .symbolic import _level_states
    for n in range(1, seq.levels_to_examine() + 1):
        size = len(seq.level(n).target)
        ok = any(st.proper() if proper else st.primitive(size)
                 for st in _level_states(seq, n, window))
        if not ok:
            return n
    return seq.levels_to_examine()  # pragma: no cover
