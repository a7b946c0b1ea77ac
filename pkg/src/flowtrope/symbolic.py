"""Finite alphabets, substitutions, and the proper/primitive calculus.

A substitution maps each source symbol to a non-empty word over a target
alphabet.  Symbols are interned to integer indices at construction; the
identifier strings only matter at the I/O boundary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import AlphabetMismatch, BadIndex, WindowTooSmall


@dataclass(frozen=True)
class Alphabet:
    """An ordered list of distinct symbol identifiers; index is canonical."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet must be non-empty")
        seen = set()
        for s in self.symbols:
            if not s or any(c.isspace() for c in s) or "'" in s or "#" in s:
                raise ValueError(f"bad symbol identifier: {s!r}")
            if s in seen:
                raise ValueError(f"duplicate symbol: {s!r}")
            seen.add(s)

    def __len__(self):
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise BadIndex(f"unknown symbol {symbol!r}") from None


def alphabet(*symbols: str) -> Alphabet:
    return Alphabet(tuple(symbols))


@dataclass(frozen=True)
class SymWord:
    """A finite word over an alphabet, stored as symbol indices."""

    alphabet: Alphabet
    letters: tuple[int, ...]

    def __post_init__(self):
        n = len(self.alphabet)
        for i in self.letters:
            if not 0 <= i < n:
                raise BadIndex(f"letter index {i} out of range for alphabet "
                               f"of size {n}")

    def __len__(self):
        return len(self.letters)

    def text(self) -> str:
        return " ".join(self.alphabet.symbols[i] for i in self.letters)

    def spell(self) -> str:
        """Concatenated spelling; readable when identifiers are single chars."""
        return "".join(self.alphabet.symbols[i] for i in self.letters)


def word(alpha: Alphabet, text: str) -> SymWord:
    """Build a SymWord from whitespace-separated symbol names."""
    return SymWord(alpha, tuple(alpha.index(t) for t in text.split()))


@dataclass(frozen=True)
class Substitution:
    """One non-empty target word per source symbol, jointly surjective."""

    source: Alphabet
    target: Alphabet
    images: tuple[SymWord, ...]

    def __post_init__(self):
        if len(self.images) != len(self.source):
            raise ValueError("need exactly one image per source symbol")
        hit = set()
        for w in self.images:
            if w.alphabet != self.target:
                raise AlphabetMismatch("image word over wrong alphabet")
            if len(w) == 0:
                raise ValueError("empty image word")
            hit.update(w.letters)
        if hit != set(range(len(self.target))):
            missing = [self.target.symbols[i]
                       for i in sorted(set(range(len(self.target))) - hit)]
            raise ValueError(f"not surjective: {' '.join(missing)} never occurs")

    def image(self, i: int) -> SymWord:
        return self.images[i]

    def is_endomorphic(self) -> bool:
        return self.source == self.target

    def apply(self, w: SymWord) -> SymWord:
        """Apply to a word over the source alphabet."""
        if w.alphabet != self.source:
            raise AlphabetMismatch("word is not over the source alphabet")
        out: list[int] = []
        for i in w.letters:
            out.extend(self.images[i].letters)
        return SymWord(self.target, tuple(out))

    def iterate(self, w: SymWord, n: int) -> SymWord:
        """Apply an endomorphic substitution n times."""
        if not self.is_endomorphic():
            raise AlphabetMismatch("iteration needs source == target")
        for _ in range(n):
            w = self.apply(w)
        return w


def substitution(source: Alphabet, target: Alphabet,
                 images: dict[str, str] | Iterable[str]) -> Substitution:
    """Convenience constructor; images given as texts in source order."""
    if isinstance(images, dict):
        texts = [images[s] for s in source.symbols]
    else:
        texts = list(images)
    return Substitution(source, target, tuple(word(target, t) for t in texts))


def identity_substitution(alpha: Alphabet) -> Substitution:
    return Substitution(alpha, alpha,
                        tuple(SymWord(alpha, (i,)) for i in range(len(alpha))))


def compose(outer: Substitution, inner: Substitution) -> Substitution:
    """outer after inner: each inner image is expanded letter by letter."""
    if outer.source != inner.target:
        raise AlphabetMismatch("source of outer must equal target of inner")
    images = []
    for w in inner.images:
        out: list[int] = []
        for b in w.letters:
            out.extend(outer.images[b].letters)
        images.append(SymWord(outer.target, tuple(out)))
    return Substitution(inner.source, outer.target, tuple(images))


def is_proper(s: Substitution) -> bool:
    """All images share a first symbol and a last symbol, lengths >= 2."""
    if any(len(w) < 2 for w in s.images):
        return False
    first = {w.letters[0] for w in s.images}
    last = {w.letters[-1] for w in s.images}
    return len(first) == 1 and len(last) == 1


def is_degenerate_proper(s: Substitution) -> bool:
    """One symbol bounds every image on both sides and occurs alone once."""
    first = {w.letters[0] for w in s.images}
    last = {w.letters[-1] for w in s.images}
    if len(first) != 1 or first != last:
        return False
    a = next(iter(first))
    return any(len(w) == 1 and w.letters[0] == a for w in s.images)


def is_primitive(s: Substitution) -> bool:
    """Every image contains every target symbol."""
    full = set(range(len(s.target)))
    return all(set(w.letters) == full for w in s.images)


# -- sequences of substitutions ---------------------------------------------

@dataclass(frozen=True)
class SequenceSpec:
    """An inverse sequence of substitutions, finite or eventually periodic.

    Level i (1-based) maps the level-(i+1) alphabet into words over the
    level-i alphabet, so consecutive levels chain by
    ``levels[i].source == levels[i+1].target``.  An empty cycle means the
    prefix is the whole (finite) object; a non-empty cycle repeats forever
    after the prefix.
    """

    prefix: tuple[Substitution, ...]
    cycle: tuple[Substitution, ...] = ()

    def __post_init__(self):
        if not self.prefix and not self.cycle:
            raise ValueError("empty sequence")
        chain = list(self.prefix) + list(self.cycle)
        for a, b in zip(chain, chain[1:]):
            if a.source != b.target:
                raise AlphabetMismatch("adjacent levels do not chain")
        if self.cycle:
            if self.cycle[-1].source != self.cycle[0].target:
                raise AlphabetMismatch("cycle does not chain end-to-start")

    @property
    def eventually_periodic(self) -> bool:
        return bool(self.cycle)

    @property
    def finite_length(self) -> Optional[int]:
        return None if self.cycle else len(self.prefix)

    def level(self, n: int) -> Substitution:
        """1-based level access; periodic levels repeat forever."""
        if n < 1:
            raise IndexError("levels are 1-based")
        p = len(self.prefix)
        if n <= p:
            return self.prefix[n - 1]
        if not self.cycle:
            raise IndexError(f"finite sequence has only {p} levels")
        return self.cycle[(n - p - 1) % len(self.cycle)]

    def levels_to_examine(self) -> int:
        """Prefix plus one full period decides periodic sequences exactly."""
        if self.cycle:
            return len(self.prefix) + len(self.cycle)
        return len(self.prefix)


def constant_sequence(s: Substitution) -> SequenceSpec:
    if not s.is_endomorphic():
        raise AlphabetMismatch("a constant sequence needs source == target")
    return SequenceSpec(prefix=(), cycle=(s,))


class ProperVerdict(enum.Enum):
    PROPER = "Proper"
    DEGENERATE_STABILIZED = "DegenerateStabilized"
    INCONCLUSIVE = "Inconclusive"


class PrimitiveVerdict(enum.Enum):
    PRIMITIVE = "Primitive"
    NOT_PRIMITIVE = "NotPrimitive"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class _CompositionState:
    """Shape of a composed substitution, without the exploding words.

    Tracks per source symbol: the first and last letter of its image, whether
    the image is a single letter, and the set of letters occurring in it.
    That is exactly what the proper, degenerate and primitive predicates need,
    and it composes without ever concatenating the images themselves.
    """

    first: tuple[int, ...]
    last: tuple[int, ...]
    single: tuple[bool, ...]
    occ: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, s: Substitution) -> "_CompositionState":
        return cls(
            first=tuple(w.letters[0] for w in s.images),
            last=tuple(w.letters[-1] for w in s.images),
            single=tuple(len(w) == 1 for w in s.images),
            occ=tuple(frozenset(w.letters) for w in s.images),
        )

    def extend(self, inner: Substitution) -> "_CompositionState":
        """State of compose(T, inner) given the state of T."""
        first, last, single, occ = [], [], [], []
        for w in inner.images:
            first.append(self.first[w.letters[0]])
            last.append(self.last[w.letters[-1]])
            single.append(len(w) == 1 and self.single[w.letters[0]])
            s: set[int] = set()
            for b in w.letters:
                s |= self.occ[b]
            occ.append(frozenset(s))
        return _CompositionState(tuple(first), tuple(last), tuple(single),
                                 tuple(occ))

    def proper(self) -> bool:
        return (len(set(self.first)) == 1 and len(set(self.last)) == 1
                and not any(self.single))

    def primitive(self, target_size: int) -> bool:
        full = frozenset(range(target_size))
        return all(o == full for o in self.occ)

    def has_single(self) -> bool:
        return any(self.single)


_STATE_CAP = 10_000


def _level_states(seq: SequenceSpec, n: int, window: int):
    """Yield the states of the compositions starting at level n.

    For an eventually periodic sequence the iteration stops exactly when a
    (state, phase) pair recurs, so the yielded set is the complete orbit; for
    a finite sequence it stops at the window or at exhaustion.
    """
    state = _CompositionState.of(seq.level(n))
    if seq.eventually_periodic:
        seen = set()
        j = 0
        while j < _STATE_CAP:
            phase = n + j + 1  # level of the next inner substitution
            p = len(seq.prefix)
            key = (state, (phase - p - 1) % len(seq.cycle) if phase > p
                   else phase)
            if key in seen:
                return
            seen.add(key)
            yield state
            state = state.extend(seq.level(phase))
            j += 1
        raise RuntimeError("state orbit did not close")  # pragma: no cover
    else:
        limit = seq.finite_length
        for j in range(window):
            yield state
            nxt = n + j + 1
            if nxt > limit:
                return
            state = state.extend(seq.level(nxt))


def sequence_is_proper(seq: SequenceSpec, window: int = 8) -> ProperVerdict:
    """Decide whether every level admits a proper composition.

    Periodic sequences are decided exactly: the composition shape at each
    level is eventually periodic, so the full orbit of shapes is enumerated.
    A level whose compositions all retain a single-letter image signals a
    circle covered once at every stage, hence a periodic orbit; that is
    reported as DegenerateStabilized.  Finite sequences confirm properness
    within the window or abstain.
    """
    if window < 1:
        raise WindowTooSmall("window must be at least 1")
    all_proper = True
    degenerate_level = None
    for n in range(1, seq.levels_to_examine() + 1):
        found_proper = False
        all_single = True
        for st in _level_states(seq, n, window):
            if st.proper():
                found_proper = True
                break
            if not st.has_single():
                all_single = False
        if not found_proper:
            all_proper = False
            if seq.eventually_periodic and all_single \
                    and degenerate_level is None:
                degenerate_level = n
    if all_proper:
        return ProperVerdict.PROPER
    if degenerate_level is not None:
        return ProperVerdict.DEGENERATE_STABILIZED
    return ProperVerdict.INCONCLUSIVE


def sequence_is_primitive(seq: SequenceSpec,
                          window: int = 8) -> PrimitiveVerdict:
    """Decide whether every level admits a primitive composition.

    NotPrimitive is reported only on exact (periodic) evidence of a reducible
    incidence structure: some symbol whose compositions never reach some
    target symbol at all.  Otherwise undecided data yields Inconclusive.
    """
    if window < 1:
        raise WindowTooSmall("window must be at least 1")
    all_primitive = True
    reducible = False
    for n in range(1, seq.levels_to_examine() + 1):
        target_size = len(seq.level(n).target)
        full = frozenset(range(target_size))
        found = False
        reach: dict[int, list[frozenset[int]]] = {}
        for j, st in enumerate(_level_states(seq, n, window)):
            if st.primitive(target_size):
                found = True
                break
            if seq.eventually_periodic:
                p = len(seq.prefix)
                lvl = n + j
                phase = (lvl - p - 1) % len(seq.cycle) if lvl > p else lvl
                reach.setdefault(phase, []).append(st.occ)
        if not found:
            all_primitive = False
            if seq.eventually_periodic:
                for occs in reach.values():
                    width = len(occs[0])
                    for x in range(width):
                        union = frozenset().union(*(o[x] for o in occs))
                        if union != full:
                            reducible = True
    if all_primitive:
        return PrimitiveVerdict.PRIMITIVE
    if reducible:
        return PrimitiveVerdict.NOT_PRIMITIVE
    return PrimitiveVerdict.INCONCLUSIVE
