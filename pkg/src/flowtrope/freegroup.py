"""Reduced words and homomorphisms of finitely generated free groups.

Letters are (generator index, sign) pairs with sign in {+1, -1}.  Words are
kept freely reduced at all times; homomorphisms are given by generator
images and may be non-positive (positivity is a predicate, not a structural
constraint, so inverses of positive maps are representable).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import BadIndex, RankMismatch
from .symbolic import Substitution

Letter = tuple[int, int]


def _reduce_letters(letters) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for idx, sign in letters:
        if out and out[-1][0] == idx and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((idx, sign))
    return tuple(out)


@dataclass(frozen=True)
class GroupWord:
    """A freely reduced word in the rank many chosen generators."""

    rank: int
    letters: tuple[Letter, ...]

    def __post_init__(self):
        for idx, sign in self.letters:
            if not 0 <= idx < self.rank:
                raise BadIndex(f"generator index {idx} out of range "
                               f"for rank {self.rank}")
            if sign not in (1, -1):
                raise BadIndex(f"sign must be +1 or -1, got {sign}")
        for (i, s), (j, t) in zip(self.letters, self.letters[1:]):
            if i == j and s == -t:
                raise ValueError("word is not freely reduced")

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(self.rank,
                         tuple((i, -s) for i, s in reversed(self.letters)))

    def concat(self, other: "GroupWord") -> "GroupWord":
        if self.rank != other.rank:
            raise RankMismatch("cannot concatenate words of different ranks")
        return GroupWord(self.rank,
                         _reduce_letters(self.letters + other.letters))

    def lex_key(self):
        """Order key: generator index first, then positive before negative."""
        return tuple((i, 0 if s > 0 else 1) for i, s in self.letters)


def reduce(rank: int, letters) -> GroupWord:
    """Freely reduce a raw signed-letter sequence; idempotent."""
    for idx, sign in letters:
        if not 0 <= idx < rank:
            raise BadIndex(f"generator index {idx} out of range "
                           f"for rank {rank}")
    return GroupWord(rank, _reduce_letters(letters))


def identity_word(rank: int) -> GroupWord:
    return GroupWord(rank, ())


_NAMES = "abcdefghijklmnopqrstuvwxyz"


def word_from_str(rank: int, text: str) -> GroupWord:
    """Parse "a b' c" using positional names a, b, c, ...; "1" is identity."""
    letters: list[Letter] = []
    for tok in text.split():
        if tok == "1":
            continue
        sign = 1
        if tok.endswith("'"):
            sign = -1
            tok = tok[:-1]
        if tok not in _NAMES[:rank]:
            raise BadIndex(f"unknown generator {tok!r}")
        letters.append((_NAMES.index(tok), sign))
    return reduce(rank, letters)


def word_to_str(w: GroupWord) -> str:
    if not w.letters:
        return "1"
    return " ".join(_NAMES[i] + ("" if s > 0 else "'") for i, s in w.letters)


class SignClass(enum.Enum):
    IDENTITY = "Identity"
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    MIXED = "Mixed"


def classify_sign(w: GroupWord) -> SignClass:
    """The identity counts as both positive and negative; report it apart."""
    if not w.letters:
        return SignClass.IDENTITY
    signs = {s for _, s in w.letters}
    if signs == {1}:
        return SignClass.POSITIVE
    if signs == {-1}:
        return SignClass.NEGATIVE
    return SignClass.MIXED


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism between free groups, given on the chosen generators."""

    domain_rank: int
    codomain_rank: int
    images: tuple[GroupWord, ...]

    def __post_init__(self):
        if len(self.images) != self.domain_rank:
            raise ValueError("need exactly one image per domain generator")
        for w in self.images:
            if w.rank != self.codomain_rank:
                raise RankMismatch("image word has wrong rank")

    def image(self, i: int) -> GroupWord:
        return self.images[i]


def identity_hom(rank: int) -> GroupHom:
    return GroupHom(rank, rank,
                    tuple(GroupWord(rank, ((i, 1),)) for i in range(rank)))


def hom_from_images(domain_rank: int, codomain_rank: int,
                    texts) -> GroupHom:
    return GroupHom(domain_rank, codomain_rank,
                    tuple(word_from_str(codomain_rank, t) for t in texts))


def apply(h: GroupHom, w: GroupWord) -> GroupWord:
    """Substitute generator images, inverting for negative letters."""
    if w.rank != h.domain_rank:
        raise RankMismatch("word rank does not match the domain")
    out: list[Letter] = []
    for idx, sign in w.letters:
        img = h.images[idx].letters
        if sign > 0:
            out.extend(img)
        else:
            out.extend((i, -s) for i, s in reversed(img))
    return GroupWord(h.codomain_rank, _reduce_letters(out))


def compose_hom(outer: GroupHom, inner: GroupHom) -> GroupHom:
    if outer.domain_rank != inner.codomain_rank:
        raise RankMismatch("ranks do not chain")
    return GroupHom(inner.domain_rank, outer.codomain_rank,
                    tuple(apply(outer, w) for w in inner.images))


def conjugate_hom(h: GroupHom, a: GroupWord) -> GroupHom:
    """x maps to a^-1 h(x) a.  Composing: conjugating by a then by b equals
    conjugating by b*a (note the order)."""
    if a.rank != h.codomain_rank:
        raise RankMismatch("conjugator rank does not match the codomain")
    ainv = a.inverse()
    return GroupHom(h.domain_rank, h.codomain_rank,
                    tuple(ainv.concat(w).concat(a) for w in h.images))


def is_positive_hom(h: GroupHom) -> bool:
    """All generator images are non-empty positive words.

    Images equal to the identity are rejected: the maps used here send
    generators to genuinely positive loops.
    """
    return all(classify_sign(w) is SignClass.POSITIVE for w in h.images)


def hom_from_substitution(s: Substitution) -> GroupHom:
    """Read the image words as positive group words, one per generator."""
    n = len(s.target)
    return GroupHom(len(s.source), n,
                    tuple(GroupWord(n, tuple((i, 1) for i in w.letters))
                          for w in s.images))
