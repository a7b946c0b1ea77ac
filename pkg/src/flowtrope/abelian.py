"""Letter-count matrices, their unique L/R factorization, and the
tail-equivalence classification of substitution families.

The column convention is fixed by functoriality: the matrix of a composition
is the product of the matrices, outer times inner.  For the standard example
a -> aabaabab, b -> aabab the matrix is [[5, 3], [3, 2]].
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from math import lcm
from typing import Optional

from .errors import (BadDimension, DimensionMismatch, LabelSetMismatch,
                     NegativeEntry, NotEventuallyPeriodic, NotUnimodular)
from .folding import is_invertible
from .freegroup import GroupHom, hom_from_substitution
from .symbolic import Substitution, alphabet, substitution


@dataclass(frozen=True)
class IntMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.entries:
            raise BadDimension("empty matrix")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise BadDimension("ragged rows")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def is_square(self) -> bool:
        return self.rows == self.cols

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch("inner dimensions differ")
        return IntMatrix(tuple(
            tuple(sum(self.entries[i][k] * other.entries[k][j]
                      for k in range(self.cols))
                  for j in range(other.cols))
            for i in range(self.rows)))

    def det(self) -> int:
        """Exact determinant by fraction-free Gaussian elimination."""
        if not self.is_square():
            raise BadDimension("determinant needs a square matrix")
        n = self.rows
        m = [list(row) for row in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]


def matrix(rows) -> IntMatrix:
    return IntMatrix(tuple(tuple(int(x) for x in row) for row in rows))


def identity_matrix(n: int) -> IntMatrix:
    return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n))
                           for i in range(n)))


_R = matrix([[1, 1], [0, 1]])
_L = matrix([[1, 0], [1, 1]])
_S = matrix([[0, 1], [1, 0]])
_TAG = {"R": _R, "L": _L}


def abelianize(s: Substitution) -> IntMatrix:
    """Entry (i, j) counts target symbol i in the image of source symbol j."""
    return IntMatrix(tuple(
        tuple(s.images[j].letters.count(i) for j in range(len(s.source)))
        for i in range(len(s.target))))


def abelianize_hom(h: GroupHom) -> IntMatrix:
    """Signed letter counts; agrees with abelianize on positive maps."""
    return IntMatrix(tuple(
        tuple(sum(sgn for idx, sgn in h.images[j].letters if idx == i)
              for j in range(h.domain_rank))
        for i in range(h.codomain_rank)))


@dataclass(frozen=True)
class FactorChain:
    """Head tag I or S followed by L/R tags, multiplied left to right."""

    head: str
    tail: tuple[str, ...]

    def __post_init__(self):
        if self.head not in ("I", "S"):
            raise ValueError(f"bad head tag {self.head!r}")
        for t in self.tail:
            if t not in ("L", "R"):
                raise ValueError(f"bad tail tag {t!r}")

    def matrix(self) -> IntMatrix:
        m = _S if self.head == "S" else identity_matrix(2)
        for t in self.tail:
            m = m.mul(_TAG[t])
        return m

    def render(self) -> str:
        return f"{self.head};{''.join(self.tail)}"

    @classmethod
    def parse(cls, text: str) -> "FactorChain":
        head, _, tail = text.partition(";")
        return cls(head.strip(), tuple(tail.strip()))


def factorize_gl2(m: IntMatrix) -> FactorChain:
    """The unique I/S then L/R factorization of a nonnegative unimodular
    2x2 matrix.

    A determinant of -1 forces the swap head.  After that, exactly one row
    dominates the other componentwise (rows of a unimodular matrix cannot
    tie), so peeling R when the top row dominates and L when the bottom row
    dominates is deterministic and strictly shrinks the entry sum.
    """
    if m.rows != 2 or m.cols != 2:
        raise BadDimension("factorization is for 2x2 matrices")
    if any(x < 0 for row in m.entries for x in row):
        raise NegativeEntry("matrix has a negative entry")
    d = m.det()
    if d not in (1, -1):
        raise NotUnimodular(f"determinant is {d}, need +1 or -1")
    head = "I"
    if d == -1:
        head = "S"
        m = _S.mul(m)
    (a, b), (c, e) = m.entries
    tail = []
    while (a, b, c, e) != (1, 0, 0, 1):
        if a >= c and b >= e:
            tail.append("R")
            a, b = a - c, b - e
        else:
            # rows of a unimodular nonnegative matrix never tie, so the
            # bottom row dominates here
            assert c >= a and e >= b
            tail.append("L")
            c, e = c - a, e - b
    return FactorChain(head, tuple(tail))


# -- label streams and tail equivalence ---------------------------------------

@dataclass(frozen=True)
class LabelStream:
    """A finite or eventually periodic stream of labels.

    The optional universe pins down the label set the stream is considered
    over; two streams with explicitly different universes do not compare.
    """

    prefix: tuple[str, ...]
    cycle: tuple[str, ...] = ()
    universe: Optional[frozenset[str]] = None

    def __post_init__(self):
        used = set(self.prefix) | set(self.cycle)
        if not used:
            raise ValueError("empty stream")
        if self.universe is not None and not used <= self.universe:
            raise LabelSetMismatch("stream uses labels outside its universe")

    @property
    def eventually_periodic(self) -> bool:
        return bool(self.cycle)

    def labels_used(self) -> frozenset[str]:
        return frozenset(self.prefix) | frozenset(self.cycle)

    def term(self, i: int) -> str:
        """0-based term access; periodic streams continue forever."""
        if i < len(self.prefix):
            return self.prefix[i]
        if not self.cycle:
            raise IndexError("finite stream exhausted")
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def suffix_terms(self, offset: int, count: int) -> tuple[str, ...]:
        return tuple(self.term(offset + i) for i in range(count))

    def eventually_constant_label(self) -> Optional[str]:
        if self.cycle and len(set(self.cycle)) == 1:
            return self.cycle[0]
        return None


class TailVerdict(enum.Enum):
    EQUIVALENT = "Equivalent"
    DISTINCT = "Distinct"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class TailResult:
    verdict: TailVerdict
    offsets: Optional[tuple[int, int]] = None


def _check_universes(a: LabelStream, b: LabelStream):
    if a.universe is not None and b.universe is not None \
            and a.universe != b.universe:
        raise LabelSetMismatch("streams are over different label sets")


def tail_equivalent(a: LabelStream, b: LabelStream) -> TailResult:
    """Whether the two streams become identical after truncations.

    For two eventually periodic streams the decision is exact: it suffices to
    try offsets up to the prefix length plus the least common multiple of the
    cycle lengths, and to compare termwise over one preperiod plus one common
    period.  Finite streams yield Equivalent only with an exhibited pair of
    offsets, otherwise Inconclusive.
    """
    _check_universes(a, b)
    if a.eventually_periodic and b.eventually_periodic:
        period = lcm(len(a.cycle), len(b.cycle))
        max_a = len(a.prefix) + period
        max_b = len(b.prefix) + period
        for total in range(max_a + max_b + 1):
            for i in range(min(total, max_a) + 1):
                j = total - i
                if j > max_b:
                    continue
                pre = max(len(a.prefix) - i, len(b.prefix) - j, 0)
                count = pre + period
                if a.suffix_terms(i, count) == b.suffix_terms(j, count):
                    return TailResult(TailVerdict.EQUIVALENT, (i, j))
        return TailResult(TailVerdict.DISTINCT)
    if not a.eventually_periodic and not b.eventually_periodic:
        la, lb = len(a.prefix), len(b.prefix)
        for i in range(la + 1):
            j = lb - (la - i)
            if j < 0:
                continue
            if a.prefix[i:] == b.prefix[j:]:
                return TailResult(TailVerdict.EQUIVALENT, (i, j))
        return TailResult(TailVerdict.INCONCLUSIVE)
    return TailResult(TailVerdict.INCONCLUSIVE)


# -- free semigroup check ------------------------------------------------------

class FreeVerdict(enum.Enum):
    NO_COLLISION_UP_TO_DEPTH = "NoCollisionUpToDepth"
    COLLISION = "Collision"


@dataclass(frozen=True)
class FreeCheckResult:
    verdict: FreeVerdict
    word1: Optional[str] = None
    word2: Optional[str] = None


_WORD_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def semigroup_free_check(mats: list[IntMatrix], depth: int) -> FreeCheckResult:
    """Exhaustively multiply out all words of length <= depth.

    Words are enumerated by length then lexicographically, spelled with one
    letter per generator, and the first pair of distinct words with equal
    products is reported.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].rows
    for m in mats:
        if not m.is_square() or m.rows != n:
            raise DimensionMismatch("matrices must be square and equal size")
    if len(mats) > len(_WORD_LETTERS):
        raise ValueError("too many generators to name")
    seen: dict[IntMatrix, str] = {}
    for length in range(1, depth + 1):
        for combo in itertools.product(range(len(mats)), repeat=length):
            word = "".join(_WORD_LETTERS[i] for i in combo)
            prod = mats[combo[0]]
            for i in combo[1:]:
                prod = prod.mul(mats[i])
            if prod in seen:
                return FreeCheckResult(FreeVerdict.COLLISION,
                                       seen[prod], word)
            seen[prod] = word
    return FreeCheckResult(FreeVerdict.NO_COLLISION_UP_TO_DEPTH)


# -- family classification -----------------------------------------------------

class FamilyVerdict(enum.Enum):
    FLOW_EQUIVALENT = "FlowEquivalent"
    DISTINCT = "Distinct"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Classification:
    verdict: FamilyVerdict
    reason: str
    offsets: Optional[tuple[int, int]] = None


def _same_up_to_relabeling(s1: Substitution, s2: Substitution) -> bool:
    """Endomorphic substitutions equal after one alphabet permutation."""
    n = len(s1.source)
    if not (s1.is_endomorphic() and s2.is_endomorphic()
            and len(s2.source) == n):
        return False
    shape1 = [w.letters for w in s1.images]
    for perm in itertools.permutations(range(n)):
        ok = True
        for j in range(n):
            image = tuple(perm[x] for x in shape1[j])
            if image != s2.images[perm[j]].letters:
                ok = False
                break
        if ok:
            return True
    return False


# the one cross-family identification: both constant streams present the
# same flow space (the golden-mean tiling flow), despite inequivalent tails
_FIB_PAIR = (
    ("a a b a a b a b", "a a b a b"),   # square of a -> aab, b -> ab
    ("b a", "b b a"),
)


def _fibonacci_pair(s1: Substitution, s2: Substitution) -> bool:
    ab = alphabet("a", "b")
    pair = [substitution(ab, ab, list(texts)) for texts in _FIB_PAIR]
    for x, y in ((s1, s2), (s2, s1)):
        if _same_up_to_relabeling(x, pair[0]) \
                and _same_up_to_relabeling(y, pair[1]):
            return True
    return False


def classify_family(a: LabelStream, b: LabelStream,
                    dictionary: dict[str, Substitution],
                    depth: int = 6) -> Classification:
    """Compare two eventually periodic expansion streams over one dictionary.

    Decision ladder, in order:
      1. invertibility obstruction: a stream of invertible maps is never
         equivalent to one with cofinally many non-invertible maps;
      2. two eventually constant streams: identical tails match, and the
         known constant-pair identification is applied; other constant pairs
         are not classified here;
      3. with abelianized generators free to the tested depth, verdicts
         follow tail equivalence exactly; a collision blocks the method.
    """
    if not (a.eventually_periodic and b.eventually_periodic):
        raise NotEventuallyPeriodic("classification needs periodic streams")
    _check_universes(a, b)
    used = sorted(a.labels_used() | b.labels_used())
    for lab in used:
        if lab not in dictionary:
            raise LabelSetMismatch(f"label {lab!r} missing from dictionary")
    subs = {lab: dictionary[lab] for lab in used}
    common = {(s.source, s.target) for s in subs.values()}
    if len(common) != 1 or not next(iter(common))[0] == next(iter(common))[1]:
        raise LabelSetMismatch("labels must share one endomorphic alphabet")

    invertible = {lab: is_invertible(hom_from_substitution(s))
                  for lab, s in subs.items()}
    for x, y in ((a, b), (b, a)):
        x_all = all(invertible[lab] for lab in x.labels_used())
        y_cofinal = any(not invertible[lab] for lab in set(y.cycle))
        if x_all and y_cofinal:
            return Classification(
                FamilyVerdict.DISTINCT,
                "invertibility obstruction: one stream is entirely "
                "invertible, the other has cofinally many non-invertible "
                "maps")

    ca, cb = a.eventually_constant_label(), b.eventually_constant_label()
    if ca is not None and cb is not None:
        sa, sb = subs[ca], subs[cb]
        if _same_up_to_relabeling(sa, sb):
            return Classification(FamilyVerdict.FLOW_EQUIVALENT,
                                  "identical constant tails")
        if _fibonacci_pair(sa, sb):
            return Classification(
                FamilyVerdict.FLOW_EQUIVALENT,
                "known identification of the two constant golden-mean "
                "presentations")
        return Classification(
            FamilyVerdict.UNKNOWN,
            "distinct constant tails outside the classified families")

    check = semigroup_free_check([abelianize(subs[lab]) for lab in used],
                                 depth)
    if check.verdict is FreeVerdict.COLLISION:
        return Classification(
            FamilyVerdict.UNKNOWN,
            f"abelianizations collide ({check.word1} = {check.word2}); "
            "tail comparison is not conclusive for this dictionary")

    tails = tail_equivalent(a, b)
    if tails.verdict is TailVerdict.EQUIVALENT:
        return Classification(FamilyVerdict.FLOW_EQUIVALENT,
                              f"tails match at offsets {tails.offsets}",
                              tails.offsets)
    return Classification(FamilyVerdict.DISTINCT,
                          "tails differ; the factorization invariant "
                          "separates the streams")
