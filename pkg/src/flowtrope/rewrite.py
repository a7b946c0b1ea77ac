"""Subshift language generation and the return-word rewriting that turns a
primitive substitution into a proper one.

Tiles are the words between consecutive occurrences of a two-letter junction
in the generated one-sided fixed point.  Applying the substitution preserves
junction boundaries, so each tile rewrites to a word in tiles; the rewritten
substitution is proper by construction and is verified before returning.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abelian import abelianize
from .errors import (HorizonTooSmall, InvalidJunction, NotAperiodic,
                     NotEndomorphic, NotPrimitive)
from .symbolic import (Alphabet, Substitution, SymWord, compose, is_primitive,
                       is_proper)


@dataclass(frozen=True)
class LanguageTable:
    """All factors of the subshift up to a length, grouped by length."""

    substitution: Substitution
    max_length: int
    factors: dict[int, tuple[tuple[int, ...], ...]]

    def words(self, length: int) -> tuple[SymWord, ...]:
        alpha = self.substitution.target
        return tuple(SymWord(alpha, w) for w in self.factors.get(length, ()))

    def contains(self, w: SymWord) -> bool:
        return w.letters in self.factors.get(len(w.letters), ())

    def all_words(self) -> list[SymWord]:
        out = []
        for k in sorted(self.factors):
            out.extend(self.words(k))
        return out


def _check_endomorphic_primitive(s: Substitution):
    if not s.is_endomorphic():
        raise NotEndomorphic("language generation needs source == target")
    if not is_primitive(s):
        raise NotPrimitive("substitution is not primitive")


def language(s: Substitution, length: int) -> LanguageTable:
    """The exact set of factors of length <= length of the subshift.

    Iterates the closure operator "add all short factors of the image of
    every known factor" to its fixed point, which is reached because the
    word set of bounded length is finite and images of language words stay
    in the language.
    """
    _check_endomorphic_primitive(s)
    if length < 1:
        raise ValueError("length must be at least 1")
    known: set[tuple[int, ...]] = {(i,) for i in range(len(s.source))}
    while True:
        fresh: set[tuple[int, ...]] = set()
        for w in known:
            img = []
            for letter in w:
                img.extend(s.images[letter].letters)
            for k in range(1, length + 1):
                for i in range(len(img) - k + 1):
                    cand = tuple(img[i:i + k])
                    if cand not in known:
                        fresh.add(cand)
        if not fresh:
            break
        known |= fresh
    table: dict[int, tuple[tuple[int, ...], ...]] = {}
    for k in range(1, length + 1):
        table[k] = tuple(sorted(w for w in known if len(w) == k))
    return LanguageTable(s, length, table)


@dataclass(frozen=True)
class Junction:
    """A boundary pair: iterating the map exp times fixes the last letter of
    the left symbol's image and the first letter of the right symbol's."""

    left: int
    right: int
    exponent: int


def _first_letter_map(s: Substitution) -> list[int]:
    return [w.letters[0] for w in s.images]


def _last_letter_map(s: Substitution) -> list[int]:
    return [w.letters[-1] for w in s.images]


def junction_candidates(s: Substitution, max_k: int = 8) -> list[Junction]:
    """All valid junctions with the smallest exponent per symbol pair."""
    _check_endomorphic_primitive(s)
    two = {w.letters for w in language(s, 2).words(2)}
    n = len(s.source)
    base_fl = _first_letter_map(s)
    base_ll = _last_letter_map(s)
    fl = list(range(n))
    ll = list(range(n))
    found: dict[tuple[int, int], int] = {}
    for k in range(1, max_k + 1):
        fl = [base_fl[x] for x in fl]
        ll = [base_ll[x] for x in ll]
        for a in range(n):
            for b in range(n):
                if (a, b) in two and (a, b) not in found \
                        and ll[a] == a and fl[b] == b:
                    found[(a, b)] = k
    return [Junction(a, b, k) for (a, b), k in sorted(found.items())]


def _junction_holds(s: Substitution, left: int, right: int, k: int) -> bool:
    fl = _first_letter_map(s)
    ll = _last_letter_map(s)
    x, y = left, right
    for _ in range(k):
        x, y = ll[x], fl[y]
    return x == left and y == right


def validate_junction(s: Substitution, j: Junction):
    _check_endomorphic_primitive(s)
    n = len(s.source)
    if not (0 <= j.left < n and 0 <= j.right < n) or j.exponent < 1:
        raise InvalidJunction("junction symbols or exponent out of range")
    if not _junction_holds(s, j.left, j.right, j.exponent):
        raise InvalidJunction(
            "iterate does not fix the junction boundary letters")
    if (j.left, j.right) not in {w.letters for w in language(s, 2).words(2)}:
        raise InvalidJunction("junction word does not occur in the subshift")


@dataclass(frozen=True)
class ProperRewrite:
    """Return-word tiles and the induced proper substitution on them."""

    tiles: tuple[SymWord, ...]       # spelled over the original alphabet
    substitution: Substitution       # on the tile alphabet
    junction: Junction

    def flatten(self, tile_index: int) -> SymWord:
        return self.tiles[tile_index]


def _tile_names(count: int) -> Alphabet:
    if count <= 26:
        names = tuple(chr(ord("A") + i) for i in range(count))
    else:
        names = tuple(f"T{i}" for i in range(count))
    return Alphabet(names)


def _power(s: Substitution, k: int) -> Substitution:
    out = s
    for _ in range(k - 1):
        out = compose(out, s)
    return out


def _cut_positions(seq: tuple[int, ...], left: int, right: int) -> list[int]:
    return [i for i in range(1, len(seq))
            if seq[i - 1] == left and seq[i] == right]


def _default_horizon(s: Substitution, k: int) -> int:
    m = abelianize(s)
    p = m
    for _ in range(2 * k - 1):
        p = p.mul(m)
    longest = max(sum(p.entries[i][j] for i in range(p.rows))
                  for j in range(p.cols))
    return len(s.source) ** 2 * longest


def rewrite_proper(s: Substitution, j: Junction,
                   horizon: int | None = None) -> ProperRewrite:
    """Rewrite a primitive aperiodic substitution over its return words.

    Scans a prefix of the one-sided fixed point grown from the junction's
    right symbol, cutting at every occurrence of the junction word; the
    distinct pieces, in order of first occurrence, are the tiles.  Each tile
    maps to the parse of its image under the exponent-fold substitution,
    which is boundary-preserving by the junction property.  When no horizon
    is given, a default is derived from the image growth rate and doubled on
    failure a few times.
    """
    validate_junction(s, j)
    if horizon is not None:
        return _rewrite_at_horizon(s, j, horizon)
    h = _default_horizon(s, j.exponent)
    for _ in range(5):
        try:
            return _rewrite_at_horizon(s, j, h)
        except HorizonTooSmall:
            h *= 2
    return _rewrite_at_horizon(s, j, h)


def _rewrite_at_horizon(s: Substitution, j: Junction,
                        horizon: int) -> ProperRewrite:
    if horizon < 2:
        raise HorizonTooSmall("horizon too short to contain a tile")
    power = _power(s, j.exponent)
    seed = SymWord(s.source, (j.right,))
    prefix = seed
    while len(prefix) < horizon:
        grown = power.apply(prefix)
        if len(grown) == len(prefix):
            break  # fixed word; periodic degenerate input
        prefix = grown
    letters = prefix.letters[:horizon]

    cuts = _cut_positions(letters, j.left, j.right)
    if not cuts:
        raise NotAperiodic("no junction recurrence in the scanned prefix; "
                           "single return word")
    bounds = [0] + cuts
    tiles: list[tuple[int, ...]] = []
    index: dict[tuple[int, ...], int] = {}
    for a, b in zip(bounds, bounds[1:]):
        piece = letters[a:b]
        if piece not in index:
            index[piece] = len(tiles)
            tiles.append(piece)
    if len(tiles) < 2:
        raise NotAperiodic("single return word; the subshift is periodic")

    images: list[tuple[int, ...]] = []
    for piece in tiles:
        img: list[int] = []
        for letter in piece:
            img.extend(power.images[letter].letters)
        inner = _cut_positions(tuple(img), j.left, j.right)
        pieces = [tuple(img[a:b])
                  for a, b in zip([0] + inner, inner + [len(img)])]
        parsed = []
        for p in pieces:
            if p not in index:
                raise HorizonTooSmall(
                    "tile set did not stabilize: image parsing met an "
                    "unknown tile", unknown_piece=p)
            parsed.append(index[p])
        images.append(tuple(parsed))

    alpha = _tile_names(len(tiles))
    rewritten = Substitution(
        alpha, alpha, tuple(SymWord(alpha, img) for img in images))
    if not is_proper(rewritten):
        raise InvalidJunction("rewrite did not produce a proper substitution")
    return ProperRewrite(
        tiles=tuple(SymWord(s.source, t) for t in tiles),
        substitution=rewritten,
        junction=j,
    )
