"""File formats and command dispatch.

All formats are line oriented UTF-8; `#` starts a comment.  Substitutions
and homomorphisms share one shape: an `alphabet:` line (plus `target:` when
the two differ) followed by one `SYM -> SYM SYM ...` rule per symbol.  Group
words spell inverses with a trailing apostrophe; the identity renders as
``1``.  Matrices separate rows with `;`, label streams are
``prefix|cycle`` comma-separated lists.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import abelian, folding, rewrite, symbolic, trope
from .abelian import FamilyVerdict, IntMatrix, LabelStream
from .errors import (FlowtropeError, InputError, InvalidJunction, ParseError,
                     ValidationError)
from .freegroup import GroupHom, GroupWord
from .freegroup import reduce as freegroup_reduce
from .symbolic import Alphabet, Substitution, SymWord


# -- low-level text handling --------------------------------------------------

def _logical_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield lineno, body


def _find_col(line_text: str, token: str) -> int:
    pos = line_text.find(token)
    return pos + 1 if pos >= 0 else 1


# -- substitutions and homomorphisms ------------------------------------------

def _parse_rule_file(text: str):
    """Common shape: alphabet line, optional target line, one rule per line."""
    lines = list(_logical_lines(text))
    if not lines:
        raise ParseError(1, 1, "an alphabet: line")
    lineno, first = lines[0]
    if not first.strip().startswith("alphabet:"):
        raise ParseError(lineno, _find_col(first, first.strip()[:1] or " "),
                         "an alphabet: line")
    source = first.strip()[len("alphabet:"):].split()
    if not source:
        raise ParseError(lineno, len(first) + 1, "at least one symbol")
    rest = lines[1:]
    target = source
    if rest and rest[0][1].strip().startswith("target:"):
        target = rest[0][1].strip()[len("target:"):].split()
        if not target:
            raise ParseError(rest[0][0], len(rest[0][1]) + 1,
                             "at least one symbol")
        rest = rest[1:]
    rules: dict[str, tuple[int, list[str]]] = {}
    for lineno, line in rest:
        if "->" not in line:
            raise ParseError(lineno, 1, "a SYM -> ... rule")
        lhs, rhs = line.split("->", 1)
        lhs_tokens = lhs.split()
        if len(lhs_tokens) != 1:
            raise ParseError(lineno, 1, "exactly one symbol before ->")
        key = lhs_tokens[0]
        if key in rules:
            raise ParseError(lineno, _find_col(line, key),
                             f"no duplicate rule for {key!r}")
        rules[key] = (lineno, rhs.split())
    try:
        src_alpha = Alphabet(tuple(source))
        tgt_alpha = Alphabet(tuple(target)) if target != source else src_alpha
    except ValueError as e:
        raise ValidationError(str(e)) from None
    for sym in src_alpha.symbols:
        if sym not in rules:
            raise ValidationError(f"missing rule for {sym!r}")
    for sym in rules:
        if sym not in src_alpha.symbols:
            raise ValidationError(f"rule for unknown symbol {sym!r}")
    return src_alpha, tgt_alpha, rules


def parse_substitution(text: str) -> Substitution:
    src, tgt, rules = _parse_rule_file(text)
    images = []
    for sym in src.symbols:
        lineno, tokens = rules[sym]
        letters = []
        for tok in tokens:
            if tok not in tgt.symbols:
                raise ValidationError(
                    f"line {lineno}: unknown symbol {tok!r} in image of "
                    f"{sym!r}")
            letters.append(tgt.index(tok))
        if not letters:
            raise ValidationError(f"line {lineno}: empty image for {sym!r}")
        images.append(SymWord(tgt, tuple(letters)))
    try:
        return Substitution(src, tgt, tuple(images))
    except (ValueError, FlowtropeError) as e:
        raise ValidationError(str(e)) from None


def render_substitution(s: Substitution) -> str:
    out = ["alphabet: " + " ".join(s.source.symbols)]
    if s.target != s.source:
        out.append("target: " + " ".join(s.target.symbols))
    for i, sym in enumerate(s.source.symbols):
        out.append(f"{sym} -> {s.images[i].text()}")
    return "\n".join(out) + "\n"


def parse_group_word(tokens: list[str] | str, alpha: Alphabet) -> GroupWord:
    if isinstance(tokens, str):
        tokens = tokens.split()
    letters = []
    for tok in tokens:
        if tok == "1":
            continue
        sign = 1
        name = tok
        if tok.endswith("'"):
            sign = -1
            name = tok[:-1]
        if name not in alpha.symbols:
            raise ValidationError(f"unknown generator {tok!r}")
        letters.append((alpha.index(name), sign))
    return freegroup_reduce(len(alpha), letters)


def render_group_word(w: GroupWord, alpha: Alphabet) -> str:
    if not w.letters:
        return "1"
    return " ".join(alpha.symbols[i] + ("" if s > 0 else "'")
                    for i, s in w.letters)


@dataclass(frozen=True)
class HomFile:
    """A homomorphism plus the generator names used to spell it."""

    hom: GroupHom
    domain: Alphabet
    codomain: Alphabet


def parse_hom(text: str) -> HomFile:
    src, tgt, rules = _parse_rule_file(text)
    images = []
    for sym in src.symbols:
        _, tokens = rules[sym]
        images.append(parse_group_word(tokens, tgt))
    return HomFile(GroupHom(len(src), len(tgt), tuple(images)), src, tgt)


def render_hom(hf: HomFile) -> str:
    out = ["alphabet: " + " ".join(hf.domain.symbols)]
    if hf.codomain != hf.domain:
        out.append("target: " + " ".join(hf.codomain.symbols))
    for i, sym in enumerate(hf.domain.symbols):
        out.append(f"{sym} -> "
                   f"{render_group_word(hf.hom.images[i], hf.codomain)}")
    return "\n".join(out) + "\n"


# -- matrices, chains, streams --------------------------------------------------

def parse_matrix(text: str) -> IntMatrix:
    rows = []
    for part in text.split(";"):
        entries = part.split()
        if not entries:
            raise ValidationError("empty matrix row")
        try:
            rows.append(tuple(int(x) for x in entries))
        except ValueError:
            raise ValidationError(f"bad matrix entry in {part!r}") from None
    if len({len(r) for r in rows}) != 1:
        raise ValidationError("ragged matrix rows")
    return IntMatrix(tuple(rows))


def render_matrix(m: IntMatrix) -> str:
    return "; ".join(" ".join(str(x) for x in row) for row in m.entries)


def parse_label_stream(text: str,
                       universe: frozenset[str] | None = None) -> LabelStream:
    def labels(part: str) -> tuple[str, ...]:
        part = part.strip()
        if not part:
            return ()
        return tuple(x.strip() for x in part.split(","))

    if "|" in text:
        pre, _, cyc = text.partition("|")
        prefix, cycle = labels(pre), labels(cyc)
        if not cycle:
            raise ValidationError("periodic stream needs a non-empty cycle")
    else:
        prefix, cycle = labels(text), ()
    if any(not lab for lab in prefix + cycle):
        raise ValidationError("empty label")
    try:
        return LabelStream(prefix, cycle, universe)
    except (ValueError, FlowtropeError) as e:
        raise ValidationError(str(e)) from None


def render_label_stream(s: LabelStream) -> str:
    if s.eventually_periodic:
        return ",".join(s.prefix) + "|" + ",".join(s.cycle)
    return ",".join(s.prefix)


# -- conjugate zigzag files -----------------------------------------------------

@dataclass(frozen=True)
class CzzFile:
    witness: trope.CzzWitness
    # alphabets for rendering: one per level of each row
    top_alphabets: tuple[Alphabet, ...]
    bottom_alphabets: tuple[Alphabet, ...]


def parse_czz(text: str) -> CzzFile:
    lines = list(_logical_lines(text))
    levels = None
    sections: dict[tuple[str, int], list[str]] = {}
    conj: dict[tuple[str, int], tuple[int, str]] = {}
    current: list[str] | None = None
    for lineno, line in lines:
        stripped = line.strip()
        if stripped.startswith("levels:"):
            try:
                levels = int(stripped[len("levels:"):].strip())
            except ValueError:
                raise ParseError(lineno, 1, "an integer level count") from None
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            parts = stripped[1:-1].split()
            if len(parts) != 2 or parts[0] not in ("down", "up", "top",
                                                   "bottom"):
                raise ParseError(lineno, 1,
                                 "[down|up|top|bottom INDEX] header")
            try:
                idx = int(parts[1])
            except ValueError:
                raise ParseError(lineno, 1, "an integer section index") \
                    from None
            current = sections.setdefault((parts[0], idx), [])
            continue
        if stripped.startswith("conj-up") or stripped.startswith("conj-down"):
            head, sep, word = stripped.partition(":")
            parts = head.split()
            if not sep or len(parts) != 2:
                raise ParseError(lineno, 1, "conj-up N: WORD")
            try:
                idx = int(parts[1])
            except ValueError:
                raise ParseError(lineno, 1, "an integer conjugator index") \
                    from None
            conj[(parts[0].removeprefix("conj-"), idx)] = (lineno,
                                                           word.strip())
            continue
        if current is None:
            raise ParseError(lineno, 1, "a section header")
        current.append(line)
    if levels is None or levels < 2:
        raise ValidationError("levels: must be declared and at least 2")

    def hom_at(kind: str, idx: int) -> HomFile:
        key = (kind, idx)
        if key not in sections:
            raise ValidationError(f"missing section [{kind} {idx}]")
        return parse_hom("\n".join(sections[key]))

    downs = [hom_at("down", i) for i in range(1, levels + 1)]
    top = [hom_at("top", i) for i in range(1, levels)]
    bottom = [hom_at("bottom", i) for i in range(1, levels)]
    ups = [hom_at("up", i) for i in range(1, levels)]

    for i in range(levels - 1):
        pairs = [
            (top[i].codomain, downs[i].domain, f"top {i + 1} target"),
            (top[i].domain, downs[i + 1].domain, f"top {i + 1} alphabet"),
            (bottom[i].codomain, downs[i].codomain, f"bottom {i + 1} target"),
            (bottom[i].domain, downs[i + 1].codomain,
             f"bottom {i + 1} alphabet"),
            (ups[i].domain, downs[i + 1].codomain, f"up {i + 1} alphabet"),
            (ups[i].codomain, downs[i].domain, f"up {i + 1} target"),
        ]
        for got, want, what in pairs:
            if got != want:
                raise ValidationError(f"{what} does not match the ladder")

    up_conj = []
    down_conj = []
    for i in range(1, levels):
        if ("up", i) not in conj:
            raise ValidationError(f"missing conj-up {i}:")
        if ("down", i) not in conj:
            raise ValidationError(f"missing conj-down {i}:")
        up_conj.append(parse_group_word(conj[("up", i)][1],
                                        downs[i - 1].domain))
        down_conj.append(parse_group_word(conj[("down", i)][1],
                                          downs[i - 1].codomain))

    witness = trope.CzzWitness(
        top=tuple(h.hom for h in top),
        bottom=tuple(h.hom for h in bottom),
        downs=tuple(h.hom for h in downs),
        ups=tuple(h.hom for h in ups),
        down_conjugators=tuple(down_conj),
        up_conjugators=tuple(up_conj),
    )
    return CzzFile(witness,
                   tuple(d.domain for d in downs),
                   tuple(d.codomain for d in downs))


def render_czz(f: CzzFile) -> str:
    w = f.witness
    out = [f"levels: {w.levels}"]

    def emit(kind: str, idx: int, hom: GroupHom,
             dom: Alphabet, cod: Alphabet):
        out.append(f"[{kind} {idx}]")
        out.append(render_hom(HomFile(hom, dom, cod)).rstrip("\n"))

    for i in range(w.levels):
        emit("down", i + 1, w.downs[i], f.top_alphabets[i],
             f.bottom_alphabets[i])
    for i in range(w.levels - 1):
        emit("top", i + 1, w.top[i], f.top_alphabets[i + 1],
             f.top_alphabets[i])
    for i in range(w.levels - 1):
        emit("bottom", i + 1, w.bottom[i], f.bottom_alphabets[i + 1],
             f.bottom_alphabets[i])
    for i in range(w.levels - 1):
        emit("up", i + 1, w.ups[i], f.bottom_alphabets[i + 1],
             f.top_alphabets[i])
    for i in range(w.levels - 1):
        out.append(f"conj-up {i + 1}: "
                   f"{render_group_word(w.up_conjugators[i], f.top_alphabets[i])}")
    for i in range(w.levels - 1):
        out.append(f"conj-down {i + 1}: "
                   f"{render_group_word(w.down_conjugators[i], f.bottom_alphabets[i])}")
    return "\n".join(out) + "\n"


# -- commands -------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e}") from None


def _cmd_sub_check(args) -> int:
    s = parse_substitution(_read(args.file))
    flags = [
        ("proper", symbolic.is_proper(s)),
        ("degenerate-proper", symbolic.is_degenerate_proper(s)),
        ("primitive", symbolic.is_primitive(s)),
        ("surjective", True),  # construction guarantees it
    ]
    for name, value in flags:
        print(f"{name}: {'yes' if value else 'no'}")
    return 0


def _cmd_sub_compose(args) -> int:
    outer = parse_substitution(_read(args.outer))
    inner = parse_substitution(_read(args.inner))
    sys.stdout.write(render_substitution(symbolic.compose(outer, inner)))
    return 0


def _cmd_sub_language(args) -> int:
    s = parse_substitution(_read(args.file))
    table = rewrite.language(s, args.length)
    for w in table.words(args.length):
        print(w.text())
    return 0


def _cmd_sub_rewrite(args) -> int:
    s = parse_substitution(_read(args.file))
    names = [t.strip() for t in args.junction.split(",")]
    if len(names) != 2:
        raise ValidationError("--junction wants LEFT,RIGHT")
    left, right = (s.source.index(n) for n in names)
    cands = [j for j in rewrite.junction_candidates(s)
             if (j.left, j.right) == (left, right)]
    if not cands:
        raise InvalidJunction(
            f"no valid junction ({names[0]},{names[1]}) within the "
            "iteration bound")
    result = rewrite.rewrite_proper(s, cands[0], args.horizon)
    print(f"junction: {names[0]},{names[1]} k={cands[0].exponent}")
    print("tiles:")
    tile_alpha = result.substitution.source
    for i, tile in enumerate(result.tiles):
        print(f"{tile_alpha.symbols[i]} = {tile.text()}")
    sys.stdout.write(render_substitution(result.substitution))
    return 0


def _cmd_hom_invertible(args) -> int:
    hf = parse_hom(_read(args.file))
    h = hf.hom
    if h.domain_rank != h.codomain_rank:
        raise ValidationError("invertibility needs equal ranks")
    folded = folding.fold(folding.bouquet(list(h.images), h.codomain_rank))
    verdict = folding.is_rose(folded)
    print("invertible" if verdict else "not-invertible")
    print(f"folded: V={folded.vertex_count} E={folded.edge_count} "
          f"rank={folding.subgroup_rank(folded)}")
    return 0 if verdict else 1


def _cmd_hom_abelianize(args) -> int:
    hf = parse_hom(_read(args.file))
    print(render_matrix(abelian.abelianize_hom(hf.hom)))
    return 0


def _cmd_hom_factorize(args) -> int:
    chain = abelian.factorize_gl2(parse_matrix(args.matrix))
    print(chain.render())
    return 0


def _cmd_trope_relate(args) -> int:
    f = parse_hom(_read(args.file_f))
    g = parse_hom(_read(args.file_g))
    if f.domain != g.domain or f.codomain != g.codomain:
        raise ValidationError("the two maps must share their alphabets")
    witness = trope.solve_conjugator(f.hom, g.hom)
    if witness is None:
        print("not-related")
        return 1
    print(f"witness: {render_group_word(witness, f.codomain)}")
    return 0


def _cmd_trope_czz(args) -> int:
    czz = parse_czz(_read(args.file))
    report = trope.verify_czz(czz.witness)
    if report.ok:
        print("ok")
        return 0
    kind, level, why = report.first_failure
    print(f"fail: {kind} triangle {level}: {why}")
    return 1


def _cmd_classify(args) -> int:
    dictionary: dict[str, Substitution] = {}
    for entry in args.dict:
        if "=" in entry:
            label, _, path = entry.partition("=")
        else:
            label = entry.rsplit("/", 1)[-1].rsplit(".", 1)[0]
            path = entry
        dictionary[label.strip()] = parse_substitution(_read(path.strip()))
    universe = frozenset(dictionary)
    a = parse_label_stream(args.spec_a, universe)
    b = parse_label_stream(args.spec_b, universe)
    result = abelian.classify_family(a, b, dictionary, depth=args.depth)
    tag = {FamilyVerdict.FLOW_EQUIVALENT: "flow-equivalent",
           FamilyVerdict.DISTINCT: "distinct",
           FamilyVerdict.UNKNOWN: "unknown"}[result.verdict]
    print(f"{tag}: {result.reason}")
    return {FamilyVerdict.FLOW_EQUIVALENT: 0,
            FamilyVerdict.DISTINCT: 1,
            FamilyVerdict.UNKNOWN: 3}[result.verdict]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowtrope",
        description="Flow-equivalence invariants of substitution systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sub = sub.add_parser("sub", help="substitution operations")
    sub_sub = p_sub.add_subparsers(dest="subcommand", required=True)
    p = sub_sub.add_parser("check", help="report structural flags")
    p.add_argument("file")
    p.set_defaults(func=_cmd_sub_check)
    p = sub_sub.add_parser("compose", help="compose two substitutions")
    p.add_argument("outer")
    p.add_argument("inner")
    p.set_defaults(func=_cmd_sub_compose)
    p = sub_sub.add_parser("language", help="enumerate subshift factors")
    p.add_argument("file")
    p.add_argument("--length", type=int, required=True)
    p.set_defaults(func=_cmd_sub_language)
    p = sub_sub.add_parser("rewrite", help="return-word proper rewriting")
    p.add_argument("file")
    p.add_argument("--junction", required=True, metavar="LEFT,RIGHT")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=_cmd_sub_rewrite)

    p_hom = sub.add_parser("hom", help="free-group homomorphism operations")
    sub_hom = p_hom.add_subparsers(dest="subcommand", required=True)
    p = sub_hom.add_parser("invertible", help="Stallings invertibility test")
    p.add_argument("file")
    p.set_defaults(func=_cmd_hom_invertible)
    p = sub_hom.add_parser("abelianize", help="letter-count matrix")
    p.add_argument("file")
    p.set_defaults(func=_cmd_hom_abelianize)
    p = sub_hom.add_parser("factorize", help="unique L/R factorization")
    p.add_argument("matrix", metavar='"R1; R2"')
    p.set_defaults(func=_cmd_hom_factorize)

    p_trope = sub.add_parser("trope", help="conjugacy-witness operations")
    sub_trope = p_trope.add_subparsers(dest="subcommand", required=True)
    p = sub_trope.add_parser("relate", help="find a conjugating element")
    p.add_argument("file_f")
    p.add_argument("file_g")
    p.set_defaults(func=_cmd_trope_relate)
    p = sub_trope.add_parser("czz", help="verify a conjugate zigzag ladder")
    p.add_argument("file")
    p.set_defaults(func=_cmd_trope_czz)

    p = sub.add_parser("classify", help="compare two expansion streams")
    p.add_argument("spec_a")
    p.add_argument("spec_b")
    p.add_argument("--dict", nargs="+", required=True,
                   metavar="LABEL=FILE")
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(func=_cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
