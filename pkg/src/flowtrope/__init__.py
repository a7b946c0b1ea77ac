"""Flow-equivalence invariants of one-dimensional symbolic systems."""

from .abelian import (Classification, FactorChain, FamilyVerdict,
                      FreeCheckResult, FreeVerdict, IntMatrix, LabelStream,
                      TailResult, TailVerdict, abelianize, abelianize_hom,
                      classify_family, factorize_gl2, identity_matrix,
                      matrix, semigroup_free_check, tail_equivalent)
from .folding import (LabeledGraph, bouquet, canonical_form, fold,
                      graphs_isomorphic, inverse_witness, is_invertible,
                      is_rose, rose, subgroup_rank)
from .freegroup import (GroupHom, GroupWord, SignClass, apply, classify_sign,
                        compose_hom, conjugate_hom, hom_from_images,
                        hom_from_substitution, identity_hom, identity_word,
                        is_positive_hom, reduce, word_from_str, word_to_str)
from .rewrite import (Junction, LanguageTable, ProperRewrite,
                      junction_candidates, language, rewrite_proper,
                      validate_junction)
from .symbolic import (Alphabet, PrimitiveVerdict, ProperVerdict,
                       SequenceSpec, Substitution, SymWord, alphabet,
                       compose, constant_sequence, identity_substitution,
                       is_degenerate_proper, is_primitive, is_proper,
                       sequence_is_primitive, sequence_is_proper,
                       substitution, word)
from .trope import (CzzReport, CzzWitness, PpsSpec, are_trope_related,
                    solve_conjugator, validate_pps, verify_czz)

__all__ = [name for name in dir() if not name.startswith("_")]
