"""Dennis-Stein symbol presentation of D_1(R), K_2(R) = ker phi, proof replay,
Steinberg symbols and induced maps."""

from .relations import (BASE_KINDS, DERIVED_KINDS, PresentationNotAbelian, RelationError, RelationInstance,
                        RelationStream, StreamStats, instance, stream_relations)
from .structure import (D1Result, FreeOrOddTorsion, K2Result, PhiIllDefined, UnstableExponent, abelian_coordinates,
                        d1_structure, dense_d1_structure, k2_structure, phi, phi_check)
from .symbols import FormalSum, InvalidSymbol, SymbolIndex, SymbolTable, enumerate_symbols
from .proofs import (Justification, NoDerivation, ProofChain, ProofStep, ReplayResult, format_chain, load_chain_file,
                     parse_chains, replay, solve_step)
from .steinberg import (Coinvariants, InducedMap, automorphism_from_images, coinvariants, induced_map,
                        steinberg_symbol, v1_vacuous)
from .corpus import CHAIN_FILES, build_corpus, load_corpus, replay_corpus, write_corpus
