"""Embedding constructions: truncate-and-pad codings, count checks, marker subshifts, shuffles."""

from .krieger import EmbeddingCheck, TailCertificate, count_gap_check, krieger_check, tail_certificate
from .markers import EntropyFloorError, SubshiftFamily, disjoint_mixing_subshifts
from .shuffle import InjectionModel, ShuffleError, hilbert_shuffle, is_injective, validate_model
from .truncation import (
    ConstructionError,
    ConstructionInvalid,
    GapTooSmall,
    InjectionImpossible,
    LoopCoding,
    PaddedCertificate,
    TruncationPlan,
    build_loop_coding,
    certify_padded_entropy,
    choose_truncation,
    decode_point_window,
    encode_point_window,
)

__all__ = [
    "ConstructionError",
    "ConstructionInvalid",
    "EmbeddingCheck",
    "EntropyFloorError",
    "GapTooSmall",
    "InjectionImpossible",
    "InjectionModel",
    "LoopCoding",
    "PaddedCertificate",
    "ShuffleError",
    "SubshiftFamily",
    "TailCertificate",
    "TruncationPlan",
    "build_loop_coding",
    "certify_padded_entropy",
    "choose_truncation",
    "count_gap_check",
    "decode_point_window",
    "disjoint_mixing_subshifts",
    "encode_point_window",
    "hilbert_shuffle",
    "is_injective",
    "krieger_check",
    "tail_certificate",
    "validate_model",
]
