"""Proximal-ADMM QP decoding of nonbinary LDPC codes over GF(2^q)."""

from .codeio import (ParityCheckCode, check_syndrome, derive_encoder, load_code, parse_code,
                     regular_code, serialize_code)
from .config import DecoderConfig
from .field import FieldContext, get_field
from .padmm import decode, decode_batch, hard_decision
from .qpbuild import QpModel, assemble_model, decompose

__all__ = [
    "DecoderConfig", "FieldContext", "ParityCheckCode", "QpModel", "assemble_model",
    "check_syndrome", "decode", "decode_batch", "decompose", "derive_encoder", "get_field",
    "hard_decision", "load_code", "parse_code", "regular_code", "serialize_code",
]
