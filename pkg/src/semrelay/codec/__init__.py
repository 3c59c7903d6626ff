from .vocab import BOS, EOS, PAD, RESERVED_TOKENS, UNK, TokenSequence, Vocabulary, tokenize
from .model import (
    CodecConfig,
    SemanticCodecModel,
    causal_mask,
    embed,
    encode_sentence,
    key_padding_mask,
    positional_encoding,
    sem_decode_infer,
    sem_decode_train,
    sem_encode,
)
from .training import batch_arrays, sentence_noise, train_semantic

__all__ = [
    "PAD", "BOS", "EOS", "UNK", "RESERVED_TOKENS",
    "TokenSequence", "Vocabulary", "tokenize",
    "CodecConfig", "SemanticCodecModel",
    "embed", "encode_sentence", "sem_encode", "sem_decode_train", "sem_decode_infer",
    "causal_mask", "key_padding_mask", "positional_encoding",
    "batch_arrays", "sentence_noise", "train_semantic",
]
