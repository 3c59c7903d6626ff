from .tensor import Tensor, concat_rows, embedding
from .params import (
    ParameterSet,
    ROLE_AUTO_DECODER,
    ROLE_AUTO_ENCODER,
    ROLE_SEMANTIC_DECODER,
    ROLE_SEMANTIC_ENCODER,
    ROLES,
    uniform_init,
)
from .layers import ACTIVATIONS, dense_forward
from .losses import cross_entropy_op, mse_loss, mse_op, softmax_cross_entropy
from .optim import AdamState, adam_step, make_optimizer, sgd_step
from .gradcheck import grad_check

__all__ = [
    "Tensor",
    "concat_rows",
    "embedding",
    "ParameterSet",
    "ROLES",
    "ROLE_SEMANTIC_ENCODER",
    "ROLE_AUTO_ENCODER",
    "ROLE_AUTO_DECODER",
    "ROLE_SEMANTIC_DECODER",
    "uniform_init",
    "ACTIVATIONS",
    "dense_forward",
    "softmax_cross_entropy",
    "mse_loss",
    "mse_op",
    "cross_entropy_op",
    "AdamState",
    "adam_step",
    "sgd_step",
    "make_optimizer",
    "grad_check",
]
