"""
Núcleo diferenciable: tensores, cinta, primitivas, Adam y verificación de gradientes
"""

from .tensor import Tensor, Tape, Parametros, backward, cinta_activa, sin_cinta, DTYPE
from .optimizador import AdamState, adam_step
from .gradcheck import grad_check
from . import ops
from .ops import ParamsLSTM

__all__ = [
    'Tensor',
    'Tape',
    'Parametros',
    'backward',
    'cinta_activa',
    'sin_cinta',
    'DTYPE',
    'AdamState',
    'adam_step',
    'grad_check',
    'ops',
    'ParamsLSTM'
]
