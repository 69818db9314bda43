"""
============================================
MÓDULO DE ITERACIÓN DE VALOR
============================================
Iteración de valor aproximada sobre la ventana
local: K pasos de convolución + máximo por canal,
y el resumen de baja dimensión para el controlador.
============================================
"""

import logging
from typing import Optional

import numpy as np

from diffcore import Tensor, ops
from exceptions import FormaIncompatibleException, DatosInvalidosException

logger = logging.getLogger(__name__)


def _validar(v: Tensor, r_bar: Tensor, kernel: Tensor):
    if r_bar.ndim != 3 or r_bar.shape[0] != 1:
        raise FormaIncompatibleException('vi_step:r_bar', '[1,H,W]', r_bar.shape)
    if v.shape != r_bar.shape:
        raise FormaIncompatibleException('vi_step:v', r_bar.shape, v.shape)
    if kernel.ndim != 4 or kernel.shape[1] != 2:
        raise FormaIncompatibleException('vi_step:kernel', '[A,2,k,k]', kernel.shape)


def vi_step(v: Tensor, r_bar: Tensor, kernel: Tensor) -> Tensor:
    """
    Un paso de iteración de valor.

    q = conv2d(concat(R̄, v), kernel) con A canales; v' = máx sobre A.

    Args:
        v (Tensor): Valor actual [1,H,W]
        r_bar (Tensor): Mapa de recompensa [1,H,W]
        kernel (Tensor): Kernel de transición [A,2,k,k]

    Returns:
        Tensor: Nuevo valor [1,H,W]
    """
    _validar(v, r_bar, kernel)
    q = ops.conv2d(ops.concat([r_bar, v], eje=0), kernel)
    return ops.max_channels(q)


def vin_forward(r_bar: Tensor, kernel: Tensor, K: int, v0: Optional[Tensor] = None) -> Tensor:
    """
    Aplica K pasos de iteración de valor desde v_0 = 0.

    Raises:
        DatosInvalidosException: Si K es negativo
    """
    if K < 0:
        raise DatosInvalidosException('K', f"debe ser >= 0, se recibió {K}")
    v = v0 if v0 is not None else Tensor(np.zeros(r_bar.shape))
    for _ in range(K):
        v = vi_step(v, r_bar, kernel)
    return v


def local_value_summary(v: Tensor, lado: int = 5) -> Tensor:
    """
    Max-pool del mapa de valor a lado×lado, aplanado.

    Raises:
        FormaIncompatibleException: Si la extensión no es divisible por el lado
    """
    if v.ndim != 3:
        raise FormaIncompatibleException('local_value_summary', '[1,H,W]', v.shape)
    _, alto, ancho = v.shape
    if alto % lado or ancho % lado or alto // lado != ancho // lado:
        raise FormaIncompatibleException('local_value_summary', f"H=W múltiplo de {lado}", v.shape)
    ventana = alto // lado
    pooled = ops.maxpool2d(v, ventana) if ventana > 1 else v
    return ops.reshape(pooled, (v.shape[0] * lado * lado,))
