"""
============================================
VERIFICACIÓN DE GRADIENTES
============================================
Compara los gradientes de la cinta con diferencias
centrales (f(x+h) - f(x-h)) / 2h.
============================================
"""

import logging
from typing import Callable, Iterable, Optional

import numpy as np

from exceptions import FormaIncompatibleException
from .tensor import Tensor, Tape, backward, sin_cinta

logger = logging.getLogger(__name__)


def grad_check(f: Callable[[Tensor], Tensor], punto: Tensor, h: float = 1e-5,
               indices: Optional[Iterable[int]] = None,
               excluir: Optional[Iterable[int]] = None) -> float:
    """
    Error relativo máximo entre el gradiente analítico y el numérico.

    `f` recibe `punto` y debe devolver un escalar. Las evaluaciones
    numéricas se hacen sin cinta, modificando `punto.values` en el lugar
    (así también sirve para parámetros internos de una red).

    Args:
        f (Callable): Función escalar
        punto (Tensor): Tensor respecto del cual se deriva
        h (float): Paso de las diferencias centrales
        indices (Iterable[int]): Subconjunto de índices planos a verificar
        excluir (Iterable[int]): Índices planos no diferenciables (empates de max)

    Returns:
        float: max |a-b| / max(|a|, |b|, 1e-8)
    """
    requeria = punto.requires_grad
    punto.requires_grad = True
    grad_previo = punto.grad
    punto.grad = None
    try:
        with Tape() as cinta:
            salida = f(punto)
        if salida.size != 1:
            raise FormaIncompatibleException('grad_check', 'salida escalar', salida.shape)
        backward(cinta, salida)
        analitico = (punto.grad if punto.grad is not None
                     else np.zeros_like(punto.values)).reshape(-1).copy()

        planos = punto.values.reshape(-1)
        candidatos = range(planos.size) if indices is None else indices
        excluidos = set(excluir or ())

        error_max = 0.0
        for i in candidatos:
            if i in excluidos:
                continue
            original = planos[i]
            with sin_cinta():
                planos[i] = original + h
                f_mas = f(punto).item()
                planos[i] = original - h
                f_menos = f(punto).item()
            planos[i] = original

            numerico = (f_mas - f_menos) / (2.0 * h)
            a = analitico[i]
            error = abs(a - numerico) / max(abs(a), abs(numerico), 1e-8)
            error_max = max(error_max, error)

        logger.debug(f"grad_check: error relativo máximo {error_max:.3e}")
        return float(error_max)
    finally:
        punto.requires_grad = requeria
        punto.grad = grad_previo
