"""
============================================
OPTIMIZADOR ADAM
============================================
Actualización de Adam con corrección de sesgo,
aplicada en el lugar sobre un almacén de parámetros.
============================================
"""

import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from exceptions import FormaIncompatibleException, DatosInvalidosException
from .tensor import Parametros, DTYPE

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """Acumuladores de primer y segundo momento por parámetro"""
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    paso: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(parametros: Parametros, grads: Dict[str, np.ndarray], estado: AdamState) -> Parametros:
    """
    Aplica un paso de Adam sobre todos los parámetros.

    Un parámetro sin gradiente en `grads` se trata como gradiente cero.

    Args:
        parametros (Parametros): Parámetros a actualizar (en el lugar)
        grads (Dict[str, ndarray]): Gradientes por nombre
        estado (AdamState): Estado del optimizador, se avanza un paso

    Returns:
        Parametros: Los mismos parámetros ya actualizados

    Raises:
        FormaIncompatibleException: Si un gradiente no tiene la forma del parámetro
        DatosInvalidosException: Si hay gradientes de parámetros desconocidos
    """
    desconocidos = set(grads) - set(parametros)
    if desconocidos:
        raise DatosInvalidosException('grads', f"parámetros desconocidos: {sorted(desconocidos)}")

    for nombre, tensor in parametros.items():
        g = grads.get(nombre)
        if g is not None and np.shape(g) != tensor.shape:
            raise FormaIncompatibleException(f'adam_step:{nombre}', tensor.shape, np.shape(g))

    estado.paso += 1
    t = estado.paso
    correccion1 = 1.0 - estado.beta1 ** t
    correccion2 = 1.0 - estado.beta2 ** t

    for nombre, tensor in parametros.items():
        g = grads.get(nombre)
        g = np.zeros(tensor.shape, dtype=DTYPE) if g is None else np.asarray(g, dtype=DTYPE)
        m = estado.m.get(nombre)
        if m is None:
            m = np.zeros(tensor.shape, dtype=DTYPE)
            estado.v[nombre] = np.zeros(tensor.shape, dtype=DTYPE)
        v = estado.v[nombre]

        m = estado.beta1 * m + (1.0 - estado.beta1) * g
        v = estado.beta2 * v + (1.0 - estado.beta2) * g * g
        estado.m[nombre] = m
        estado.v[nombre] = v

        m_hat = m / correccion1
        v_hat = v / correccion2
        tensor.values -= estado.lr * m_hat / (np.sqrt(v_hat) + estado.eps)

    logger.debug(f"adam_step: paso {t}, {len(parametros)} parámetros")
    return parametros
