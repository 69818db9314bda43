"""
Creación de parámetros de capas con la inicialización del laboratorio:
pesos uniforme(-sqrt(1/fan_in), +sqrt(1/fan_in)), sesgos en cero y
sesgo de la compuerta de olvido en +1.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from diffcore import Parametros, Tensor, ParamsLSTM, ops


@dataclass
class Densa:
    peso: Tensor
    sesgo: Tensor

    def __call__(self, entrada: Tensor, activacion: str = 'none') -> Tensor:
        return ops.dense(entrada, self.peso, self.sesgo, activacion)


@dataclass
class Conv:
    kernel: Tensor
    sesgo: Tensor

    def __call__(self, entrada: Tensor) -> Tensor:
        return ops.conv2d(entrada, self.kernel, self.sesgo)


def crear_densa(params: Parametros, nombre: str, entrada: int, salida: int,
                rng: np.random.Generator) -> Densa:
    return Densa(
        peso=params.uniforme(f"{nombre}/W", (salida, entrada), entrada, rng),
        sesgo=params.ceros(f"{nombre}/b", (salida,))
    )


def crear_conv(params: Parametros, nombre: str, canales: int, filtros: int, k: int,
               rng: np.random.Generator) -> Conv:
    return Conv(
        kernel=params.uniforme(f"{nombre}/K", (filtros, canales, k, k), canales * k * k, rng),
        sesgo=params.ceros(f"{nombre}/b", (filtros,))
    )


def crear_lstm(params: Parametros, nombre: str, entrada: int, unidades: int,
               rng: np.random.Generator) -> ParamsLSTM:
    """Celda LSTM con compuertas en orden (i, f, o, g)"""
    fan_in = entrada + unidades
    pesos = params.uniforme(f"{nombre}/W", (4 * unidades, fan_in), fan_in, rng)
    sesgo = np.zeros(4 * unidades)
    sesgo[unidades:2 * unidades] = 1.0
    return ParamsLSTM(pesos=pesos, sesgo=params.agregar(f"{nombre}/b", sesgo))


def estado_lstm_cero(unidades: int) -> Tuple[Tensor, Tensor]:
    return Tensor(np.zeros(unidades)), Tensor(np.zeros(unidades))
