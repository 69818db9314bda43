"""
============================================
MEMORIA EXTERNA DIFERENCIABLE
============================================
DNC simplificado: memoria de 64 slots × 8 palabras,
una cabeza de lectura y una de escritura con
direccionamiento por contenido y por asignación,
controlado por una LSTM.
============================================
"""

import logging
from dataclasses import dataclass

import numpy as np

from diffcore import Tensor, Parametros, ParamsLSTM, ops
from diffcore.tensor import crear_resultado
from exceptions import FormaIncompatibleException, DatosInvalidosException
from models import MemoryState, InterfaceVector
from .capas import Densa, crear_densa, crear_lstm

logger = logging.getLogger(__name__)

# Escala de la asignación alternativa: softmax(ESCALA * (1 - usage))
ESCALA_ASIGNACION = 10.0
MODOS_ASIGNACION = ('ordenada', 'softmax')


def _outer(a: Tensor, b: Tensor) -> Tensor:
    return ops.mul(ops.reshape(a, (a.size, 1)), ops.reshape(b, (1, b.size)))


def ancho_interfaz(palabra: int) -> int:
    """read_key, write_key, borrado y suma (palabra c/u) + 2 fuerzas + 2 compuertas"""
    return 4 * palabra + 4


def content_weights(M: Tensor, key: Tensor, strength: Tensor) -> Tensor:
    """softmax_i(strength · cos(M[i], key)) con piso 1e-8 en las normas"""
    return ops.softmax(ops.mul(ops.cosine_similarity(M, key), strength))


def _asignacion_ordenada(usage: Tensor) -> Tensor:
    """
    Lista libre: a[φ_j] = (1 - u[φ_j]) · Π_{i<j} u[φ_i], con φ el orden
    ascendente de uso (empates por índice). La permutación es constante
    para el gradiente.
    """
    u = usage.values
    n = u.size
    orden = np.argsort(u, kind='stable')
    us = u[orden]
    previo = np.concatenate([[1.0], np.cumprod(us)[:-1]])
    salida = np.empty(n)
    salida[orden] = (1.0 - us) * previo

    def retro(g):
        gs = g[orden]
        # sin_k[k, j] = Π_{i<j, i≠k} us[i]
        matriz = np.tile(us, (n, 1))
        np.fill_diagonal(matriz, 1.0)
        sin_k = np.concatenate([np.ones((n, 1)), np.cumprod(matriz, axis=1)[:, :-1]], axis=1)
        posteriores = np.triu(np.ones((n, n)), k=1)
        d_us = -gs * previo + (posteriores * sin_k * (gs * (1.0 - us))[None, :]).sum(axis=1)
        d_u = np.empty(n)
        d_u[orden] = d_us
        return (d_u,)

    return crear_resultado(salida, (usage,), retro, 'asignacion_ordenada')


def allocation_weights(usage: Tensor, modo: str = 'ordenada') -> Tensor:
    """
    Pesos de asignación sobre los slots.

    Args:
        usage: Uso por slot en [0,1]
        modo: 'ordenada' (lista libre) o 'softmax' (softmax(10·(1-u)))

    Raises:
        DatosInvalidosException: Si el modo no existe
    """
    if modo == 'ordenada':
        return _asignacion_ordenada(usage)
    if modo == 'softmax':
        return ops.softmax(ops.mul(ops.sub(1.0, usage), ESCALA_ASIGNACION))
    raise DatosInvalidosException('modo', f"debe ser uno de {MODOS_ASIGNACION}")


def interfaz_desde_vector(xi: Tensor, palabra: int) -> InterfaceVector:
    """
    Reparte el vector de interfaz [4·palabra + 4] en sus campos.

    Fuerzas = 1 + softplus; compuertas y borrado = sigmoide.
    """
    esperado = ancho_interfaz(palabra)
    if xi.shape != (esperado,):
        raise FormaIncompatibleException('interfaz', (esperado,), xi.shape)
    w = palabra
    return InterfaceVector(
        read_key=ops.slice(xi, 0, w),
        read_strength=ops.add(1.0, ops.softplus(ops.slice(xi, w, w + 1))),
        write_key=ops.slice(xi, w + 1, 2 * w + 1),
        write_strength=ops.add(1.0, ops.softplus(ops.slice(xi, 2 * w + 1, 2 * w + 2))),
        erase=ops.sigmoid(ops.slice(xi, 2 * w + 2, 3 * w + 2)),
        add=ops.slice(xi, 3 * w + 2, 4 * w + 2),
        allocation_gate=ops.sigmoid(ops.slice(xi, 4 * w + 2, 4 * w + 3)),
        write_gate=ops.sigmoid(ops.slice(xi, 4 * w + 3, 4 * w + 4))
    )


def mem_write(estado: MemoryState, iface: InterfaceVector) -> MemoryState:
    """
    Escritura: w_W = g_w·[g_a·asignación + (1-g_a)·contenido]
    M' = M ⊙ (1 - w_W ⊗ borrado) + w_W ⊗ suma
    u' = u + w_W - u ⊙ w_W
    """
    contenido = content_weights(estado.M, iface.write_key, iface.write_strength)
    asignacion = allocation_weights(estado.usage)
    mezcla = ops.add(ops.mul(iface.allocation_gate, asignacion),
                     ops.mul(ops.sub(1.0, iface.allocation_gate), contenido))
    w_escritura = ops.mul(iface.write_gate, mezcla)

    M = ops.add(ops.mul(estado.M, ops.sub(1.0, _outer(w_escritura, iface.erase))),
                _outer(w_escritura, iface.add))
    usage = ops.sub(ops.add(estado.usage, w_escritura), ops.mul(estado.usage, w_escritura))
    return MemoryState(M=M, usage=usage, read_weights=estado.read_weights,
                       write_weights=w_escritura, last_read=estado.last_read)


def mem_read(estado: MemoryState, iface: InterfaceVector):
    """
    Lectura por contenido: w_R = contenido(M, clave, fuerza); r = w_Rᵀ·M.

    Returns:
        tuple: (vector leído [palabra], nuevo estado)
    """
    w_lectura = content_weights(estado.M, iface.read_key, iface.read_strength)
    lectura = ops.vecmat(w_lectura, estado.M)
    nuevo = MemoryState(M=estado.M, usage=estado.usage, read_weights=w_lectura,
                        write_weights=estado.write_weights, last_read=lectura)
    return lectura, nuevo


@dataclass
class ParamsDNC:
    lstm: ParamsLSTM
    interfaz: Densa
    palabra: int

    @property
    def unidades(self) -> int:
        return self.lstm.unidades


def crear_parametros_dnc(params: Parametros, prefijo: str, entrada: int, unidades: int,
                         palabra: int, rng: np.random.Generator) -> ParamsDNC:
    """La LSTM recibe concat(entrada, última lectura)"""
    return ParamsDNC(
        lstm=crear_lstm(params, f"{prefijo}/lstm", entrada + palabra, unidades, rng),
        interfaz=crear_densa(params, f"{prefijo}/interfaz", unidades, ancho_interfaz(palabra), rng),
        palabra=palabra
    )


def dnc_step(controller_h: Tensor, controller_c: Tensor, entrada: Tensor,
             estado: MemoryState, params: ParamsDNC):
    """
    Un paso del controlador con memoria: LSTM, interfaz, escritura y lectura.

    Returns:
        tuple: (salida = concat(h', lectura), h', c', nuevo estado)
    """
    if estado.M.shape[1] != params.palabra:
        raise FormaIncompatibleException('dnc_step:M', f"[slots,{params.palabra}]", estado.M.shape)
    h, c = ops.lstm_step(ops.concat([entrada, estado.last_read]), controller_h, controller_c, params.lstm)
    iface = interfaz_desde_vector(params.interfaz(h), params.palabra)
    escrito = mem_write(estado, iface)
    lectura, nuevo = mem_read(escrito, iface)
    return ops.concat([h, lectura]), h, c, nuevo
