"""
============================================
PRIMITIVAS DIFERENCIABLES
============================================
Solo las operaciones que necesita la arquitectura:
aritmética con broadcasting, activaciones, reducciones,
conv2d con padding "same", maxpool, max por canal,
softmax, capa densa, paso LSTM y similitud coseno.
============================================
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from exceptions import FormaIncompatibleException, DatosInvalidosException
from .tensor import Tensor, DTYPE, crear_resultado

logger = logging.getLogger(__name__)

ACTIVACIONES = ('none', 'relu', 'tanh')


def como_tensor(x) -> Tensor:
    """Convierte escalares/arrays en tensores constantes"""
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=DTYPE))


def _reducir_a_forma(grad: np.ndarray, forma) -> np.ndarray:
    """Suma el gradiente sobre los ejes expandidos por broadcasting"""
    while grad.ndim > len(forma):
        grad = grad.sum(axis=0)
    for eje, n in enumerate(forma):
        if n == 1 and grad.shape[eje] != 1:
            grad = grad.sum(axis=eje, keepdims=True)
    return grad.reshape(forma)


def _broadcast(operacion: str, a: Tensor, b: Tensor):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise FormaIncompatibleException(operacion, a.shape, b.shape)


# ============================================
# ARITMÉTICA
# ============================================

def add(a, b) -> Tensor:
    a, b = como_tensor(a), como_tensor(b)
    _broadcast('add', a, b)

    def retro(g):
        return _reducir_a_forma(g, a.shape), _reducir_a_forma(g, b.shape)

    return crear_resultado(a.values + b.values, (a, b), retro, 'add')


def sub(a, b) -> Tensor:
    a, b = como_tensor(a), como_tensor(b)
    _broadcast('sub', a, b)

    def retro(g):
        return _reducir_a_forma(g, a.shape), _reducir_a_forma(-g, b.shape)

    return crear_resultado(a.values - b.values, (a, b), retro, 'sub')


def mul(a, b) -> Tensor:
    a, b = como_tensor(a), como_tensor(b)
    _broadcast('mul', a, b)
    va, vb = a.values, b.values

    def retro(g):
        return _reducir_a_forma(g * vb, a.shape), _reducir_a_forma(g * va, b.shape)

    return crear_resultado(va * vb, (a, b), retro, 'mul')


def div(a, b) -> Tensor:
    a, b = como_tensor(a), como_tensor(b)
    _broadcast('div', a, b)
    va, vb = a.values, b.values

    def retro(g):
        return (_reducir_a_forma(g / vb, a.shape),
                _reducir_a_forma(-g * va / (vb * vb), b.shape))

    return crear_resultado(va / vb, (a, b), retro, 'div')


def neg(a) -> Tensor:
    a = como_tensor(a)
    return crear_resultado(-a.values, (a,), lambda g: (-g,), 'neg')


def square(a) -> Tensor:
    a = como_tensor(a)
    va = a.values
    return crear_resultado(va * va, (a,), lambda g: (2.0 * va * g,), 'square')


def sum(a) -> Tensor:  # noqa: A001 - nombre de la primitiva
    a = como_tensor(a)
    forma = a.shape
    return crear_resultado(np.asarray(a.values.sum()), (a,),
                           lambda g: (np.full(forma, float(g)),), 'sum')


def mean(a) -> Tensor:
    a = como_tensor(a)
    forma, n = a.shape, a.size
    return crear_resultado(np.asarray(a.values.mean()), (a,),
                           lambda g: (np.full(forma, float(g) / n),), 'mean')


# ============================================
# FUNCIONES ELEMENTALES
# ============================================

def _sigmoide(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def exp(a) -> Tensor:
    a = como_tensor(a)
    salida = np.exp(a.values)
    return crear_resultado(salida, (a,), lambda g: (g * salida,), 'exp')


def log(a, piso: float = 1e-12) -> Tensor:
    """Logaritmo con piso: log(max(a, piso)); sin gradiente bajo el piso"""
    a = como_tensor(a)
    acotado = np.maximum(a.values, piso)
    activo = a.values > piso
    return crear_resultado(np.log(acotado), (a,),
                           lambda g: (np.where(activo, g / acotado, 0.0),), 'log')


def sigmoid(a) -> Tensor:
    a = como_tensor(a)
    s = _sigmoide(a.values)
    return crear_resultado(s, (a,), lambda g: (g * s * (1.0 - s),), 'sigmoid')


def tanh(a) -> Tensor:
    a = como_tensor(a)
    t = np.tanh(a.values)
    return crear_resultado(t, (a,), lambda g: (g * (1.0 - t * t),), 'tanh')


def relu(a) -> Tensor:
    a = como_tensor(a)
    activo = a.values > 0
    return crear_resultado(np.where(activo, a.values, 0.0), (a,),
                           lambda g: (g * activo,), 'relu')


def softplus(a) -> Tensor:
    a = como_tensor(a)
    va = a.values
    return crear_resultado(np.logaddexp(0.0, va), (a,),
                           lambda g: (g * _sigmoide(va),), 'softplus')


# ============================================
# ESTRUCTURA
# ============================================

def reshape(a, forma) -> Tensor:
    a = como_tensor(a)
    forma_original = a.shape
    try:
        valores = a.values.reshape(forma)
    except ValueError:
        raise FormaIncompatibleException('reshape', forma_original, forma)
    return crear_resultado(valores, (a,), lambda g: (g.reshape(forma_original),), 'reshape')


def concat(tensores: Sequence, eje: int = 0) -> Tensor:
    tensores = [como_tensor(t) for t in tensores]
    try:
        valores = np.concatenate([t.values for t in tensores], axis=eje)
    except ValueError:
        raise FormaIncompatibleException('concat', 'formas compatibles', [t.shape for t in tensores])
    cortes = np.cumsum([t.shape[eje] for t in tensores])[:-1]

    def retro(g):
        return tuple(np.split(g, cortes, axis=eje))

    return crear_resultado(valores, tensores, retro, 'concat')


def slice(a, inicio: int, fin: int) -> Tensor:  # noqa: A001
    """Rebanada a[inicio:fin] sobre el primer eje"""
    a = como_tensor(a)
    forma = a.shape

    def retro(g):
        completo = np.zeros(forma, dtype=DTYPE)
        completo[inicio:fin] = g
        return (completo,)

    return crear_resultado(a.values[inicio:fin].copy(), (a,), retro, 'slice')


def tomar(a, indice: int) -> Tensor:
    """Elemento escalar a[indice] de un vector"""
    a = como_tensor(a)
    forma = a.shape

    def retro(g):
        completo = np.zeros(forma, dtype=DTYPE)
        completo[indice] = np.asarray(g).item()
        return (completo,)

    return crear_resultado(np.asarray(a.values[indice]), (a,), retro, 'tomar')


def uno_caliente(indice: int, n: int) -> Tensor:
    valores = np.zeros(n, dtype=DTYPE)
    valores[indice] = 1.0
    return Tensor(valores)


# ============================================
# ÁLGEBRA LINEAL
# ============================================

def matvec(w, x) -> Tensor:
    """W[m,n] · x[n] -> [m]"""
    w, x = como_tensor(w), como_tensor(x)
    if w.ndim != 2 or x.ndim != 1 or w.shape[1] != x.shape[0]:
        raise FormaIncompatibleException('matvec', f"[m,{x.shape[0] if x.ndim == 1 else 'n'}]·[n]",
                                         (w.shape, x.shape))
    vw, vx = w.values, x.values

    def retro(g):
        return np.outer(g, vx), vw.T @ g

    return crear_resultado(vw @ vx, (w, x), retro, 'matvec')


def vecmat(x, w) -> Tensor:
    """x[n] · W[n,m] -> [m]"""
    x, w = como_tensor(x), como_tensor(w)
    if w.ndim != 2 or x.ndim != 1 or w.shape[0] != x.shape[0]:
        raise FormaIncompatibleException('vecmat', '[n]·[n,m]', (x.shape, w.shape))
    vx, vw = x.values, w.values

    def retro(g):
        return vw @ g, np.outer(vx, g)

    return crear_resultado(vx @ vw, (x, w), retro, 'vecmat')


def dense(entrada, peso, sesgo, activacion: str = 'none') -> Tensor:
    """
    Capa totalmente conectada: activacion(W·x + b).

    Args:
        entrada (Tensor): Vector [n]
        peso (Tensor): Matriz [m,n]
        sesgo (Tensor): Vector [m]
        activacion (str): 'none', 'relu' o 'tanh'
    """
    if activacion not in ACTIVACIONES:
        raise DatosInvalidosException('activacion', f"debe ser una de {ACTIVACIONES}")
    peso, sesgo = como_tensor(peso), como_tensor(sesgo)
    if sesgo.shape != (peso.shape[0],):
        raise FormaIncompatibleException('dense', (peso.shape[0],), sesgo.shape)
    z = add(matvec(peso, entrada), sesgo)
    if activacion == 'relu':
        return relu(z)
    if activacion == 'tanh':
        return tanh(z)
    return z


# ============================================
# CONVOLUCIÓN Y POOLING
# ============================================

def conv2d(entrada, kernel, bias=None) -> Tensor:
    """
    Correlación 2D con padding de ceros "same".

    out[f,y,x] = bias[f] + Σ_{c,dy,dx} entrada[c,y+dy,x+dx] · kernel[f,c,dy,dx]

    Args:
        entrada (Tensor): [C,H,W]
        kernel (Tensor): [F,C,k,k] con k impar
        bias (Tensor): [F] u omitido
    """
    entrada, kernel = como_tensor(entrada), como_tensor(kernel)
    if entrada.ndim != 3 or kernel.ndim != 4:
        raise FormaIncompatibleException('conv2d', '[C,H,W] y [F,C,k,k]', (entrada.shape, kernel.shape))
    c, alto, ancho = entrada.shape
    f, ck, k, k2 = kernel.shape
    if ck != c or k != k2 or k % 2 == 0:
        raise FormaIncompatibleException('conv2d', f"[F,{c},k,k] con k impar", kernel.shape)
    if bias is not None:
        bias = como_tensor(bias)
        if bias.shape != (f,):
            raise FormaIncompatibleException('conv2d', (f,), bias.shape)

    r = k // 2
    padded = np.pad(entrada.values, ((0, 0), (r, r), (r, r)))
    ventanas = sliding_window_view(padded, (k, k), axis=(1, 2))  # [C,H,W,k,k]
    vk = kernel.values
    salida = np.tensordot(vk, ventanas, axes=([1, 2, 3], [0, 3, 4]))  # [F,H,W]
    if bias is not None:
        salida = salida + bias.values[:, None, None]

    def retro(g):
        d_kernel = np.tensordot(g, ventanas, axes=([1, 2], [1, 2]))  # [F,C,k,k]
        d_ventanas = np.tensordot(vk, g, axes=([0], [0]))  # [C,k,k,H,W]
        d_padded = np.zeros_like(padded)
        for i in range(k):
            for j in range(k):
                d_padded[:, i:i + alto, j:j + ancho] += d_ventanas[:, i, j]
        d_entrada = d_padded[:, r:r + alto, r:r + ancho]
        if bias is None:
            return d_entrada, d_kernel
        return d_entrada, d_kernel, g.sum(axis=(1, 2))

    entradas = (entrada, kernel) if bias is None else (entrada, kernel, bias)
    return crear_resultado(salida, entradas, retro, 'conv2d')


def maxpool2d(entrada, ventana: int = 2) -> Tensor:
    """
    Máximo por bloques ventana×ventana sin solapamiento.

    El gradiente va al primer máximo del bloque (orden fila-columna).
    """
    entrada = como_tensor(entrada)
    if entrada.ndim != 3:
        raise FormaIncompatibleException('maxpool2d', '[C,H,W]', entrada.shape)
    c, alto, ancho = entrada.shape
    if alto % ventana or ancho % ventana:
        raise FormaIncompatibleException('maxpool2d', f"H y W múltiplos de {ventana}", entrada.shape)
    ho, wo = alto // ventana, ancho // ventana
    bloques = (entrada.values.reshape(c, ho, ventana, wo, ventana)
               .transpose(0, 1, 3, 2, 4).reshape(c, ho, wo, ventana * ventana))
    indices = bloques.argmax(axis=-1)[..., None]
    salida = np.take_along_axis(bloques, indices, axis=-1)[..., 0]

    def retro(g):
        d_bloques = np.zeros_like(bloques)
        np.put_along_axis(d_bloques, indices, g[..., None], axis=-1)
        d_entrada = (d_bloques.reshape(c, ho, wo, ventana, ventana)
                     .transpose(0, 1, 3, 2, 4).reshape(c, alto, ancho))
        return (d_entrada,)

    return crear_resultado(salida, (entrada,), retro, 'maxpool2d')


def max_channels(entrada) -> Tensor:
    """Máximo sobre el eje de canales: [A,H,W] -> [1,H,W], primer índice en empates"""
    entrada = como_tensor(entrada)
    if entrada.ndim != 3:
        raise FormaIncompatibleException('max_channels', '[A,H,W]', entrada.shape)
    valores = entrada.values
    indices = valores.argmax(axis=0)[None]
    salida = np.take_along_axis(valores, indices, axis=0)

    def retro(g):
        d_entrada = np.zeros_like(valores)
        np.put_along_axis(d_entrada, indices, g, axis=0)
        return (d_entrada,)

    return crear_resultado(salida, (entrada,), retro, 'max_channels')


# ============================================
# SOFTMAX
# ============================================

def softmax(entrada) -> Tensor:
    """Softmax de un vector con desplazamiento por el máximo"""
    entrada = como_tensor(entrada)
    if entrada.ndim != 1 or entrada.size < 1:
        raise FormaIncompatibleException('softmax', '[n] con n >= 1', entrada.shape)
    z = entrada.values - entrada.values.max()
    e = np.exp(z)
    s = e / e.sum()

    def retro(g):
        return (s * (g - (g * s).sum()),)

    return crear_resultado(s, (entrada,), retro, 'softmax')


def log_softmax(entrada) -> Tensor:
    entrada = como_tensor(entrada)
    if entrada.ndim != 1 or entrada.size < 1:
        raise FormaIncompatibleException('log_softmax', '[n] con n >= 1', entrada.shape)
    z = entrada.values - entrada.values.max()
    lse = np.log(np.exp(z).sum())
    salida = z - lse
    s = np.exp(salida)

    def retro(g):
        return (g - s * g.sum(),)

    return crear_resultado(salida, (entrada,), retro, 'log_softmax')


# ============================================
# MEMORIA: SIMILITUD COSENO
# ============================================

def cosine_similarity(memoria, clave, piso: float = 1e-8) -> Tensor:
    """
    Similitud coseno entre cada fila de memoria[n,w] y clave[w].

    El denominador es max(|M_i|·|k|, piso), así una clave nula da 0.
    """
    memoria, clave = como_tensor(memoria), como_tensor(clave)
    if memoria.ndim != 2 or clave.ndim != 1 or memoria.shape[1] != clave.shape[0]:
        raise FormaIncompatibleException('cosine_similarity', '[n,w] y [w]', (memoria.shape, clave.shape))
    m, k = memoria.values, clave.values
    norma_m = np.sqrt((m * m).sum(axis=1))
    norma_k = float(np.sqrt((k * k).sum()))
    producto = norma_m * norma_k
    activo = producto > piso
    denom = np.where(activo, producto, piso)
    puntos = m @ k
    salida = puntos / denom

    def retro(g):
        coef = g / denom
        comun = np.where(activo, g * puntos / (denom * denom), 0.0)
        norma_m_segura = np.where(norma_m > 0, norma_m, 1.0)
        norma_k_segura = norma_k if norma_k > 0 else 1.0
        d_memoria = np.outer(coef, k) - (comun * norma_k / norma_m_segura)[:, None] * m
        d_clave = coef @ m - (comun * norma_m / norma_k_segura).sum() * k
        return d_memoria, d_clave

    return crear_resultado(salida, (memoria, clave), retro, 'cosine_similarity')


# ============================================
# LSTM
# ============================================

@dataclass
class ParamsLSTM:
    """Pesos de una celda LSTM: W[4u, d+u] y b[4u] en orden (i, f, o, g)"""
    pesos: Tensor
    sesgo: Tensor

    @property
    def unidades(self) -> int:
        return self.sesgo.shape[0] // 4


def lstm_step(entrada, h, c, params: ParamsLSTM):
    """
    Un paso de la recurrencia LSTM estándar.

    i, f, o = sigmoide; g = tanh; c' = f⊙c + i⊙g; h' = o⊙tanh(c')

    Returns:
        tuple: (h', c')
    """
    entrada, h, c = como_tensor(entrada), como_tensor(h), como_tensor(c)
    u = params.unidades
    esperado = (4 * u, entrada.size + u)
    if params.pesos.shape != esperado or h.shape != (u,) or c.shape != (u,):
        raise FormaIncompatibleException('lstm_step', esperado, (params.pesos.shape, h.shape, c.shape))

    z = add(matvec(params.pesos, concat([entrada, h])), params.sesgo)
    puerta_i = sigmoid(slice(z, 0, u))
    puerta_f = sigmoid(slice(z, u, 2 * u))
    puerta_o = sigmoid(slice(z, 2 * u, 3 * u))
    candidato = tanh(slice(z, 3 * u, 4 * u))
    c_nuevo = add(mul(puerta_f, c), mul(puerta_i, candidato))
    h_nuevo = mul(puerta_o, tanh(c_nuevo))
    return h_nuevo, c_nuevo
