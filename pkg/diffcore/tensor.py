"""
============================================
TENSOR, CINTA Y RETROPROPAGACIÓN
============================================
Núcleo de diferenciación automática en modo reverso.

- Tensor: valores numpy + gradiente opcional.
- Tape: registro ordenado de las primitivas aplicadas.
- backward: recorre la cinta en orden inverso.
- Parametros: almacén ordenado nombre -> Tensor.
============================================
"""

import logging
import threading
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from exceptions import FormaIncompatibleException, DatosInvalidosException

logger = logging.getLogger(__name__)

DTYPE = np.float64

# Una pila de cintas activas por hilo: cada worker es dueño de la suya
_local = threading.local()


class Tensor:
    """Valor diferenciable con forma fija"""

    __slots__ = ('values', 'grad', 'requires_grad', 'name', 'creado_por')

    def __init__(self, values, requires_grad: bool = False, name: str = None):
        # asarray conserva la forma () de los escalares
        valores = np.asarray(values, dtype=DTYPE)
        if not valores.flags.c_contiguous:
            valores = valores.copy(order='C')
        self.values = valores
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self.creado_por: Optional['Nodo'] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def item(self) -> float:
        if self.size != 1:
            raise FormaIncompatibleException('item', 'tensor de un elemento', self.shape)
        return float(self.values.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.values.copy()

    def detach(self) -> 'Tensor':
        """Copia sin historial (constante para la cinta)"""
        return Tensor(self.values.copy())

    def __repr__(self):
        nombre = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{nombre}, requires_grad={self.requires_grad})"

    # Operadores: delegan en las primitivas de diffcore.ops
    def __add__(self, otro):
        from diffcore import ops
        return ops.add(self, otro)

    def __radd__(self, otro):
        from diffcore import ops
        return ops.add(otro, self)

    def __sub__(self, otro):
        from diffcore import ops
        return ops.sub(self, otro)

    def __rsub__(self, otro):
        from diffcore import ops
        return ops.sub(otro, self)

    def __mul__(self, otro):
        from diffcore import ops
        return ops.mul(self, otro)

    def __rmul__(self, otro):
        from diffcore import ops
        return ops.mul(otro, self)

    def __truediv__(self, otro):
        from diffcore import ops
        return ops.div(self, otro)

    def __neg__(self):
        from diffcore import ops
        return ops.neg(self)


class Nodo:
    """Aplicación registrada de una primitiva"""

    __slots__ = ('salida', 'entradas', 'retro', 'operacion')

    def __init__(self, salida: Tensor, entradas: Sequence[Tensor],
                 retro: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]],
                 operacion: str):
        self.salida = salida
        self.entradas = tuple(entradas)
        self.retro = retro
        self.operacion = operacion


class Tape:
    """
    Cinta de operaciones en orden topológico.

    Se usa como context manager; mientras está activa las primitivas
    registran sus nodos. Fuera de una cinta solo se calculan valores.

    Example:
        >>> with Tape() as cinta:
        ...     perdida = ops.sum(ops.square(x))
        >>> backward(cinta, perdida)
    """

    def __init__(self):
        self.nodos: List[Nodo] = []

    def registrar(self, salida: Tensor, entradas: Sequence[Tensor], retro, operacion: str) -> Nodo:
        nodo = Nodo(salida, entradas, retro, operacion)
        salida.creado_por = nodo
        self.nodos.append(nodo)
        return nodo

    def __len__(self):
        return len(self.nodos)

    def __enter__(self) -> 'Tape':
        pila = getattr(_local, 'pila', None)
        if pila is None:
            pila = []
            _local.pila = pila
        pila.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _local.pila.pop()
        return False


def cinta_activa() -> Optional[Tape]:
    """Retorna la cinta activa del hilo actual, si existe"""
    pila = getattr(_local, 'pila', None)
    return pila[-1] if pila else None


@contextmanager
def sin_cinta():
    """Suspende el registro: dentro del bloque solo se calculan valores"""
    pila = getattr(_local, 'pila', None)
    if pila is None:
        pila = []
        _local.pila = pila
    pila.append(None)
    try:
        yield
    finally:
        pila.pop()


def crear_resultado(valores: np.ndarray, entradas: Sequence[Tensor], retro, operacion: str) -> Tensor:
    """
    Envuelve el resultado de una primitiva y lo registra si corresponde.

    Solo se registra si hay cinta activa y alguna entrada requiere gradiente.
    """
    salida = Tensor(valores)
    cinta = cinta_activa()
    if cinta is not None and any(e.requires_grad for e in entradas):
        salida.requires_grad = True
        cinta.registrar(salida, entradas, retro, operacion)
    return salida


def backward(tape: Tape, loss: Tensor, parametros: 'Parametros' = None) -> Dict[str, np.ndarray]:
    """
    Propaga gradientes desde una pérdida escalar.

    Los tensores hoja alcanzables reciben su gradiente en `.grad`. Si se
    entrega un almacén de parámetros, los no alcanzables quedan en cero.

    Args:
        tape (Tape): Cinta donde se registró el cómputo
        loss (Tensor): Pérdida escalar
        parametros (Parametros): Parámetros a reportar

    Returns:
        Dict[str, ndarray]: Gradientes por nombre de parámetro (vacío si no hay almacén)

    Raises:
        FormaIncompatibleException: Si la pérdida no es escalar
    """
    if loss.size != 1:
        raise FormaIncompatibleException('backward', 'pérdida escalar', loss.shape)

    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.values)}
    tensores: Dict[int, Tensor] = {id(loss): loss}

    for nodo in reversed(tape.nodos):
        g = grads.pop(id(nodo.salida), None)
        if g is None:
            continue
        parciales = nodo.retro(g)
        for entrada, parcial in zip(nodo.entradas, parciales):
            if parcial is None or not entrada.requires_grad:
                continue
            clave = id(entrada)
            if clave in grads:
                grads[clave] = grads[clave] + parcial
            else:
                grads[clave] = parcial
                tensores[clave] = entrada

    # Lo que queda son hojas (o tensores creados fuera de esta cinta)
    for clave, g in grads.items():
        tensor = tensores[clave]
        tensor.grad = np.asarray(g, dtype=DTYPE).reshape(tensor.shape)

    logger.debug(f"backward: {len(tape.nodos)} nodos, {len(grads)} hojas alcanzadas")

    if parametros is None:
        return {}

    resultado = {}
    for nombre, tensor in parametros.items():
        if id(tensor) not in grads:
            tensor.grad = np.zeros_like(tensor.values)
        resultado[nombre] = tensor.grad
    return resultado


class Parametros:
    """
    Almacén ordenado de parámetros entrenables.

    La inicialización sigue uniforme(-sqrt(1/fan_in), +sqrt(1/fan_in))
    para pesos y ceros para sesgos.
    """

    def __init__(self):
        self._tensores: Dict[str, Tensor] = {}

    def agregar(self, nombre: str, valores: np.ndarray) -> Tensor:
        if nombre in self._tensores:
            raise DatosInvalidosException('nombre', f"parámetro duplicado '{nombre}'")
        tensor = Tensor(np.array(valores, dtype=DTYPE), requires_grad=True, name=nombre)
        self._tensores[nombre] = tensor
        return tensor

    def uniforme(self, nombre: str, forma: Tuple[int, ...], fan_in: int,
                 rng: np.random.Generator) -> Tensor:
        limite = np.sqrt(1.0 / fan_in)
        return self.agregar(nombre, rng.uniform(-limite, limite, size=forma))

    def ceros(self, nombre: str, forma: Tuple[int, ...]) -> Tensor:
        return self.agregar(nombre, np.zeros(forma, dtype=DTYPE))

    def __getitem__(self, nombre: str) -> Tensor:
        return self._tensores[nombre]

    def __contains__(self, nombre: str) -> bool:
        return nombre in self._tensores

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensores)

    def __len__(self) -> int:
        return len(self._tensores)

    def items(self):
        return self._tensores.items()

    def numero_total(self) -> int:
        return int(sum(t.size for t in self._tensores.values()))

    def zero_grad(self):
        for tensor in self._tensores.values():
            tensor.grad = None

    def snapshot(self) -> Dict[str, np.ndarray]:
        """Copia de los valores actuales (para checkpoints o workers)"""
        return {nombre: t.values.copy() for nombre, t in self._tensores.items()}

    def cargar(self, valores: Dict[str, np.ndarray]):
        """
        Sobrescribe los valores desde un diccionario.

        Raises:
            DatosInvalidosException: Si faltan o sobran nombres
            FormaIncompatibleException: Si alguna forma no coincide
        """
        faltantes = set(self._tensores) - set(valores)
        sobrantes = set(valores) - set(self._tensores)
        if faltantes or sobrantes:
            raise DatosInvalidosException(
                'parametros',
                f"faltan {sorted(faltantes)}, sobran {sorted(sobrantes)}"
            )
        for nombre, tensor in self._tensores.items():
            nuevo = np.asarray(valores[nombre], dtype=DTYPE)
            if nuevo.shape != tensor.shape:
                raise FormaIncompatibleException(f'cargar:{nombre}', tensor.shape, nuevo.shape)
            tensor.values[...] = nuevo
