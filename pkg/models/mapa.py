"""
============================================
MODELOS DEL SIMULADOR
============================================
Tipos de valor del mundo en grilla: mapa, pose,
lectura lidar, observación, resultado de paso y
estimación del mapa.
============================================
"""

from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

import numpy as np

from config.settings import Constants
from exceptions import DatosInvalidosException

Celda = Tuple[int, int]

# Desplazamiento (dx, dy) por orientación; y crece hacia abajo
DESPLAZAMIENTOS = {
    'N': (0, -1),
    'E': (1, 0),
    'S': (0, 1),
    'W': (-1, 0),
}

# Ángulo de cada orientación en radianes (sentido matemático con y hacia abajo)
ANGULOS = {
    'E': 0.0,
    'S': np.pi / 2,
    'W': np.pi,
    'N': -np.pi / 2,
}

OCUPADA = -1.0
LIBRE = 0.0


@dataclass(frozen=True)
class Pose:
    """Posición en celdas y orientación del robot"""
    x: int
    y: int
    heading: str

    def __post_init__(self):
        if self.heading not in Constants.ORIENTACIONES:
            raise DatosInvalidosException('heading', f"debe ser una de {Constants.ORIENTACIONES}")

    @property
    def celda(self) -> Celda:
        return (self.x, self.y)


@dataclass(frozen=True, eq=False)
class GridMap:
    """
    Mapa oculto m ∈ {-1, 0}ⁿ con región meta, spawn y celdas opcionales.

    `occupancy` es un array [alto, ancho] con -1 (ocupada) o 0 (libre).
    Las celdas se indexan en orden fila-mayor: s = y * width + x.
    """
    width: int
    height: int
    occupancy: np.ndarray
    goal_region: FrozenSet[Celda]
    spawn: Pose
    optional_obstacle: FrozenSet[Celda] = frozenset()
    world: Optional[str] = None
    obstacle_present: bool = False

    @property
    def n_celdas(self) -> int:
        return self.width * self.height

    def indice(self, x: int, y: int) -> int:
        return y * self.width + x

    def en_limites(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def ocupada(self, x: int, y: int) -> bool:
        """Fuera de los límites cuenta como ocupada"""
        if not self.en_limites(x, y):
            return True
        return self.occupancy[y, x] < 0

    def labels(self) -> np.ndarray:
        """Vector m de longitud n"""
        return self.occupancy.reshape(-1).copy()

    def es_meta(self, x: int, y: int) -> bool:
        return (x, y) in self.goal_region


@dataclass(frozen=True)
class LidarScan:
    """Distancias en celdas de los 100 haces, en (0, max_range]"""
    ranges: np.ndarray
    beam_angles: np.ndarray

    def __len__(self):
        return len(self.ranges)


@dataclass(frozen=True)
class ObservationVector:
    """z = H(s)m: etiqueta de las celdas visibles, 0 en el resto"""
    z: np.ndarray


@dataclass(frozen=True)
class StepResult:
    next_pose: Pose
    reward: float
    done: bool
    done_cause: str

    def __post_init__(self):
        if self.done_cause not in Constants.CAUSAS:
            raise DatosInvalidosException('done_cause', f"debe ser una de {Constants.CAUSAS}")
        if self.done != (self.done_cause != Constants.CAUSA_EN_CURSO):
            raise DatosInvalidosException('done', "done debe coincidir con done_cause != running")


@dataclass
class MapEstimate:
    """Estimación m̂ = max(Σ z, -1) acumulada durante el episodio"""
    m_hat: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def vacio(cls, n: int) -> 'MapEstimate':
        return cls(np.zeros(n, dtype=np.float64))

    def celdas_ocupadas(self) -> int:
        return int((self.m_hat < 0).sum())
