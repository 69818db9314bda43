"""
============================================
MODELOS DEL ENTRENAMIENTO
============================================
Transiciones, buffer de rollout, configuración
del entrenamiento y registro de métricas.
============================================
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.settings import TrainDefaults
from exceptions import DatosInvalidosException
from .agente import AuxConfig

COLUMNAS_METRICAS = (
    'episode', 'variant', 'world', 'seed', 'ext_reward', 'pseudo_reward',
    'length', 'done_cause', 'loss_ac', 'loss_sp', 'loss_rp', 'loss_ap'
)


@dataclass
class Transition:
    scan: np.ndarray
    action: int
    r_ext: float
    r_pseudo_sp: float
    r_pseudo_rp: float
    phi: np.ndarray
    phi_next: np.ndarray
    value_estimate: float
    log_prob: float
    done: bool
    done_cause: str = 'running'


@dataclass
class RolloutBuffer:
    """Hasta `capacidad` transiciones consecutivas y el valor de arranque"""
    capacidad: int = TrainDefaults.ROLLOUT_STEPS
    transiciones: List[Transition] = field(default_factory=list)
    bootstrap: float = 0.0
    # Tensores registrados en la cinta del rollout (log π, V, S, pérdidas auxiliares)
    grafo: Any = None
    estado_final: Any = None
    scan_final: Optional[np.ndarray] = None

    def agregar(self, transicion: Transition):
        if self.lleno():
            raise DatosInvalidosException('rollout', f"buffer lleno ({self.capacidad})")
        self.transiciones.append(transicion)

    def lleno(self) -> bool:
        return len(self.transiciones) >= self.capacidad

    @property
    def terminado(self) -> bool:
        return bool(self.transiciones) and self.transiciones[-1].done

    def __len__(self):
        return len(self.transiciones)

    def __iter__(self):
        return iter(self.transiciones)


@dataclass
class TrainConfig:
    gamma: float = TrainDefaults.GAMMA
    lr: float = TrainDefaults.LR
    alpha: float = TrainDefaults.ALPHA
    beta: float = TrainDefaults.BETA
    aux: AuxConfig = field(default_factory=AuxConfig)
    episodes: int = TrainDefaults.EPISODES
    episode_cap: int = TrainDefaults.EPISODE_CAP
    seeds: Tuple[int, ...] = (0,)
    eval_episodes: int = TrainDefaults.EVAL_EPISODES
    rollout_steps: int = TrainDefaults.ROLLOUT_STEPS
    checkpoint_every: int = TrainDefaults.CHECKPOINT_EVERY

    def validar(self):
        """
        Raises:
            DatosInvalidosException: Si algún valor está fuera de rango
        """
        if not 0.0 < self.gamma <= 1.0:
            raise DatosInvalidosException('gamma', "debe estar en (0, 1]")
        if self.alpha < 0 or self.beta < 0:
            raise DatosInvalidosException('alpha/beta', "deben ser >= 0")
        if self.lr <= 0:
            raise DatosInvalidosException('lr', "debe ser > 0")
        for nombre in ('episodes', 'episode_cap', 'eval_episodes', 'rollout_steps', 'checkpoint_every'):
            if getattr(self, nombre) < 1:
                raise DatosInvalidosException(nombre, "debe ser >= 1")
        self.aux.validar()


@dataclass
class Metrics:
    """Registro de métricas, una fila por episodio, solo se agrega"""
    filas: List[Dict[str, Any]] = field(default_factory=list)
    segundos: List[float] = field(default_factory=list)

    def agregar(self, fila: Dict[str, Any], segundos: float = 0.0):
        faltantes = set(COLUMNAS_METRICAS) - set(fila)
        if faltantes:
            raise DatosInvalidosException('metricas', f"faltan columnas {sorted(faltantes)}")
        self.filas.append({c: fila[c] for c in COLUMNAS_METRICAS})
        self.segundos.append(segundos)

    def __len__(self):
        return len(self.filas)

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(self.filas, columns=list(COLUMNAS_METRICAS))


@dataclass
class ResultadoEvaluacion:
    mean_reward: float
    goal_rate: float
    mean_length: float
    discovery_fraction: float
    episodes: int
    causas: Dict[str, int] = field(default_factory=dict)
    recompensas: Optional[List[float]] = None
