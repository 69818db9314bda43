"""
Paquete de modelos de dominio
"""

from .mapa import (
    Pose, GridMap, LidarScan, ObservationVector, StepResult, MapEstimate,
    DESPLAZAMIENTOS, ANGULOS, OCUPADA, LIBRE
)
from .agente import (
    AgentVariant, AuxConfig, ArquitecturaConfig, Encoding, PolicyOutput,
    AuxOutputs, MemoryState, InterfaceVector, EstadoRecurrente
)
from .entrenamiento import (
    Transition, RolloutBuffer, TrainConfig, Metrics, ResultadoEvaluacion, COLUMNAS_METRICAS
)
from .run_spec import RunSpec

__all__ = [
    'Pose', 'GridMap', 'LidarScan', 'ObservationVector', 'StepResult', 'MapEstimate',
    'DESPLAZAMIENTOS', 'ANGULOS', 'OCUPADA', 'LIBRE',
    'AgentVariant', 'AuxConfig', 'ArquitecturaConfig', 'Encoding', 'PolicyOutput',
    'AuxOutputs', 'MemoryState', 'InterfaceVector', 'EstadoRecurrente',
    'Transition', 'RolloutBuffer', 'TrainConfig', 'Metrics', 'ResultadoEvaluacion',
    'COLUMNAS_METRICAS',
    'RunSpec'
]
