"""
Paquete de repositorios - Capa de acceso a archivos
"""

from .base_repository import BaseRepository
from .mapa_repository import MapaRepository
from .checkpoint_repository import CheckpointRepository
from .metricas_repository import MetricasRepository, NOMBRE_METRICAS
from .config_repository import ConfigRepository, config_desde_dict, parsear_seeds

__all__ = [
    'BaseRepository',
    'MapaRepository',
    'CheckpointRepository',
    'MetricasRepository',
    'NOMBRE_METRICAS',
    'ConfigRepository',
    'config_desde_dict',
    'parsear_seeds'
]
