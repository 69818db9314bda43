"""
Paquete de servicios - Capa de lógica del laboratorio
"""

from .simulador_service import SimuladorService, cargar_mundo
from .agente_service import AgenteService
from .entrenamiento_service import EntrenamientoService
from .evaluacion_service import EvaluacionService, PoliticaVoraz
from .ablacion_service import AblacionService, resumir
from .graficos_service import GraficosService

__all__ = [
    'SimuladorService',
    'cargar_mundo',
    'AgenteService',
    'EntrenamientoService',
    'EvaluacionService',
    'PoliticaVoraz',
    'AblacionService',
    'resumir',
    'GraficosService'
]
