"""
============================================
REPOSITORIO DE MAPAS
============================================
"""

import logging
from pathlib import Path

from config.settings import AppConfig, Constants
from exceptions import MundoDesconocidoException
from .base_repository import BaseRepository, RutaLike

logger = logging.getLogger(__name__)


class MapaRepository(BaseRepository):
    """Acceso a los archivos de mapa (maps/<mundo>.txt)"""

    def __init__(self, directorio: RutaLike = None):
        super().__init__(directorio or AppConfig.MAPS_DIR)

    def ruta_mundo(self, mundo: str) -> Path:
        """
        Raises:
            MundoDesconocidoException: Si el mundo no es de referencia
        """
        if mundo not in Constants.MUNDOS:
            raise MundoDesconocidoException(mundo, Constants.MUNDOS)
        return self.ruta(f"{mundo}.txt")

    def leer_mundo(self, mundo: str) -> str:
        """
        Lee el texto del mapa de un mundo de referencia.

        Args:
            mundo (str): 'circuit', 'circuit2' u 'office'

        Returns:
            str: Texto del mapa
        """
        ruta = self.ruta_mundo(mundo)
        try:
            return self.leer_texto(ruta)
        except Exception as e:
            logger.error(f"Error leyendo el mapa de '{mundo}': {e}")
            raise
