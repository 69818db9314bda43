"""
============================================
REPOSITORIO DE MÉTRICAS
============================================
CSV de métricas por episodio con pandas.
============================================
"""

import logging
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd

from exceptions import DatosInvalidosException
from models import COLUMNAS_METRICAS
from .base_repository import BaseRepository, RutaLike

logger = logging.getLogger(__name__)

NOMBRE_METRICAS = 'metrics.csv'


class MetricasRepository(BaseRepository):
    """Lectura y escritura de métricas de entrenamiento"""

    def __init__(self, directorio: RutaLike = '.'):
        super().__init__(directorio)

    def iniciar(self, ruta: RutaLike) -> Path:
        """Crea (o vacía) el archivo con solo el encabezado"""
        destino = self.ruta(ruta)
        destino.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(columns=list(COLUMNAS_METRICAS)).to_csv(destino, index=False)
        return destino

    def agregar_filas(self, ruta: RutaLike, filas: List[Dict[str, Any]]):
        """
        Agrega filas al final del CSV (escritor único, solo agrega).

        Args:
            ruta (str|Path): Archivo de métricas
            filas (List[Dict]): Filas con las columnas de métricas
        """
        if not filas:
            return
        destino = self.ruta(ruta)
        try:
            if not destino.exists():
                self.iniciar(destino)
            df = pd.DataFrame(filas, columns=list(COLUMNAS_METRICAS))
            df.to_csv(destino, mode='a', header=False, index=False)
            logger.debug(f"{len(filas)} filas agregadas a {destino}")
        except Exception as e:
            logger.error(f"Error escribiendo métricas en {destino}: {e}")
            raise

    def leer(self, ruta: RutaLike) -> pd.DataFrame:
        """
        Lee un CSV de métricas.

        Raises:
            DatosInvalidosException: Si faltan columnas
        """
        origen = self.ruta(ruta)
        try:
            df = pd.read_csv(origen)
        except Exception as e:
            logger.error(f"Error leyendo métricas {origen}: {e}")
            raise
        faltantes = set(COLUMNAS_METRICAS) - set(df.columns)
        if faltantes:
            raise DatosInvalidosException(str(origen), f"faltan columnas {sorted(faltantes)}")
        return df

    def listar_metricas(self) -> List[Path]:
        """Todos los metrics.csv bajo el directorio raíz"""
        return self.listar(NOMBRE_METRICAS, recursivo=True)

    def leer_todas(self) -> pd.DataFrame:
        """Concatena todos los CSV de métricas encontrados"""
        rutas = self.listar_metricas()
        if not rutas:
            return pd.DataFrame(columns=list(COLUMNAS_METRICAS))
        return pd.concat([self.leer(r) for r in rutas], ignore_index=True)

    def guardar_tabla(self, df: pd.DataFrame, ruta: RutaLike) -> Path:
        """Escribe una tabla derivada (resúmenes, curvas)"""
        destino = self.ruta(ruta)
        try:
            self.escribir_texto(df.to_csv(index=False), destino)
            logger.info(f"Tabla guardada: {destino} ({len(df)} filas)")
            return destino
        except Exception as e:
            logger.error(f"Error guardando tabla {destino}: {e}")
            raise
