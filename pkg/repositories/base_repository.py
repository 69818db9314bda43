"""
============================================
REPOSITORIO BASE
============================================
Clase base con operaciones comunes sobre archivos
para todos los repositorios: rutas, lectura,
escritura y listado dentro de un directorio raíz.
============================================
"""

import logging
import os
from pathlib import Path
from typing import List, Union

logger = logging.getLogger(__name__)

RutaLike = Union[str, Path]


class BaseRepository:
    """
    Clase base para todos los repositorios.
    Proporciona acceso a archivos relativo a un directorio raíz.
    """

    def __init__(self, directorio: RutaLike):
        """
        Inicializa el repositorio base.

        Args:
            directorio (str|Path): Directorio raíz del repositorio
        """
        self.directorio = Path(directorio)

    def ruta(self, *partes: RutaLike) -> Path:
        """
        Resuelve una ruta relativa al directorio raíz.
        Las rutas absolutas se respetan tal cual.
        """
        if partes and Path(partes[0]).is_absolute():
            return Path(*partes)
        return self.directorio.joinpath(*partes)

    def leer_texto(self, *partes: RutaLike) -> str:
        """
        Lee un archivo de texto UTF-8.

        Returns:
            str: Contenido del archivo

        Raises:
            FileNotFoundError: Si el archivo no existe
        """
        ruta = self.ruta(*partes)
        try:
            contenido = ruta.read_text(encoding='utf-8')
            logger.debug(f"leer_texto: {ruta} ({len(contenido)} caracteres)")
            return contenido
        except FileNotFoundError:
            logger.warning(f"leer_texto: {ruta} no existe")
            raise
        except Exception as e:
            logger.error(f"Error leyendo {ruta}: {e}")
            raise

    def escribir_texto(self, contenido: str, *partes: RutaLike) -> Path:
        """
        Escribe un archivo de texto de forma atómica (archivo temporal + rename).

        Returns:
            Path: Ruta escrita
        """
        ruta = self.ruta(*partes)
        try:
            ruta.parent.mkdir(parents=True, exist_ok=True)
            temporal = ruta.with_name(ruta.name + '.tmp')
            temporal.write_text(contenido, encoding='utf-8')
            os.replace(temporal, ruta)
            logger.debug(f"escribir_texto: {ruta}")
            return ruta
        except Exception as e:
            logger.error(f"Error escribiendo {ruta}: {e}")
            raise

    def listar(self, patron: str = '*', recursivo: bool = False) -> List[Path]:
        """
        Lista archivos del directorio raíz en orden estable.

        Args:
            patron (str): Patrón glob
            recursivo (bool): Buscar en subdirectorios
        """
        if not self.directorio.exists():
            logger.warning(f"listar: {self.directorio} no existe")
            return []
        encontrados = self.directorio.rglob(patron) if recursivo else self.directorio.glob(patron)
        resultado = sorted(p for p in encontrados if p.is_file())
        logger.debug(f"listar {patron} en {self.directorio}: {len(resultado)} archivos")
        return resultado
