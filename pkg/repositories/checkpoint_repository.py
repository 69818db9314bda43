"""
============================================
REPOSITORIO DE CHECKPOINTS
============================================
Guarda parámetros en .npz: una entrada
'param/<nombre>' por tensor y un encabezado JSON
con versión, variante y arquitectura.
============================================
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np

from config.settings import Constants
from exceptions import CheckpointIncompatibleException
from .base_repository import BaseRepository, RutaLike

logger = logging.getLogger(__name__)

PREFIJO_PARAM = 'param/'
CLAVE_META = '__meta__'


class CheckpointRepository(BaseRepository):
    """Persistencia de parámetros de la red"""

    def __init__(self, directorio: RutaLike = '.'):
        super().__init__(directorio)

    def guardar(self, ruta: RutaLike, parametros: Dict[str, np.ndarray], meta: Dict[str, Any]) -> Path:
        """
        Escribe un checkpoint.

        Args:
            ruta (str|Path): Archivo destino (.npz)
            parametros (Dict[str, ndarray]): Valores por nombre
            meta (Dict): Encabezado (se agrega la versión del formato)

        Returns:
            Path: Ruta escrita
        """
        destino = self.ruta(ruta)
        encabezado = dict(meta)
        encabezado['version'] = Constants.VERSION_CHECKPOINT
        try:
            destino.parent.mkdir(parents=True, exist_ok=True)
            temporal = destino.with_name(destino.name + '.tmp.npz')
            arrays = {PREFIJO_PARAM + nombre: np.asarray(v, dtype=np.float64)
                      for nombre, v in parametros.items()}
            arrays[CLAVE_META] = np.array(json.dumps(encabezado, sort_keys=True))
            np.savez(temporal, **arrays)
            os.replace(temporal, destino)
            logger.info(f"Checkpoint guardado: {destino} ({len(parametros)} tensores)")
            return destino
        except Exception as e:
            logger.error(f"Error guardando checkpoint {destino}: {e}")
            raise

    def cargar(self, ruta: RutaLike) -> Tuple[Dict[str, np.ndarray], Dict[str, Any]]:
        """
        Lee un checkpoint.

        Returns:
            tuple: (parámetros por nombre, encabezado)

        Raises:
            CheckpointIncompatibleException: Si el archivo no existe, está
                dañado o su versión no coincide
        """
        origen = self.ruta(ruta)
        if not origen.exists():
            raise CheckpointIncompatibleException(str(origen), "el archivo no existe")
        try:
            with np.load(origen, allow_pickle=False) as datos:
                if CLAVE_META not in datos.files:
                    raise CheckpointIncompatibleException(str(origen), "falta el encabezado")
                meta = json.loads(str(datos[CLAVE_META]))
                parametros = {clave[len(PREFIJO_PARAM):]: datos[clave].copy()
                              for clave in datos.files if clave.startswith(PREFIJO_PARAM)}
        except CheckpointIncompatibleException:
            raise
        except Exception as e:
            logger.error(f"Error leyendo checkpoint {origen}: {e}")
            raise CheckpointIncompatibleException(str(origen), f"archivo ilegible: {e}")

        if meta.get('version') != Constants.VERSION_CHECKPOINT:
            raise CheckpointIncompatibleException(
                str(origen), f"versión {meta.get('version')}, se esperaba {Constants.VERSION_CHECKPOINT}"
            )
        logger.info(f"Checkpoint cargado: {origen} (variante {meta.get('variant')})")
        return parametros, meta
