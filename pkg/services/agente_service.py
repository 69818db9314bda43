"""
============================================
SERVICIO DEL AGENTE
============================================
Creación de redes por variante y persistencia
de sus parámetros en checkpoints.
============================================
"""

import logging
from pathlib import Path
from typing import Optional

from config.settings import Constants
from exceptions import CheckpointIncompatibleException, LabException
from models import AgentVariant, ArquitecturaConfig
from redes import RedMACN
from repositories import CheckpointRepository

logger = logging.getLogger(__name__)


class AgenteService:
    """Servicio para crear, guardar y cargar agentes"""

    def __init__(self, checkpoint_repo: CheckpointRepository = None):
        self.checkpoint_repo = checkpoint_repo or CheckpointRepository()

    def crear(self, variant_tag: str, arquitectura: ArquitecturaConfig = None, seed: int = 0) -> RedMACN:
        """
        Crea una red con parámetros iniciales deterministas.

        Raises:
            VarianteInvalidaException: Si la etiqueta no existe
        """
        variant = AgentVariant.desde_tag(variant_tag)
        return RedMACN(variant, arquitectura, seed)

    def guardar(self, red: RedMACN, ruta: Path, **extra) -> Path:
        meta = red.meta()
        meta.update(extra)
        return self.checkpoint_repo.guardar(ruta, red.params.snapshot(), meta)

    def cargar(self, ruta: Path, variante_esperada: Optional[str] = None) -> RedMACN:
        """
        Reconstruye una red desde un checkpoint.

        Args:
            ruta (Path): Archivo .npz
            variante_esperada (str): Si se indica, debe coincidir con la del archivo

        Returns:
            RedMACN: Red con los parámetros cargados

        Raises:
            CheckpointIncompatibleException: Variante distinta o parámetros incompatibles
        """
        parametros, meta = self.checkpoint_repo.cargar(ruta)
        tag = meta.get('variant')
        if tag not in Constants.VARIANTES:
            raise CheckpointIncompatibleException(str(ruta), f"variante desconocida {tag!r}")
        if variante_esperada is not None and tag != variante_esperada:
            raise CheckpointIncompatibleException(
                str(ruta), f"variante {tag}, se esperaba {variante_esperada}"
            )
        arquitectura = ArquitecturaConfig.desde_dict(meta.get('arquitectura', {}))
        red = RedMACN(AgentVariant.desde_tag(tag), arquitectura, int(meta.get('seed', 0)))
        self._volcar(red, parametros, ruta)
        return red

    def cargar_en(self, red: RedMACN, ruta: Path) -> RedMACN:
        """
        Sobrescribe los parámetros de una red existente (arranque en caliente).

        Raises:
            CheckpointIncompatibleException: Si la variante o la arquitectura no coinciden
        """
        parametros, meta = self.checkpoint_repo.cargar(ruta)
        if meta.get('variant') != red.variant.tag:
            raise CheckpointIncompatibleException(
                str(ruta), f"variante {meta.get('variant')}, se esperaba {red.variant.tag}"
            )
        if meta.get('arquitectura') != red.arquitectura.a_dict():
            raise CheckpointIncompatibleException(str(ruta), "la arquitectura no coincide")
        self._volcar(red, parametros, ruta)
        logger.info(f"Arranque en caliente desde {ruta}")
        return red

    def _volcar(self, red: RedMACN, parametros: dict, ruta: Path):
        try:
            red.params.cargar(parametros)
        except LabException as e:
            raise CheckpointIncompatibleException(str(ruta), e.message)
