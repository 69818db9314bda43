"""
============================================
REPOSITORIO DE CONFIGURACIÓN DE ENTRENAMIENTO
============================================
Archivos planos clave=valor que reflejan los
campos de TrainConfig, leídos con python-dotenv.
============================================
"""

import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, Optional

from dotenv import dotenv_values

from exceptions import ConfiguracionInvalidaException
from models import TrainConfig, AuxConfig
from .base_repository import BaseRepository, RutaLike

logger = logging.getLogger(__name__)

CLAVES_FLOAT = ('gamma', 'lr', 'alpha', 'beta')
CLAVES_INT = ('episodes', 'episode_cap', 'eval_episodes', 'rollout_steps', 'checkpoint_every')
CLAVES_AUX_FLOAT = ('eta_sp', 'eta_rp', 'lambda_sp', 'lambda_rp', 'lambda_ap', 'overflow_value')
VERDADEROS = ('1', 'true', 'yes', 'si', 'sí', 'on')
FALSOS = ('0', 'false', 'no', 'off')


def parsear_seeds(texto: str) -> tuple:
    """'1,2,3' -> (1, 2, 3)"""
    partes = [p.strip() for p in str(texto).split(',') if p.strip()]
    return tuple(int(p) for p in partes)


def _convertir(clave: str, valor: Optional[str], tipo):
    if valor is None:
        raise ConfiguracionInvalidaException(clave, "valor vacío")
    try:
        return tipo(valor)
    except (TypeError, ValueError):
        raise ConfiguracionInvalidaException(clave, f"no se puede interpretar {valor!r}")


def config_desde_dict(valores: Dict[str, Optional[str]], base: TrainConfig = None) -> TrainConfig:
    """
    Aplica pares clave=valor sobre una configuración base.

    Raises:
        ConfiguracionInvalidaException: Clave desconocida o valor inválido
    """
    config = base or TrainConfig()
    campos, campos_aux = {}, {}

    for clave, valor in valores.items():
        clave = clave.strip().lower()
        if clave in CLAVES_FLOAT:
            campos[clave] = _convertir(clave, valor, float)
        elif clave in CLAVES_INT:
            campos[clave] = _convertir(clave, valor, int)
        elif clave in CLAVES_AUX_FLOAT:
            campos_aux[clave] = _convertir(clave, valor, float)
        elif clave == 'seeds':
            campos['seeds'] = _convertir(clave, valor, parsear_seeds)
        elif clave == 'pseudo_rewards':
            texto = (valor or '').strip().lower()
            if texto in VERDADEROS:
                campos_aux['pseudo_rewards'] = True
            elif texto in FALSOS:
                campos_aux['pseudo_rewards'] = False
            else:
                raise ConfiguracionInvalidaException(clave, f"se esperaba true/false, se recibió {valor!r}")
        else:
            raise ConfiguracionInvalidaException(clave, "clave desconocida")

    aux = replace(config.aux, **campos_aux) if campos_aux else config.aux
    return replace(config, aux=aux, **campos)


class ConfigRepository(BaseRepository):
    """Lectura y escritura de configuraciones de entrenamiento"""

    def __init__(self, directorio: RutaLike = '.'):
        super().__init__(directorio)

    def leer(self, ruta: RutaLike, base: TrainConfig = None) -> TrainConfig:
        """
        Lee un archivo clave=valor.

        Raises:
            ConfiguracionInvalidaException: Si el archivo no existe o es inválido
        """
        origen = self.ruta(ruta)
        if not origen.exists():
            raise ConfiguracionInvalidaException(str(origen), "el archivo no existe")
        valores = dotenv_values(origen)
        config = config_desde_dict(valores, base)
        logger.info(f"Configuración leída de {origen}: {len(valores)} claves")
        return config

    def guardar(self, config: TrainConfig, ruta: RutaLike) -> Path:
        """Escribe la configuración completa, una clave por línea"""
        aux: AuxConfig = config.aux
        lineas = [f"{c}={getattr(config, c)!r}" for c in CLAVES_FLOAT]
        lineas += [f"{c}={getattr(config, c)}" for c in CLAVES_INT]
        lineas.append(f"seeds={','.join(str(s) for s in config.seeds)}")
        lineas += [f"{c}={getattr(aux, c)!r}" for c in CLAVES_AUX_FLOAT]
        lineas.append(f"pseudo_rewards={'true' if aux.pseudo_rewards else 'false'}")
        return self.escribir_texto('\n'.join(lineas) + '\n', Path(ruta))
