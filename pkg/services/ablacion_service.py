"""
============================================
SERVICIO DE ABLACIÓN
============================================
Ejecuta las cuatro variantes × semillas en un mundo
y resume la recompensa de los últimos episodios
(media ± desviación entre semillas).
============================================
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from config.settings import AppConfig, Constants, TrainDefaults
from exceptions import DatosInvalidosException, LabException
from models import ArquitecturaConfig, GridMap, TrainConfig
from repositories import MetricasRepository
from .entrenamiento_service import EntrenamientoService

logger = logging.getLogger(__name__)

COLUMNAS_RESUMEN = ['variant', 'n_seeds', 'mean', 'std']


def _ejecutar_tarea(tarea: Tuple) -> List[dict]:
    """Una corrida independiente (nivel de módulo para el pool de procesos)"""
    variante, world, config, seed, directorio, arquitectura, mapa = tarea
    metrics = EntrenamientoService().train_run(variante, world, config, seed, directorio,
                                               arquitectura, mapa=mapa)
    return metrics.filas


def resumir(metricas: pd.DataFrame, ventana: int = TrainDefaults.VENTANA_RESUMEN) -> pd.DataFrame:
    """
    Media por semilla de los últimos `ventana` episodios, luego media y
    desviación (ddof=0) entre semillas, una fila por variante.
    """
    filas = []
    for variante in Constants.VARIANTES:
        datos = metricas[metricas['variant'] == variante]
        if datos.empty:
            continue
        por_semilla = (datos.sort_values('episode')
                       .groupby('seed')['ext_reward']
                       .apply(lambda s: s.tail(ventana).mean()))
        filas.append({
            'variant': variante,
            'n_seeds': int(len(por_semilla)),
            'mean': float(por_semilla.mean()),
            'std': float(por_semilla.std(ddof=0)),
        })
    return pd.DataFrame(filas, columns=COLUMNAS_RESUMEN)


class AblacionService:
    """Servicio para el experimento de ablación"""

    def __init__(self, metricas_repo: MetricasRepository = None):
        self.metricas_repo = metricas_repo or MetricasRepository()

    def ejecutar(self, world: str, seeds: Sequence[int], config: TrainConfig, out: Path,
                 arquitectura: ArquitecturaConfig = None, mapa: Optional[GridMap] = None,
                 workers: Optional[int] = None) -> pd.DataFrame:
        """
        Entrena todas las variantes con todas las semillas y escribe
        resumen_<world>.csv.

        Args:
            world (str): Mundo de referencia
            seeds (Sequence[int]): Semillas (no vacía)
            config (TrainConfig): Configuración común
            out (Path): Directorio de salida
            arquitectura (ArquitecturaConfig): Tamaños de la red
            mapa (GridMap): Mapa a usar en lugar de maps/<world>.txt
            workers (int): Procesos en paralelo (por defecto MACN_LAB_THREADS)

        Returns:
            DataFrame: variant, n_seeds, mean, std

        Raises:
            DatosInvalidosException: Si no hay semillas
        """
        if not seeds:
            raise DatosInvalidosException('seeds', "la lista de semillas está vacía")
        workers = workers or AppConfig.get_threads()
        out = Path(out)
        tareas = [
            (variante, world, config, seed, out / world / variante / str(seed), arquitectura, mapa)
            for variante in Constants.VARIANTES
            for seed in seeds
        ]
        logger.info(f"Ablación en {world}: {len(tareas)} corridas con {workers} worker(s)")

        try:
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    resultados = list(pool.map(_ejecutar_tarea, tareas))
            else:
                resultados = [_ejecutar_tarea(t) for t in tareas]

            metricas = pd.DataFrame([fila for filas in resultados for fila in filas])
            resumen = resumir(metricas)
            self.metricas_repo.guardar_tabla(resumen, out / f"resumen_{world}.csv")
            return resumen

        except LabException:
            raise
        except Exception as e:
            logger.error(f"Error en la ablación de {world}: {e}")
            raise
