"""
============================================
SERVICIO DE EVALUACIÓN
============================================
Rollouts con acción voraz (argmax de π, primer
índice en empates) sobre un mundo, para redes
entrenadas o cualquier política con `actuar`.
============================================
"""

import logging
from pathlib import Path
from typing import Any, Optional, Protocol, Tuple, Union

import numpy as np

from config.settings import Constants
from diffcore import sin_cinta
from exceptions import DatosInvalidosException, LabException
from models import GridMap, ResultadoEvaluacion
from redes import RedMACN
from .agente_service import AgenteService
from .simulador_service import SimuladorService, cargar_mundo

logger = logging.getLogger(__name__)


class Politica(Protocol):
    """Cualquier agente evaluable"""

    def estado_inicial(self) -> Any:
        ...

    def actuar(self, scan: np.ndarray, estado: Any) -> Tuple[int, Any]:
        ...


class PoliticaVoraz:
    """Adapta una RedMACN al protocolo de evaluación con acción argmax"""

    def __init__(self, red: RedMACN):
        self.red = red

    def estado_inicial(self):
        return self.red.estado_inicial()

    def actuar(self, scan: np.ndarray, estado):
        with sin_cinta():
            salida, estado, _ = self.red.forward(scan, estado)
        return int(np.argmax(salida.probs())), estado


class EvaluacionService:
    """Servicio para evaluar agentes"""

    def __init__(self, agente_service: AgenteService = None):
        self.agente_service = agente_service or AgenteService()

    def evaluate(self, agente: Union[Politica, RedMACN, str, Path], world: str,
                 episodes: int = 500, seed: int = 0, episode_cap: int = Constants.LIMITE_EPISODIO,
                 mapa: Optional[GridMap] = None, variante: Optional[str] = None,
                 forzar_obstaculo: Optional[bool] = None) -> ResultadoEvaluacion:
        """
        Evalúa un agente con acciones voraces.

        Args:
            agente: Ruta de checkpoint, RedMACN o política con `actuar`
            world (str): Mundo de referencia
            episodes (int): Número de episodios
            seed (int): Semilla de los sorteos del entorno
            episode_cap (int): Largo máximo de episodio
            mapa (GridMap): Mapa a usar en lugar de maps/<world>.txt
            variante (str): Variante esperada del checkpoint
            forzar_obstaculo (bool): Fija la presencia del obstáculo opcional en
                todos los episodios (None conserva el sorteo con p=0.4)

        Returns:
            ResultadoEvaluacion: Recompensa media, tasa de meta, largo medio y
                fracción de obstáculos descubiertos

        Raises:
            CheckpointIncompatibleException: Si el checkpoint no corresponde
        """
        if episodes < 1:
            raise DatosInvalidosException('episodes', "debe ser >= 1")
        try:
            if isinstance(agente, (str, Path)):
                agente = self.agente_service.cargar(Path(agente), variante)
            politica = PoliticaVoraz(agente) if isinstance(agente, RedMACN) else agente

            mapa = mapa if mapa is not None else cargar_mundo(world)
            sim = SimuladorService(mapa, episode_cap=episode_cap)
            rng_entorno = np.random.default_rng(np.random.SeedSequence([seed, 3]))

            recompensas, largos, descubiertos = [], [], []
            causas = {causa: 0 for causa in Constants.CAUSAS}

            for episodio in range(episodes):
                scan = sim.reset(int(rng_entorno.integers(0, 2 ** 31 - 1)), forzar_obstaculo).ranges
                estado = politica.estado_inicial()
                total = 0.0
                resultado = None
                while not sim.terminado:
                    accion, estado = politica.actuar(scan, estado)
                    resultado, lectura = sim.step(accion)
                    scan = lectura.ranges
                    total += resultado.reward

                recompensas.append(total)
                largos.append(sim.paso)
                descubiertos.append(sim.fraccion_descubierta())
                causas[resultado.done_cause] += 1
                if logger.isEnabledFor(logging.DEBUG):
                    logger.debug(f"episodio {episodio}: {total:.1f} ({resultado.done_cause})\n{sim.render()}")

            evaluacion = ResultadoEvaluacion(
                mean_reward=float(np.mean(recompensas)),
                goal_rate=causas[Constants.CAUSA_META] / episodes,
                mean_length=float(np.mean(largos)),
                discovery_fraction=float(np.mean(descubiertos)),
                episodes=episodes,
                causas=causas,
                recompensas=recompensas
            )
            logger.info(
                f"Evaluación en {world}: recompensa media={evaluacion.mean_reward:.2f}, "
                f"meta={evaluacion.goal_rate:.1%}, largo medio={evaluacion.mean_length:.1f}"
            )
            return evaluacion

        except LabException:
            raise
        except Exception as e:
            logger.error(f"Error evaluando en {world}: {e}")
            raise
