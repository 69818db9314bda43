"""
============================================
SERVICIO DE ENTRENAMIENTO
============================================
Actor-crítico on-policy con retornos de 30 pasos:
- recolección de rollouts con tareas auxiliares
- retornos descontados y ventajas
- pérdida total, backward y Adam por rollout
- métricas por episodio y checkpoints
============================================
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import Constants
from diffcore import Tape, AdamState, adam_step, backward, sin_cinta, ops, Tensor
from exceptions import (
    DatosInvalidosException,
    InvarianteVioladaException,
    LabException
)
from models import (
    AgentVariant, ArquitecturaConfig, GridMap, Metrics, RolloutBuffer, TrainConfig, Transition
)
from redes import (
    RedMACN, actor_critic_loss, entropia, limite_pseudo_episodio, loss_action_prediction,
    loss_reward_prediction, loss_state_prediction, modified_reward, pseudo_reward, total_loss
)
from repositories import ConfigRepository, MetricasRepository, NOMBRE_METRICAS
from .agente_service import AgenteService
from .simulador_service import SimuladorService, cargar_mundo

logger = logging.getLogger(__name__)


# ============================================
# RETORNOS Y VENTAJAS
# ============================================

def discounted_returns(rewards: Sequence[float], bootstrap: float, gamma: float = 0.95,
                       done: bool = False) -> List[float]:
    """
    R_t = r_t + γ·R_{t+1}, con R_último = r_último + γ·bootstrap·(1 − done).

    Raises:
        DatosInvalidosException: Si la lista está vacía
    """
    if len(rewards) == 0:
        raise DatosInvalidosException('rewards', "la lista de recompensas está vacía")
    siguiente = 0.0 if done else float(bootstrap)
    retornos = [0.0] * len(rewards)
    for t in range(len(rewards) - 1, -1, -1):
        siguiente = float(rewards[t]) + gamma * siguiente
        retornos[t] = siguiente
    return retornos


def advantage(returns: Sequence[float], values: Sequence[float]) -> List[float]:
    """
    Â_t = R_t − V_t (números, sin gradiente)

    Raises:
        DatosInvalidosException: Si las longitudes no coinciden
    """
    if len(returns) != len(values):
        raise DatosInvalidosException('advantage', f"longitudes {len(returns)} y {len(values)}")
    return [float(r) - float(v) for r, v in zip(returns, values)]


def muestrear_accion(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Muestreo por inversión de la acumulada (determinista dado el generador)"""
    acumulada = np.cumsum(probs)
    u = rng.random() * acumulada[-1]
    return int(min(np.searchsorted(acumulada, u, side='right'), len(probs) - 1))


# ============================================
# ROLLOUT
# ============================================

@dataclass
class GrafoRollout:
    """Tensores del rollout que participan de la pérdida"""
    log_probs: List[Tensor] = field(default_factory=list)
    values: List[Tensor] = field(default_factory=list)
    entropies: List[Tensor] = field(default_factory=list)
    loss_sp: List[Tensor] = field(default_factory=list)
    loss_rp: List[Tensor] = field(default_factory=list)
    loss_ap: List[Tensor] = field(default_factory=list)


def necesita_auxiliares(variant: AgentVariant, config: TrainConfig) -> bool:
    aux = config.aux
    return variant.use_aux and (aux.pseudo_rewards or aux.lambda_sp > 0 or aux.lambda_rp > 0 or aux.lambda_ap > 0)


def collect_rollout(red: RedMACN, sim: SimuladorService, estado, scan: np.ndarray,
                    config: TrainConfig, rng: np.random.Generator) -> RolloutBuffer:
    """
    Recolecta hasta `rollout_steps` transiciones sobre un episodio en curso.

    Debe llamarse dentro de una cinta: los tensores de política, valor,
    entropía y pérdidas auxiliares quedan en `buffer.grafo`.

    Args:
        red (RedMACN): Red del agente
        sim (SimuladorService): Sesión con episodio en curso
        estado (EstadoRecurrente): Estado recurrente al inicio del rollout
        scan (ndarray): Lectura actual
        config (TrainConfig): Configuración del entrenamiento
        rng (Generator): Generador de muestreo de acciones

    Returns:
        RolloutBuffer: Transiciones, valor de arranque, estado y lectura finales
    """
    if sim.terminado:
        raise DatosInvalidosException('episodio', "collect_rollout requiere un episodio en curso")

    aux = config.aux
    con_aux = necesita_auxiliares(red.variant, config)
    buffer = RolloutBuffer(capacidad=config.rollout_steps)
    grafo = GrafoRollout()
    encoding = red.encode(scan)

    while not buffer.lleno():
        salida, estado, encoding = red.forward(scan, estado, encoding=encoding)
        probs = salida.probs()
        accion = muestrear_accion(probs, rng)
        log_prob = ops.log(ops.tomar(salida.action_probs, accion))

        resultado, scan_siguiente = sim.step(accion)
        encoding_siguiente = red.encode(scan_siguiente)

        r_sp = r_rp = 0.0
        if con_aux:
            predicciones = red.auxiliares(encoding.phi, accion, encoding_siguiente.phi)
            l_sp = loss_state_prediction(predicciones.phi_next_pred, encoding_siguiente.phi)
            l_rp = loss_reward_prediction(predicciones.reward_pred, resultado.reward)
            l_ap = loss_action_prediction(predicciones.action_pred_probs, accion)
            grafo.loss_sp.append(l_sp)
            grafo.loss_rp.append(l_rp)
            grafo.loss_ap.append(l_ap)
            if aux.pseudo_rewards:
                r_sp = pseudo_reward(l_sp.item(), aux.eta_sp, aux.overflow_value)
                r_rp = pseudo_reward(l_rp.item(), aux.eta_rp, aux.overflow_value)

        grafo.log_probs.append(log_prob)
        grafo.values.append(salida.value)
        grafo.entropies.append(entropia(salida.action_probs))
        buffer.agregar(Transition(
            scan=np.asarray(scan.ranges if hasattr(scan, 'ranges') else scan, dtype=np.float64),
            action=accion,
            r_ext=resultado.reward,
            r_pseudo_sp=r_sp,
            r_pseudo_rp=r_rp,
            phi=encoding.phi.numpy(),
            phi_next=encoding_siguiente.phi.numpy(),
            value_estimate=salida.value.item(),
            log_prob=log_prob.item(),
            done=resultado.done,
            done_cause=resultado.done_cause
        ))

        scan, encoding = scan_siguiente, encoding_siguiente
        if resultado.done:
            break

    if not buffer.terminado:
        with sin_cinta():
            siguiente, _, _ = red.forward(scan, estado.detach(), encoding=None)
        buffer.bootstrap = siguiente.value.item()

    buffer.grafo = grafo
    buffer.estado_final = estado
    buffer.scan_final = scan
    return buffer


def _media(perdidas: List[Tensor]) -> Optional[Tensor]:
    if not perdidas:
        return None
    return ops.mean(ops.concat([ops.reshape(p, (1,)) for p in perdidas]))


# ============================================
# SERVICIO
# ============================================

class EntrenamientoService:
    """Servicio para ejecutar corridas de entrenamiento"""

    def __init__(self, agente_service: AgenteService = None,
                 metricas_repo: MetricasRepository = None,
                 config_repo: ConfigRepository = None):
        self.agente_service = agente_service or AgenteService()
        self.metricas_repo = metricas_repo or MetricasRepository()
        self.config_repo = config_repo or ConfigRepository()

    def actualizar(self, red: RedMACN, buffer: RolloutBuffer, cinta: Tape,
                   config: TrainConfig, adam: AdamState) -> dict:
        """
        Calcula la pérdida total del rollout y aplica un paso de Adam.

        Returns:
            dict: Pérdidas escalares (ac, sp, rp, ap)
        """
        variant = red.variant
        recompensas = [modified_reward(t.r_ext, t.r_pseudo_sp, t.r_pseudo_rp, variant) for t in buffer]
        retornos = discounted_returns(recompensas, buffer.bootstrap, config.gamma, buffer.terminado)
        ventajas = advantage(retornos, [t.value_estimate for t in buffer])

        grafo: GrafoRollout = buffer.grafo
        with cinta:
            perdida_ac = actor_critic_loss(grafo.log_probs, ventajas, grafo.values, retornos,
                                           grafo.entropies, config.alpha, config.beta)
            l_sp, l_rp, l_ap = _media(grafo.loss_sp), _media(grafo.loss_rp), _media(grafo.loss_ap)
            total = total_loss(perdida_ac, l_sp, l_rp, l_ap, config.aux, variant)

        grads = backward(cinta, total, red.params)
        adam_step(red.params, grads, adam)
        return {
            'loss_ac': perdida_ac.item(),
            'loss_sp': l_sp.item() if l_sp is not None else 0.0,
            'loss_rp': l_rp.item() if l_rp is not None else 0.0,
            'loss_ap': l_ap.item() if l_ap is not None else 0.0,
        }

    def train_run(self, variant_tag: str, world: str, config: TrainConfig, seed: int,
                  directorio: Optional[Path] = None, arquitectura: ArquitecturaConfig = None,
                  init: Optional[Path] = None, mapa: Optional[GridMap] = None) -> Metrics:
        """Entrena y retorna solo las métricas (ver `entrenar`)"""
        _, metrics = self.entrenar(variant_tag, world, config, seed, directorio, arquitectura, init, mapa)
        return metrics

    def entrenar(self, variant_tag: str, world: str, config: TrainConfig, seed: int,
                 directorio: Optional[Path] = None, arquitectura: ArquitecturaConfig = None,
                 init: Optional[Path] = None, mapa: Optional[GridMap] = None) -> Tuple[RedMACN, Metrics]:
        """
        Entrena una variante en un mundo.

        Cada episodio: reset → rollouts de hasta 30 pasos → pérdida total →
        backward → Adam, hasta terminar. Todo queda determinado por la semilla.

        Args:
            variant_tag (str): AC, AC_AR, MA_AC o MA_AC_AR
            world (str): Mundo de referencia
            config (TrainConfig): Configuración del entrenamiento
            seed (int): Semilla de la corrida
            directorio (Path): Si se indica, se escriben métricas y checkpoints
            arquitectura (ArquitecturaConfig): Tamaños de la red
            init (Path): Checkpoint para arranque en caliente
            mapa (GridMap): Mapa a usar en lugar de maps/<world>.txt

        Returns:
            tuple: (red entrenada, Metrics con una fila por episodio)

        Raises:
            VarianteInvalidaException, MundoDesconocidoException: Datos inválidos
            InvarianteVioladaException: Si la suma de pseudo-recompensas supera su cota
        """
        try:
            config.validar()
            red = self.agente_service.crear(variant_tag, arquitectura, seed)
            if init is not None:
                self.agente_service.cargar_en(red, Path(init))
            mapa = mapa if mapa is not None else cargar_mundo(world)
            sim = SimuladorService(mapa, episode_cap=config.episode_cap)

            adam = AdamState(lr=config.lr)
            rng_politica = np.random.default_rng(np.random.SeedSequence([seed, 1]))
            rng_entorno = np.random.default_rng(np.random.SeedSequence([seed, 2]))
            cota_pseudo = limite_pseudo_episodio(config.aux, config.episode_cap)

            ruta_metricas = None
            if directorio is not None:
                directorio = Path(directorio)
                ruta_metricas = self.metricas_repo.iniciar(directorio / NOMBRE_METRICAS)
                self.config_repo.guardar(config, directorio / 'config.txt')

            metrics = Metrics()
            logger.info(f"Entrenamiento {variant_tag} en {world}, seed={seed}, {config.episodes} episodios")

            for episodio in range(1, config.episodes + 1):
                inicio = time.perf_counter()
                scan = sim.reset(int(rng_entorno.integers(0, 2 ** 31 - 1))).ranges
                estado = red.estado_inicial()
                ext, pseudo, largo, perdidas = 0.0, 0.0, 0, []
                causa = Constants.CAUSA_EN_CURSO

                while not sim.terminado:
                    cinta = Tape()
                    with cinta:
                        buffer = collect_rollout(red, sim, estado, scan, config, rng_politica)
                    perdidas.append(self.actualizar(red, buffer, cinta, config, adam))

                    for t in buffer:
                        ext += t.r_ext
                        pseudo += t.r_pseudo_sp + t.r_pseudo_rp
                        largo += 1
                        causa = t.done_cause
                    estado = buffer.estado_final.detach()
                    scan = buffer.scan_final
                    logger.debug(f"rollout de {len(buffer)} pasos, bootstrap={buffer.bootstrap:.4f}")

                if pseudo > cota_pseudo:
                    raise InvarianteVioladaException(
                        'cota de pseudo-recompensa', f"episodio {episodio}: {pseudo} > {cota_pseudo}"
                    )

                fila = {
                    'episode': episodio,
                    'variant': variant_tag,
                    'world': world,
                    'seed': seed,
                    'ext_reward': ext,
                    'pseudo_reward': pseudo,
                    'length': largo,
                    'done_cause': causa,
                }
                for clave in ('loss_ac', 'loss_sp', 'loss_rp', 'loss_ap'):
                    fila[clave] = float(np.mean([p[clave] for p in perdidas]))
                segundos = time.perf_counter() - inicio
                metrics.agregar(fila, segundos)

                proporcion = pseudo / (abs(ext) + abs(pseudo)) if (ext or pseudo) else 0.0
                logger.info(
                    f"[{variant_tag}/{world}/{seed}] episodio {episodio}: recompensa={ext:.1f}, "
                    f"pseudo={pseudo:.2f} ({proporcion:.1%}), largo={largo}, causa={causa}, {segundos:.2f}s"
                )

                if ruta_metricas is not None:
                    self.metricas_repo.agregar_filas(ruta_metricas, [metrics.filas[-1]])
                    if episodio % config.checkpoint_every == 0:
                        self.agente_service.guardar(red, directorio / f"checkpoint_ep{episodio}.npz",
                                                    episode=episodio, world=world)

            if directorio is not None:
                self.agente_service.guardar(red, directorio / 'checkpoint.npz',
                                            episode=config.episodes, world=world)
            return red, metrics

        except LabException:
            raise
        except Exception as e:
            logger.error(f"Error en entrenar ({variant_tag}, {world}, seed={seed}): {e}")
            raise
