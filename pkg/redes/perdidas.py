"""
============================================
PÉRDIDAS Y PSEUDO-RECOMPENSAS
============================================
Pérdidas de las tareas auxiliares (estado
siguiente, recompensa, acción), pseudo-recompensas
acotadas, pérdida total y recompensa modificada.
============================================
"""

import logging
import operator
from typing import Sequence, Union

from config.settings import Constants
from diffcore import Tensor, ops
from exceptions import AccionInvalidaException, DatosInvalidosException, FormaIncompatibleException
from models import AuxConfig, AgentVariant

logger = logging.getLogger(__name__)

PISO_LOG = 1e-12

Escalar = Union[float, Tensor]


def loss_state_prediction(phi_next_pred: Tensor, phi_next: Tensor) -> Tensor:
    """½‖φ̂(s_{t+1}) − φ(s_{t+1})‖²; el objetivo no recibe gradiente"""
    objetivo = phi_next.detach() if isinstance(phi_next, Tensor) else ops.como_tensor(phi_next)
    if phi_next_pred.shape != objetivo.shape:
        raise FormaIncompatibleException('loss_state_prediction', objetivo.shape, phi_next_pred.shape)
    return ops.mul(0.5, ops.sum(ops.square(ops.sub(phi_next_pred, objetivo))))


def loss_reward_prediction(reward_pred: Tensor, reward: float) -> Tensor:
    """½(r̂ − r)²"""
    reward_pred = ops.como_tensor(reward_pred)
    if reward_pred.size != 1:
        raise FormaIncompatibleException('loss_reward_prediction', 'escalar', reward_pred.shape)
    return ops.mul(0.5, ops.sum(ops.square(ops.sub(reward_pred, float(reward)))))


def loss_action_prediction(action_pred_probs: Tensor, executed_action: int) -> Tensor:
    """
    −log p(acción ejecutada) con piso 1e-12.

    Raises:
        AccionInvalidaException: Si el índice no es una acción
    """
    n = action_pred_probs.size
    try:
        indice = operator.index(executed_action)
    except TypeError:
        raise AccionInvalidaException(executed_action)
    if isinstance(executed_action, bool) or not 0 <= indice < n:
        raise AccionInvalidaException(executed_action)
    return ops.neg(ops.log(ops.tomar(action_pred_probs, indice), PISO_LOG))


def pseudo_reward(loss: float, eta: float, overflow_value: float = 1.5) -> float:
    """
    Pseudo-recompensa acotada: la pérdida si −η ≤ pérdida ≤ η, si no overflow_value.

    Raises:
        DatosInvalidosException: Si eta <= 0
    """
    if eta <= 0:
        raise DatosInvalidosException('eta', f"debe ser > 0, se recibió {eta}")
    loss = float(loss)
    if -eta <= loss <= eta:
        return loss
    return float(overflow_value)


def total_loss(ac_loss: Escalar, loss_sp: Escalar, loss_rp: Escalar, loss_ap: Escalar,
               config: AuxConfig, variant: AgentVariant = None) -> Tensor:
    """
    L = L_AC + λ_SP·L_SP + λ_RP·L_RP + λ_AP·L_AP.

    En variantes sin tareas auxiliares todos los λ son cero.
    """
    total = ops.como_tensor(ac_loss)
    if variant is not None and not variant.use_aux:
        return total
    for lam, perdida in ((config.lambda_sp, loss_sp), (config.lambda_rp, loss_rp),
                         (config.lambda_ap, loss_ap)):
        if lam == 0.0 or perdida is None:
            continue
        total = ops.add(total, ops.mul(lam, perdida))
    return total


def modified_reward(r_ext: float, r_sp_pseudo: float, r_rp_pseudo: float,
                    variant: AgentVariant) -> float:
    """r_ext + r_SP + r_RP en variantes auxiliares; r_ext en las demás"""
    if not variant.use_aux:
        return float(r_ext)
    return float(r_ext) + float(r_sp_pseudo) + float(r_rp_pseudo)


def entropia(probs: Tensor) -> Tensor:
    """S[π] = −Σ p log p"""
    return ops.neg(ops.sum(ops.mul(probs, ops.log(probs, PISO_LOG))))


def actor_critic_loss(log_probs: Sequence[Tensor], advantages: Sequence[float],
                      values: Sequence[Tensor], returns: Sequence[float],
                      entropies: Sequence[Tensor], alpha: float = 0.5, beta: float = 0.01) -> Tensor:
    """
    Objetivo actor-crítico negado, promediado sobre el buffer:
    mean[−log π(a_t)·Â_t + α(V_t − R_t)² − β·S_t]

    Las ventajas son números: no hay gradiente hacia V por el término de política.

    Raises:
        DatosInvalidosException: Si las longitudes no coinciden o están vacías
    """
    n = len(log_probs)
    longitudes = {n, len(advantages), len(values), len(returns), len(entropies)}
    if len(longitudes) != 1 or n == 0:
        raise DatosInvalidosException('actor_critic_loss', f"longitudes distintas o vacías: {sorted(longitudes)}")

    terminos = []
    for lp, adv, v, r, s in zip(log_probs, advantages, values, returns, entropies):
        politica = ops.mul(ops.reshape(lp, ()), -float(adv))
        critico = ops.mul(alpha, ops.square(ops.sub(ops.reshape(v, ()), float(r))))
        termino = ops.sub(ops.add(politica, critico), ops.mul(beta, ops.reshape(s, ())))
        terminos.append(ops.reshape(termino, (1,)))
    return ops.mean(ops.concat(terminos))


def limite_pseudo_episodio(config: AuxConfig, episode_cap: int = Constants.LIMITE_EPISODIO) -> float:
    """Cota dura de la suma de pseudo-recompensas en un episodio"""
    return 2.0 * max(config.eta_sp, config.eta_rp, config.overflow_value) * episode_cap
