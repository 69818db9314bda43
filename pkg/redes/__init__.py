"""
Redes del agente: iteración de valor, memoria externa, red MACN y pérdidas
"""

from .vin import vi_step, vin_forward, local_value_summary
from .memoria import (
    content_weights, allocation_weights, ancho_interfaz, interfaz_desde_vector,
    mem_write, mem_read, dnc_step, crear_parametros_dnc, ParamsDNC
)
from .perdidas import (
    loss_state_prediction, loss_reward_prediction, loss_action_prediction,
    pseudo_reward, total_loss, modified_reward, entropia, actor_critic_loss,
    limite_pseudo_episodio
)
from .macn import RedMACN, flujos_semilla

__all__ = [
    'vi_step', 'vin_forward', 'local_value_summary',
    'content_weights', 'allocation_weights', 'ancho_interfaz', 'interfaz_desde_vector',
    'mem_write', 'mem_read', 'dnc_step', 'crear_parametros_dnc', 'ParamsDNC',
    'loss_state_prediction', 'loss_reward_prediction', 'loss_action_prediction',
    'pseudo_reward', 'total_loss', 'modified_reward', 'entropia', 'actor_critic_loss',
    'limite_pseudo_episodio',
    'RedMACN', 'flujos_semilla'
]
