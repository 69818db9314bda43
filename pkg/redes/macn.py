"""
============================================
RED MACN: ENCODER, VIN, MEMORIA Y CABEZAS
============================================
Red actor-crítico con memoria y planificación:
- encoder convolucional de la lectura lidar
- iteración de valor sobre la ventana local
- controlador LSTM (con memoria en variantes MA)
- cabezas de política y valor
- cabezas auxiliares (variantes AR)
============================================
"""

import logging
from typing import Optional, Tuple, Union

import numpy as np

from config.settings import Constants
from diffcore import Tensor, Parametros, ops
from exceptions import FormaIncompatibleException, VarianteInvalidaException
from models import (
    AgentVariant, ArquitecturaConfig, Encoding, PolicyOutput, AuxOutputs,
    EstadoRecurrente, MemoryState, LidarScan
)
from .capas import crear_conv, crear_densa, crear_lstm, estado_lstm_cero
from .memoria import crear_parametros_dnc, dnc_step
from .vin import vin_forward, local_value_summary

logger = logging.getLogger(__name__)


def flujos_semilla(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """
    Generadores independientes para los parámetros compartidos y los
    auxiliares; así todas las variantes inicializan igual lo que comparten.
    """
    principal, auxiliar = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(principal), np.random.default_rng(auxiliar)


class RedMACN:
    """
    Red de una variante de ablación.

    Variantes MA: encode → VIN → resumen → concat φ → DNC → densa → cabezas.
    Variantes sin memoria: encode → LSTM → densa → cabezas.

    Example:
        >>> red = RedMACN(AgentVariant.desde_tag('MA_AC_AR'), seed=3)
        >>> estado = red.estado_inicial()
        >>> salida, estado, encoding = red.forward(scan, estado)
    """

    def __init__(self, variant: AgentVariant, arquitectura: ArquitecturaConfig = None, seed: int = 0):
        self.variant = variant
        self.arquitectura = arquitectura or ArquitecturaConfig()
        self.arquitectura.validar()
        self.seed = seed
        self.params = Parametros()

        arq = self.arquitectura
        rng, rng_aux = flujos_semilla(seed)
        lado = arq.lado_scan

        # Encoder
        self.conv1 = crear_conv(self.params, 'enc/conv1', 1, arq.filtros, 3, rng)
        self.conv2 = crear_conv(self.params, 'enc/conv2', arq.filtros, arq.filtros, 3, rng)
        self.densa_phi = crear_densa(self.params, 'enc/phi', arq.filtros * lado * lado, arq.dim_phi, rng)
        self.conv_rbar = crear_conv(self.params, 'enc/rbar', arq.filtros, 1, 1, rng)
        self.densa_kernel = crear_densa(self.params, 'enc/kernel', arq.dim_phi,
                                        arq.acciones_vin * 2 * arq.k_vin * arq.k_vin, rng)

        # Controlador
        if variant.use_memory:
            entrada = arq.dim_resumen + arq.dim_phi
            self.dnc = crear_parametros_dnc(self.params, 'dnc', entrada, arq.unidades_control,
                                            arq.palabra_memoria, rng)
            salida_control = arq.unidades_control + arq.palabra_memoria
        else:
            self.lstm = crear_lstm(self.params, 'lstm', arq.dim_phi, arq.unidades_control, rng)
            salida_control = arq.unidades_control

        # Cabezas
        self.densa = crear_densa(self.params, 'cabeza/densa', salida_control, arq.unidades_densa, rng)
        self.actor = crear_densa(self.params, 'cabeza/actor', arq.unidades_densa, arq.num_acciones, rng)
        self.critico = crear_densa(self.params, 'cabeza/critico', arq.unidades_densa, 1, rng)

        # Tareas auxiliares
        if variant.use_aux:
            phi, acc, oculto = arq.dim_phi, arq.num_acciones, arq.unidades_aux
            self.sp1 = crear_densa(self.params, 'aux/sp1', phi + acc, oculto, rng_aux)
            self.sp2 = crear_densa(self.params, 'aux/sp2', oculto, phi, rng_aux)
            self.rp1 = crear_densa(self.params, 'aux/rp1', 2 * phi + acc, oculto, rng_aux)
            self.rp2 = crear_densa(self.params, 'aux/rp2', oculto, 1, rng_aux)
            self.ap1 = crear_densa(self.params, 'aux/ap1', 2 * phi, oculto, rng_aux)
            self.ap2 = crear_densa(self.params, 'aux/ap2', oculto, acc, rng_aux)

        logger.debug(f"RedMACN {variant.tag}: {self.params.numero_total()} parámetros (seed={seed})")

    # ============================================
    # ESTADO
    # ============================================

    def estado_inicial(self) -> EstadoRecurrente:
        h, c = estado_lstm_cero(self.arquitectura.unidades_control)
        memoria = None
        if self.variant.use_memory:
            memoria = MemoryState.vacia(self.arquitectura.slots_memoria, self.arquitectura.palabra_memoria)
        return EstadoRecurrente(tag=self.variant.tag, h=h, c=c, memoria=memoria)

    # ============================================
    # ENCODER
    # ============================================

    def encode(self, scan: Union[LidarScan, np.ndarray], max_range: float = Constants.ALCANCE_MAX) -> Encoding:
        """
        Codifica una lectura lidar.

        La lectura normalizada por max_range se reorganiza en 1×lado×lado.

        Returns:
            Encoding: φ [dim_phi], R̄ [1,lado,lado] y kernel [A,2,k,k]

        Raises:
            FormaIncompatibleException: Si la lectura no tiene lado² haces
        """
        arq = self.arquitectura
        ranges = np.asarray(scan.ranges if isinstance(scan, LidarScan) else scan, dtype=np.float64)
        if ranges.shape != (arq.num_haces,):
            raise FormaIncompatibleException('encode', (arq.num_haces,), ranges.shape)

        x = Tensor((ranges / max_range).reshape(1, arq.lado_scan, arq.lado_scan))
        h1 = ops.relu(self.conv1(x))
        h2 = ops.relu(self.conv2(h1))
        phi = self.densa_phi(ops.reshape(h2, (h2.size,)), 'tanh')
        r_bar = self.conv_rbar(h2)
        kernel = ops.reshape(self.densa_kernel(phi),
                             (arq.acciones_vin, 2, arq.k_vin, arq.k_vin))
        return Encoding(phi=phi, r_bar=r_bar, kernel=kernel)

    # ============================================
    # FORWARD
    # ============================================

    def forward(self, scan, estado: EstadoRecurrente,
                encoding: Optional[Encoding] = None) -> Tuple[PolicyOutput, EstadoRecurrente, Encoding]:
        """
        Paso de la red: política, valor y nuevo estado recurrente.

        Args:
            scan: LidarScan o array de lado² distancias
            estado (EstadoRecurrente): Estado de la misma variante
            encoding (Encoding): Codificación ya calculada de `scan` (opcional)

        Returns:
            tuple: (PolicyOutput, nuevo estado, Encoding)

        Raises:
            VarianteInvalidaException: Si el estado es de otra variante
        """
        if estado.tag != self.variant.tag or (estado.memoria is None) == self.variant.use_memory:
            raise VarianteInvalidaException(estado.tag, razon=f"el estado no corresponde a la red {self.variant.tag}")

        enc = encoding if encoding is not None else self.encode(scan)

        if self.variant.use_memory:
            arq = self.arquitectura
            v = vin_forward(enc.r_bar, enc.kernel, arq.iteraciones_vin)
            resumen = local_value_summary(v, arq.lado_resumen)
            salida, h, c, memoria = dnc_step(estado.h, estado.c, ops.concat([resumen, enc.phi]),
                                             estado.memoria, self.dnc)
        else:
            h, c = ops.lstm_step(enc.phi, estado.h, estado.c, self.lstm)
            salida, memoria = h, None

        z = self.densa(salida, 'relu')
        probs = ops.softmax(self.actor(z))
        valor = ops.reshape(self.critico(z), ())
        nuevo = EstadoRecurrente(tag=estado.tag, h=h, c=c, memoria=memoria)
        return PolicyOutput(action_probs=probs, value=valor), nuevo, enc

    # ============================================
    # CABEZAS AUXILIARES
    # ============================================

    def auxiliares(self, phi: Tensor, accion: int, phi_next: Tensor) -> AuxOutputs:
        """
        Predicciones auxiliares para una transición.

        SP: φ_t ⊕ a_t → φ̂_{t+1}; RP: φ_t ⊕ a_t ⊕ φ_{t+1} → r̂_t; AP: φ_t ⊕ φ_{t+1} → â_t

        Raises:
            VarianteInvalidaException: Si la variante no tiene tareas auxiliares
        """
        if not self.variant.use_aux:
            raise VarianteInvalidaException(self.variant.tag, razon="la variante no tiene cabezas auxiliares")
        uno = ops.uno_caliente(accion, self.arquitectura.num_acciones)
        phi_pred = self.sp2(self.sp1(ops.concat([phi, uno]), 'relu'))
        r_pred = ops.reshape(self.rp2(self.rp1(ops.concat([phi, uno, phi_next]), 'relu')), ())
        a_pred = ops.softmax(self.ap2(self.ap1(ops.concat([phi, phi_next]), 'relu')))
        return AuxOutputs(phi_next_pred=phi_pred, reward_pred=r_pred, action_pred_probs=a_pred)

    # ============================================
    # CHECKPOINT
    # ============================================

    def meta(self) -> dict:
        return {
            'variant': self.variant.tag,
            'arquitectura': self.arquitectura.a_dict(),
            'seed': self.seed
        }
