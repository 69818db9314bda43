"""
============================================
MODELOS DEL AGENTE
============================================
Variantes de ablación, configuración auxiliar,
tamaños de la arquitectura y los estados/salidas
que circulan entre la red y el entrenador.
============================================
"""

from dataclasses import dataclass, asdict, fields
from typing import Dict, Optional

import numpy as np

from config.settings import Constants, TrainDefaults
from diffcore import Tensor
from exceptions import VarianteInvalidaException, DatosInvalidosException


@dataclass(frozen=True)
class AgentVariant:
    """
    Variante de ablación.

    La etiqueta determina los dos indicadores: MA_* usan VIN + memoria,
    *_AR usan cabezas auxiliares y pseudo-recompensas.
    """
    tag: str
    use_memory: bool
    use_aux: bool

    @classmethod
    def desde_tag(cls, tag: str) -> 'AgentVariant':
        """
        Construye la variante a partir de su etiqueta

        Raises:
            VarianteInvalidaException: Si la etiqueta no existe
        """
        if tag not in Constants.VARIANTES:
            raise VarianteInvalidaException(tag, Constants.VARIANTES)
        return cls(
            tag=tag,
            use_memory=tag.startswith('MA_'),
            use_aux=tag.endswith('_AR')
        )


@dataclass
class AuxConfig:
    """Umbrales y pesos de las tareas auxiliares"""
    eta_sp: float = TrainDefaults.ETA_SP
    eta_rp: float = TrainDefaults.ETA_RP
    lambda_sp: float = TrainDefaults.LAMBDA_SP
    lambda_rp: float = TrainDefaults.LAMBDA_RP
    lambda_ap: float = TrainDefaults.LAMBDA_AP
    overflow_value: float = TrainDefaults.OVERFLOW_VALUE
    pseudo_rewards: bool = True

    def validar(self):
        for nombre in ('lambda_sp', 'lambda_rp', 'lambda_ap'):
            valor = getattr(self, nombre)
            if not 0.0 <= valor <= 1.0:
                raise DatosInvalidosException(nombre, f"debe estar en [0, 1], se recibió {valor}")
        for nombre in ('eta_sp', 'eta_rp'):
            valor = getattr(self, nombre)
            if valor <= 0:
                raise DatosInvalidosException(nombre, f"debe ser > 0, se recibió {valor}")


@dataclass(frozen=True)
class ArquitecturaConfig:
    """Tamaños de capa de la red (los tests usan versiones reducidas)"""
    lado_scan: int = 10
    filtros: int = 16
    dim_phi: int = 64
    acciones_vin: int = 8
    k_vin: int = 3
    iteraciones_vin: int = 10
    lado_resumen: int = 5
    unidades_control: int = 128
    slots_memoria: int = 64
    palabra_memoria: int = 8
    unidades_densa: int = 64
    unidades_aux: int = 64
    num_acciones: int = len(Constants.ACCIONES)

    @property
    def num_haces(self) -> int:
        return self.lado_scan * self.lado_scan

    @property
    def dim_resumen(self) -> int:
        return self.lado_resumen * self.lado_resumen

    def validar(self):
        if self.k_vin % 2 == 0:
            raise DatosInvalidosException('k_vin', "debe ser impar")
        if self.lado_scan % self.lado_resumen:
            raise DatosInvalidosException('lado_resumen', "debe dividir a lado_scan")

    def a_dict(self) -> Dict[str, int]:
        return asdict(self)

    @classmethod
    def desde_dict(cls, datos: Dict) -> 'ArquitecturaConfig':
        nombres = {f.name for f in fields(cls)}
        return cls(**{k: int(v) for k, v in datos.items() if k in nombres})


@dataclass
class Encoding:
    """Salida del encoder: φ, mapa de recompensa R̄ y kernel de transición"""
    phi: Tensor
    r_bar: Tensor
    kernel: Tensor


@dataclass
class PolicyOutput:
    action_probs: Tensor
    value: Tensor

    def probs(self) -> np.ndarray:
        return self.action_probs.values.copy()


@dataclass
class AuxOutputs:
    phi_next_pred: Tensor
    reward_pred: Tensor
    action_pred_probs: Tensor


@dataclass
class MemoryState:
    """Memoria externa M[slots, palabra] con uso y pesos de la última operación"""
    M: Tensor
    usage: Tensor
    read_weights: Tensor
    write_weights: Tensor
    last_read: Tensor

    @classmethod
    def vacia(cls, slots: int = 64, palabra: int = 8) -> 'MemoryState':
        return cls(
            M=Tensor(np.zeros((slots, palabra))),
            usage=Tensor(np.zeros(slots)),
            read_weights=Tensor(np.zeros(slots)),
            write_weights=Tensor(np.zeros(slots)),
            last_read=Tensor(np.zeros(palabra))
        )

    def detach(self) -> 'MemoryState':
        return MemoryState(
            M=self.M.detach(),
            usage=self.usage.detach(),
            read_weights=self.read_weights.detach(),
            write_weights=self.write_weights.detach(),
            last_read=self.last_read.detach()
        )


@dataclass
class InterfaceVector:
    read_key: Tensor
    read_strength: Tensor
    write_key: Tensor
    write_strength: Tensor
    erase: Tensor
    add: Tensor
    allocation_gate: Tensor
    write_gate: Tensor


@dataclass
class EstadoRecurrente:
    """
    Estado que se arrastra entre pasos.

    `memoria` existe solo en las variantes con memoria; `tag` registra la
    variante para detectar estados cruzados.
    """
    tag: str
    h: Tensor
    c: Tensor
    memoria: Optional[MemoryState] = None

    def detach(self) -> 'EstadoRecurrente':
        return EstadoRecurrente(
            tag=self.tag,
            h=self.h.detach(),
            c=self.c.detach(),
            memoria=self.memoria.detach() if self.memoria is not None else None
        )
