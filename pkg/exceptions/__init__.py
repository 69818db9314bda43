"""
Paquete de excepciones personalizadas
"""

from .lab_exceptions import (
    LabException,
    MapaInvalidoException,
    MundoDesconocidoException,
    VarianteInvalidaException,
    FormaIncompatibleException,
    AccionInvalidaException,
    CheckpointIncompatibleException,
    ConfiguracionInvalidaException,
    DatosInvalidosException,
    InvarianteVioladaException
)

__all__ = [
    'LabException',
    'MapaInvalidoException',
    'MundoDesconocidoException',
    'VarianteInvalidaException',
    'FormaIncompatibleException',
    'AccionInvalidaException',
    'CheckpointIncompatibleException',
    'ConfiguracionInvalidaException',
    'DatosInvalidosException',
    'InvarianteVioladaException'
]
