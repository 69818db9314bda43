"""
============================================
VALIDADORES DE ENTRADA
============================================
Funciones de validación de los argumentos de la
línea de comandos. Lanzan excepciones del dominio
que la CLI traduce a código de salida 2.
============================================
"""

import os
from pathlib import Path
from typing import Optional, Tuple

from config.settings import Constants
from exceptions import (
    DatosInvalidosException,
    MundoDesconocidoException,
    VarianteInvalidaException
)


def validar_mundo(mundo: Optional[str]) -> str:
    if mundo not in Constants.MUNDOS:
        raise MundoDesconocidoException(str(mundo), Constants.MUNDOS)
    return mundo


def validar_variante(variante: Optional[str]) -> str:
    if variante not in Constants.VARIANTES:
        raise VarianteInvalidaException(str(variante), Constants.VARIANTES)
    return variante


def validar_seeds(texto: Optional[str]) -> Tuple[int, ...]:
    """
    Interpreta '1,2,3' como lista no vacía de semillas enteras >= 0.

    Raises:
        DatosInvalidosException: Si la lista está vacía o tiene valores inválidos
    """
    if texto is None:
        raise DatosInvalidosException('seeds', "la lista de semillas está vacía")
    partes = [p.strip() for p in str(texto).split(',') if p.strip()]
    if not partes:
        raise DatosInvalidosException('seeds', "la lista de semillas está vacía")
    try:
        seeds = tuple(int(p) for p in partes)
    except ValueError:
        raise DatosInvalidosException('seeds', f"se esperaban enteros separados por coma: {texto!r}")
    if any(s < 0 for s in seeds):
        raise DatosInvalidosException('seeds', "las semillas deben ser >= 0")
    if len(set(seeds)) != len(seeds):
        raise DatosInvalidosException('seeds', "hay semillas repetidas")
    return seeds


def validar_positivo(nombre: str, valor: Optional[int]) -> Optional[int]:
    if valor is not None and valor < 1:
        raise DatosInvalidosException(nombre, f"debe ser >= 1, se recibió {valor}")
    return valor


def validar_directorio_salida(ruta: Path) -> Path:
    """
    Crea el directorio de salida si falta y verifica que se pueda escribir.

    Raises:
        DatosInvalidosException: Si la ruta no es un directorio escribible
    """
    ruta = Path(ruta)
    if ruta.exists() and not ruta.is_dir():
        raise DatosInvalidosException('out', f"{ruta} no es un directorio")
    try:
        ruta.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DatosInvalidosException('out', f"no se puede crear {ruta}: {e}")
    if not os.access(ruta, os.W_OK):
        raise DatosInvalidosException('out', f"{ruta} no es escribible")
    return ruta
