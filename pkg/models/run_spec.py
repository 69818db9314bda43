"""
Especificación de una ejecución de la línea de comandos
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple


@dataclass
class RunSpec:
    command: str
    world: Optional[str] = None
    variant: Optional[str] = None
    config_path: Optional[Path] = None
    seeds: Tuple[int, ...] = field(default_factory=tuple)
    out: Path = Path('salida')
    episodes: Optional[int] = None
    checkpoint: Optional[Path] = None
    init: Optional[Path] = None
    metrics_dir: Optional[Path] = None
