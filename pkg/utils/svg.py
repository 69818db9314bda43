"""
============================================
GENERADOR DE SVG
============================================
Piezas mínimas para dibujar curvas de
aprendizaje como texto SVG bien formado.
============================================
"""

from typing import Iterable, List, Sequence, Tuple
from xml.sax.saxutils import escape, quoteattr

# Paleta por variante (orden estable)
COLORES = ('#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd', '#8c564b')


class EscalaLineal:
    """Mapea un dominio [d0, d1] a un rango de píxeles [r0, r1]"""

    def __init__(self, d0: float, d1: float, r0: float, r1: float):
        if d1 == d0:
            d0, d1 = d0 - 0.5, d1 + 0.5
        self.d0, self.d1, self.r0, self.r1 = d0, d1, r0, r1

    def __call__(self, valor: float) -> float:
        return self.r0 + (valor - self.d0) * (self.r1 - self.r0) / (self.d1 - self.d0)


def _puntos(puntos: Iterable[Tuple[float, float]]) -> str:
    return ' '.join(f"{x:.2f},{y:.2f}" for x, y in puntos)


def polilinea(puntos: Sequence[Tuple[float, float]], color: str, ancho: float = 1.5) -> str:
    return (f'<polyline points="{_puntos(puntos)}" fill="none" '
            f'stroke={quoteattr(color)} stroke-width="{ancho}"/>')


def poligono(puntos: Sequence[Tuple[float, float]], color: str, opacidad: float = 0.2) -> str:
    return (f'<polygon points="{_puntos(puntos)}" fill={quoteattr(color)} '
            f'fill-opacity="{opacidad}" stroke="none"/>')


def linea(x1: float, y1: float, x2: float, y2: float, color: str = '#000000') -> str:
    return f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke={quoteattr(color)}/>'


def texto(x: float, y: float, contenido: str, tamano: int = 11, ancla: str = 'start',
          color: str = '#000000') -> str:
    return (f'<text x="{x:.2f}" y="{y:.2f}" font-size="{tamano}" text-anchor={quoteattr(ancla)} '
            f'fill={quoteattr(color)}>{escape(str(contenido))}</text>')


def documento(ancho: int, alto: int, elementos: List[str]) -> str:
    cuerpo = '\n  '.join(elementos)
    return (f'<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{ancho}" height="{alto}" '
            f'viewBox="0 0 {ancho} {alto}">\n  {cuerpo}\n</svg>\n')
