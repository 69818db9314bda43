"""
============================================
SERVICIO DE GRÁFICOS
============================================
Curvas de aprendizaje: promedio móvil de 50
episodios por semilla, media y desviación entre
semillas por variante, y su dibujo en SVG.
============================================
"""

import logging
from pathlib import Path
from typing import List

import pandas as pd

from config.settings import Constants, TrainDefaults
from exceptions import DatosInvalidosException, LabException
from repositories import MetricasRepository
from utils import svg

logger = logging.getLogger(__name__)

COLUMNAS_CURVAS = ['world', 'variant', 'episode', 'mean', 'std', 'n_seeds']


def _orden_variantes(variantes) -> List[str]:
    conocidas = [v for v in Constants.VARIANTES if v in set(variantes)]
    return conocidas + sorted(set(variantes) - set(conocidas))


class GraficosService:
    """Servicio para agregar métricas y dibujar curvas"""

    def __init__(self, ventana: int = TrainDefaults.VENTANA_SUAVIZADO):
        self.ventana = ventana

    def agregar_curvas(self, metricas: pd.DataFrame) -> pd.DataFrame:
        """
        Suaviza la recompensa externa por semilla y agrega entre semillas.

        Returns:
            DataFrame: world, variant, episode, mean, std (ddof=0), n_seeds
        """
        if metricas.empty:
            return pd.DataFrame(columns=COLUMNAS_CURVAS)
        df = metricas.sort_values(['world', 'variant', 'seed', 'episode']).copy()
        df['suavizado'] = (df.groupby(['world', 'variant', 'seed'])['ext_reward']
                           .transform(lambda s: s.rolling(self.ventana, min_periods=1).mean()))
        curvas = (df.groupby(['world', 'variant', 'episode'])['suavizado']
                  .agg(mean='mean', std=lambda s: s.std(ddof=0), n_seeds='count')
                  .reset_index())
        return curvas[COLUMNAS_CURVAS]

    def render_svg(self, curvas: pd.DataFrame, world: str, ancho: int = 720, alto: int = 420) -> str:
        """
        Dibuja una curva media por variante con banda ±1 desviación.
        """
        margen_izq, margen_der, margen_sup, margen_inf = 60, 140, 30, 40
        elementos = [svg.texto(ancho / 2, 18, f"Recompensa externa - {world}", 13, 'middle')]

        if curvas.empty:
            elementos.append(svg.texto(ancho / 2, alto / 2, "sin datos", 12, 'middle'))
            return svg.documento(ancho, alto, elementos)

        inferior = (curvas['mean'] - curvas['std']).min()
        superior = (curvas['mean'] + curvas['std']).max()
        escala_x = svg.EscalaLineal(curvas['episode'].min(), curvas['episode'].max(),
                                    margen_izq, ancho - margen_der)
        escala_y = svg.EscalaLineal(inferior, superior, alto - margen_inf, margen_sup)

        # Ejes
        elementos.append(svg.linea(margen_izq, alto - margen_inf, ancho - margen_der, alto - margen_inf))
        elementos.append(svg.linea(margen_izq, margen_sup, margen_izq, alto - margen_inf))
        elementos.append(svg.texto(margen_izq - 6, escala_y(superior) + 4, f"{superior:.1f}", 10, 'end'))
        elementos.append(svg.texto(margen_izq - 6, escala_y(inferior) + 4, f"{inferior:.1f}", 10, 'end'))
        elementos.append(svg.texto((margen_izq + ancho - margen_der) / 2, alto - 10, "episodio", 11, 'middle'))

        for i, variante in enumerate(_orden_variantes(curvas['variant'].unique())):
            datos = curvas[curvas['variant'] == variante].sort_values('episode')
            color = svg.COLORES[i % len(svg.COLORES)]
            xs = [escala_x(e) for e in datos['episode']]
            arriba = [escala_y(m + s) for m, s in zip(datos['mean'], datos['std'])]
            abajo = [escala_y(m - s) for m, s in zip(datos['mean'], datos['std'])]
            banda = list(zip(xs, arriba)) + list(zip(reversed(xs), reversed(abajo)))
            elementos.append(svg.poligono(banda, color))
            elementos.append(svg.polilinea(list(zip(xs, [escala_y(m) for m in datos['mean']])), color))

            y_leyenda = margen_sup + 18 * i + 10
            elementos.append(svg.linea(ancho - margen_der + 10, y_leyenda, ancho - margen_der + 30, y_leyenda, color))
            elementos.append(svg.texto(ancho - margen_der + 35, y_leyenda + 4, variante, 11))

        return svg.documento(ancho, alto, elementos)

    def generar(self, metrics_dir: Path, out: Path) -> List[Path]:
        """
        Genera curvas_<world>.csv y curvas_<world>.svg por cada mundo.

        Args:
            metrics_dir (Path): Directorio donde buscar metrics.csv (recursivo)
            out (Path): Directorio de salida

        Returns:
            List[Path]: Archivos escritos

        Raises:
            DatosInvalidosException: Si no hay métricas
        """
        repo = MetricasRepository(metrics_dir)
        try:
            if not repo.listar_metricas():
                raise DatosInvalidosException('metrics', f"no se encontraron archivos de métricas en {metrics_dir}")
            curvas = self.agregar_curvas(repo.leer_todas())

            escritos = []
            for world in sorted(curvas['world'].unique()):
                del_mundo = curvas[curvas['world'] == world].reset_index(drop=True)
                escritos.append(repo.guardar_tabla(del_mundo, Path(out).resolve() / f"curvas_{world}.csv"))
                ruta_svg = repo.escribir_texto(self.render_svg(del_mundo, world),
                                               Path(out).resolve() / f"curvas_{world}.svg")
                escritos.append(ruta_svg)
                logger.info(f"Curvas de {world}: {del_mundo['variant'].nunique()} variantes -> {ruta_svg}")
            return escritos

        except LabException:
            raise
        except Exception as e:
            logger.error(f"Error generando gráficos desde {metrics_dir}: {e}")
            raise
