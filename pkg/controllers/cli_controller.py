"""
============================================
CONTROLADOR DE LÍNEA DE COMANDOS
============================================
Subcomandos train, eval, ablate y plot.
Códigos de salida: 0 éxito, 2 datos inválidos,
1 cualquier otro error.
============================================
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import pandas as pd

from config.settings import AppConfig, Constants, configurar_logging
from exceptions import (
    LabException,
    DatosInvalidosException,
    VarianteInvalidaException,
    MundoDesconocidoException,
    ConfiguracionInvalidaException
)
from models import RunSpec, TrainConfig
from repositories import ConfigRepository, MetricasRepository
from services import AblacionService, EntrenamientoService, EvaluacionService, GraficosService
from utils.validators import (
    validar_directorio_salida,
    validar_mundo,
    validar_positivo,
    validar_seeds,
    validar_variante
)

logger = logging.getLogger(__name__)

COMANDOS = ('train', 'eval', 'ablate', 'plot')
ERRORES_VALIDACION = (
    DatosInvalidosException,
    VarianteInvalidaException,
    MundoDesconocidoException,
    ConfiguracionInvalidaException
)


# ============================================
# ARGUMENTOS
# ============================================

def construir_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='macn-lab',
        description="Laboratorio de actor-crítico con memoria y tareas auxiliares"
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def comunes(p, variante=True):
        p.add_argument('--world', help=f"Mundo: {', '.join(Constants.MUNDOS)}")
        if variante:
            p.add_argument('--variant', help=f"Variante: {', '.join(Constants.VARIANTES)}")
        p.add_argument('--config', type=Path, help="Archivo clave=valor de entrenamiento")
        p.add_argument('--seeds', help="Semillas separadas por coma, p. ej. 1,2,3")
        p.add_argument('--out', type=Path, default=AppConfig.OUTPUT_DIR, help="Directorio de salida")
        p.add_argument('--episodes', type=int, help="Número de episodios")

    train = sub.add_parser('train', help="Entrena una variante por semilla")
    comunes(train)
    train.add_argument('--init', type=Path, help="Checkpoint inicial (transferencia)")

    evaluar = sub.add_parser('eval', help="Evalúa un checkpoint con acciones voraces")
    comunes(evaluar)
    evaluar.add_argument('--checkpoint', type=Path, required=True, help="Checkpoint a evaluar")

    ablate = sub.add_parser('ablate', help="Entrena las cuatro variantes y resume")
    comunes(ablate, variante=False)

    plot = sub.add_parser('plot', help="Curvas de aprendizaje desde metrics.csv")
    plot.add_argument('--metrics', type=Path, help="Directorio con métricas (por defecto --out)")
    plot.add_argument('--out', type=Path, default=AppConfig.OUTPUT_DIR, help="Directorio de salida")
    return parser


def run_spec_desde_args(args: argparse.Namespace) -> RunSpec:
    """
    Construye y valida la especificación de la ejecución.

    Raises:
        DatosInvalidosException, MundoDesconocidoException,
        VarianteInvalidaException: Si algún argumento es inválido
    """
    spec = RunSpec(command=args.command, out=validar_directorio_salida(args.out))
    if args.command == 'plot':
        spec.metrics_dir = args.metrics or args.out
        return spec

    spec.world = validar_mundo(args.world)
    # en eval la variante es opcional: solo se verifica contra el checkpoint
    if args.command == 'train' or getattr(args, 'variant', None) is not None:
        spec.variant = validar_variante(args.variant)
    spec.config_path = args.config
    if args.seeds is not None:
        spec.seeds = validar_seeds(args.seeds)
    spec.episodes = validar_positivo('episodes', args.episodes)
    spec.checkpoint = getattr(args, 'checkpoint', None)
    spec.init = getattr(args, 'init', None)
    return spec


def resolver_config(spec: RunSpec) -> TrainConfig:
    """Valores por defecto < archivo --config < banderas"""
    config = TrainConfig()
    if spec.config_path is not None:
        config = ConfigRepository().leer(spec.config_path, config)
    if spec.seeds:
        config = replace(config, seeds=spec.seeds)
    if spec.episodes is not None and spec.command != 'eval':
        config = replace(config, episodes=spec.episodes)
    if not config.seeds:
        raise DatosInvalidosException('seeds', "la lista de semillas está vacía")
    config.validar()
    return config


# ============================================
# COMANDOS
# ============================================

def cmd_train(spec: RunSpec) -> int:
    config = resolver_config(spec)
    servicio = EntrenamientoService()
    for seed in config.seeds:
        directorio = spec.out / spec.world / spec.variant / str(seed)
        metrics = servicio.train_run(spec.variant, spec.world, config, seed, directorio, init=spec.init)
        df = metrics.to_dataframe()
        print(f"✓ {spec.variant}/{spec.world}/seed={seed}: {len(df)} episodios, "
              f"recompensa media={df['ext_reward'].mean():.2f} -> {directorio}")
    return 0


def cmd_eval(spec: RunSpec) -> int:
    config = resolver_config(spec)
    episodios = spec.episodes or config.eval_episodes
    servicio = EvaluacionService()

    filas = []
    for seed in config.seeds:
        resultado = servicio.evaluate(spec.checkpoint, spec.world, episodes=episodios, seed=seed,
                                      episode_cap=config.episode_cap, variante=spec.variant)
        filas.append({
            'world': spec.world,
            'seed': seed,
            'episodes': resultado.episodes,
            'mean_reward': resultado.mean_reward,
            'goal_rate': resultado.goal_rate,
            'mean_length': resultado.mean_length,
            'discovery_fraction': resultado.discovery_fraction,
            **{f"n_{causa}": n for causa, n in resultado.causas.items()}
        })
        print(f"✓ seed={seed}: recompensa media={resultado.mean_reward:.2f}, "
              f"meta={resultado.goal_rate:.1%}, largo medio={resultado.mean_length:.1f}")

    MetricasRepository(spec.out).guardar_tabla(pd.DataFrame(filas), f"evaluacion_{spec.world}.csv")
    return 0


def cmd_ablate(spec: RunSpec) -> int:
    config = resolver_config(spec)
    resumen = AblacionService().ejecutar(spec.world, config.seeds, config, spec.out)
    print(resumen.to_string(index=False))
    return 0


def cmd_plot(spec: RunSpec) -> int:
    for ruta in GraficosService().generar(spec.metrics_dir, spec.out):
        print(f"✓ {ruta}")
    return 0


DESPACHO = {
    'train': cmd_train,
    'eval': cmd_eval,
    'ablate': cmd_ablate,
    'plot': cmd_plot,
}


# ============================================
# PUNTO DE ENTRADA
# ============================================

def main(argv: Optional[List[str]] = None) -> int:
    """
    Ejecuta la línea de comandos.

    Returns:
        int: Código de salida (0, 1 o 2)
    """
    parser = construir_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        spec = run_spec_desde_args(args)
        configurar_logging(spec.out)
        logger.info(f"Comando {spec.command}: world={spec.world}, variant={spec.variant}, out={spec.out}")
        return DESPACHO[spec.command](spec)

    except ERRORES_VALIDACION as e:
        print(f"✗ Error de validación: {e}", file=sys.stderr)
        return 2
    except (LabException, OSError) as e:
        logger.error(f"Error en {args.command}: {e}")
        print(f"✗ Error: {e}", file=sys.stderr)
        return 1
