"""
============================================
CONFIGURACIÓN GLOBAL DEL LABORATORIO
============================================
Gestiona la carga de variables de entorno y
proporciona acceso centralizado a configuraciones,
constantes del dominio y al logging.
============================================
"""

import os
import logging
from pathlib import Path
from dotenv import load_dotenv

# ============================================
# CARGAR VARIABLES DE ENTORNO
# ============================================

# Obtener la ruta del directorio raíz del proyecto
BASE_DIR = Path(__file__).resolve().parent.parent

# Cargar el archivo .env (si no existe no pasa nada)
ENV_FILE = BASE_DIR / '.env'
load_dotenv(ENV_FILE)


# ============================================
# CONFIGURACIÓN DE LA APLICACIÓN
# ============================================

class AppConfig:
    """
    Configuración general del laboratorio
    """
    OUTPUT_DIR = Path(os.getenv('MACN_LAB_OUT', str(Path.cwd() / 'salida')))
    MAPS_DIR = Path(os.getenv('MACN_LAB_MAPS_DIR', str(BASE_DIR / 'maps')))
    LOG_LEVEL = os.getenv('MACN_LAB_LOG_LEVEL', 'INFO').upper()
    LOG_FILENAME = 'macn_lab.log'

    @staticmethod
    def get_threads() -> int:
        """
        Obtiene el tope de workers paralelos (MACN_LAB_THREADS).

        Returns:
            int: Número de workers, mínimo 1
        """
        valor = os.getenv('MACN_LAB_THREADS', '1')
        return max(1, int(valor))


# ============================================
# CONSTANTES DEL DOMINIO
# ============================================

class Constants:
    """
    Constantes utilizadas en todo el laboratorio
    """
    # Acciones del robot
    ACCION_AVANZAR = 'forward'
    ACCION_GIRAR_IZQ = 'turn_left'
    ACCION_GIRAR_DER = 'turn_right'
    ACCIONES = (ACCION_AVANZAR, ACCION_GIRAR_IZQ, ACCION_GIRAR_DER)

    # Orientaciones, en sentido horario
    ORIENTACIONES = ('N', 'E', 'S', 'W')

    # Causas de fin de episodio
    CAUSA_META = 'goal'
    CAUSA_COLISION = 'collision'
    CAUSA_TIEMPO = 'timeout'
    CAUSA_EN_CURSO = 'running'
    CAUSAS = (CAUSA_META, CAUSA_COLISION, CAUSA_TIEMPO, CAUSA_EN_CURSO)

    # Variantes del agente (ablación)
    VARIANTE_AC = 'AC'
    VARIANTE_AC_AR = 'AC_AR'
    VARIANTE_MA_AC = 'MA_AC'
    VARIANTE_MA_AC_AR = 'MA_AC_AR'
    VARIANTES = (VARIANTE_AC, VARIANTE_AC_AR, VARIANTE_MA_AC, VARIANTE_MA_AC_AR)

    # Mundos de referencia y bono por llegar a la meta
    MUNDO_CIRCUIT = 'circuit'
    MUNDO_CIRCUIT2 = 'circuit2'
    MUNDO_OFFICE = 'office'
    MUNDOS = (MUNDO_CIRCUIT, MUNDO_CIRCUIT2, MUNDO_OFFICE)
    BONO_META = {
        MUNDO_CIRCUIT: 500.0,
        MUNDO_CIRCUIT2: 1000.0,
        MUNDO_OFFICE: 500.0,
    }

    # Recompensas externas
    RECOMPENSA_VIVO = 1.0
    RECOMPENSA_TIEMPO = 0.0

    # Lidar
    NUM_HACES = 100
    ARCO_LIDAR_GRADOS = 240.0
    ALCANCE_MAX = 10.0
    PASO_RAYO = 0.1

    # Episodios
    LIMITE_EPISODIO = 500
    PROB_OBSTACULO_OPCIONAL = 0.4

    # Formato de checkpoint
    VERSION_CHECKPOINT = 1


# ============================================
# VALORES POR DEFECTO DEL ENTRENAMIENTO
# ============================================

class TrainDefaults:
    """
    Hiperparámetros por defecto del entrenamiento actor-crítico
    """
    GAMMA = 0.95
    LR = 1e-4
    ALPHA = 0.5
    BETA = 0.01
    EPISODES = 4000
    EPISODE_CAP = Constants.LIMITE_EPISODIO
    EVAL_EPISODES = 500
    ROLLOUT_STEPS = 30
    CHECKPOINT_EVERY = 500

    ETA_SP = 2.0
    ETA_RP = 2.0
    LAMBDA_SP = 0.2
    LAMBDA_RP = 0.1
    LAMBDA_AP = 0.1
    OVERFLOW_VALUE = 1.5

    # Ventana del promedio móvil de las curvas
    VENTANA_SUAVIZADO = 50
    # Episodios finales usados en los resúmenes
    VENTANA_RESUMEN = 500


# ============================================
# LOGGING
# ============================================

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configurar_logging(directorio: Path = None, nivel: str = None) -> Path:
    """
    Configura el logging del proceso con archivo y consola.

    El archivo se crea dentro de <directorio>/logs para que la CLI no
    escriba fuera de su directorio de salida.

    Args:
        directorio (Path): Directorio de salida (por defecto AppConfig.OUTPUT_DIR)
        nivel (str): Nivel de logging (por defecto AppConfig.LOG_LEVEL)

    Returns:
        Path: Ruta del archivo de log
    """
    directorio = Path(directorio or AppConfig.OUTPUT_DIR)
    logs_dir = directorio / 'logs'
    logs_dir.mkdir(parents=True, exist_ok=True)
    archivo = logs_dir / AppConfig.LOG_FILENAME

    logging.basicConfig(
        level=getattr(logging, (nivel or AppConfig.LOG_LEVEL), logging.INFO),
        format=LOG_FORMAT,
        handlers=[
            logging.FileHandler(archivo, encoding='utf-8'),
            logging.StreamHandler()
        ],
        force=True
    )
    return archivo


# ============================================
# VALIDACIÓN DE CONFIGURACIÓN
# ============================================

def validate_config():
    """
    Valida que las variables de entorno tengan valores utilizables

    Raises:
        ValueError: Si alguna variable tiene un valor inválido
    """
    errors = []

    try:
        if AppConfig.get_threads() < 1:
            errors.append("MACN_LAB_THREADS debe ser >= 1")
    except ValueError:
        errors.append(f"MACN_LAB_THREADS no es un entero: {os.getenv('MACN_LAB_THREADS')!r}")

    if AppConfig.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        errors.append(f"MACN_LAB_LOG_LEVEL inválido: {AppConfig.LOG_LEVEL}")

    if errors:
        raise ValueError("Errores de configuración:\n" + "\n".join(f"- {e}" for e in errors))


# Validar configuración al importar
if __name__ != '__main__':
    validate_config()
