"""
============================================
SERVICIO DEL SIMULADOR
============================================
Mundo en grilla parcialmente observable:
- Interpretación de mapas ASCII
- Lidar de 100 haces por ray-marching
- Observación z = H(s)m y estimación m̂
- Dinámica discreta por orientación y recompensas
- Sesión de episodio (SimuladorService)
============================================
"""

import logging
import re
from dataclasses import replace
from typing import Optional, Tuple, Union

import numpy as np

from config.settings import Constants
from exceptions import (
    MapaInvalidoException,
    MundoDesconocidoException,
    AccionInvalidaException,
    DatosInvalidosException,
    LabException
)
from models import (
    Pose, GridMap, LidarScan, ObservationVector, StepResult, MapEstimate,
    DESPLAZAMIENTOS, ANGULOS, OCUPADA, LIBRE
)
from repositories import MapaRepository

logger = logging.getLogger(__name__)

CARACTERES_VALIDOS = set('#.GSB')
_DIRECTIVA = re.compile(r'^\s*(\w+)\s*:\s*(\S+)\s*$')
GLIFOS = {'N': '^', 'E': '>', 'S': 'v', 'W': '<'}

# Offsets fijos de los haces respecto de la orientación
BEAM_OFFSETS = np.deg2rad(np.linspace(-Constants.ARCO_LIDAR_GRADOS / 2,
                                      Constants.ARCO_LIDAR_GRADOS / 2,
                                      Constants.NUM_HACES))


# ============================================
# CARGA DE MAPAS
# ============================================

def load_map(text: str) -> GridMap:
    """
    Interpreta un mapa ASCII.

    Las primeras líneas pueden ser directivas `world: <id>` y
    `heading: <N|E|S|W>` (orientación inicial, por defecto E).
    '#' ocupada, '.' libre, 'G' meta, 'S' spawn, 'B' obstáculo opcional.

    Args:
        text (str): Contenido del mapa

    Returns:
        GridMap: Mapa interpretado

    Raises:
        MapaInvalidoException: Error de formato con línea y columna (base 1)
        MundoDesconocidoException: Si la directiva world no es un mundo conocido
    """
    lineas = text.replace('\r\n', '\n').split('\n')
    world = None
    heading = 'E'

    numero = 0
    while numero < len(lineas):
        match = _DIRECTIVA.match(lineas[numero])
        if not match:
            break
        clave, valor = match.group(1).lower(), match.group(2)
        if clave == 'world':
            if valor not in Constants.MUNDOS:
                raise MundoDesconocidoException(valor, Constants.MUNDOS)
            world = valor
        elif clave == 'heading':
            if valor not in Constants.ORIENTACIONES:
                raise MapaInvalidoException(numero + 1, 1, f"orientación desconocida '{valor}'")
            heading = valor
        else:
            raise MapaInvalidoException(numero + 1, 1, f"directiva desconocida '{clave}'")
        numero += 1

    primera = numero + 1
    filas = lineas[numero:]
    while filas and not filas[-1].strip():
        filas.pop()
    if not filas:
        raise MapaInvalidoException(primera, 1, "el mapa está vacío")

    ancho = len(filas[0])
    for y, fila in enumerate(filas):
        if len(fila) != ancho:
            raise MapaInvalidoException(primera + y, min(len(fila), ancho) + 1,
                                        f"mapa no rectangular: ancho {len(fila)}, se esperaba {ancho}")
        for x, caracter in enumerate(fila):
            if caracter not in CARACTERES_VALIDOS:
                raise MapaInvalidoException(primera + y, x + 1, f"carácter inválido {caracter!r}")

    alto = len(filas)
    occupancy = np.zeros((alto, ancho), dtype=np.float64)
    metas, opcionales, spawns = set(), set(), []

    for y, fila in enumerate(filas):
        for x, caracter in enumerate(fila):
            borde = x in (0, ancho - 1) or y in (0, alto - 1)
            if borde and caracter != '#':
                raise MapaInvalidoException(primera + y, x + 1, "las celdas del borde deben ser '#'")
            if caracter == '#':
                occupancy[y, x] = OCUPADA
            elif caracter == 'G':
                metas.add((x, y))
            elif caracter == 'B':
                opcionales.add((x, y))
            elif caracter == 'S':
                if spawns:
                    raise MapaInvalidoException(primera + y, x + 1, "hay más de un spawn 'S'")
                spawns.append((x, y))

    if not metas:
        raise MapaInvalidoException(primera, 1, "el mapa no tiene celdas meta 'G'")
    if not spawns:
        raise MapaInvalidoException(primera, 1, "el mapa no tiene spawn 'S'")

    sx, sy = spawns[0]
    mapa = GridMap(
        width=ancho,
        height=alto,
        occupancy=occupancy,
        goal_region=frozenset(metas),
        spawn=Pose(sx, sy, heading),
        optional_obstacle=frozenset(opcionales),
        world=world
    )
    logger.debug(f"Mapa cargado: {ancho}x{alto}, {len(metas)} metas, {len(opcionales)} celdas B, mundo={world}")
    return mapa


def render_ascii(mapa: GridMap, pose: Optional[Pose] = None) -> str:
    """Dibuja el mapa con el robot como ^ > v <"""
    filas = []
    for y in range(mapa.height):
        fila = []
        for x in range(mapa.width):
            if pose is not None and (x, y) == pose.celda:
                fila.append(GLIFOS[pose.heading])
            elif (x, y) in mapa.optional_obstacle:
                fila.append('B' if mapa.obstacle_present else '.')
            elif mapa.es_meta(x, y):
                fila.append('G')
            elif mapa.occupancy[y, x] < 0:
                fila.append('#')
            else:
                fila.append('.')
        filas.append(''.join(fila))
    return '\n'.join(filas)


# ============================================
# LIDAR Y OBSERVACIÓN
# ============================================

def _marchar(mapa: GridMap, pose: Pose, angulos: np.ndarray, max_range: float):
    """
    Ray-march a pasos de 0.1 celdas desde el centro de la celda.

    Returns:
        tuple: (xs, ys, dentro, k_limite, impacto, t) por haz y muestra
    """
    pasos = max(1, int(round((max_range - 0.5) / Constants.PASO_RAYO)))
    t = np.arange(1, pasos + 1) / round(1.0 / Constants.PASO_RAYO)

    px = pose.x + 0.5 + np.outer(np.cos(angulos), t)
    py = pose.y + 0.5 + np.outer(np.sin(angulos), t)
    xs = np.floor(px).astype(np.int64)
    ys = np.floor(py).astype(np.int64)

    dentro = (xs >= 0) & (xs < mapa.width) & (ys >= 0) & (ys < mapa.height)
    ocupada = np.ones(xs.shape, dtype=bool)
    ocupada[dentro] = mapa.occupancy[ys[dentro], xs[dentro]] < 0

    impacto = ocupada.any(axis=1)
    primero = ocupada.argmax(axis=1)
    k_limite = np.where(impacto, primero, pasos - 1)
    return xs, ys, dentro, k_limite, impacto, t


def raycast_angulos(mapa: GridMap, pose: Pose, angulos: np.ndarray,
                    max_range: float = Constants.ALCANCE_MAX) -> np.ndarray:
    """
    Distancia por haz para ángulos absolutos arbitrarios.

    La distancia es la de centro a centro de celda: t_impacto + 0.5,
    acotada por max_range.
    """
    _, _, _, k_limite, impacto, t = _marchar(mapa, pose, np.asarray(angulos, dtype=np.float64), max_range)
    return np.where(impacto, np.minimum(t[k_limite] + 0.5, max_range), max_range)


def raycast_scan(mapa: GridMap, pose: Pose, max_range: float = Constants.ALCANCE_MAX) -> LidarScan:
    """
    Lectura lidar de 100 haces en un arco de 240° centrado en la orientación.

    Args:
        mapa (GridMap): Instancia del mapa
        pose (Pose): Pose válida
        max_range (float): Alcance máximo en celdas

    Returns:
        LidarScan: Distancias en (0, max_range]
    """
    angulos = ANGULOS[pose.heading] + BEAM_OFFSETS
    ranges = raycast_angulos(mapa, pose, angulos, max_range)
    return LidarScan(ranges=ranges, beam_angles=BEAM_OFFSETS.copy())


def visibility_observation(mapa: GridMap, pose: Pose,
                           max_range: float = Constants.ALCANCE_MAX) -> ObservationVector:
    """
    z[s] = m[s] para las celdas que atraviesa algún haz hasta su impacto
    (inclusive); 0 en el resto.
    """
    angulos = ANGULOS[pose.heading] + BEAM_OFFSETS
    xs, ys, dentro, k_limite, _, _ = _marchar(mapa, pose, angulos, max_range)
    visibles = dentro & (np.arange(xs.shape[1])[None, :] <= k_limite[:, None])

    z = np.zeros(mapa.n_celdas, dtype=np.float64)
    indices = ys[visibles] * mapa.width + xs[visibles]
    z[indices] = mapa.occupancy.reshape(-1)[indices]
    return ObservationVector(z=z)


def update_map_estimate(estimacion: MapEstimate, observacion: ObservationVector) -> MapEstimate:
    """m̂' = max(m̂ + z, -1)"""
    if estimacion.m_hat.shape != observacion.z.shape:
        raise DatosInvalidosException('m_hat', f"forma {estimacion.m_hat.shape} vs z {observacion.z.shape}")
    return MapEstimate(np.maximum(estimacion.m_hat + observacion.z, OCUPADA))


def occupancy_reward(mapa: GridMap, pose: Pose) -> float:
    """z_t[s_t]: etiqueta de la celda de la pose (-1 ocupada, 0 libre)"""
    return OCUPADA if mapa.ocupada(pose.x, pose.y) else LIBRE


# ============================================
# DINÁMICA Y RECOMPENSA
# ============================================

def external_reward(result_cause: str, world: str) -> float:
    """
    Recompensa externa por causa de paso.

    Raises:
        MundoDesconocidoException: Si el mundo no existe
        DatosInvalidosException: Si la causa no existe
    """
    if world not in Constants.BONO_META:
        raise MundoDesconocidoException(str(world), Constants.MUNDOS)
    if result_cause == Constants.CAUSA_EN_CURSO:
        return Constants.RECOMPENSA_VIVO
    if result_cause == Constants.CAUSA_META:
        return Constants.BONO_META[world]
    if result_cause == Constants.CAUSA_COLISION:
        return OCUPADA
    if result_cause == Constants.CAUSA_TIEMPO:
        return Constants.RECOMPENSA_TIEMPO
    raise DatosInvalidosException('result_cause', f"debe ser una de {Constants.CAUSAS}")


def indice_accion(action: Union[int, str]) -> int:
    """Normaliza una acción (nombre o índice) a su índice"""
    if isinstance(action, str):
        if action not in Constants.ACCIONES:
            raise AccionInvalidaException(action)
        return Constants.ACCIONES.index(action)
    if isinstance(action, (int, np.integer)) and 0 <= int(action) < len(Constants.ACCIONES):
        return int(action)
    raise AccionInvalidaException(action)


def step(mapa: GridMap, pose: Pose, action: Union[int, str], step_index: int,
         episode_cap: int = Constants.LIMITE_EPISODIO) -> StepResult:
    """
    Avanza un paso de la dinámica.

    Orden de precedencia: colisión, meta, tiempo agotado, en curso.

    Args:
        mapa (GridMap): Instancia del mapa (con o sin obstáculo opcional)
        pose (Pose): Pose actual
        action (int|str): 'forward', 'turn_left', 'turn_right' o su índice
        step_index (int): Índice del paso dentro del episodio, desde 0
        episode_cap (int): Largo máximo del episodio

    Returns:
        StepResult: Nueva pose, recompensa y causa

    Raises:
        AccionInvalidaException: Si la acción no existe
        DatosInvalidosException: Si step_index >= episode_cap
    """
    if step_index >= episode_cap:
        raise DatosInvalidosException('step_index', f"{step_index} >= límite {episode_cap}")
    accion = Constants.ACCIONES[indice_accion(action)]

    if accion == Constants.ACCION_AVANZAR:
        dx, dy = DESPLAZAMIENTOS[pose.heading]
        destino = Pose(pose.x + dx, pose.y + dy, pose.heading)
        if mapa.ocupada(destino.x, destino.y):
            causa = Constants.CAUSA_COLISION
            siguiente = pose
        else:
            siguiente = destino
            causa = None
    else:
        i = Constants.ORIENTACIONES.index(pose.heading)
        giro = -1 if accion == Constants.ACCION_GIRAR_IZQ else 1
        siguiente = Pose(pose.x, pose.y, Constants.ORIENTACIONES[(i + giro) % 4])
        causa = None

    if causa is None:
        if mapa.es_meta(siguiente.x, siguiente.y):
            causa = Constants.CAUSA_META
        elif step_index == episode_cap - 1:
            causa = Constants.CAUSA_TIEMPO
        else:
            causa = Constants.CAUSA_EN_CURSO

    recompensa = external_reward(causa, mapa.world)
    if causa == Constants.CAUSA_COLISION:
        # z_t de la celda bloqueada
        recompensa = occupancy_reward(mapa, destino)

    return StepResult(
        next_pose=siguiente,
        reward=recompensa,
        done=causa != Constants.CAUSA_EN_CURSO,
        done_cause=causa
    )


def reset(mapa: GridMap, seed: int,
          forzar_obstaculo: Optional[bool] = None) -> Tuple[Pose, GridMap]:
    """
    Inicia un episodio: pose de spawn e instancia del mapa.

    El obstáculo opcional aparece con probabilidad 0.4, muestreado del
    generador con la semilla dada. Con `forzar_obstaculo` en True o False
    la presencia queda fija y el sorteo se ignora.
    """
    if not mapa.optional_obstacle:
        return mapa.spawn, mapa

    rng = np.random.default_rng(seed)
    presente = bool(rng.random() < Constants.PROB_OBSTACULO_OPCIONAL)
    if forzar_obstaculo is not None:
        presente = bool(forzar_obstaculo)
    occupancy = mapa.occupancy.copy()
    for x, y in mapa.optional_obstacle:
        occupancy[y, x] = OCUPADA if presente else LIBRE
    instancia = replace(mapa, occupancy=occupancy, obstacle_present=presente)
    return mapa.spawn, instancia


# ============================================
# SESIÓN DE EPISODIO
# ============================================

class SimuladorService:
    """
    Sesión de un episodio sobre un mapa.

    Cada worker debe tener su propia instancia; el estado no se comparte.

    Example:
        >>> sim = SimuladorService(mapa)
        >>> scan = sim.reset(seed=7)
        >>> resultado, scan = sim.step('forward')
    """

    def __init__(self, mapa: GridMap, episode_cap: int = Constants.LIMITE_EPISODIO,
                 max_range: float = Constants.ALCANCE_MAX):
        if mapa.world is None:
            raise MundoDesconocidoException('None', Constants.MUNDOS)
        self.mapa = mapa
        self.episode_cap = episode_cap
        self.max_range = max_range
        self.instancia: Optional[GridMap] = None
        self.pose: Optional[Pose] = None
        self.paso = 0
        self.terminado = True
        self.estimacion: Optional[MapEstimate] = None

    def _observar(self) -> LidarScan:
        z = visibility_observation(self.instancia, self.pose, self.max_range)
        self.estimacion = update_map_estimate(self.estimacion, z)
        return raycast_scan(self.instancia, self.pose, self.max_range)

    def reset(self, seed: int, forzar_obstaculo: Optional[bool] = None) -> LidarScan:
        """
        Reinicia el episodio y retorna la primera lectura

        Args:
            seed (int): Semilla del sorteo del obstáculo opcional
            forzar_obstaculo (bool): Fija la presencia del obstáculo opcional
        """
        self.pose, self.instancia = reset(self.mapa, seed, forzar_obstaculo)
        self.paso = 0
        self.terminado = False
        self.estimacion = MapEstimate.vacio(self.mapa.n_celdas)
        logger.debug(f"reset: seed={seed}, obstáculo presente={self.instancia.obstacle_present}")
        return self._observar()

    def step(self, action: Union[int, str]) -> Tuple[StepResult, LidarScan]:
        """
        Aplica una acción sobre la sesión

        Raises:
            DatosInvalidosException: Si el episodio ya terminó o no se reinició
        """
        if self.terminado:
            raise DatosInvalidosException('episodio', "terminado; llame a reset()")
        try:
            resultado = step(self.instancia, self.pose, action, self.paso, self.episode_cap)
        except LabException:
            raise
        except Exception as e:
            logger.error(f"Error en step (paso {self.paso}): {e}")
            raise

        self.pose = resultado.next_pose
        self.paso += 1
        self.terminado = resultado.done
        return resultado, self._observar()

    def fraccion_descubierta(self) -> float:
        """Fracción de celdas ocupadas de la instancia ya presentes en m̂"""
        ocupadas = self.instancia.labels() < 0
        total = int(ocupadas.sum())
        if total == 0:
            return 0.0
        return float((self.estimacion.m_hat[ocupadas] < 0).sum() / total)

    def render(self) -> str:
        return render_ascii(self.instancia, self.pose)


# ============================================
# MUNDOS DE REFERENCIA
# ============================================

def cargar_mundo(mundo: str, repo: MapaRepository = None) -> GridMap:
    """
    Carga el mapa de un mundo de referencia desde maps/<mundo>.txt.

    Raises:
        MundoDesconocidoException: Si el mundo no existe
        DatosInvalidosException: Si la directiva world del archivo no coincide
    """
    repo = repo or MapaRepository()
    mapa = load_map(repo.leer_mundo(mundo))
    if mapa.world is None:
        return replace(mapa, world=mundo)
    if mapa.world != mundo:
        raise DatosInvalidosException('world', f"el archivo declara '{mapa.world}', se pidió '{mundo}'")
    return mapa

