"""
============================================
SCRIPT DE PRUEBA DEL AGENTE
============================================
Encoder, forward por variante, pérdidas,
pseudo-recompensas y checkpoints.
============================================
"""

import math
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from config.settings import Constants
from diffcore import Tape, Tensor, backward, grad_check, ops
from exceptions import (
    AccionInvalidaException, CheckpointIncompatibleException, DatosInvalidosException,
    FormaIncompatibleException, VarianteInvalidaException
)
from models import AgentVariant, ArquitecturaConfig, AuxConfig
from redes import (
    RedMACN, actor_critic_loss, entropia, limite_pseudo_episodio, loss_action_prediction,
    loss_reward_prediction, loss_state_prediction, modified_reward, pseudo_reward, total_loss
)
from services import AgenteService

# Arquitectura reducida: las comprobaciones numéricas recorren cada parámetro
ARQ = ArquitecturaConfig(
    lado_scan=10, filtros=2, dim_phi=8, acciones_vin=2, k_vin=3, iteraciones_vin=2,
    lado_resumen=5, unidades_control=8, slots_memoria=8, palabra_memoria=4,
    unidades_densa=8, unidades_aux=8
)


def _red(tag: str, seed: int = 3) -> RedMACN:
    return RedMACN(AgentVariant.desde_tag(tag), ARQ, seed)


def _scan(rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.5, Constants.ALCANCE_MAX, size=ARQ.num_haces)


# ============================================
# ENCODER Y FORWARD
# ============================================

def test_encode():
    """Determinismo, sensibilidad y largo de la lectura"""
    print("\n" + "=" * 60)
    print("PRUEBA: Encoder de la lectura lidar")
    print("=" * 60)

    red = _red('MA_AC')
    rng = np.random.default_rng(0)
    scan = _scan(rng)
    a, b = red.encode(scan), red.encode(scan.copy())
    assert np.array_equal(a.phi.values, b.phi.values)
    assert a.phi.shape == (ARQ.dim_phi,)
    assert a.r_bar.shape == (1, ARQ.lado_scan, ARQ.lado_scan)
    assert a.kernel.shape == (ARQ.acciones_vin, 2, ARQ.k_vin, ARQ.k_vin)
    print("✓ Lecturas idénticas -> φ idéntico, formas correctas")

    abierto = red.encode(np.full(ARQ.num_haces, Constants.ALCANCE_MAX))
    cerca = np.full(ARQ.num_haces, Constants.ALCANCE_MAX)
    cerca[40:60] = 1.0
    pared = red.encode(cerca)
    assert np.abs(abierto.phi.values - pared.phi.values).max() > 0
    print("✓ Una pared cercana cambia φ")

    with pytest.raises(FormaIncompatibleException):
        red.encode(np.ones(99))
    print("✓ Lectura de 99 haces rechazada")

    pesos = rng.normal(size=ARQ.dim_phi)
    error = grad_check(lambda k: ops.sum(ops.mul(red.encode(scan).phi, pesos)),
                       red.params['enc/conv1/K'])
    assert error < 1e-4, error
    print(f"✓ grad_check del encoder: {error:.2e}")


def test_forward():
    """Probabilidades en el simplex y estados cruzados"""
    print("\n" + "=" * 60)
    print("PRUEBA: Forward de las cuatro variantes")
    print("=" * 60)

    rng = np.random.default_rng(1)
    for tag in Constants.VARIANTES:
        red = _red(tag)
        estado = red.estado_inicial()
        for _ in range(250):
            salida, estado, _ = red.forward(_scan(rng), estado)
            p = salida.probs()
            assert p.shape == (3,)
            assert np.all(p >= 0) and abs(p.sum() - 1.0) < 1e-12
            assert salida.value.shape == ()
        print(f"✓ {tag}: 250 salidas en el simplex")

    red_ma, red_ac = _red('MA_AC'), _red('AC')
    with pytest.raises(VarianteInvalidaException):
        red_ma.forward(_scan(rng), red_ac.estado_inicial())
    with pytest.raises(VarianteInvalidaException):
        red_ac.forward(_scan(rng), red_ma.estado_inicial())
    with pytest.raises(VarianteInvalidaException):
        red_ac.auxiliares(Tensor(np.zeros(ARQ.dim_phi)), 0, Tensor(np.zeros(ARQ.dim_phi)))
    print("✓ Estado de otra variante y auxiliares inexistentes rechazados")


def test_variantes_equivalentes():
    """Las cabezas auxiliares quedan fuera del camino de la política"""
    print("\n" + "=" * 60)
    print("PRUEBA: Equivalencia entre variantes con y sin auxiliares")
    print("=" * 60)

    for base, con_aux in (('MA_AC', 'MA_AC_AR'), ('AC', 'AC_AR')):
        red_a, red_b = _red(base, seed=9), _red(con_aux, seed=9)
        for nombre in red_a.params:
            assert np.array_equal(red_a.params[nombre].values, red_b.params[nombre].values)
        assert any(n.startswith('aux/') for n in red_b.params)

        rng = np.random.default_rng(2)
        estado_a, estado_b = red_a.estado_inicial(), red_b.estado_inicial()
        for _ in range(10):
            scan = _scan(rng)
            salida_a, estado_a, _ = red_a.forward(scan, estado_a)
            salida_b, estado_b, _ = red_b.forward(scan, estado_b)
            assert np.array_equal(salida_a.probs(), salida_b.probs())
            assert salida_a.value.item() == salida_b.value.item()
        print(f"✓ {base} y {con_aux}: parámetros compartidos y salidas idénticas")


def _gradientes(red: RedMACN, funcion) -> dict:
    with Tape() as cinta:
        salida = funcion(None)
    return backward(cinta, salida, red.params)


def _indices_informativos(grad: np.ndarray, maximo: int = 25, piso: float = 1e-5) -> list:
    """Hasta `maximo` índices repartidos entre los de |g| >= piso"""
    candidatos = np.flatnonzero(np.abs(grad.reshape(-1)) >= piso)
    if candidatos.size > maximo:
        candidatos = candidatos[np.linspace(0, candidatos.size - 1, maximo).astype(int)]
    return [int(i) for i in candidatos]


def _verificar_grupos(red: RedMACN, funcion, nombres) -> set:
    """grad_check por parámetro; retorna los grupos (prefijo de capa) verificados"""
    grads = _gradientes(red, funcion)
    verificados = set()
    for nombre in nombres:
        indices = _indices_informativos(grads[nombre])
        if not indices:
            continue
        error = grad_check(funcion, red.params[nombre], indices=indices)
        assert error < 1e-4, (nombre, error)
        verificados.add(nombre.rsplit('/', 1)[0])
        print(f"✓ {nombre}: {len(indices)} entradas, {error:.2e}")
    return verificados


def test_gradiente_forward():
    """grad_check a través de tres pasos de la red con memoria"""
    print("\n" + "=" * 60)
    print("PRUEBA: Gradientes del forward completo")
    print("=" * 60)

    red = _red('MA_AC_AR', seed=5)
    rng = np.random.default_rng(4)
    scans = [_scan(rng) for _ in range(3)]
    pesos = rng.normal(size=3)

    def desenrollar(_):
        estado = red.estado_inicial()
        total = Tensor(0.0)
        for scan in scans:
            salida, estado, _ = red.forward(scan, estado)
            total = ops.add(total, ops.add(ops.sum(ops.mul(salida.action_probs, pesos)), salida.value))
        return total

    nombres = ('enc/conv1/K', 'enc/kernel/W', 'dnc/lstm/W', 'dnc/interfaz/W', 'cabeza/actor/W')
    verificados = _verificar_grupos(red, desenrollar, nombres)
    assert verificados == {n.rsplit('/', 1)[0] for n in nombres}


def test_gradiente_perdida_total():
    """grad_check de L_AC + λ·(L_SP, L_RP, L_AP) desenrollada tres pasos"""
    print("\n" + "=" * 60)
    print("PRUEBA: Gradientes de la pérdida total")
    print("=" * 60)

    red = _red('MA_AC_AR', seed=7)
    rng = np.random.default_rng(8)
    scans = [_scan(rng) for _ in range(4)]
    acciones = [0, 2, 1]
    recompensas = [1.0, 1.0, -1.0]
    ventajas = [float(a) for a in rng.normal(size=3)]
    retornos = [float(r) for r in rng.normal(size=3)]
    config = AuxConfig()

    def _media(perdidas):
        return ops.mean(ops.concat([ops.reshape(p, (1,)) for p in perdidas]))

    def perdida(_):
        estado = red.estado_inicial()
        encoding = red.encode(scans[0])
        log_probs, valores, entropias, sp, rp, ap = [], [], [], [], [], []
        for t, accion in enumerate(acciones):
            salida, estado, encoding = red.forward(scans[t], estado, encoding=encoding)
            siguiente = red.encode(scans[t + 1])
            pred = red.auxiliares(encoding.phi, accion, siguiente.phi)
            log_probs.append(ops.log(ops.tomar(salida.action_probs, accion)))
            valores.append(salida.value)
            entropias.append(entropia(salida.action_probs))
            sp.append(loss_state_prediction(pred.phi_next_pred, siguiente.phi))
            rp.append(loss_reward_prediction(pred.reward_pred, recompensas[t]))
            ap.append(loss_action_prediction(pred.action_pred_probs, accion))
            encoding = siguiente
        ac = actor_critic_loss(log_probs, ventajas, valores, retornos, entropias)
        return total_loss(ac, _media(sp), _media(rp), _media(ap), config, red.variant)

    assert perdida(None).shape == ()
    verificados = _verificar_grupos(red, perdida, list(red.params))
    grupos = {n.rsplit('/', 1)[0] for n in red.params}
    assert verificados == grupos, sorted(grupos - verificados)
    print(f"✓ {len(grupos)} grupos de parámetros verificados, incluidas las cabezas auxiliares")


# ============================================
# PÉRDIDAS Y PSEUDO-RECOMPENSAS
# ============================================

def test_perdidas_auxiliares():
    """Pérdidas de estado, recompensa y acción"""
    print("\n" + "=" * 60)
    print("PRUEBA: Pérdidas de las tareas auxiliares")
    print("=" * 60)

    rng = np.random.default_rng(5)
    phi = rng.normal(size=64)
    assert loss_state_prediction(Tensor(phi), Tensor(phi)).item() == 0.0
    assert loss_state_prediction(Tensor(phi + 1.0), Tensor(phi)).item() == pytest.approx(32.0)
    otro = rng.normal(size=64)
    assert abs(loss_state_prediction(Tensor(phi), Tensor(otro)).item()
               - 0.5 * ((phi - otro) ** 2).sum()) < 1e-12
    with pytest.raises(FormaIncompatibleException):
        loss_state_prediction(Tensor(phi), Tensor(phi[:10]))
    print("✓ L_SP: 0, 32 y fórmula directa")

    assert loss_reward_prediction(Tensor(1.0), 1.0).item() == 0.0
    assert loss_reward_prediction(Tensor(3.0), 1.0).item() == 2.0
    r_hat, r = rng.normal(size=2)
    assert loss_reward_prediction(Tensor(r_hat), r).item() == 0.5 * (r_hat - r) ** 2
    print("✓ L_RP: 0, 2 y fórmula directa")

    assert loss_action_prediction(Tensor(np.array([0.0, 1.0, 0.0])), 1).item() == 0.0
    uniforme = loss_action_prediction(Tensor(np.full(3, 1 / 3)), 2).item()
    assert abs(uniforme - math.log(3)) < 1e-12
    p = rng.dirichlet(np.ones(3))
    assert abs(loss_action_prediction(Tensor(p), 0).item() + math.log(p[0])) < 1e-12
    assert np.isfinite(loss_action_prediction(Tensor(np.array([1.0, 0.0, 0.0])), 2).item())
    assert loss_action_prediction(Tensor(p), np.int64(0)).item() == loss_action_prediction(Tensor(p), 0).item()
    assert loss_action_prediction(Tensor(p), np.argmax(p)).item() == pytest.approx(-math.log(p.max()))
    for invalida in (3, -1, 1.0, np.int64(3)):
        with pytest.raises(AccionInvalidaException):
            loss_action_prediction(Tensor(p), invalida)
    print(f"✓ L_AP: 0, ln 3 = {uniforme:.4f}, piso en p = 0 e índices inválidos")


def test_pseudo_reward():
    """Rama dentro de la cota, fuera y borde inclusivo"""
    print("\n" + "=" * 60)
    print("PRUEBA: Pseudo-recompensa acotada")
    print("=" * 60)

    assert pseudo_reward(1.0, 2.0) == 1.0
    assert pseudo_reward(5.0, 2.0) == 1.5
    assert pseudo_reward(2.0, 2.0) == 2.0
    assert pseudo_reward(-2.0, 2.0) == -2.0
    with pytest.raises(DatosInvalidosException):
        pseudo_reward(1.0, 0.0)
    print("✓ 1.0 -> 1.0, 5.0 -> 1.5, 2.0 -> 2.0 con η = 2")

    rng = np.random.default_rng(6)
    perdidas = rng.exponential(3.0, size=10000)
    cota = max(2.0, 1.5)
    assert all(pseudo_reward(x, 2.0) <= cota for x in perdidas)
    print("✓ 10000 pérdidas aleatorias acotadas por max(η, 1.5)")

    config = AuxConfig()
    assert limite_pseudo_episodio(config, 500) == 2.0 * 2.0 * 500
    print("✓ Cota por episodio = 2·max(η, 1.5)·episode_cap")


def test_total_loss_y_recompensa():
    """Suma ponderada de pérdidas y recompensa modificada"""
    print("\n" + "=" * 60)
    print("PRUEBA: Pérdida total y recompensa modificada")
    print("=" * 60)

    config = AuxConfig()
    con_aux = AgentVariant.desde_tag('MA_AC_AR')
    sin_aux = AgentVariant.desde_tag('MA_AC')
    assert total_loss(0.7, 0.0, 0.0, 0.0, config, con_aux).item() == 0.7
    assert total_loss(1.0, 1.0, 1.0, 1.0, config, con_aux).item() == pytest.approx(1.4)
    assert total_loss(1.0, 9.0, 9.0, 9.0, config, sin_aux).item() == 1.0
    previo = total_loss(1.0, 0.0, 0.5, 0.5, config, con_aux).item()
    for l_sp in (0.5, 1.0, 3.0):
        actual = total_loss(1.0, l_sp, 0.5, 0.5, config, con_aux).item()
        assert actual >= previo
        previo = actual
    print("✓ 1 + 0.2 + 0.1 + 0.1 = 1.4; sin auxiliares solo L_AC; monótona")

    assert modified_reward(1.0, 0.0, 0.0, con_aux) == 1.0
    assert modified_reward(1.0, 1.5, 1.5, con_aux) == 4.0
    assert modified_reward(1.0, 1.5, 1.5, sin_aux) == 1.0
    print("✓ Recompensa modificada: 1.0, 4.0 y r_ext en variantes sin auxiliares")


def test_actor_critic_loss():
    """Casos cerrados y gradiente del término de valor"""
    print("\n" + "=" * 60)
    print("PRUEBA: Pérdida actor-crítico")
    print("=" * 60)

    beta = 0.01
    uniforme = Tensor(np.full(3, 1 / 3))
    log_p = ops.log(ops.tomar(uniforme, 0))
    perdida = actor_critic_loss([log_p], [0.0], [Tensor(2.0)], [2.0], [entropia(uniforme)], beta=beta)
    assert abs(perdida.item() + beta * math.log(3)) < 1e-12
    print(f"✓ Ventaja 0, V = R, política uniforme -> −β·ln 3 = {perdida.item():.6f}")

    perdida = actor_critic_loss([Tensor(-1.0)], [2.0], [Tensor(1.0)], [0.0], [Tensor(0.0)])
    assert perdida.item() == pytest.approx(2.5)
    print("✓ log π = −1, Â = 2, V − R = 1, S = 0 -> 2.5")

    with pytest.raises(DatosInvalidosException):
        actor_critic_loss([Tensor(-1.0)], [1.0, 2.0], [Tensor(0.0)], [0.0], [Tensor(0.0)])
    with pytest.raises(DatosInvalidosException):
        actor_critic_loss([], [], [], [], [])
    print("✓ Longitudes distintas o vacías rechazadas")

    rng = np.random.default_rng(7)
    valores = Tensor(rng.normal(size=4))
    retornos = rng.normal(size=4)

    def perdida_valor(v):
        return actor_critic_loss([Tensor(-0.5)] * 4, [0.3] * 4, [ops.tomar(v, i) for i in range(4)],
                                 list(retornos), [Tensor(0.2)] * 4)

    error = grad_check(perdida_valor, valores)
    assert error < 1e-4
    print(f"✓ Gradiente del término de valor: {error:.2e}")


# ============================================
# CHECKPOINTS
# ============================================

def test_checkpoint():
    """Guardar, cargar exacto y variante distinta"""
    print("\n" + "=" * 60)
    print("PRUEBA: Checkpoints del agente")
    print("=" * 60)

    servicio = AgenteService()
    red = servicio.crear('MA_AC_AR', ARQ, seed=11)
    with tempfile.TemporaryDirectory() as tmp:
        ruta = servicio.guardar(red, Path(tmp) / 'agente.npz', episode=7)
        cargada = servicio.cargar(ruta)
        assert cargada.variant.tag == 'MA_AC_AR'
        assert cargada.arquitectura == ARQ
        for nombre in red.params:
            assert np.array_equal(red.params[nombre].values, cargada.params[nombre].values)
        print("✓ Ida y vuelta exacta en 64 bits")

        rng = np.random.default_rng(8)
        scan = _scan(rng)
        a, _, _ = red.forward(scan, red.estado_inicial())
        b, _, _ = cargada.forward(scan, cargada.estado_inicial())
        assert np.array_equal(a.probs(), b.probs())
        print("✓ La red cargada produce las mismas salidas")

        with pytest.raises(CheckpointIncompatibleException):
            servicio.cargar(ruta, variante_esperada='AC')
        with pytest.raises(CheckpointIncompatibleException):
            servicio.cargar_en(servicio.crear('MA_AC', ARQ), ruta)
        with pytest.raises(CheckpointIncompatibleException):
            servicio.cargar(Path(tmp) / 'no_existe.npz')
        print("✓ Variante distinta y archivo faltante rechazados")

        otra = servicio.crear('MA_AC_AR', ARQ, seed=12)
        servicio.cargar_en(otra, ruta)
        assert np.array_equal(otra.params['cabeza/actor/W'].values, red.params['cabeza/actor/W'].values)
        print("✓ Arranque en caliente sobre una red nueva")

    with pytest.raises(VarianteInvalidaException):
        servicio.crear('MA_XX')
    print("✓ Etiqueta de variante desconocida rechazada")


def run_all_tests():
    """Ejecuta todas las pruebas"""
    print("\n" + "#" * 60)
    print("# PRUEBAS DEL AGENTE")
    print("#" * 60)

    tests = [
        ("encode", test_encode),
        ("forward", test_forward),
        ("Variantes equivalentes", test_variantes_equivalentes),
        ("Gradiente del forward", test_gradiente_forward),
        ("Gradiente de la pérdida total", test_gradiente_perdida_total),
        ("Pérdidas auxiliares", test_perdidas_auxiliares),
        ("pseudo_reward", test_pseudo_reward),
        ("total_loss y modified_reward", test_total_loss_y_recompensa),
        ("actor_critic_loss", test_actor_critic_loss),
        ("Checkpoint", test_checkpoint)
    ]

    results = []
    for name, test_func in tests:
        try:
            test_func()
            results.append((name, True))
        except Exception as e:
            print(f"\n✗ Error en {name}: {e!r}")
            results.append((name, False))

    print("\n" + "=" * 60)
    print("RESUMEN DE PRUEBAS")
    print("=" * 60)
    for name, passed in results:
        print(f"{'✓ PASS' if passed else '✗ FAIL'} - {name}")
    passed_count = sum(1 for _, p in results if p)
    print(f"\nPruebas exitosas: {passed_count}/{len(results)}")
    print("=" * 60)
    return passed_count == len(results)


if __name__ == '__main__':
    sys.exit(0 if run_all_tests() else 1)
