"""
============================================
SCRIPT DE PRUEBA DEL NÚCLEO DIFERENCIABLE
============================================
Primitivas contra oráculos directos, gradientes
contra diferencias finitas, backward y Adam.
============================================
"""

import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from diffcore import (
    AdamState, ParamsLSTM, Parametros, Tape, Tensor, adam_step, backward, grad_check, ops, sin_cinta
)
from exceptions import DatosInvalidosException, FormaIncompatibleException


def _escalar(t: Tensor, rng_seed: int = 99) -> Tensor:
    """Suma ponderada fija: convierte cualquier salida en escalar"""
    pesos = np.random.default_rng(rng_seed).normal(size=t.shape)
    return ops.sum(ops.mul(t, pesos))


def _sig(x):
    return 1.0 / (1.0 + np.exp(-x))


# ============================================
# PRIMITIVAS CONTRA ORÁCULOS
# ============================================

def test_conv2d():
    """Convolución same contra casos a mano y bucle ingenuo"""
    print("\n" + "=" * 60)
    print("PRUEBA: conv2d")
    print("=" * 60)

    rng = np.random.default_rng(0)
    x = rng.normal(size=(1, 4, 4))
    identidad = ops.conv2d(Tensor(x), Tensor(np.ones((1, 1, 1, 1))), Tensor(np.zeros(1)))
    assert np.array_equal(identidad.values, x)
    print("✓ Kernel identidad 1×1")

    unos = ops.conv2d(Tensor(np.ones((1, 3, 3))), Tensor(np.ones((1, 1, 3, 3))))
    assert unos.values[0, 1, 1] == 9.0
    assert unos.values[0, 0, 0] == unos.values[0, 2, 2] == 4.0
    print("✓ Unos 3×3: centro 9, esquinas 4")

    entrada = rng.normal(size=(2, 5, 5))
    kernel = rng.normal(size=(3, 2, 3, 3))
    sesgo = rng.normal(size=3)
    salida = ops.conv2d(Tensor(entrada), Tensor(kernel), Tensor(sesgo)).values
    padded = np.pad(entrada, ((0, 0), (1, 1), (1, 1)))
    oraculo = np.zeros((3, 5, 5))
    for f in range(3):
        for y in range(5):
            for x_ in range(5):
                total = sesgo[f]
                for c in range(2):
                    for dy in range(3):
                        for dx in range(3):
                            total += padded[c, y + dy, x_ + dx] * kernel[f, c, dy, dx]
                oraculo[f, y, x_] = total
    assert np.max(np.abs(salida - oraculo)) < 1e-12
    print("✓ Aleatorio 5×5 contra bucle ingenuo")

    with pytest.raises(FormaIncompatibleException):
        ops.conv2d(Tensor(entrada), Tensor(rng.normal(size=(3, 2, 2, 2))))


def test_maxpool2d():
    """Máximo por ventana y regla de empates"""
    print("\n" + "=" * 60)
    print("PRUEBA: maxpool2d")
    print("=" * 60)

    assert ops.maxpool2d(Tensor([[[1.0, 2.0], [3.0, 4.0]]])).values.reshape(-1)[0] == 4.0
    print("✓ [[1,2],[3,4]] -> 4")

    constante = Tensor(np.full((1, 2, 2), 7.0), requires_grad=True)
    with Tape() as cinta:
        salida = ops.sum(ops.maxpool2d(constante))
    backward(cinta, salida)
    assert np.array_equal(constante.grad.reshape(-1), [1.0, 0.0, 0.0, 0.0])
    print("✓ Entrada constante: gradiente al primer elemento")

    rng = np.random.default_rng(1)
    x = rng.normal(size=(2, 8, 8))
    salida = ops.maxpool2d(Tensor(x)).values
    for c in range(2):
        for i in range(4):
            for j in range(4):
                assert salida[c, i, j] == x[c, 2 * i:2 * i + 2, 2 * j:2 * j + 2].max()
    print("✓ 8×8 aleatorio contra máximo por fuerza bruta")

    with pytest.raises(FormaIncompatibleException):
        ops.maxpool2d(Tensor(np.zeros((1, 3, 4))))


def test_dense():
    """Capa densa contra matvec ingenuo"""
    x = np.array([-1.0, 2.0])
    assert np.array_equal(ops.dense(x, np.eye(2), np.zeros(2)).values, x)
    assert np.array_equal(ops.dense(x, np.eye(2), np.zeros(2), 'relu').values, [0.0, 2.0])

    rng = np.random.default_rng(2)
    w, b, v = rng.normal(size=(4, 6)), rng.normal(size=4), rng.normal(size=6)
    oraculo = [sum(w[i, j] * v[j] for j in range(6)) + b[i] for i in range(4)]
    assert np.max(np.abs(ops.dense(v, w, b, 'none').values - oraculo)) < 1e-12
    assert np.max(np.abs(ops.dense(v, w, b, 'tanh').values - np.tanh(oraculo))) < 1e-12

    with pytest.raises(FormaIncompatibleException):
        ops.dense(v, w, np.zeros(3))
    with pytest.raises(DatosInvalidosException):
        ops.dense(v, w, b, 'gelu')
    print("✓ dense: identidad, relu y oráculo")


def test_lstm_step():
    """Recurrencia LSTM contra compuertas escalares"""
    print("\n" + "=" * 60)
    print("PRUEBA: lstm_step")
    print("=" * 60)

    u, d = 3, 2
    ceros = ParamsLSTM(pesos=Tensor(np.zeros((4 * u, d + u))), sesgo=Tensor(np.zeros(4 * u)))
    h, c = ops.lstm_step(np.ones(d), np.zeros(u), np.zeros(u), ceros)
    assert np.all(h.values == 0.0) and np.all(c.values == 0.0)
    print("✓ Parámetros y estado nulos: h' = 0")

    sesgo = np.zeros(4 * u)
    sesgo[:u] = -50.0
    sesgo[u:2 * u] = 50.0
    acarreo = ParamsLSTM(pesos=Tensor(np.zeros((4 * u, d + u))), sesgo=Tensor(sesgo))
    c0 = np.array([0.3, -0.7, 1.2])
    _, c = ops.lstm_step(np.ones(d), np.zeros(u), c0, acarreo)
    assert np.allclose(c.values, c0, atol=1e-12)
    print("✓ Olvido saturado en 1, entrada en 0: c' = c")

    rng = np.random.default_rng(3)
    W, b = rng.normal(size=(4 * u, d + u)) * 0.5, rng.normal(size=4 * u) * 0.5
    x, h0, c0 = rng.normal(size=d), rng.normal(size=u), rng.normal(size=u)
    h, c = ops.lstm_step(x, h0, c0, ParamsLSTM(pesos=Tensor(W), sesgo=Tensor(b)))
    entrada = np.concatenate([x, h0])
    for k in range(u):
        fila = lambda bloque: sum(W[bloque * u + k, j] * entrada[j] for j in range(d + u)) + b[bloque * u + k]
        i_k, f_k, o_k, g_k = _sig(fila(0)), _sig(fila(1)), _sig(fila(2)), np.tanh(fila(3))
        c_k = f_k * c0[k] + i_k * g_k
        assert abs(c.values[k] - c_k) < 1e-12
        assert abs(h.values[k] - o_k * np.tanh(c_k)) < 1e-12
    print("✓ Paso aleatorio contra oráculo por elemento")


def test_softmax():
    """Softmax: simetría, desborde y fórmula directa"""
    assert np.allclose(ops.softmax(np.zeros(4)).values, 0.25)
    grande = ops.softmax(np.array([1000.0, 0.0])).values
    assert np.all(np.isfinite(grande)) and grande[0] == pytest.approx(1.0) and grande[1] < 1e-12

    rng = np.random.default_rng(4)
    for _ in range(20):
        x = rng.normal(size=6) * 5
        directo = np.exp(x) / np.exp(x).sum()
        s = ops.softmax(x).values
        assert np.max(np.abs(s - directo)) < 1e-12
        assert np.all(s >= 0) and abs(s.sum() - 1.0) < 1e-9
        assert np.max(np.abs(ops.log_softmax(x).values - np.log(directo))) < 1e-12
    print("✓ softmax: uniforme, [1000, 0] y fórmula directa")


# ============================================
# BACKWARD Y VERIFICACIÓN DE GRADIENTES
# ============================================

def test_backward():
    """Casos base de backward"""
    print("\n" + "=" * 60)
    print("PRUEBA: backward")
    print("=" * 60)

    x = Tensor(np.array(2.5), requires_grad=True)
    with Tape() as cinta:
        perdida = ops.mul(x, 1.0)
    backward(cinta, perdida)
    assert float(x.grad) == pytest.approx(1.0)
    print("✓ d(x)/dx = 1")

    entrada = Tensor(np.random.default_rng(5).normal(size=(1, 4, 4)), requires_grad=True)
    with Tape() as cinta:
        perdida = ops.sum(ops.conv2d(entrada, np.ones((1, 1, 3, 3))))
    backward(cinta, perdida)
    cuenta = np.array([2, 3, 3, 2], dtype=float)
    assert np.array_equal(entrada.grad[0], np.outer(cuenta, cuenta))
    print("✓ sum(conv2d(x, unos)): mapa de conteo de ventanas")

    params = Parametros()
    usado = params.agregar('usado', np.ones(3))
    params.agregar('libre', np.ones(2))
    with Tape() as cinta:
        perdida = ops.sum(ops.square(usado))
    grads = backward(cinta, perdida, params)
    assert np.array_equal(grads['usado'], [2.0, 2.0, 2.0])
    assert np.array_equal(grads['libre'], [0.0, 0.0])
    print("✓ Parámetros no alcanzados: gradiente cero")

    with Tape() as cinta:
        vector = ops.square(usado)
    with pytest.raises(FormaIncompatibleException):
        backward(cinta, vector)
    print("✓ Pérdida no escalar: error")

    with Tape() as cinta:
        with sin_cinta():
            ops.square(usado)
    assert len(cinta) == 0
    print("✓ sin_cinta no registra nodos")


def test_backward_lineal():
    """grad(a·f + b·g) = a·grad f + b·grad g"""
    rng = np.random.default_rng(6)
    x = Tensor(rng.normal(size=5), requires_grad=True)

    def f(t):
        return ops.sum(ops.tanh(ops.mul(t, 2.0)))

    def g(t):
        return ops.sum(ops.mul(ops.softmax(t), np.arange(5.0)))

    def gradiente(fn):
        x.grad = None
        with Tape() as cinta:
            salida = fn(x)
        backward(cinta, salida)
        return x.grad.copy()

    a, b = 0.7, -1.3
    combinado = gradiente(lambda t: ops.add(ops.mul(f(t), a), ops.mul(g(t), b)))
    assert np.max(np.abs(combinado - (a * gradiente(f) + b * gradiente(g)))) < 1e-9
    print("✓ backward es lineal")


def test_escalares():
    """Los escalares conservan la forma () y su gradiente también"""
    print("\n" + "=" * 60)
    print("PRUEBA: Tensores escalares")
    print("=" * 60)

    assert Tensor(0.0).shape == ()
    assert Tensor(np.float64(2.5)).item() == 2.5
    x = Tensor(np.arange(6.0).reshape(2, 3), requires_grad=True)
    assert ops.sum(x).shape == () and ops.mean(x).shape == ()
    assert ops.reshape(Tensor(np.ones(1)), ()).shape == ()
    assert ops.tomar(Tensor(np.arange(3.0)), 1).shape == ()
    print("✓ Tensor(0.0), sum, mean, reshape a () y tomar: forma ()")

    v = Tensor(np.array([0.2, -0.4, 0.9]), requires_grad=True)
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        with Tape() as cinta:
            salida = ops.mul(ops.tomar(v, 2), 3.0)
        backward(cinta, salida)
    assert salida.shape == ()
    assert np.array_equal(v.grad, np.array([0.0, 0.0, 3.0]))
    print("✓ backward de tomar sin advertencias de numpy")


def _casos_primitivas(rng):
    """(nombre, forma del punto, función escalar del punto)"""
    otro = rng.normal(size=(3, 4))
    positivo = 1.5 + rng.random(size=(3, 4))
    W = rng.normal(size=(4, 5))
    v5 = rng.normal(size=5)
    kernel = rng.normal(size=(2, 2, 3, 3))
    entrada_conv = rng.normal(size=(2, 5, 5))
    memoria = rng.normal(size=(6, 4))
    clave = rng.normal(size=4)
    lstm = ParamsLSTM(pesos=Tensor(rng.normal(size=(12, 5)) * 0.5), sesgo=Tensor(rng.normal(size=12) * 0.5))
    h0, c0 = rng.normal(size=3), rng.normal(size=3)

    return [
        ('add', (3, 4), lambda x: _escalar(ops.add(x, otro))),
        ('add broadcast', (4,), lambda x: _escalar(ops.add(otro, x))),
        ('sub', (3, 4), lambda x: _escalar(ops.sub(otro, x))),
        ('mul', (3, 4), lambda x: _escalar(ops.mul(x, otro))),
        ('div', (3, 4), lambda x: _escalar(ops.div(x, positivo))),
        ('neg', (3, 4), lambda x: _escalar(ops.neg(x))),
        ('square', (3, 4), lambda x: _escalar(ops.square(x))),
        ('mean', (3, 4), lambda x: ops.mean(ops.mul(x, otro))),
        ('exp', (3, 4), lambda x: _escalar(ops.exp(x))),
        ('log', (3, 4), lambda x: _escalar(ops.log(ops.add(ops.square(x), 0.5)))),
        ('sigmoid', (3, 4), lambda x: _escalar(ops.sigmoid(x))),
        ('tanh', (3, 4), lambda x: _escalar(ops.tanh(x))),
        ('relu', (3, 4), lambda x: _escalar(ops.relu(x))),
        ('softplus', (3, 4), lambda x: _escalar(ops.softplus(x))),
        ('reshape', (3, 4), lambda x: _escalar(ops.reshape(x, (2, 6)))),
        ('concat', (3, 4), lambda x: _escalar(ops.concat([x, otro], eje=1))),
        ('slice', (5,), lambda x: _escalar(ops.slice(x, 1, 4))),
        ('tomar', (5,), lambda x: ops.tomar(ops.tanh(x), 2)),
        ('matvec W', (4, 5), lambda x: _escalar(ops.matvec(x, v5))),
        ('matvec x', (5,), lambda x: _escalar(ops.matvec(W, x))),
        ('vecmat', (4,), lambda x: _escalar(ops.vecmat(x, W))),
        ('dense relu', (5,), lambda x: _escalar(ops.dense(x, W, np.zeros(4), 'relu'))),
        ('dense tanh', (4, 5), lambda x: _escalar(ops.dense(v5, x, np.ones(4), 'tanh'))),
        ('conv2d entrada', (2, 5, 5), lambda x: _escalar(ops.conv2d(x, kernel, np.ones(2)))),
        ('conv2d kernel', (2, 2, 3, 3), lambda x: _escalar(ops.conv2d(entrada_conv, x))),
        ('conv2d sesgo', (2,), lambda x: _escalar(ops.conv2d(entrada_conv, kernel, x))),
        ('maxpool2d', (2, 4, 4), lambda x: _escalar(ops.maxpool2d(x))),
        ('max_channels', (3, 4, 4), lambda x: _escalar(ops.max_channels(x))),
        ('softmax', (6,), lambda x: _escalar(ops.softmax(x))),
        ('log_softmax', (6,), lambda x: _escalar(ops.log_softmax(x))),
        ('cosine memoria', (6, 4), lambda x: _escalar(ops.cosine_similarity(x, clave))),
        ('cosine clave', (4,), lambda x: _escalar(ops.cosine_similarity(memoria, x))),
        ('lstm entrada', (2,), lambda x: _escalar(ops.concat(ops.lstm_step(x, h0, c0, lstm)))),
        ('lstm estado', (3,), lambda x: _escalar(ops.concat(ops.lstm_step(np.ones(2), x, c0, lstm)))),
    ]


def test_grad_check_primitivas():
    """Cada primitiva contra diferencias centrales en 10 puntos aleatorios"""
    print("\n" + "=" * 60)
    print("PRUEBA: grad_check de primitivas")
    print("=" * 60)

    rng = np.random.default_rng(7)
    for nombre, forma, f in _casos_primitivas(rng):
        peor = 0.0
        for _ in range(10):
            punto = Tensor(rng.normal(size=forma))
            peor = max(peor, grad_check(f, punto))
        assert peor < 1e-4, f"{nombre}: {peor}"
        print(f"✓ {nombre}: {peor:.1e}")


def test_grad_check_casos():
    """Función lineal, entropía cruzada y punto de empate"""
    rng = np.random.default_rng(8)
    c = rng.normal(size=6)
    lineal = grad_check(lambda x: ops.sum(ops.mul(x, c)), Tensor(rng.normal(size=6)))
    assert lineal < 1e-10

    entropia_cruzada = grad_check(lambda x: ops.neg(ops.log(ops.tomar(ops.softmax(x), 2))),
                                  Tensor(rng.normal(size=5)))
    assert entropia_cruzada < 1e-6

    empate = Tensor(np.ones((1, 2, 2)))
    excluido = grad_check(lambda x: ops.sum(ops.maxpool2d(x)), empate, excluir=range(4))
    assert excluido == 0.0
    assert empate.requires_grad is False and empate.grad is None
    print(f"✓ Lineal {lineal:.1e}, entropía cruzada {entropia_cruzada:.1e}, empate excluido")


# ============================================
# ADAM Y PARÁMETROS
# ============================================

def test_adam_step():
    """Paso de Adam: gradiente nulo, primer paso y determinismo"""
    print("\n" + "=" * 60)
    print("PRUEBA: adam_step")
    print("=" * 60)

    params = Parametros()
    params.agregar('w', np.array([1.0, -2.0, 3.0]))
    estado = AdamState(lr=1e-3)
    adam_step(params, {'w': np.zeros(3)}, estado)
    assert np.array_equal(params['w'].values, [1.0, -2.0, 3.0]) and estado.paso == 1
    adam_step(params, {}, estado)
    assert estado.paso == 2
    print("✓ Gradiente cero: parámetros sin cambio, contador avanza")

    params = Parametros()
    params.agregar('w', np.zeros(4))
    g = np.array([0.5, -2.0, 3.0, -0.1])
    adam_step(params, {'w': g}, AdamState(lr=1e-4))
    assert np.allclose(params['w'].values, -1e-4 * np.sign(g), atol=1e-10)
    print("✓ Primer paso ≈ -lr·sign(g)")

    def trayectoria():
        p = Parametros()
        p.uniforme('w', (3, 3), 3, np.random.default_rng(0))
        est = AdamState()
        rng = np.random.default_rng(1)
        for _ in range(5):
            adam_step(p, {'w': rng.normal(size=(3, 3))}, est)
        return p['w'].values.copy()

    assert np.array_equal(trayectoria(), trayectoria())
    print("✓ Dos corridas idénticas")

    with pytest.raises(FormaIncompatibleException):
        adam_step(params, {'w': np.zeros(3)}, AdamState())
    with pytest.raises(DatosInvalidosException):
        adam_step(params, {'z': np.zeros(4)}, AdamState())


def test_parametros():
    """Almacén de parámetros: inicialización, copia y carga"""
    params = Parametros()
    w = params.uniforme('capa/W', (8, 4), 4, np.random.default_rng(0))
    params.ceros('capa/b', (8,))
    assert np.all(np.abs(w.values) <= 0.5)
    assert params.numero_total() == 40 and list(params) == ['capa/W', 'capa/b']

    copia = params.snapshot()
    w.values += 1.0
    params.cargar(copia)
    assert np.array_equal(params['capa/W'].values, copia['capa/W'])

    with pytest.raises(DatosInvalidosException):
        params.agregar('capa/b', np.zeros(8))
    with pytest.raises(DatosInvalidosException):
        params.cargar({'capa/W': copia['capa/W']})
    with pytest.raises(FormaIncompatibleException):
        params.cargar({'capa/W': np.zeros((4, 8)), 'capa/b': np.zeros(8)})
    print("✓ Parametros: uniforme, snapshot y cargar")


def run_all_tests():
    """Ejecuta todas las pruebas"""
    print("\n" + "#" * 60)
    print("# PRUEBAS DEL NÚCLEO DIFERENCIABLE")
    print("#" * 60)

    tests = [
        ("conv2d", test_conv2d),
        ("maxpool2d", test_maxpool2d),
        ("dense", test_dense),
        ("lstm_step", test_lstm_step),
        ("softmax", test_softmax),
        ("backward", test_backward),
        ("backward lineal", test_backward_lineal),
        ("Escalares", test_escalares),
        ("grad_check primitivas", test_grad_check_primitivas),
        ("grad_check casos", test_grad_check_casos),
        ("adam_step", test_adam_step),
        ("Parametros", test_parametros)
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
