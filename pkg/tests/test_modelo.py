import math

import numpy as np
import pytest

from core.errores import ParametrosInvalidosError
from core.modelo import (
    ConfiguracionParticulas,
    EstadoOcupacion,
    MultiIndice,
    Movimiento,
    ParametrosPushASEP,
    aplicar_generador_dual,
    aplicar_generador_dual_markov,
    aplicar_generador_pushasep,
    aplicar_movimiento,
    configuracion_escalon,
    desplazar_ocupacion,
    enumerar_movimientos,
    enumerar_nivel,
    gaps,
    indice_a_ocupacion,
    observable_H,
    ocupacion_a_indice,
    tasa_salida_C,
    tasas_dual_markov,
)


# ============================
# VALIDACIÓN
# ============================
@pytest.mark.parametrize("q, R, L, a", [
    (1.0, 1.0, 1.0, (1.0,)),
    (0.0, 1.0, 1.0, (1.0,)),
    (0.5, 0.0, 0.0, (1.0,)),
    (0.5, -1.0, 1.0, (1.0,)),
    (0.5, 1.0, 1.0, (1.0, 0.0)),
    (0.5, 1.0, 1.0, ()),
])
def test_parametros_invalidos(q, R, L, a):
    with pytest.raises(ParametrosInvalidosError):
        ParametrosPushASEP(q, R, L, a)


def test_parametros_invalidos_son_value_error():
    with pytest.raises(ValueError):
        ParametrosPushASEP(2.0, 1.0, 1.0, (1.0,))


def test_configuracion_debe_ser_estrictamente_decreciente():
    with pytest.raises(ParametrosInvalidosError):
        ConfiguracionParticulas((0, 0))
    cfg = ConfiguracionParticulas((3, -1))
    assert cfg.posicion(0) == math.inf
    assert cfg.posicion(3) == -math.inf


def test_multi_indice_camara_de_weyl():
    with pytest.raises(ParametrosInvalidosError):
        MultiIndice((1, 2))
    assert MultiIndice((1, 2), weyl=False).k == 2


def test_movimiento_derecha_de_una_particula():
    with pytest.raises(ParametrosInvalidosError):
        Movimiento('derecha', 1, 2)


# ============================
# OBSERVABLE Y COORDENADAS
# ============================
def test_gaps_del_escalon():
    assert gaps(configuracion_escalon(3)) == [math.inf, 0, 0]


def test_observable_H_en_el_escalon_vale_uno():
    cfg = configuracion_escalon(2)
    assert observable_H(cfg, EstadoOcupacion((0, 1, 1)), 0.5) == 1.0
    assert observable_H(cfg, EstadoOcupacion((1, 0, 0)), 0.5) == 0.0


def test_observable_H_general():
    cfg = ConfiguracionParticulas((2, -3))
    # q^{(2+1)·2 + (-3+2)·1}
    assert observable_H(cfg, EstadoOcupacion((0, 2, 1)), 0.5) == pytest.approx(0.5 ** 5)


def test_indice_y_ocupacion_son_inversos():
    n = MultiIndice((2, 1, 1))
    y = indice_a_ocupacion(n, 2)
    assert y.y == (0, 2, 1)
    assert ocupacion_a_indice(y).n == n.n


def test_enumerar_nivel_tamano_y_orden():
    base = enumerar_nivel(2, 2)
    assert len(base) == math.comb(4, 2)
    assert base == sorted(base, key=lambda y: y[::-1])
    assert all(sum(y) == 2 for y in base)


# ============================
# GENERADOR q-PushASEP
# ============================
def test_movimientos_desde_el_escalon(params_homogeneos):
    movimientos = {m.clave: m.tasa for m in enumerar_movimientos(params_homogeneos, configuracion_escalon(2))}
    assert movimientos == {
        ('derecha', 1, 1): pytest.approx(1.0),
        ('izquierda', 1, 2): pytest.approx(1.0),
        ('izquierda', 2, 2): pytest.approx(1.0),
    }


def test_tasa_total_izquierda_de_cada_particula(params_velocidades):
    cfg = ConfiguracionParticulas((4, 2, -1))
    movimientos = enumerar_movimientos(params_velocidades, cfg)
    for i in range(1, 4):
        total = sum(m.tasa for m in movimientos if m.tipo == 'izquierda' and m.i == i)
        assert total == pytest.approx(params_velocidades.L / params_velocidades.velocidad(i))


def test_aplicar_movimiento_bloque():
    cfg = ConfiguracionParticulas((0, -1, -3))
    nuevo = aplicar_movimiento(cfg, Movimiento('izquierda', 1, 2))
    assert nuevo.x == (-1, -2, -3)


def test_generador_pushasep_anula_constantes(params_velocidades):
    cfg = ConfiguracionParticulas((1, 0, -4))
    assert aplicar_generador_pushasep(params_velocidades, lambda c: 7.0, cfg) == pytest.approx(0.0)


# ============================
# GENERADORES DUALES
# ============================
def test_dualidad_en_un_par(params_velocidades):
    q = params_velocidades.q
    cfg = ConfiguracionParticulas((1, -1, -2))
    y = EstadoOcupacion((0, 1, 0, 2))
    lado_x = aplicar_generador_pushasep(params_velocidades, lambda c: observable_H(c, y, q), cfg)
    lado_y = aplicar_generador_dual(params_velocidades, lambda w: observable_H(cfg, w, q), y)
    assert lado_x == pytest.approx(lado_y, rel=1e-12)


def test_tasa_C_es_la_accion_sobre_uno(params_velocidades):
    for y in enumerar_nivel(3, 3):
        estado = EstadoOcupacion(y)
        assert tasa_salida_C(params_velocidades, estado) == pytest.approx(
            aplicar_generador_dual(params_velocidades, lambda w: 1.0, estado), abs=1e-12)


def test_tasa_C_valor_explicito(params_homogeneos):
    # L[(q^{-2} - 1) + (q^{-1} - 1)] con q = 1/2
    assert tasa_salida_C(params_homogeneos, EstadoOcupacion((0, 1, 1))) == pytest.approx(4.0)


def test_generador_dual_markov_es_markoviano(params_velocidades):
    rng = np.random.default_rng(0)
    base = enumerar_nivel(3, 3)
    valores = dict(zip(base, rng.normal(size=len(base))))

    def g(w):
        return valores[w.y]

    for y in base:
        estado = EstadoOcupacion(y)
        transiciones = tasas_dual_markov(params_velocidades, estado)
        assert all(tasa > 0 for _, tasa in transiciones)
        assert all(j > i for (j, i), _ in transiciones)
        esperado = sum(tasa * (g(desplazar_ocupacion(estado, j, i)) - g(estado))
                       for (j, i), tasa in transiciones)
        assert aplicar_generador_dual_markov(params_velocidades, g, estado) == pytest.approx(esperado, abs=1e-10)


def test_dimensiones_incompatibles(params_homogeneos):
    with pytest.raises(ParametrosInvalidosError):
        observable_H(configuracion_escalon(2), EstadoOcupacion((0, 1)), 0.5)
