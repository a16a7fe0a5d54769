import numpy as np
import pytest

from core.errores import ParametrosInvalidosError
from core.estacionario import (
    LeyQGeo,
    esperanza_q_gap,
    generador_cadena_gap,
    qgeo_pmf,
    residuo_balance_detallado,
    residuo_estacionario_cadena_gap,
    suma_tasas_empuje,
    vector_qgeo,
)
from core.modelo import ParametrosPushASEP


def test_qgeo_normalizada():
    ley = LeyQGeo(0.4, 0.5)
    assert vector_qgeo(ley, 200).sum() == pytest.approx(1.0, abs=1e-14)


def test_qgeo_escalar_y_arreglo():
    ley = LeyQGeo(0.4, 0.5)
    assert isinstance(qgeo_pmf(ley, 3), float)
    assert qgeo_pmf(ley, np.array([0, 3]))[1] == pytest.approx(qgeo_pmf(ley, 3))


def test_esperanza_q_gap():
    ley = LeyQGeo(0.3, 0.6)
    assert esperanza_q_gap(ley) == pytest.approx(1 - 0.3, abs=1e-12)


def test_ley_desde_alfa():
    params = ParametrosPushASEP(0.5, 2.0, 1.0, (1.0, 0.5))
    assert LeyQGeo.desde_alfa(params, 0.5).beta == pytest.approx(0.25)
    assert LeyQGeo.desde_alfa(params, 0.5, i=2).beta == pytest.approx(0.5)


@pytest.mark.parametrize("a", [(1.0,), (1.0, 1.0, 1.0), (0.5, 1.3, 2.0, 0.8)])
def test_suma_tasas_empuje(a):
    params = ParametrosPushASEP(0.5, 2.0, 1.5, a)
    alfa = 0.4
    assert suma_tasas_empuje(params, alfa) == pytest.approx(1.5 * 2.0 / alfa, rel=1e-12)


@pytest.mark.parametrize("alfa", [0.0, 1.0, 3.0])
def test_alfa_fuera_de_rango(alfa):
    params = ParametrosPushASEP(0.5, 2.0, 1.0, (0.5, 1.0))
    with pytest.raises(ParametrosInvalidosError):
        suma_tasas_empuje(params, alfa)


def test_requiere_saltos_a_la_derecha():
    with pytest.raises(ParametrosInvalidosError):
        suma_tasas_empuje(ParametrosPushASEP(0.5, 0.0, 1.0, (1.0,)), 0.1)


def test_generador_conserva_probabilidad(params_una_particula):
    Q = generador_cadena_gap(params_una_particula, 0.3, 40).toarray()
    np.testing.assert_allclose(Q.sum(axis=1), 0.0, atol=1e-12)
    assert np.all(np.diag(Q, 1) >= 0) and np.all(np.diag(Q, -1) >= 0)


@pytest.mark.parametrize("q, alfa", [(0.5, 0.3), (0.8, 0.9), (0.3, 0.05)])
def test_qgeo_es_estacionaria(q, alfa):
    params = ParametrosPushASEP(q, 1.0, 1.0, (1.0,))
    assert residuo_estacionario_cadena_gap(params, alfa, 80) <= 1e-10
    assert residuo_balance_detallado(params, alfa, 80) <= 1e-12


def test_truncacion_minima(params_una_particula):
    with pytest.raises(ParametrosInvalidosError):
        residuo_estacionario_cadena_gap(params_una_particula, 0.3, 10)
