import numpy as np
import pytest

from core.errores import ParametrosInvalidosError
from core.fredholm import (
    EspecificacionNucleo,
    comparar_conjetura,
    constante_cota,
    demostracion_divergencia,
    determinante_fredholm,
    estabilidad_fredholm,
    evaluar_nucleo,
    ley_primera_particula,
    matriz_nucleo,
    nodos_c1,
    qlaplace_exacto_n1,
    radio_c1_por_defecto,
)
from core.funciones_q import inverso_qpoch_inf
from core.modelo import ParametrosPushASEP


@pytest.fixture
def spec_basica(params_una_particula):
    return EspecificacionNucleo(zeta=-0.3, n=1, t=0.5, params=params_una_particula,
                                puntos_mb=128, puntos_nystrom=16)


# ============================
# ESPECIFICACIÓN DEL NÚCLEO
# ============================
def test_requiere_velocidades_unitarias():
    params = ParametrosPushASEP(0.5, 1.0, 1.0, (1.0, 0.7))
    with pytest.raises(ParametrosInvalidosError):
        EspecificacionNucleo(zeta=-0.3, n=1, t=0.5, params=params)


@pytest.mark.parametrize("zeta", [0.5, 2.0])
def test_zeta_real_positivo(params_una_particula, zeta):
    with pytest.raises(ParametrosInvalidosError):
        EspecificacionNucleo(zeta=zeta, n=1, t=0.5, params=params_una_particula)


def test_radio_de_c1(params_una_particula):
    c = radio_c1_por_defecto(0.5)
    assert np.sqrt(0.5) * (1 + c) < 1 - c
    with pytest.raises(ParametrosInvalidosError):
        EspecificacionNucleo(zeta=-0.3, n=1, t=0.5, params=params_una_particula, radio_c1=0.5)


def test_truncacion_por_defecto(params_una_particula):
    real = EspecificacionNucleo(zeta=-0.3, n=1, t=0.5, params=params_una_particula)
    complejo = real.con(zeta=-0.5 + 0.5j, truncacion_mb=None)
    assert real.truncacion_mb == pytest.approx(np.log(1e14) / np.pi)
    assert complejo.truncacion_mb > real.truncacion_mb


# ============================
# DISCRETIZACIÓN
# ============================
def test_nodos_de_c1_integran_la_medida(spec_basica):
    w, pesos = nodos_c1(spec_basica)
    # ∮ dw/(2πi) (w - 1)^{-1} = 1 y ∮ dw/(2πi) = 0
    assert np.sum(pesos / (w - 1)) == pytest.approx(1.0)
    assert abs(np.sum(pesos)) <= 1e-14


def test_matriz_coincide_con_evaluacion_puntual(spec_basica):
    w, _ = nodos_c1(spec_basica)
    K = matriz_nucleo(spec_basica)
    assert K.shape == (16, 16)
    for j, l in [(0, 0), (3, 7), (15, 2)]:
        assert K[j, l] == pytest.approx(evaluar_nucleo(spec_basica, w[j], w[l]), rel=1e-10)


def test_zeta_cero(params_una_particula):
    spec = EspecificacionNucleo(zeta=0.0, n=1, t=0.5, params=params_una_particula)
    assert determinante_fredholm(spec) == 1.0
    assert not matriz_nucleo(spec).any()


def test_estabilidad_devuelve_cambios(spec_basica):
    reporte = estabilidad_fredholm(spec_basica)
    assert set(reporte) == {'determinante', 'cambio_nystrom', 'cambio_mellin_barnes'}
    assert np.isfinite(reporte['determinante'])


def test_tabla_de_comparacion(params_una_particula):
    tabla = comparar_conjetura(params_una_particula, [(0.5, -0.3)], puntos_mb=128, puntos_nystrom=16)
    assert list(tabla.columns) == ['q', 't', 'zeta', 'determinante', 'exacto', 'diferencia']
    assert len(tabla) == 1


@pytest.mark.parametrize("R, L", [(1.0, 0.0), (1.0, 1.0)])
@pytest.mark.parametrize("zeta", [-0.3, -1.0, -0.5, -5.0])
def test_determinante_igual_a_qlaplace_exacto(R, L, zeta):
    params = ParametrosPushASEP(0.5, R, L, (1.0,))
    spec = EspecificacionNucleo(zeta=zeta, n=1, t=0.5, params=params)
    assert abs(determinante_fredholm(spec) - qlaplace_exacto_n1(params, 0.5, zeta)) <= 1e-4


@pytest.mark.parametrize("R, L", [(1.0, 0.0), (1.0, 1.0)])
@pytest.mark.parametrize("zeta", [-0.3, -5.0])
def test_refinamiento_estable(R, L, zeta):
    params = ParametrosPushASEP(0.5, R, L, (1.0,))
    reporte = estabilidad_fredholm(EspecificacionNucleo(zeta=zeta, n=1, t=0.5, params=params))
    assert reporte['cambio_nystrom'] <= 1e-8
    assert reporte['cambio_mellin_barnes'] <= 1e-8


# ============================
# ORÁCULO DE LA PRIMERA PARTÍCULA
# ============================
def test_ley_de_la_primera_particula():
    params = ParametrosPushASEP(0.5, 1.3, 0.6, (1.2, 1.0))
    valores, probabilidades = ley_primera_particula(params, 2.0)
    assert probabilidades.sum() == pytest.approx(1.0, abs=1e-14)
    media = (1.3 * 1.2 - 0.6 / 1.2) * 2.0
    varianza = (1.3 * 1.2 + 0.6 / 1.2) * 2.0
    assert np.sum(valores * probabilidades) == pytest.approx(media, abs=1e-12)
    assert np.sum((valores - media) ** 2 * probabilidades) == pytest.approx(varianza, abs=1e-10)


def test_qlaplace_en_tiempo_cero(params_una_particula):
    exacto = qlaplace_exacto_n1(params_una_particula, 0.0, -0.3)
    assert exacto == pytest.approx(complex(inverso_qpoch_inf(-0.3, 0.5)), rel=1e-14)


def test_qlaplace_primer_orden_en_zeta(params_una_particula):
    # E[1/(ζ q^X; q)_∞] = 1 + ζ E q^X / (1 - q) + O(ζ²)
    zeta = -1e-6
    exacto = qlaplace_exacto_n1(params_una_particula, 0.5, zeta)
    momento = np.exp(0.5 * (0.5 - 1) + 0.5 * (2 - 1))
    assert (exacto - 1) / zeta == pytest.approx(momento / 0.5, rel=1e-5)


# ============================
# SERIE DE MOMENTOS
# ============================
def test_constante_de_la_cota():
    params = ParametrosPushASEP(0.5, 2.0, 1.0, (0.5,))
    assert constante_cota(params, 1.0) == pytest.approx(np.exp(-1.0 - 2.0))


def test_terminos_dominan_la_cota(params_homogeneos):
    tabla = demostracion_divergencia(params_homogeneos, 1.0, 5)
    assert (tabla['termino'] >= tabla['cota_inferior'] * (1 - 1e-12)).all()


def test_divergencia_con_saltos_izquierda(params_una_particula):
    tabla = demostracion_divergencia(params_una_particula, 1.0, 8)
    razones = tabla['razon'].to_numpy()[2:]
    assert np.all(np.diff(razones) > 0)
    assert razones[-1] > 1


def test_convergencia_sin_saltos_izquierda(params_una_particula):
    tabla = demostracion_divergencia(params_una_particula.con(L=0.0), 1.0, 8, zeta=-0.5)
    assert np.all(np.diff(tabla['termino'].to_numpy()) < 0)
    assert np.isnan(tabla['razon'].iloc[0])
