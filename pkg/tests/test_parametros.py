import json

import pytest

from config.escenarios import (
    crear_escenario_personalizado,
    listar_escenarios,
    tabla_escenarios,
    obtener_escenario,
)
from config.parametros import (
    PARAMETROS_DEFAULT,
    ConfiguracionEjecucion,
    cargar_configuracion,
    construir_parametros,
    obtener_parametros,
    validar_parametros,
)
from core.errores import ParametrosInvalidosError


def test_parametros_por_defecto():
    params = obtener_parametros()
    assert params == PARAMETROS_DEFAULT
    assert params['a'] is not PARAMETROS_DEFAULT['a']
    modelo = construir_parametros(params)
    assert modelo.N == 3
    assert modelo.q == 0.5


def test_modificaciones_ignoran_none():
    params = obtener_parametros({'q': 0.3, 'R': None, 'a': [0.5, 2.0]})
    assert params['q'] == 0.3
    assert params['R'] == PARAMETROS_DEFAULT['R']
    assert construir_parametros(params).a == (0.5, 2.0)


@pytest.mark.parametrize("modificacion", [
    {'q': 1.0},
    {'q': 0.0},
    {'R': -1.0},
    {'R': 0.0, 'L': 0.0},
    {'a': []},
    {'a': [1.0, 0.0]},
    {'zeta': 0.5},
    {'muestras': 0},
    {'eps': 1.0},
])
def test_valores_invalidos(modificacion):
    with pytest.raises(ParametrosInvalidosError):
        obtener_parametros(modificacion)


def test_error_es_value_error():
    with pytest.raises(ValueError):
        validar_parametros({'q': 2.0})


def test_zeta_complejo_permitido():
    assert obtener_parametros({'zeta': 0.5 + 0.1j})['zeta'] == 0.5 + 0.1j


def test_cargar_desde_archivo(tmp_path):
    ruta = tmp_path / 'config.json'
    ruta.write_text(json.dumps({'parametros': {'q': 0.25, 'a': [1.0, 1.0]},
                                'ajustes': {'n': [[1]]}}), encoding='utf-8')
    config = cargar_configuracion('momentos-exactos', ruta=str(ruta), modificaciones={'t': 2.0, 'q': None})
    assert config.parametros['q'] == 0.25
    assert config.parametros['t'] == 2.0
    assert config.ajustes == {'n': [[1]]}
    assert config.modelo.N == 2


def test_banderas_prevalecen_sobre_archivo(tmp_path):
    ruta = tmp_path / 'config.json'
    ruta.write_text(json.dumps({'parametros': {'q': 0.25}}), encoding='utf-8')
    config = cargar_configuracion('simular', ruta=str(ruta), modificaciones={'q': 0.7})
    assert config.parametros['q'] == 0.7


def test_hash_estable_e_independiente_de_la_salida():
    a = cargar_configuracion('simular', modificaciones={'semilla': 5}, salida='uno.csv')
    b = cargar_configuracion('simular', modificaciones={'semilla': 5}, salida='otro.csv')
    c = cargar_configuracion('simular', modificaciones={'semilla': 6})
    assert a.hash_configuracion() == b.hash_configuracion()
    assert a.hash_configuracion() != c.hash_configuracion()
    assert len(a.hash_configuracion()) == 64
    assert a.semilla == 5


def test_experimento_y_formato_desconocidos():
    with pytest.raises(ParametrosInvalidosError):
        ConfiguracionEjecucion('inventado')
    with pytest.raises(ParametrosInvalidosError):
        ConfiguracionEjecucion('simular', formato='xml')


def test_escenarios_validos():
    for nombre in listar_escenarios():
        escenario = obtener_escenario(nombre)
        params = obtener_parametros(escenario['parametros'])
        assert construir_parametros(params).N == len(escenario['parametros']['a'])
    tabla = tabla_escenarios()
    assert list(tabla['escenario']) == listar_escenarios()
    assert listar_escenarios(N=2) == ['escalamiento']


def test_escenario_es_una_copia():
    escenario = obtener_escenario('qtasep')
    escenario['parametros']['q'] = 0.9
    assert obtener_escenario('qtasep')['parametros']['q'] == 0.5


def test_escenario_inexistente():
    with pytest.raises(ValueError):
        obtener_escenario('no_existe')


def test_escenario_personalizado():
    escenario = crear_escenario_personalizado('prueba', 0.4, 1.0, 0.0, [1.0, 2.0])
    assert escenario['parametros']['a'] == [1.0, 2.0]
    with pytest.raises(ValueError):
        crear_escenario_personalizado('malo', 0.4, 0.0, 0.0, [1.0])
