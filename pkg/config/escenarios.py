"""
Regímenes de parámetros del q-PushASEP usados en los experimentos.
"""

import pandas as pd

from config.parametros import validar_parametros

ESCENARIOS = {
    'qtasep': {
        'nombre': 'q-TASEP',
        'descripcion': 'Solo saltos a la derecha (L = 0); momentos acotados por uno',
        'parametros': {'q': 0.5, 'R': 1.0, 'L': 0.0, 'a': [1.0, 1.0, 1.0]}
    },

    'qpushtasep': {
        'nombre': 'q-PushTASEP',
        'descripcion': 'Solo saltos a la izquierda con empujes (R = 0)',
        'parametros': {'q': 0.5, 'R': 0.0, 'L': 1.0, 'a': [1.0, 1.0, 1.0]}
    },

    'dos_lados': {
        'nombre': 'q-PushASEP simétrico',
        'descripcion': 'Ambos mecanismos con la misma intensidad',
        'parametros': {'q': 0.5, 'R': 1.0, 'L': 1.0, 'a': [1.0, 1.0, 1.0]}
    },

    'asimetrico': {
        'nombre': 'q-PushASEP asimétrico',
        'descripcion': 'Deriva a la derecha dominante y q cercano a uno',
        'parametros': {'q': 0.8, 'R': 2.0, 'L': 0.5, 'a': [1.0, 1.0, 1.0]}
    },

    'velocidades': {
        'nombre': 'Velocidades no homogéneas',
        'descripcion': 'a_i distintas: el sistema deja de ser invariante por traslación',
        'parametros': {'q': 0.3, 'R': 1.0, 'L': 1.0, 'a': [1.0, 0.7, 1.5]}
    },

    'escalamiento': {
        'nombre': 'Régimen de escalamiento',
        'descripcion': 'q = e^{-ε} con ε = 0.2 y R = L = a_i = 1 (r = l = 𝖺 = 0)',
        'parametros': {'q': 0.8187307530779818, 'R': 1.0, 'L': 1.0, 'a': [1.0, 1.0]}
    },
}



def obtener_escenario(nombre):
    """Copia del escenario; lanza ValueError con los nombres válidos si no existe."""
    if nombre not in ESCENARIOS:
        raise ValueError(f"Escenario '{nombre}' no encontrado. "
                         f"Escenarios disponibles: {list(ESCENARIOS)}")
    escenario = dict(ESCENARIOS[nombre])
    escenario['parametros'] = dict(escenario['parametros'])
    return escenario


def listar_escenarios(N=None):
    """Nombres de los escenarios, opcionalmente solo los de N partículas."""
    return [nombre for nombre, e in ESCENARIOS.items()
            if N is None or len(e['parametros']['a']) == N]


def tabla_escenarios():
    """Una fila por escenario con q, R, L, N y su descripción."""
    filas = []
    for clave, e in ESCENARIOS.items():
        p = e['parametros']
        filas.append({'escenario': clave, 'nombre': e['nombre'], 'q': p['q'], 'R': p['R'],
                      'L': p['L'], 'N': len(p['a']), 'descripcion': e['descripcion']})
    return pd.DataFrame(filas)


def crear_escenario_personalizado(nombre, q, R, L, a):
    """
    Escenario con el mismo formato que los de ESCENARIOS.

    Los valores pasan por validar_parametros, así que un escenario inválido
    lanza ParametrosInvalidosError (subclase de ValueError).
    """
    parametros = {'q': q, 'R': R, 'L': L, 'a': list(a)}
    validar_parametros(parametros)
    return {
        'nombre': nombre,
        'descripcion': f'Escenario personalizado: q={q}, R={R}, L={L}, N={len(a)}',
        'parametros': parametros,
    }
