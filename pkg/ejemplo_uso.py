"""
Ejemplos de uso del laboratorio numérico q-PushASEP.

Este archivo muestra diferentes formas de usar el laboratorio programáticamente.
"""

import sys
import os
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np

from config.parametros import obtener_parametros, construir_parametros
from config.escenarios import obtener_escenario, crear_escenario_personalizado, tabla_escenarios
from core.contorno import momento_contorno
from core.escalamiento import ParametrosEscalamiento, momentos_browniano_con_deriva, simular_jerarquia_sde
from core.estacionario import suma_tasas_empuje, residuo_estacionario_cadena_gap
from core.evolucion import momento_exacto
from core.fredholm import comparar_conjetura, demostracion_divergencia
from core.modelo import MultiIndice, configuracion_escalon
from simulation.dinamica import simular_pushasep
from simulation.montecarlo import mc_momento
from simulation.runner import RunnerExperimentos


def ejemplo_1_tres_metodos():
    """
    Ejemplo 1: Un momento por los tres métodos.
    """
    print("\n" + "="*70)
    print("EJEMPLO 1: Exacto, Contornos y Monte Carlo")
    print("="*70 + "\n")

    params = construir_parametros(obtener_parametros())
    n = MultiIndice((2, 1))
    t = 0.5

    exacto = momento_exacto(params, n, t)
    contorno = momento_contorno(params, n, t)
    mc = mc_momento(params, n, t, muestras=5000, semilla=1)

    print(f"Parámetros: q={params.q}, R={params.R}, L={params.L}, a={params.a}")
    print(f"Momento E q^(x_2+2) q^(x_1+1) en t={t}:")
    print(f"  Exacto:      {exacto:.12f}")
    print(f"  Contornos:   {contorno.real:.12f}  (|Im| = {abs(contorno.imag):.1e})")
    print(f"  Monte Carlo: {mc.media:.5f} ± {mc.error_estandar:.5f}")

    return exacto, contorno, mc


def ejemplo_2_escenario_personalizado():
    """
    Ejemplo 2: Crear un escenario con velocidades no homogéneas.
    """
    print("\n" + "="*70)
    print("EJEMPLO 2: Escenario Personalizado")
    print("="*70 + "\n")

    escenario = crear_escenario_personalizado("Lento al centro", q=0.4, R=1.5, L=0.5, a=[1.0, 0.5, 1.2])
    print(f"Escenario creado: {escenario['nombre']}")
    print(f"Descripción: {escenario['descripcion']}")

    params = construir_parametros(obtener_parametros(escenario['parametros']))
    for k in range(1, 4):
        n = MultiIndice((3,) * k)
        print(f"  E q^({k}(x_3+3)) = {momento_exacto(params, n, 1.0):.6f}")

    return escenario


def ejemplo_3_comparacion_escenarios():
    """
    Ejemplo 3: Comparar los tres métodos en todos los escenarios.
    """
    print("\n" + "="*70)
    print("EJEMPLO 3: Comparación de Escenarios")
    print("="*70 + "\n")

    print(tabla_escenarios()[['escenario', 'q', 'R', 'L', 'N']].to_string(index=False))
    print()

    runner = RunnerExperimentos({'muestras': 2000})
    runner.ejecutar_todos(verbose=False)
    tabla = runner.generar_tabla_comparativa()
    print(tabla.to_string(index=False))

    return tabla


def ejemplo_4_trayectoria():
    """
    Ejemplo 4: Una trayectoria con registro de eventos.
    """
    print("\n" + "="*70)
    print("EJEMPLO 4: Trayectoria del q-PushASEP")
    print("="*70 + "\n")

    params = construir_parametros(obtener_parametros(obtener_escenario('dos_lados')['parametros']))
    final, trayectoria = simular_pushasep(params, configuracion_escalon(params.N), 2.0, 42, registrar=True)

    print(f"Eventos: {len(trayectoria.eventos)}")
    for tiempo, movimiento in trayectoria.eventos[:10]:
        print(f"  t={tiempo:7.4f}  {movimiento.tipo:<10} partículas {movimiento.i}..{movimiento.j}")
    print(f"Configuración final: {final.x}")
    print(f"Saltos a la izquierda de x_{params.N}: {trayectoria.contar('izquierda', params.N)}")

    return trayectoria


def ejemplo_5_divergencia():
    """
    Ejemplo 5: La serie de momentos diverge cuando L > 0.
    """
    print("\n" + "="*70)
    print("EJEMPLO 5: Serie de Momentos")
    print("="*70 + "\n")

    con_L = construir_parametros(obtener_parametros({'a': [1.0]}))
    sin_L = con_L.con(L=0.0)
    print("Con L = 1:")
    print(demostracion_divergencia(con_L, 1.0, 6).to_string(index=False))
    print("\nCon L = 0 y |ζ| = 0.5:")
    print(demostracion_divergencia(sin_L, 1.0, 6, zeta=-0.5).to_string(index=False))


def ejemplo_6_fredholm():
    """
    Ejemplo 6: det(I + K_ζ) frente a la ley exacta de la primera partícula.
    """
    print("\n" + "="*70)
    print("EJEMPLO 6: Determinante de Fredholm")
    print("="*70 + "\n")

    params = construir_parametros(obtener_parametros({'a': [1.0]}))
    tabla = comparar_conjetura(params, [(0.5, -0.3), (1.0, -1.0), (0.25, -0.5 + 0.5j)])
    print(tabla[['t', 'zeta', 'diferencia']].to_string(index=False))

    return tabla


def ejemplo_7_estacionario_y_escala():
    """
    Ejemplo 7: Gaps estacionarios y jerarquía SDE.
    """
    print("\n" + "="*70)
    print("EJEMPLO 7: Estacionario y Límite de Escala")
    print("="*70 + "\n")

    params = construir_parametros(obtener_parametros({'a': [1.0, 0.7, 1.5], 'R': 2.0}))
    alfa = 0.5
    print(f"Suma de tasas de empuje: {suma_tasas_empuje(params, alfa):.12f} "
          f"(esperado {params.L * params.R / alfa:.12f})")
    print(f"Residuo estacionario de la cadena de gap: "
          f"{residuo_estacionario_cadena_gap(params.con(a=(1.0,)), alfa):.2e}")

    sp = ParametrosEscalamiento(eps=0.2, a_esc=(0.0, 0.0), dt=1e-2)
    G = simular_jerarquia_sde(sp, 1.0, 4000, semilla=3, repulsion=False)
    media, varianza = momentos_browniano_con_deriva(sp, 1.0)
    print(f"G_1 sin repulsión: media {G[:, 0].mean():.3f} (teórica {media}), "
          f"varianza {G[:, 0].var():.3f} (teórica {varianza})")
    print(f"Niveles con repulsión (τ=1): {np.round(simular_jerarquia_sde(sp, 1.0, 4000, 3).mean(axis=0), 3)}")


def menu_interactivo():
    """Menú interactivo para ejecutar ejemplos."""
    while True:
        print("\n" + "="*70)
        print(" EJEMPLOS DE USO - LABORATORIO q-PushASEP")
        print("="*70)
        print("\n1. Exacto, Contornos y Monte Carlo")
        print("2. Escenario Personalizado")
        print("3. Comparación de Escenarios")
        print("4. Trayectoria del q-PushASEP")
        print("5. Serie de Momentos")
        print("6. Determinante de Fredholm")
        print("7. Estacionario y Límite de Escala")
        print("8. Ejecutar Todos los Ejemplos")
        print("0. Salir")

        opcion = input("\nSeleccione una opción: ").strip()

        if opcion == '1':
            ejemplo_1_tres_metodos()
        elif opcion == '2':
            ejemplo_2_escenario_personalizado()
        elif opcion == '3':
            ejemplo_3_comparacion_escenarios()
        elif opcion == '4':
            ejemplo_4_trayectoria()
        elif opcion == '5':
            ejemplo_5_divergencia()
        elif opcion == '6':
            ejemplo_6_fredholm()
        elif opcion == '7':
            ejemplo_7_estacionario_y_escala()
        elif opcion == '8':
            print("\nEjecutando todos los ejemplos...")
            ejemplo_1_tres_metodos()
            ejemplo_2_escenario_personalizado()
            ejemplo_3_comparacion_escenarios()
            ejemplo_4_trayectoria()
            ejemplo_5_divergencia()
            ejemplo_6_fredholm()
            ejemplo_7_estacionario_y_escala()
            print("\n✓ Todos los ejemplos completados")
        elif opcion == '0':
            print("\n¡Hasta luego!\n")
            break
        else:
            print("\n⚠️  Opción no válida")

        input("\nPresione Enter para continuar...")


if __name__ == "__main__":
    menu_interactivo()
