"""
Fórmula de momentos por integrales de contorno anidadas.

m(t; n) = (-1)^k q^{k(k-1)/2} / (2πi)^k ∮...∮ ∏_{A<B} (z_A - z_B)/(z_A - q z_B)
          ∏_j [∏_{i≤n_j} a_i/(a_i - z_j)] Π_t(q z_j)/Π_t(z_j) dz_j/z_j,

con Π_t(z) = exp(t(R z + L/z)). Los contornos son circunferencias de
centro real y la regla del trapecio, con nodos agrupados donde el
contorno pasa cerca de una singularidad, converge espectralmente.

El integrando se factoriza en pesos de una variable y matrices de
interacción por pares, de modo que la suma tensorial se contrae con
numpy.einsum en lugar de recorrer las M^k combinaciones.
"""

import logging
import string
from itertools import combinations
from dataclasses import dataclass

import numpy as np

from core.errores import (
    GeometriaContornoError,
    NoConvergenciaError,
    ParametrosInvalidosError,
)
from core.modelo import MultiIndice

logger = logging.getLogger(__name__)

K_MAXIMO = 4
# Topes de nodos: por circunferencia según k, por par (cada matriz de
# interacción es M_A x M_B) y para el producto total (trabajo de einsum)
PUNTOS_MAXIMOS = {1: 65536, 2: 8192, 3: 4096, 4: 1024}
PAR_MAXIMO = 2 ** 23
PRODUCTO_MAXIMO = 2 ** 28
MARGEN_DEFECTO = 0.1
_AGRUPAMIENTOS = np.linspace(0.0, 0.98, 50)
_MUESTRAS_SINGULARES = 256


@dataclass(frozen=True)
class EspecificacionContornos:
    """
    Circunferencias (centro, radio) para z_1..z_k y su certificado de anidamiento.

    agrupamientos: parámetro s de la transformación de Möbius de cada
    circunferencia; anchos: ancho σ de la banda de analiticidad que deja,
    con error del trapecio ~ e^{-σM}.
    """
    centros: tuple
    radios: tuple
    q: float
    velocidades: tuple
    certificado: dict
    agrupamientos: tuple = ()
    anchos: tuple = ()

    @property
    def k(self):
        return len(self.radios)

    @property
    def valida(self):
        return all(self.certificado.values())


@dataclass(frozen=True)
class EspecificacionCuadratura:
    """Nodos iniciales por circunferencia y tolerancia relativa de la duplicación."""
    puntos: int = 32
    tol: float = 1e-10
    puntos_maximos: int = 65536

    def __post_init__(self):
        if self.puntos < 16 or self.puntos & (self.puntos - 1):
            raise ParametrosInvalidosError(
                f"Los puntos por contorno deben ser potencia de dos ≥ 16. Valor recibido: {self.puntos}"
            )
        if self.tol <= 0:
            raise ParametrosInvalidosError(f"La tolerancia debe ser positiva. Valor recibido: {self.tol}")


def velocidades_extendidas(params, n_max):
    """a_1..a_{n_max} con parámetros ficticios a_n = 1 para n > N."""
    return tuple(params.a) + (1.0,) * max(0, n_max - params.N)


def _certificar(centros, radios, q, velocidades):
    certificado = {}
    k = len(radios)
    certificado['contiene_velocidades'] = all(
        abs(a - centros[A]) < radios[A] for A in range(k) for a in velocidades
    )
    for A in range(k):
        certificado[f'excluye_cero_{A + 1}'] = radios[A] < centros[A]
        for B in range(A + 1, k):
            # la circunferencia A contiene a q·(circunferencia B)
            certificado[f'anidamiento_{A + 1}_{B + 1}'] = (
                abs(centros[A] - q * centros[B]) + q * radios[B] < radios[A]
            )
    return certificado


def _singularidades(A, centros, radios, q, velocidades):
    """Puntos singulares del integrando en z_A, separados en interiores y exteriores."""
    unidad = np.exp(2j * np.pi * np.arange(_MUESTRAS_SINGULARES) / _MUESTRAS_SINGULARES)
    interiores = [np.asarray(velocidades, dtype=complex)]
    exteriores = [np.zeros(1, dtype=complex)]
    for B in range(len(radios)):
        circunferencia = centros[B] + radios[B] * unidad
        if B > A:
            interiores.append(q * circunferencia)
        elif B < A:
            exteriores.append(circunferencia / q)
    return np.concatenate(interiores), np.concatenate(exteriores)


def _agrupamiento(A, centros, radios, q, velocidades):
    """
    Elige s maximizando el ancho σ de la banda de analiticidad en φ.

    En la variable w = m_s^{-1}((z - c)/ρ) las singularidades interiores
    deben quedar en |w| < e^{-σ} y las exteriores en |w| > e^{σ}; el polo
    de m_s' en w = 1/s limita σ ≤ -log s.
    """
    interiores, exteriores = _singularidades(A, centros, radios, q, velocidades)
    u_int = (interiores - centros[A]) / radios[A]
    u_ext = (exteriores - centros[A]) / radios[A]
    mejor_s, mejor_ancho = 0.0, -np.inf
    with np.errstate(divide='ignore', invalid='ignore'):
        for s in _AGRUPAMIENTOS:
            w_int = np.abs((u_int + s) / (1 + s * u_int))
            w_ext = np.abs((u_ext + s) / (1 + s * u_ext))
            ancho = min(-np.log(np.max(w_int)), np.log(np.min(w_ext)))
            if s > 0:
                ancho = min(ancho, -np.log(s))
            if ancho > mejor_ancho:
                mejor_s, mejor_ancho = float(s), float(ancho)
    return mejor_s, mejor_ancho


def construir_contornos(params, k, n_max=None, margen=MARGEN_DEFECTO):
    """
    Familia de k circunferencias con centro real, de la interior a la exterior.

    La circunferencia A envuelve el intervalo [α_A, β_A] que abarca los a_i
    y las imágenes q·(circunferencia B) de todas las interiores B > A. Su
    punto izquierdo es (1 - margen)·α_A y su centro β_A, así que sólo el
    lado izquierdo, entre el cero y las imágenes q·B, queda estrecho. Para
    q pequeño ese hueco decrece como q^{k-1}; los nodos se agrupan en él
    con una transformación de Möbius (ver _nodos) en vez de subir M.

    Args:
        margen: fracción de α_A entre el punto izquierdo y el cero, en (0, 1)

    Raises:
        ParametrosInvalidosError: si margen ≤ 0
        GeometriaContornoError: si alguna condición del certificado falla
    """
    if k < 1:
        raise ParametrosInvalidosError(f"k debe ser ≥ 1. Valor recibido: {k}")
    if margen <= 0:
        raise ParametrosInvalidosError(f"El margen debe ser positivo. Valor recibido: {margen}")
    if margen >= 1:
        raise GeometriaContornoError(
            f"margen = {margen:.6g} ≥ 1: el punto izquierdo (1 - margen)·α no excluye el cero"
        )
    velocidades = velocidades_extendidas(params, n_max or params.N)
    q = params.q

    izquierdos, derechos, centros, radios = ([0.0] * k for _ in range(4))
    for A in range(k - 1, -1, -1):
        alfa, beta = min(velocidades), max(velocidades)
        for B in range(A + 1, k):
            alfa = min(alfa, q * izquierdos[B])
            beta = max(beta, q * derechos[B])
        izquierdos[A] = (1 - margen) * alfa
        centros[A] = beta
        radios[A] = beta - izquierdos[A]
        derechos[A] = beta + radios[A]

    certificado = _certificar(centros, radios, q, velocidades)
    fallas = [nombre for nombre, ok in certificado.items() if not ok]
    if fallas:
        raise GeometriaContornoError(f"Condiciones de contorno violadas: {', '.join(fallas)}")
    agrupamientos, anchos = zip(*(_agrupamiento(A, centros, radios, q, velocidades) for A in range(k)))
    logger.debug("Contornos k=%d q=%g: izquierdos=%s anchos=%s", k, q, izquierdos, anchos)
    return EspecificacionContornos(tuple(centros), tuple(radios), q, velocidades, certificado,
                                   tuple(agrupamientos), tuple(anchos))


# ============================
# EVALUACIÓN DEL INTEGRANDO
# ============================
def _nodos(centro, radio, M, agrupamiento=0.0):
    """z = c + ρ·m_s(e^{iφ}) con m_s(w) = (w - s)/(1 - s w); s = 0 es la regla uniforme."""
    s = agrupamiento
    angulos = 2 * np.pi * np.arange(M) / M
    unidad = np.exp(1j * angulos)
    z = centro + radio * (unidad - s) / (1 - s * unidad)
    dz = 1j * unidad * radio * (1 - s ** 2) / (1 - s * unidad) ** 2 * (2 * np.pi / M)
    return z, dz


def _potencia_de_dos(x):
    return 1 << max(0, int(np.ceil(np.log2(max(x, 1.0)))))


def nodos_por_contorno(spec, M, k=None):
    """
    Nodos de cada circunferencia: M para la de banda más estrecha y una
    potencia de dos proporcional a σ_min/σ_A para las demás (mínimo 16).
    """
    if spec is None or not spec.anchos:
        return (M,) * (k or 1)
    estrecho = min(spec.anchos)
    return tuple(min(M, max(16, _potencia_de_dos(M * estrecho / ancho))) for ancho in spec.anchos)


def _admisible(conteos, cuad, k):
    if max(conteos) > min(cuad.puntos_maximos, PUNTOS_MAXIMOS[k]):
        return False
    if any(a * b > PAR_MAXIMO for a, b in combinations(conteos, 2)):
        return False
    return int(np.prod(conteos)) <= PRODUCTO_MAXIMO


def _peso_variable(params, t, velocidades, n_j, z, dz):
    """∏_{i≤n_j} a_i/(a_i - z) · Π_t(qz)/Π_t(z) · dz/z."""
    producto = np.ones_like(z)
    for i in range(n_j):
        a = velocidades[i]
        producto = producto * (a / (a - z))
    q = params.q
    exponente = t * (params.R * (q - 1) * z + params.L * (1 / q - 1) / z)
    return producto * np.exp(exponente) * dz / z


def _suma_tensorial(pesos, interacciones, q):
    """Contrae Σ ∏_j w_j ∏_{A<B} X_AB con einsum."""
    k = len(pesos)
    letras = string.ascii_lowercase[:k]
    operandos, indices = [], []
    for A in range(k):
        operandos.append(pesos[A])
        indices.append(letras[A])
    for (A, B), X in interacciones.items():
        operandos.append(X)
        indices.append(letras[A] + letras[B])
    expresion = ','.join(indices) + '->'
    suma = np.einsum(expresion, *operandos, optimize='greedy')
    return (-1) ** k * q ** (k * (k - 1) / 2) / (2j * np.pi) ** k * suma


def _integral_anidada(params, n, t, spec, M, multiplicadores=None):
    """
    Suma del trapecio con nodos_por_contorno(spec, M) nodos por circunferencia.

    multiplicadores: {j: función de z_j} que multiplica el peso de la
    variable j (términos separables de un operador aplicado al integrando).
    """
    multiplicadores = multiplicadores or {}
    k = len(n)
    conteos = nodos_por_contorno(spec, M, k)
    agrupamientos = spec.agrupamientos or (0.0,) * k
    nodos = [_nodos(spec.centros[A], spec.radios[A], conteos[A], agrupamientos[A]) for A in range(k)]
    pesos = []
    for A in range(k):
        z, dz = nodos[A]
        w = _peso_variable(params, t, spec.velocidades, n[A], z, dz)
        if A in multiplicadores:
            w = w * multiplicadores[A](z)
        pesos.append(w)
    interacciones = {}
    for A in range(k):
        for B in range(A + 1, k):
            zA = nodos[A][0][:, None]
            zB = nodos[B][0][None, :]
            interacciones[(A, B)] = (zA - zB) / (zA - params.q * zB)
    return _suma_tensorial(pesos, interacciones, params.q)


def integrar_adaptativo(evaluar, cuad, k, spec=None):
    """
    Duplica M hasta que |I_{2M} - I_M| ≤ tol·max(|I_{2M}|, 1).

    M es el número de nodos de la circunferencia más exigente; la
    duplicación se detiene cuando los nodos de la siguiente ronda
    exceden los topes por circunferencia, por par o de producto.

    Returns:
        tuple: (valor, M usado)
    """
    M = cuad.puntos
    while M > 16 and not _admisible(nodos_por_contorno(spec, M, k), cuad, k):
        M //= 2
    anterior = evaluar(M)
    cambio = np.inf
    while _admisible(nodos_por_contorno(spec, 2 * M, k), cuad, k):
        M *= 2
        actual = evaluar(M)
        cambio = abs(actual - anterior)
        logger.debug("Cuadratura k=%d M=%d valor=%s cambio=%.3e", k, M, actual, cambio)
        if cambio <= cuad.tol * max(abs(actual), 1.0):
            return actual, M
        anterior = actual
    raise NoConvergenciaError(
        f"La cuadratura no convergió con M={M} nodos en el contorno más estrecho (último cambio {cambio:.3e})"
    )


def _preparar(params, n, spec):
    if not isinstance(n, MultiIndice):
        n = MultiIndice(tuple(n), weyl=False)
    if n.k > K_MAXIMO:
        raise ParametrosInvalidosError(f"k ≤ {K_MAXIMO} para la cuadratura tensorial. Valor recibido: {n.k}")
    n_max = max(n.n) if n.k else 0
    if spec is None and n.k:
        spec = construir_contornos(params, n.k, n_max=max(n_max, params.N))
    if spec is not None:
        if not spec.valida:
            raise GeometriaContornoError("La especificación de contornos no tiene un certificado válido")
        if spec.k != n.k:
            raise ParametrosInvalidosError(f"Se requieren {n.k} contornos y la especificación tiene {spec.k}")
        if len(spec.velocidades) < n_max:
            spec = construir_contornos(params, n.k, n_max=n_max)
    return n, spec


def momento_contorno_detallado(params, n, t, spec=None, cuad=None):
    """Como momento_contorno pero devuelve también el número de nodos usado."""
    cuad = cuad or EspecificacionCuadratura()
    n, spec = _preparar(params, n, spec)
    if n.k == 0:
        return complex(1.0), 0
    return integrar_adaptativo(lambda M: _integral_anidada(params, n.n, t, spec, M), cuad, n.k, spec)


def momento_contorno(params, n, t, spec=None, cuad=None):
    """m(t; n) para cualquier n ∈ Z^k_{≥0}."""
    valor, _ = momento_contorno_detallado(params, n, t, spec, cuad)
    return valor


def momento_contorno_operador(params, n, t, terminos, spec=None, cuad=None):
    """
    Integral del integrando multiplicado por Σ_r c_r f_r(z_{j_r}).

    terminos: lista de (coeficiente, j, función) con j 0-based.
    """
    cuad = cuad or EspecificacionCuadratura()
    n, spec = _preparar(params, n, spec)

    def evaluar(M):
        return sum(c * _integral_anidada(params, n.n, t, spec, M, {j: f})
                   for c, j, f in terminos)

    return integrar_adaptativo(evaluar, cuad, n.k, spec)[0]


# ============================
# CONDICIONES DE LA EVOLUCIÓN LIBRE
# ============================
def _nabla(m, n, i, velocidades):
    """[∇_a]_i m(n) = a_{n_i} (m(n - e_i) - m(n))."""
    menos = list(n)
    menos[i] -= 1
    return velocidades[n[i] - 1] * (m(tuple(menos)) - m(n))


def _nabla_inversa_literal(m, n, i, velocidades):
    """[∇_a^{-1}]_i m(n) = -Σ_{μ=1}^{n_i} a_μ^{-1} m(n con n_i = μ); vacío si n_i = 0."""
    total = 0.0
    for mu in range(1, n[i] + 1):
        variante = list(n)
        variante[i] = mu
        total -= m(tuple(variante)) / velocidades[mu - 1]
    return total


def verificar_condiciones_libres(params, t, k, cuad=None, n_max=2, paso=None):
    """
    Residuos de las condiciones de frontera y acumulativa y de la ecuación libre.

    La frontera se evalúa con diferencias finitas literales. En la ecuación
    libre dm/dt = R(1-q)Σ[∇_a]_j m + L(1-1/q)Σ[∇_a^{-1}]_j m la derivada es
    una diferencia central y la parte en R usa ∇_a literal sobre los
    momentos vecinos. La parte en L y la condición acumulativa se evalúan al
    nivel del integrando, donde ∇_a^{-1} actúa como multiplicación por
    -1/z_j módulo la integración de contorno. Los residuos con la suma finita
    literal de ∇_a^{-1} se informan aparte (acumulativa_literal,
    ecuacion_libre_literal_L) y no forman parte de la verificación.
    """
    if k < 1 or k > 3:
        raise ParametrosInvalidosError(f"verificar_condiciones_libres admite 1 ≤ k ≤ 3. Valor recibido: {k}")
    cuad = cuad or EspecificacionCuadratura()
    velocidades = velocidades_extendidas(params, n_max)
    spec = construir_contornos(params, k, n_max=max(n_max, params.N))
    q = params.q
    cache = {}

    def m(n, tiempo=t):
        clave = (n, tiempo)
        if clave not in cache:
            cache[clave] = momento_contorno(params, MultiIndice(n, weyl=False), tiempo, spec, cuad)
        return cache[clave]

    def relativo(residuo, escala):
        return abs(residuo) / max(abs(escala), cuad.tol)

    reporte = {'frontera': 0.0, 'acumulativa': 0.0, 'ecuacion_libre': 0.0,
               'acumulativa_literal': 0.0, 'ecuacion_libre_literal_L': 0.0, 'puntos': 0}
    paso = paso if paso is not None else min(1e-4, t / 2) if t > 0 else None

    puntos = [tuple(int(v) for v in p) for p in np.ndindex(*([n_max] * k))]
    puntos = [tuple(v + 1 for v in p) for p in puntos]
    for n in puntos:
        valor = m(n)
        reporte['puntos'] += 1
        for i in range(k - 1):
            if n[i] != n[i + 1]:
                continue
            frontera = _nabla(m, n, i, velocidades) - q * _nabla(m, n, i + 1, velocidades)
            reporte['frontera'] = max(reporte['frontera'], relativo(frontera, valor))

            acumulativa = momento_contorno_operador(
                params, MultiIndice(n, weyl=False), t,
                [(-1.0, i, lambda z: 1 / z), (1 / q, i + 1, lambda z: 1 / z)], spec, cuad)
            reporte['acumulativa'] = max(reporte['acumulativa'], relativo(acumulativa, valor))

            literal = (_nabla_inversa_literal(m, n, i, velocidades)
                       - _nabla_inversa_literal(m, n, i + 1, velocidades) / q)
            reporte['acumulativa_literal'] = max(reporte['acumulativa_literal'], relativo(literal, valor))

        if paso:
            derivada = (m(n, t + paso) - m(n, t - paso)) / (2 * paso)
            parte_R = params.R * (1 - q) * sum(_nabla(m, n, j, velocidades) for j in range(k))
            parte_L = 0.0
            parte_L_literal = 0.0
            if params.L:
                parte_L = momento_contorno_operador(
                    params, MultiIndice(n, weyl=False), t,
                    [(-params.L * (1 - 1 / q), j, lambda z: 1 / z) for j in range(k)], spec, cuad)
                parte_L_literal = params.L * (1 - 1 / q) * sum(
                    _nabla_inversa_literal(m, n, j, velocidades) for j in range(k))
            reporte['ecuacion_libre'] = max(reporte['ecuacion_libre'],
                                            relativo(derivada - parte_R - parte_L, valor))
            reporte['ecuacion_libre_literal_L'] = max(
                reporte['ecuacion_libre_literal_L'],
                relativo(derivada - parte_R - parte_L_literal, valor))
    logger.debug("Condiciones libres (k=%d, t=%g): %s", k, t, reporte)
    return reporte


def verificar_suma_parcial(params, n_max, z_muestras):
    """
    max |S_n - 1/z| con S_n = (1/z)∏_{r≤n}(a_r - z)/a_r + Σ_j a_j^{-1} ∏_{r>j}(a_r - z)/a_r.

    Usa los a_r de params extendidos con a_r = 1 para r > N. La desviación
    se divide por max(1, mayor sumando) porque los sumandos pueden crecer
    como |(a - z)/a|^n y cancelarse.
    """
    velocidades = np.array(velocidades_extendidas(params, n_max))
    z = np.asarray(z_muestras, dtype=complex)
    if np.any(z == 0) or np.any(np.isin(z, velocidades)):
        raise ParametrosInvalidosError("Las muestras de z deben evitar 0 y los a_i")
    desviacion = 0.0
    for n in range(n_max + 1):
        a = velocidades[:n]
        factores = (a[:, None] - z[None, :]) / a[:, None]
        S = np.prod(factores, axis=0) / z
        escala = np.abs(S)
        for j in range(n):
            sumando = np.prod(factores[j + 1:], axis=0) / a[j]
            escala = np.maximum(escala, np.abs(sumando))
            S = S + sumando
        relativa = np.abs(S - 1 / z) / np.maximum(1.0, escala)
        desviacion = max(desviacion, float(np.max(relativa)))
    return desviacion
