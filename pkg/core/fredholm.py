"""
Transformada q-Laplace E[1/(ζ q^{x_n(t)+n}; q)_∞] y determinante de Fredholm det(I + K_ζ).

El núcleo es una integral de Mellin-Barnes sobre la recta Re s = 1/2:

    K_ζ(w, w') = (1/2πi) ∫ π/sin(-πs) (-ζ)^s G(q^s w)/G(w) · 1/(q^s w - w') ds,
    G(w) = (w; q)_∞^n Π_t(w),

y el operador actúa en L²(C_1) con la medida dw/(2πi), C_1 una
circunferencia pequeña alrededor de 1. Solo se trata el caso a_i ≡ 1.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from core.errores import ParametrosInvalidosError
from core.funciones_q import inverso_qpoch_inf, log_qpoch_inf, qpoch_finito
from core.modelo import MultiIndice

logger = logging.getLogger(__name__)

COLA_MB = 1e-14


def _validar_zeta(zeta):
    zeta = complex(zeta)
    if zeta.imag == 0 and zeta.real > 0:
        raise ParametrosInvalidosError(
            f"ζ no puede estar en el semieje real positivo (polos). Valor recibido: {zeta}"
        )
    return zeta


def radio_c1_por_defecto(q):
    raiz = np.sqrt(q)
    return 0.5 * (1 - raiz) / (1 + raiz)


@dataclass(frozen=True)
class EspecificacionNucleo:
    """Datos del núcleo K_ζ y de sus dos discretizaciones."""
    zeta: complex
    n: int
    t: float
    params: object
    truncacion_mb: float = None
    puntos_mb: int = 512
    puntos_nystrom: int = 64
    radio_c1: float = None

    def __post_init__(self):
        object.__setattr__(self, 'zeta', _validar_zeta(self.zeta))
        if any(abs(a - 1.0) > 1e-14 for a in self.params.a):
            raise ParametrosInvalidosError(
                f"El determinante de Fredholm se evalúa solo con a_i ≡ 1. Valor recibido: {self.params.a}"
            )
        if not (1 <= self.n <= self.params.N):
            raise ParametrosInvalidosError(f"n debe estar en 1..{self.params.N}. Valor recibido: {self.n}")
        if self.t < 0:
            raise ParametrosInvalidosError(f"El tiempo debe ser no negativo. Valor recibido: {self.t}")
        if self.puntos_mb < 16 or self.puntos_nystrom < 4:
            raise ParametrosInvalidosError(
                f"Discretización insuficiente: puntos_mb={self.puntos_mb}, puntos_nystrom={self.puntos_nystrom}"
            )
        q = self.params.q
        if self.radio_c1 is None:
            object.__setattr__(self, 'radio_c1', radio_c1_por_defecto(q))
        c = self.radio_c1
        if not (0 < c < 1 and np.sqrt(q) * (1 + c) < 1 - c):
            raise ParametrosInvalidosError(
                f"El radio de C_1 debe cumplir √q(1 + c) < 1 - c. Valor recibido: {c}"
            )
        if self.truncacion_mb is None:
            object.__setattr__(self, 'truncacion_mb', self.truncacion_por_defecto())

    @property
    def angulo(self):
        """|arg(-ζ)| con la rama principal."""
        return abs(np.angle(-self.zeta)) if self.zeta != 0 else 0.0

    def truncacion_por_defecto(self):
        """T tal que e^{-(π - |arg(-ζ)|) T} < 1e-14."""
        return float(np.log(1 / COLA_MB) / (np.pi - self.angulo))

    def con(self, **cambios):
        datos = dict(zeta=self.zeta, n=self.n, t=self.t, params=self.params,
                     truncacion_mb=self.truncacion_mb, puntos_mb=self.puntos_mb,
                     puntos_nystrom=self.puntos_nystrom, radio_c1=self.radio_c1)
        datos.update(cambios)
        return EspecificacionNucleo(**datos)


# ============================
# NÚCLEO DE MELLIN-BARNES
# ============================
def _recta_mb(spec):
    """Nodos u y pesos del trapecio sobre s = 1/2 + iu, |u| ≤ T."""
    u = np.linspace(-spec.truncacion_mb, spec.truncacion_mb, spec.puntos_mb)
    pesos = np.full(u.shape, u[1] - u[0])
    pesos[[0, -1]] *= 0.5
    return u, pesos


def _factor_mb(spec, u):
    """π/sin(-πs) (-ζ)^s para s = 1/2 + iu (rama principal de log(-ζ))."""
    s = 0.5 + 1j * u
    if spec.zeta == 0:
        return np.zeros_like(s)
    return np.pi / np.sin(-np.pi * s) * np.exp(s * np.log(-spec.zeta))


def _cociente_G(spec, s, w):
    """G(q^s w)/G(w) en escala logarítmica; s y w se combinan por broadcasting."""
    params = spec.params
    q = params.q
    qs_w = q ** s * w
    log_poch = log_qpoch_inf(qs_w, q) - log_qpoch_inf(np.broadcast_to(w, qs_w.shape), q)
    exponente = spec.t * (params.R * (qs_w - w) + params.L * (1 / qs_w - 1 / w))
    return np.exp(spec.n * log_poch + exponente)


def integrando_mb(spec, u, w, w_prima):
    """Integrando en la variable u (ya incluye ds = i du y el factor 1/(2πi))."""
    s = 0.5 + 1j * np.asarray(u)
    q = spec.params.q
    return (_factor_mb(spec, np.asarray(u)) * _cociente_G(spec, s, w)
            / (q ** s * w - w_prima) / (2 * np.pi))


def evaluar_nucleo(spec, w, w_prima):
    """K_ζ(w, w') por la regla del trapecio sobre la recta truncada."""
    if spec.zeta == 0:
        return 0j
    u, pesos = _recta_mb(spec)
    return complex(np.sum(pesos * integrando_mb(spec, u, complex(w), complex(w_prima))))


def nodos_c1(spec):
    """Nodos w_j sobre C_1 y pesos dw/(2πi) del trapecio en el ángulo."""
    M = spec.puntos_nystrom
    unidad = np.exp(2j * np.pi * np.arange(M) / M)
    w = 1 + spec.radio_c1 * unidad
    pesos = spec.radio_c1 * unidad / M
    return w, pesos


def matriz_nucleo(spec):
    """K_ζ(w_j, w_l) sobre los nodos de C_1, ensamblada de forma vectorizada."""
    w, _ = nodos_c1(spec)
    if spec.zeta == 0:
        return np.zeros((w.size, w.size), dtype=complex)
    u, pesos = _recta_mb(spec)
    s = 0.5 + 1j * u
    q = spec.params.q
    # (u, j): factor común a todas las columnas
    comun = (pesos * _factor_mb(spec, u))[:, None] * _cociente_G(spec, s[:, None], w[None, :])
    qs_w = (q ** s)[:, None] * w[None, :]
    denominador = qs_w[:, :, None] - w[None, None, :]
    return np.einsum('uj,ujl->jl', comun, 1 / denominador) / (2 * np.pi)


def determinante_fredholm(spec):
    """det(I + K_ζ) por el método de Nyström en C_1."""
    if spec.zeta == 0:
        return complex(1.0)
    _, pesos = nodos_c1(spec)
    K = matriz_nucleo(spec)
    valor = complex(np.linalg.det(np.eye(K.shape[0]) + K * pesos[None, :]))
    logger.debug("det(I+K) ζ=%s n=%d t=%g M_mb=%d M_ny=%d → %s", spec.zeta, spec.n, spec.t,
                 spec.puntos_mb, spec.puntos_nystrom, valor)
    return valor


def estabilidad_fredholm(spec):
    """Cambios del determinante al duplicar cada discretización por separado."""
    base = determinante_fredholm(spec)
    nystrom = determinante_fredholm(spec.con(puntos_nystrom=2 * spec.puntos_nystrom))
    mb = determinante_fredholm(spec.con(puntos_mb=2 * spec.puntos_mb))
    return {'determinante': base,
            'cambio_nystrom': abs(nystrom - base),
            'cambio_mellin_barnes': abs(mb - base)}


# ============================
# ORÁCULO EXACTO PARA n = 1
# ============================
def _corte_poisson(media, cola):
    if media == 0:
        return 0
    return int(stats.poisson.isf(cola, media)) + 1


def ley_primera_particula(params, t, cola=1e-16):
    """
    Ley de x_1(t) + 1 = ξ - η desde el escalón, ξ ~ Poisson(R a_1 t), η ~ Poisson(L t / a_1).

    Returns:
        tuple: (valores m, probabilidades)
    """
    a1 = params.velocidad(1)
    media_derecha = params.R * a1 * t
    media_izquierda = params.L / a1 * t
    corte_d = _corte_poisson(media_derecha, cola)
    corte_i = _corte_poisson(media_izquierda, cola)
    p_derecha = stats.poisson.pmf(np.arange(corte_d + 1), media_derecha)
    p_izquierda = stats.poisson.pmf(np.arange(corte_i + 1), media_izquierda)
    probabilidades = np.convolve(p_derecha, p_izquierda[::-1])
    valores = np.arange(-corte_i, corte_d + 1)
    return valores, probabilidades


def qlaplace_exacto_n1(params, t, zeta, cola=1e-16):
    """Σ_m P(ξ - η = m) / (ζ q^m; q)_∞ (exacto para la primera partícula)."""
    zeta = _validar_zeta(zeta)
    if t < 0:
        raise ParametrosInvalidosError(f"El tiempo debe ser no negativo. Valor recibido: {t}")
    if zeta == 0:
        return complex(1.0)
    valores, probabilidades = ley_primera_particula(params, t, cola)
    argumentos = zeta * params.q ** valores.astype(float)
    return complex(np.sum(probabilidades * inverso_qpoch_inf(argumentos, params.q)))


def comparar_conjetura(params, grilla, n=1, **opciones):
    """
    Tabla de |det(I + K_ζ) - E[...]| sobre una grilla [(t, ζ), ...] para n = 1.

    Las discrepancias se informan; la identidad no está demostrada.
    """
    filas = []
    for t, zeta in grilla:
        spec = EspecificacionNucleo(zeta=zeta, n=n, t=t, params=params, **opciones)
        determinante = determinante_fredholm(spec)
        exacto = qlaplace_exacto_n1(params, t, zeta)
        diferencia = abs(determinante - exacto)
        filas.append({'q': params.q, 't': t, 'zeta': complex(zeta),
                      'determinante': determinante, 'exacto': exacto,
                      'diferencia': diferencia})
        if diferencia > 1e-4:
            logger.warning("Discrepancia de Fredholm %.3e en t=%g ζ=%s", diferencia, t, zeta)
    return pd.DataFrame(filas)


# ============================
# SERIE DIVERGENTE DE MOMENTOS
# ============================
def constante_cota(params, t):
    """exp(-R a_1 t - L t / a_1): E q^{k(x_1+1)} ≥ constante · e^{L a_1^{-1} t q^{-k}}."""
    a1 = params.velocidad(1)
    return float(np.exp(-params.R * a1 * t - params.L * t / a1))


def demostracion_divergencia(params, t, kmax, zeta=-1.0, n=1):
    """
    Términos |ζ|^k E q^{k(x_n(t)+n)} / (q; q)_k para k = 0..kmax.

    La cota inferior es la del crecimiento de la primera partícula, válida
    para todo n porque x_n + n ≤ x_1 + 1.
    """
    from core.evolucion import momento_exacto

    if kmax < 0:
        raise ParametrosInvalidosError(f"kmax debe ser ≥ 0. Valor recibido: {kmax}")
    q = params.q
    a1 = params.velocidad(1)
    constante = constante_cota(params, t)
    filas = []
    anterior = None
    for k in range(kmax + 1):
        momento = 1.0 if k == 0 else momento_exacto(params, MultiIndice((n,) * k), t)
        escala = abs(zeta) ** k / qpoch_finito(q, q, k)
        termino = escala * momento
        cota = constante * np.exp(params.L / a1 * t * q ** (-k)) if k > 0 else 1.0
        filas.append({
            'k': k,
            'momento': momento,
            'termino': termino,
            'cota_inferior': escala * cota,
            'razon': termino / anterior if anterior else np.nan,
        })
        anterior = termino
    return pd.DataFrame(filas)
