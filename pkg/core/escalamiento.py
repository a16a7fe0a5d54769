"""
Límite de escala formal cuando q → 1.

Con q = e^{-ε}, R = e^{-εr}, L = e^{-εl}, a_k = e^{-ε𝖺_k}, t = ε^{-2}τ y
desplazamiento global nulo, las partículas de la izquierda del arreglo
entrelazado se reescalan como

    G_k = ε(x_k + k) - (k - 1) ln ε,

y satisfacen formalmente la jerarquía

    dG_k = (-2𝖺_k + l - r - e^{G_k - G_{k-1}}) dτ + √2 dW_k.

Con Z = e^{-G} la jerarquía es la transformada logarítmica de una
ecuación del calor semi-discreta; esa forma no se integra aquí.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from core.errores import ParametrosInvalidosError, PresupuestoExcedidoError
from core.modelo import ParametrosPushASEP

logger = logging.getLogger(__name__)

PRESUPUESTO_EVENTOS = 5e7


@dataclass(frozen=True)
class ParametrosEscalamiento:
    """ε, velocidades reescaladas 𝖺, derivas r y l, paso dt y convención G_0."""
    eps: float
    a_esc: tuple
    r: float = 0.0
    l: float = 0.0
    dt: float = 1e-3
    G0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'a_esc', tuple(float(v) for v in self.a_esc))
        if self.eps <= 0:
            raise ParametrosInvalidosError(f"ε debe ser positivo. Valor recibido: {self.eps}")
        if self.dt <= 0:
            raise ParametrosInvalidosError(f"dt debe ser positivo. Valor recibido: {self.dt}")
        if len(self.a_esc) == 0:
            raise ParametrosInvalidosError("Se requiere al menos un nivel (𝖺 vacío)")

    @property
    def N(self):
        return len(self.a_esc)

    def con(self, **cambios):
        datos = dict(eps=self.eps, a_esc=self.a_esc, r=self.r, l=self.l, dt=self.dt, G0=self.G0)
        datos.update(cambios)
        return ParametrosEscalamiento(**datos)


def parametros_desde_escalamiento(sp):
    """Parámetros del q-PushASEP a escala ε."""
    eps = sp.eps
    return ParametrosPushASEP(
        q=float(np.exp(-eps)),
        R=float(np.exp(-eps * sp.r)),
        L=float(np.exp(-eps * sp.l)),
        a=tuple(float(np.exp(-eps * v)) for v in sp.a_esc),
    )


def tiempo_microscopico(sp, tau):
    return tau / sp.eps ** 2


# ============================
# COEFICIENTES DE LA JERARQUÍA
# ============================
def deriva_sde(k, G_k, G_km1, sp, repulsion=True):
    """-2𝖺_k + l - r - e^{G_k - G_{k-1}}; sin repulsión omite el término exponencial."""
    base = -2 * sp.a_esc[k - 1] + sp.l - sp.r
    if not repulsion:
        return base + np.zeros_like(np.asarray(G_k, dtype=float))
    return base - np.exp(np.asarray(G_k, dtype=float) - np.asarray(G_km1, dtype=float))


def difusion_sde():
    return np.sqrt(2.0)


def condicion_inicial(sp):
    """G_k(0) = -(k - 1) ln ε (arreglo densamente empaquetado)."""
    return np.array([-(k - 1) * np.log(sp.eps) for k in range(1, sp.N + 1)])


def simular_jerarquia_sde(sp, tau_final, trayectorias, semilla, G_inicial=None, repulsion=True):
    """
    Euler-Maruyama vectorizado sobre trayectorias.

    Cada nivel usa el valor del nivel inferior al inicio del paso; el nivel
    1 usa la constante sp.G0. Los ruidos de los niveles son independientes.

    Returns:
        np.ndarray: forma (trayectorias, N) con G_1..G_N en τ = tau_final
    """
    if tau_final <= 0:
        raise ParametrosInvalidosError(f"τ final debe ser positivo. Valor recibido: {tau_final}")
    if trayectorias < 1:
        raise ParametrosInvalidosError(f"Se requiere al menos una trayectoria. Valor recibido: {trayectorias}")
    pasos = max(1, int(round(tau_final / sp.dt)))
    dt = tau_final / pasos
    rng = np.random.default_rng(semilla)
    G = np.tile(condicion_inicial(sp) if G_inicial is None else np.asarray(G_inicial, float),
                (trayectorias, 1))
    sigma = difusion_sde() * np.sqrt(dt)
    for _ in range(pasos):
        inferior = np.concatenate((np.full((trayectorias, 1), sp.G0), G[:, :-1]), axis=1)
        deriva = np.column_stack([
            deriva_sde(k, G[:, k - 1], inferior[:, k - 1], sp, repulsion) for k in range(1, sp.N + 1)
        ])
        G = G + deriva * dt + sigma * rng.standard_normal(G.shape)
    logger.debug("Jerarquía SDE: %d pasos, dt=%g, %d trayectorias", pasos, dt, trayectorias)
    return G


def momentos_browniano_con_deriva(sp, tau):
    """Media y varianza de G_1 sin repulsión: -(2𝖺_1 - l + r)τ y 2τ."""
    return -(2 * sp.a_esc[0] - sp.l + sp.r) * tau, 2 * tau


# ============================
# REESCALAMIENTO DEL q-PushASEP
# ============================
def verificar_presupuesto(sp, tau, trayectorias, presupuesto=PRESUPUESTO_EVENTOS):
    """Eventos esperados t·Σ(R a_i + L/a_i)·trayectorias frente al presupuesto."""
    params = parametros_desde_escalamiento(sp)
    t = tiempo_microscopico(sp, tau)
    eventos = t * sum(params.R * a + params.L / a for a in params.a) * trayectorias
    if eventos > presupuesto:
        raise PresupuestoExcedidoError(
            f"Se esperan {eventos:.3g} eventos (presupuesto {presupuesto:.3g}); aumente ε o reduzca τ"
        )
    return eventos


def reescalar_pushasep(sp, posiciones):
    """
    G_k = ε(x_k + k) - (k - 1) ln ε aplicado a posiciones finales.

    posiciones: arreglo (trayectorias, N) de x_1..x_N en t = ε^{-2}τ.
    """
    x = np.atleast_2d(np.asarray(posiciones, dtype=float))
    if x.shape[1] != sp.N:
        raise ParametrosInvalidosError(f"Se esperaban {sp.N} posiciones por fila. Valor recibido: {x.shape[1]}")
    k = np.arange(1, sp.N + 1)
    return sp.eps * (x + k) - (k - 1) * np.log(sp.eps)


def verificar_expansion_tasas(sp, epsilons, diferencias_G):
    """
    Compara la tasa R a_k (1 - ε e^{Δ}) con su desarrollo 1 - ε(𝖺_k + r + e^{Δ}).

    Returns:
        pd.DataFrame: eps, k, error máximo sobre Δ y error/ε²
    """
    filas = []
    delta = np.asarray(diferencias_G, dtype=float)
    for eps in epsilons:
        for k in range(1, sp.N + 1):
            a_k = sp.a_esc[k - 1]
            tasa = np.exp(-eps * (sp.r + a_k)) * (1 - eps * np.exp(delta))
            desarrollo = 1 - eps * (a_k + sp.r + np.exp(delta))
            error = float(np.max(np.abs(tasa - desarrollo)))
            filas.append({'eps': eps, 'k': k, 'error': error, 'error_relativo_eps2': error / eps ** 2})
    return pd.DataFrame(filas)
