"""
Entrenamiento de pesos por margen máximo (Op. 6)

Problema primal (positivos = lado de baja energía):

    min ||w||² + (C/N⁺) Σ ξ⁺ + (C/N⁻) Σ ξ⁻
    s.a. -(w·a⁺ - b) >= 1 - ξ⁺,   (w·a⁻ - b) >= 1 - ξ⁻,   ξ >= 0

Se resuelve el dual con scipy.optimize (SLSQP) y el sesgo b se recupera de
forma exacta minimizando el primal en b sobre sus puntos de quiebre.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence

import numpy as np
from scipy.optimize import minimize

from src.modelo.arg_model import Arg, Assignment, ErrorValidacion, Pattern
from src.modelo.energy import disimilitud_par

logger = logging.getLogger(__name__)

POSITIVO = "positive"
NEGATIVO = "negative"

MAX_ITER_SVM = 10**5
TOL_SVM = 1e-12


class MuestraDegenerada(ErrorValidacion):
    """Asignación sin ningún nodo emparejado"""


@dataclass(frozen=True)
class MarginSample:
    features: np.ndarray
    label: str

    def __post_init__(self):
        a = np.asarray(self.features, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ErrorValidacion("Las características deben ser finitas y >= 0")
        if self.label not in (POSITIVO, NEGATIVO):
            raise ErrorValidacion(f"Etiqueta de muestra desconocida: '{self.label}'")
        object.__setattr__(self, "features", a)


@dataclass
class ResultadoSVM:
    """Hiperplano (w, b) y valor del objetivo primal; se desempaqueta como (w, b)"""
    w: np.ndarray
    b: float
    objetivo: float
    convergio: bool

    def __iter__(self) -> Iterator:
        return iter((self.w, self.b))


def extract_features(pattern: Pattern, arg: Arg, assignment: Assignment) -> np.ndarray:
    """
    Vector a = [a^P_1..a^P_NP, a^Q_1..a^Q_NQ]

    a^P_i: media sobre nodos emparejados de ||F_i^s - F_i^x̂s||².
    a^Q_j: media sobre nodos emparejados con alguna arista a destino
    emparejado de la media por arista de ||F_j^st - F_j^x̂s x̂t||²;
    0 si ningún nodo califica.

    Raises:
        MuestraDegenerada: todos los nodos en NONE
    """
    emparejados = [s for s in pattern.nodes if assignment.emparejado(s)]
    if not emparejados:
        raise MuestraDegenerada(f"'{assignment.arg_id}': asignación completamente NONE")

    n_p, n_q = pattern.schema.n_p, pattern.schema.n_q
    a_p = np.zeros(n_p)
    for s in emparejados:
        x = assignment.mapa[s]
        for i in range(n_p):
            a_p[i] += float(np.sum((pattern.unary_attrs[s][i] - arg.unary[i][x]) ** 2))
    a_p /= len(emparejados)

    a_q = np.zeros(n_q)
    n_calificados = 0
    for s in emparejados:
        destinos = [t for t in pattern.out_edges(s) if assignment.emparejado(t)]
        if not destinos:
            continue
        n_calificados += 1
        xs = assignment.mapa[s]
        for j in range(n_q):
            unitario = np.eye(n_q)[j]
            a_q[j] += np.mean([
                disimilitud_par(pattern.pairwise_attrs[(s, t)], unitario, arg, xs, assignment.mapa[t])
                for t in destinos
            ])
    if n_calificados:
        a_q /= n_calificados

    return np.concatenate([a_p, a_q])


def _matriz(pos: Sequence[MarginSample], neg: Sequence[MarginSample]):
    a = np.array([m.features for m in list(pos) + list(neg)])
    y = np.concatenate([-np.ones(len(pos)), np.ones(len(neg))])
    costo = np.concatenate([np.full(len(pos), 1.0 / len(pos)), np.full(len(neg), 1.0 / len(neg))])
    return a, y, costo


def objetivo_primal(w: np.ndarray, b: float, pos: Sequence[MarginSample],
                    neg: Sequence[MarginSample], c: float) -> float:
    """||w||² + Σ (C/N_clase) max(0, 1 - y(w·a - b))"""
    a, y, costo = _matriz(pos, neg)
    holgura = np.maximum(0.0, 1.0 - y * (a @ w - b))
    return float(w @ w + c * np.sum(costo * holgura))


def _mejor_sesgo(w: np.ndarray, a: np.ndarray, y: np.ndarray, costo: np.ndarray, c: float) -> float:
    # El primal es lineal a trozos y convexo en b; el mínimo está en un quiebre w·a_i - y_i
    proyeccion = a @ w
    candidatos = np.sort(proyeccion - y)
    valores = [np.sum(costo * np.maximum(0.0, 1.0 - y * (proyeccion - b))) for b in candidatos]
    return float(candidatos[int(np.argmin(valores))])


def train(pos: Sequence[MarginSample], neg: Sequence[MarginSample], c: float) -> ResultadoSVM:
    """
    Resuelve el problema de margen máximo con costo por clase C/N

    Dual: max 2Σα - ||Σ α_i y_i a_i||²,  0 <= α_i <= C/(2 N_clase),  Σ α_i y_i = 0;
    w = Σ α_i y_i a_i.

    Raises:
        ErrorValidacion: alguna clase sin muestras o C <= 0
    """
    if len(pos) == 0 or len(neg) == 0:
        raise ErrorValidacion("Se requiere al menos una muestra por clase")
    if not c > 0:
        raise ErrorValidacion("C debe ser positivo")

    a, y, costo = _matriz(pos, neg)
    g = a * y[:, None]
    cota = c * costo / 2.0

    def f(alfa):
        v = g.T @ alfa
        return float(v @ v - 2.0 * alfa.sum())

    def grad(alfa):
        return 2.0 * (g @ (g.T @ alfa)) - 2.0

    resultado = minimize(
        f, np.zeros(len(y)), jac=grad, method="SLSQP",
        bounds=[(0.0, u) for u in cota],
        constraints=[{"type": "eq", "fun": lambda alfa: float(alfa @ y), "jac": lambda alfa: y}],
        options={"maxiter": MAX_ITER_SVM, "ftol": TOL_SVM},
    )
    alfa = np.clip(resultado.x, 0.0, cota)
    w = g.T @ alfa
    b = _mejor_sesgo(w, a, y, costo, c)
    objetivo = objetivo_primal(w, b, pos, neg, c)

    if not resultado.success:
        logger.warning("SVM sin convergencia (%s); se usa la mejor iteración", resultado.message)

    return ResultadoSVM(w=w, b=b, objetivo=objetivo, convergio=bool(resultado.success))


def postprocess_and_blend(w_raw: np.ndarray, w_prev: np.ndarray, lambda_: float) -> np.ndarray:
    """
    Recorta negativos, normaliza en L1 y mezcla: λ·w + (1-λ)·w_prev

    Si todo queda en cero tras recortar, devuelve w_prev.
    """
    w_prev = np.asarray(w_prev, dtype=np.float64)
    w = np.maximum(np.asarray(w_raw, dtype=np.float64), 0.0)
    total = w.sum()
    if not total > 0:
        logger.warning("Pesos del SVM no positivos tras recortar; se conservan los anteriores")
        return w_prev.copy()
    mezcla = lambda_ * (w / total) + (1.0 - lambda_) * w_prev
    return mezcla / mezcla.sum()


def muestras(pattern: Pattern, args: Sequence[Arg], asignaciones: Sequence[Assignment],
             etiqueta: str) -> List[MarginSample]:
    """Extrae una muestra por ARG, descartando las degeneradas"""
    resultado = []
    for arg, asignacion in zip(args, asignaciones):
        try:
            resultado.append(MarginSample(extract_features(pattern, arg, asignacion), etiqueta))
        except MuestraDegenerada as e:
            logger.debug("Muestra descartada: %s", e)
    return resultado
