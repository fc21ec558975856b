"""
Emparejamiento de un patrón con un ARG (Op. 1)

Minimiza Σ_s E_s^k sobre asignaciones inyectivas en nodos reales, con la
etiqueta NONE disponible para todo nodo del patrón. Cada nodo del patrón es
una variable con etiquetas 0..n-1 (nodos del ARG) y n (NONE).
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from src.config import LIMITE_ENUMERACION
from src.mineria.etiquetado import (
    ProblemaEtiquetado, ResultadoEtiquetado, resolver_aproximado, resolver_exacto,
)
from src.modelo.arg_model import (
    NONE, Arg, Assignment, InstanciaDemasiadoGrande, Pattern, verificar_esquema,
)
from src.modelo.energy import total_match_energy
from src.modelo.parametros import MiningConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchResult:
    """Asignación óptima (o mejor encontrada) y su energía total E^k"""
    assignment: Assignment
    energy: float
    iteraciones: int
    exacto: bool


def costos_unarios(pattern: Pattern, s: int, arg: Arg) -> np.ndarray:
    """Vector (n,) de Σ_i w^P_i ||F_i^s - F_i^x||² para cada nodo x del ARG"""
    costo = np.zeros(arg.n_nodos)
    for w, f_s, u in zip(pattern.params.w_unary, pattern.unary_attrs[s], arg.unary):
        costo += w * np.sum((u - f_s) ** 2, axis=1)
    return costo


def costos_par(atributos_st: Sequence[np.ndarray], pesos: np.ndarray, arg: Arg) -> np.ndarray:
    """Matriz (n, n) de disimilitudes por pares sin normalizar; diagonal = +inf"""
    costo = np.zeros((arg.n_nodos, arg.n_nodos))
    for w, f_st, p in zip(pesos, atributos_st, arg.pairwise):
        costo += w * np.sum((p - f_st) ** 2, axis=2)
    np.fill_diagonal(costo, np.inf)
    return costo


def construir_problema(pattern: Pattern, arg: Arg) -> ProblemaEtiquetado:
    """Problema de etiquetado equivalente a minimizar E^k sobre asignaciones inyectivas"""
    verificar_esquema(pattern, arg)
    n = arg.n_nodos
    indice = {s: i for i, s in enumerate(pattern.nodes)}
    problema = ProblemaEtiquetado([n + 1] * pattern.n_nodos, exclusivo=True, etiqueta_nula=n)

    for s, i in indice.items():
        problema.agregar_unario(i, np.append(costos_unarios(pattern, s, arg),
                                              pattern.params.p_none))

    for s in pattern.nodes:
        destinos = pattern.out_edges(s)
        grado = len(destinos)
        for t in destinos:
            costo = np.full((n + 1, n + 1), pattern.params.q_none / grado)
            costo[:n, :n] = costos_par(pattern.pairwise_attrs[(s, t)],
                                       pattern.params.w_pairwise, arg) / grado
            problema.agregar_par(indice[s], indice[t], costo)
    return problema


def _a_resultado(pattern: Pattern, arg: Arg, solucion: ResultadoEtiquetado) -> MatchResult:
    n = arg.n_nodos
    mapa = {s: (NONE if l == n else l) for s, l in zip(pattern.nodes, solucion.etiquetas)}
    asignacion = Assignment(arg.id, mapa)
    return MatchResult(
        assignment=asignacion,
        energy=total_match_energy(pattern, arg, asignacion),
        iteraciones=solucion.iteraciones,
        exacto=solucion.exacto,
    )


def match_exact(pattern: Pattern, arg: Arg, limite: int = LIMITE_ENUMERACION) -> MatchResult:
    """
    Mínimo global por ramificación y acotamiento

    Empates: orden lexicográfico de asignaciones en el orden de ids del
    patrón (nodos reales ascendentes, NONE al final).

    Raises:
        InstanciaDemasiadoGrande: (n+1)^|V| > limite
        ErrorEsquema: esquemas distintos
    """
    problema = construir_problema(pattern, arg)
    return _a_resultado(pattern, arg, resolver_exacto(problema, limite))


def match_approx(pattern: Pattern, arg: Arg, restarts: int, seed: int) -> MatchResult:
    """Descenso coordenado con ``restarts`` inicializaciones aleatorias"""
    if restarts < 1:
        raise ValueError("restarts debe ser >= 1")
    problema = construir_problema(pattern, arg)
    return _a_resultado(pattern, arg, resolver_aproximado(problema, restarts, seed))


def match(pattern: Pattern, arg: Arg, cfg: MiningConfig) -> MatchResult:
    """Solucionador exacto si cfg.solver = "exact" y la guarda lo permite; si no, aproximado"""
    if cfg.solver == "exact":
        try:
            return match_exact(pattern, arg, cfg.exact_limit)
        except InstanciaDemasiadoGrande:
            logger.debug("ARG '%s': instancia grande, se usa el solucionador aproximado", arg.id)
    return match_approx(pattern, arg, cfg.restarts, cfg.rng_seed)


def _emparejar_uno(datos):
    pattern, arg, cfg = datos
    return match(pattern, arg, cfg)


def match_many(pattern: Pattern,
               args: Sequence[Arg],
               cfg: MiningConfig,
               forzar_infinito: bool = False) -> List[MatchResult]:
    """
    Empareja el patrón con cada ARG, preservando el orden

    Todos los ARGs usan la misma semilla, por lo que la ejecución en
    paralelo (cfg.jobs > 1) y la secuencial coinciden.

    Args:
        forzar_infinito: empareja con P_none = Q_none = +inf (ARGs negativos)
    """
    if forzar_infinito:
        pattern = pattern.con_parametros(pattern.params.con_penalizaciones_infinitas())
    if len(args) == 0:
        return []

    tareas = [(pattern, arg, cfg) for arg in args]
    if cfg.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, len(args))) as executor:
            futuros = [executor.submit(_emparejar_uno, t) for t in tareas]
            return _reunir(futuros, args, lambda f: f.result())
    return _reunir(tareas, args, _emparejar_uno)


def _reunir(elementos, args: Sequence[Arg], obtener) -> List[MatchResult]:
    resultados, errores = [], []
    for arg, elemento in zip(args, elementos):
        try:
            resultados.append(obtener(elemento))
        except ValueError as e:
            errores.append((arg.id, e))
    if errores:
        detalle = "; ".join(f"'{i}': {e}" for i, e in errores)
        raise type(errores[0][1])(f"{len(errores)} ARGs fallaron al emparejar: {detalle}")
    return resultados
