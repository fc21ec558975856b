"""
Métricas de evaluación de patrones minados

- borrosidad (energía media por nodo)
- razón de energías positivos / negativos
- puntaje de detección y precisión promedio (AP)
- densidad (aristas salientes por nodo)
"""
import logging
import math
from typing import Dict, Sequence

import numpy as np

from src.mineria.matcher import match_many
from src.modelo.arg_model import Arg, Assignment, ErrorValidacion, Pattern
from src.modelo.energy import mean_node_energy, total_match_energy
from src.modelo.parametros import MiningConfig

logger = logging.getLogger(__name__)

COLUMNAS_METRICAS = ["tau", "d", "pattern_size", "mean_out_degree", "fuzziness",
                     "energy_ratio", "ap", "wall_time_s"]


def _exigir_nodos(pattern: Pattern):
    if pattern.n_nodos == 0:
        raise ErrorValidacion("Patrón vacío")


def pattern_fuzziness(pattern: Pattern, args: Sequence[Arg],
                      assignments: Sequence[Assignment]) -> float:
    """Media sobre nodos de la energía media de nodo"""
    _exigir_nodos(pattern)
    return float(np.mean([mean_node_energy(pattern, s, args, assignments) for s in pattern.nodes]))


def energy_ratio(pattern: Pattern, pos_test: Sequence[Arg], neg_test: Sequence[Arg],
                 cfg: MiningConfig) -> float:
    """
    Energía media de los emparejamientos positivos / negativos (menor es mejor)

    Ambos conjuntos se emparejan con los parámetros del patrón.
    """
    if len(pos_test) == 0 or len(neg_test) == 0:
        raise ErrorValidacion("Se requieren ARGs de prueba positivos y negativos")
    return _razon(match_many(pattern, pos_test, cfg), match_many(pattern, neg_test, cfg))


def _razon(positivos, negativos) -> float:
    media_pos = float(np.mean([r.energy for r in positivos]))
    media_neg = float(np.mean([r.energy for r in negativos]))
    if media_neg == 0:
        if media_pos == 0:
            return 0.0
        logger.warning("Energía media negativa nula; razón de energías infinita")
        return math.inf
    return media_pos / media_neg


def detection_score(pattern: Pattern, arg: Arg, assignment: Assignment, zeta: float) -> float:
    """-(E^k - ζ·cobertura); mayor = más parecido al patrón"""
    _exigir_nodos(pattern)
    cobertura = assignment.n_emparejados / pattern.n_nodos
    return -(total_match_energy(pattern, arg, assignment) - zeta * cobertura)


def average_precision(scores_pos: Sequence[float], scores_neg: Sequence[float]) -> float:
    """
    AP del ranking por puntaje descendente: media de la precisión en el
    rango de cada positivo. Empates pesimistas (negativos primero).
    """
    if len(scores_pos) == 0 or len(scores_neg) == 0:
        raise ErrorValidacion("Se requieren puntajes positivos y negativos")

    puntajes = np.concatenate([np.asarray(scores_pos, float), np.asarray(scores_neg, float)])
    etiquetas = np.concatenate([np.ones(len(scores_pos)), np.zeros(len(scores_neg))])
    # lexsort: última clave primaria; ante empate la etiqueta 0 (negativo) va primero
    orden = np.lexsort((etiquetas, -puntajes))
    etiquetas = etiquetas[orden]

    verdaderos = np.cumsum(etiquetas)
    precision = verdaderos / np.arange(1, len(etiquetas) + 1)
    return float(np.sum(precision * etiquetas) / len(scores_pos))


def mean_out_degree(pattern: Pattern) -> float:
    """|E| / |V|"""
    _exigir_nodos(pattern)
    return pattern.n_aristas / pattern.n_nodos


def fila_metricas(tau, d, pattern: Pattern, fuzziness: float, ratio: float, ap: float,
                  wall_time_s: float) -> Dict:
    return {
        "tau": tau,
        "d": d,
        "pattern_size": pattern.n_nodos,
        "mean_out_degree": mean_out_degree(pattern),
        "fuzziness": fuzziness,
        "energy_ratio": ratio,
        "ap": ap,
        "wall_time_s": wall_time_s,
    }


def evaluate_pattern(pattern: Pattern, pos_test: Sequence[Arg], neg_test: Sequence[Arg],
                     cfg: MiningConfig, wall_time_s: float = 0.0) -> Dict:
    """Fila completa de métricas sobre conjuntos de prueba"""
    if len(pos_test) == 0 or len(neg_test) == 0:
        raise ErrorValidacion("Conjunto de prueba vacío")
    positivos = match_many(pattern, pos_test, cfg)
    negativos = match_many(pattern, neg_test, cfg)

    fuzziness = pattern_fuzziness(pattern, pos_test, [r.assignment for r in positivos])
    ratio = _razon(positivos, negativos)

    puntajes_pos = [detection_score(pattern, a, r.assignment, cfg.zeta)
                    for a, r in zip(pos_test, positivos)]
    puntajes_neg = [detection_score(pattern, a, r.assignment, cfg.zeta)
                    for a, r in zip(neg_test, negativos)]
    ap = average_precision(puntajes_pos, puntajes_neg)
    return fila_metricas(cfg.tau, cfg.d, pattern, fuzziness, ratio, ap, wall_time_s)
