"""
Energía de emparejamiento entre un patrón y ARGs positivos

P_s(x) = Σ_i w^P_i ||F_i^s - F_i^x||²        (x real)      | P_none
Q_st(x_s, x_t) = Σ_j w^Q_j ||F_j^st - F_j^{x_s x_t}||² / |E_s|  (reales distintos)
               = +inf                                            (x_s = x_t real)
               = Q_none / |E_s|                                  (alguno es NONE)

Todas las funciones son puras. +inf es el infinito real y contamina las sumas.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.modelo.arg_model import (
    NONE, Arg, Assignment, Pattern, verificar_esquema,
)


@dataclass(frozen=True)
class NodeEnergyBreakdown:
    """Energía de un nodo en un ARG: término unario, suma de pares salientes y total"""
    unary: float
    pairwise: float
    total: float


def disimilitud_unaria(pattern: Pattern, s: int, arg: Arg, x: int) -> float:
    """Σ_i w^P_i ||F_i^s - F_i^x||² (sin rama NONE)"""
    pesos = pattern.params.w_unary
    return float(sum(
        w * float(np.sum((f_s - u[x]) ** 2))
        for w, f_s, u in zip(pesos, pattern.unary_attrs[s], arg.unary)
    ))


def disimilitud_par(atributos_st: Sequence[np.ndarray],
                    pesos: np.ndarray,
                    arg: Arg,
                    xs: int,
                    xt: int) -> float:
    """Σ_j w^Q_j ||F_j^st - F_j^{xs xt}||² sin normalizar por |E_s|"""
    return float(sum(
        w * float(np.sum((f_st - p[xs, xt]) ** 2))
        for w, f_st, p in zip(pesos, atributos_st, arg.pairwise)
    ))


def unary_penalty(pattern: Pattern, s: int, arg: Arg, target: Optional[int]) -> float:
    """
    Penalización unaria P_s

    Args:
        target: índice de nodo del ARG o NONE

    Returns:
        Σ_i w^P_i ||F_i^s - F_i^target||², o P_none si target es NONE
    """
    verificar_esquema(pattern, arg)
    if target is NONE:
        return pattern.params.p_none
    return disimilitud_unaria(pattern, s, arg, target)


def pairwise_penalty(pattern: Pattern,
                     edge: Tuple[int, int],
                     arg: Arg,
                     xs: Optional[int],
                     xt: Optional[int],
                     out_degree_s: int) -> float:
    """
    Penalización por pares Q_st con normalización 1/|E_s|

    Raises:
        ValueError: out_degree_s = 0 (los términos de pares solo existen con E_s no vacío)
    """
    verificar_esquema(pattern, arg)
    if out_degree_s <= 0:
        raise ValueError("out_degree_s debe ser positivo")
    if xs is NONE or xt is NONE:
        return pattern.params.q_none / out_degree_s
    if xs == xt:
        return math.inf
    return disimilitud_par(pattern.pairwise_attrs[edge], pattern.params.w_pairwise,
                           arg, xs, xt) / out_degree_s


def node_energy(pattern: Pattern, s: int, arg: Arg, assignment: Assignment) -> NodeEnergyBreakdown:
    """
    E_s^k = P_s + Σ_{(s,t) ∈ E_s} Q_st con los parámetros del patrón

    Raises:
        KeyError: la asignación no cubre s o algún destino de E_s
    """
    destinos = pattern.out_edges(s)
    faltantes = [v for v in [s] + destinos if v not in assignment.mapa]
    if faltantes:
        raise KeyError(f"Asignación de '{assignment.arg_id}' sin los nodos {faltantes}")

    xs = assignment.mapa[s]
    unario = unary_penalty(pattern, s, arg, xs)
    pares = 0.0
    grado = len(destinos)
    for t in destinos:
        pares += pairwise_penalty(pattern, (s, t), arg, xs, assignment.mapa[t], grado)
    return NodeEnergyBreakdown(unary=unario, pairwise=pares, total=unario + pares)


def mean_node_energy(pattern: Pattern,
                     s: int,
                     args: Sequence[Arg],
                     assignments: Sequence[Assignment]) -> float:
    """E_s = mean_k E_s^k"""
    if len(args) == 0:
        raise ValueError("Lista de ARGs vacía")
    if len(args) != len(assignments):
        raise ValueError("Se requiere una asignación por ARG")
    totales = [node_energy(pattern, s, arg, a).total for arg, a in zip(args, assignments)]
    return float(np.mean(totales))


def pattern_objective(pattern: Pattern,
                      args: Sequence[Arg],
                      assignments: Sequence[Assignment],
                      tau: float) -> float:
    """Energy^(a) = Σ_{s ∈ V} (E_s - τ)"""
    return float(sum(
        mean_node_energy(pattern, s, args, assignments) - tau for s in pattern.nodes
    ))


def total_match_energy(pattern: Pattern, arg: Arg, assignment: Assignment) -> float:
    """E^k = Σ_{s ∈ V} E_s^k"""
    return float(sum(node_energy(pattern, s, arg, assignment).total for s in pattern.nodes))


def desglose_por_nodo(pattern: Pattern, arg: Arg, assignment: Assignment):
    """Lista (s, destino, NodeEnergyBreakdown) para reportes"""
    return [(s, assignment.mapa[s], node_energy(pattern, s, arg, assignment))
            for s in pattern.nodes]

