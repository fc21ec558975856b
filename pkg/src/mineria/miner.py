"""
Bucle de minería de patrones visuales de tamaño máximo (mVAP)

Cada iteración aplica, en orden:
    Op. 1  emparejamiento con los ARGs positivos (con filtros de calidad)
    Op. 2  estimación de atributos (medias sobre instancias emparejadas)
    Op. 3  eliminación del peor nodo
    Op. 4  descubrimiento de un nodo nuevo
    Op. 5  llenado de aristas
    Op. 6  entrenamiento de pesos y actualización de P_none / Q_none
"""
import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.config import PISO_PENALIZACION
from src.mineria.etiquetado import ProblemaEtiquetado, resolver_aproximado, resolver_exacto
from src.mineria.margin_trainer import (
    NEGATIVO, POSITIVO, muestras, postprocess_and_blend, train,
)
from src.mineria.matcher import MatchResult, match_many
from src.modelo.arg_model import (
    NONE, Arg, Assignment, ErrorValidacion, MatchParams, Pattern, verificar_esquema,
)
from src.modelo.energy import disimilitud_par, disimilitud_unaria, pattern_objective
from src.modelo.parametros import MiningConfig

logger = logging.getLogger(__name__)


class ErrorMineria(RuntimeError):
    """Todos los ARGs positivos quedaron fuera por los filtros de calidad"""


@dataclass
class RegistroIteracion:
    iteracion: int
    nodos: int
    aristas: int
    objetivo: float
    agregado: Optional[int]
    eliminado: Optional[int]
    activos: int
    delta_eliminacion: Optional[float]
    delta_agregado: Optional[float]
    tiempo_s: float

    def como_dict(self, con_tiempo: bool = True) -> Dict:
        datos = asdict(self)
        if not con_tiempo:
            datos.pop("tiempo_s")
        return datos


@dataclass
class MiningState:
    """
    Estado del bucle de minería

    ``args`` y ``assignments`` están alineados: son los ARGs positivos
    activos en la iteración en curso (tras los filtros de calidad).
    """
    pattern: Pattern
    args: List[Arg] = field(default_factory=list)
    assignments: List[Assignment] = field(default_factory=list)
    iteration: int = 0
    history: List[RegistroIteracion] = field(default_factory=list)
    sesgo: Optional[float] = None
    convergio: bool = False

    # Resultado de la última Op. 3 / Op. 4
    eliminado: Optional[int] = None
    delta_eliminacion: Optional[float] = None
    agregado: Optional[int] = None
    delta_agregado: Optional[float] = None

    @property
    def activos(self) -> List[str]:
        return [arg.id for arg in self.args]


# =============================================================================
# MEDIAS Y TÉRMINOS POR ARG
# =============================================================================

def _media_nodos(args: Sequence[Arg], indices: Sequence[Optional[int]], previo):
    """Media de atributos unarios sobre los ARGs con índice real; ``previo`` si no hay ninguno"""
    pares = [(arg, x) for arg, x in zip(args, indices) if x is not NONE]
    if not pares:
        return previo
    n_p = args[0].schema.n_p
    return tuple(np.mean([arg.unary[i][x] for arg, x in pares], axis=0) for i in range(n_p))


def _media_pares(args: Sequence[Arg],
                 origenes: Sequence[Optional[int]],
                 destinos: Sequence[Optional[int]],
                 previo):
    ternas = [(arg, xs, xt) for arg, xs, xt in zip(args, origenes, destinos)
              if xs is not NONE and xt is not NONE]
    if not ternas:
        return previo
    n_q = args[0].schema.n_q
    return tuple(np.mean([arg.pairwise[j][xs, xt] for arg, xs, xt in ternas], axis=0)
                 for j in range(n_q))


def _ceros_par(pattern: Pattern):
    return tuple(np.zeros(dim) for dim in pattern.schema.pairwise_dims)


def _objetivos(assignments: Sequence[Assignment], s: int) -> List[Optional[int]]:
    return [a.mapa.get(s) for a in assignments]


def atributos_candidatos(pattern: Pattern, s: int, t: int,
                         args: Sequence[Arg], assignments: Sequence[Assignment]):
    """
    Atributos por pares de (s, t): los del patrón si es arista; si no, la
    media sobre ARGs con s y t emparejados (ceros si no hay ninguno)
    """
    if (s, t) in pattern.edges:
        return pattern.pairwise_attrs[(s, t)]
    return _media_pares(args, _objetivos(assignments, s), _objetivos(assignments, t),
                        _ceros_par(pattern))


def _terminos_arista(atributos, pesos: np.ndarray, q_none: float, args: Sequence[Arg],
                     origenes: Sequence[Optional[int]],
                     destinos: Sequence[Optional[int]]) -> np.ndarray:
    """Por ARG: disimilitud por pares sin normalizar, o Q_none si algún extremo es NONE"""
    return np.array([
        q_none if (xs is NONE or xt is NONE) else disimilitud_par(atributos, pesos, arg, xs, xt)
        for arg, xs, xt in zip(args, origenes, destinos)
    ])


def _terminos_unarios(pattern: Pattern, s: int, args: Sequence[Arg],
                      assignments: Sequence[Assignment]) -> np.ndarray:
    return np.array([
        pattern.params.p_none if a.mapa[s] is NONE else disimilitud_unaria(pattern, s, arg, a.mapa[s])
        for arg, a in zip(args, assignments)
    ])


def _energia_media(unarios: np.ndarray, terminos: Sequence[np.ndarray]) -> float:
    """mean_k [u_k + Σ_t q_kt / |E|]"""
    total = unarios.astype(np.float64).copy()
    if terminos:
        total = total + np.sum(terminos, axis=0) / len(terminos)
    return float(np.mean(total))


def _ranking(pattern: Pattern, s: int, args: Sequence[Arg],
             assignments: Sequence[Assignment]) -> List[Tuple[int, np.ndarray]]:
    """Candidatos t ≠ s ordenados por Σ_k Q_st (empates por id)"""
    origenes = _objetivos(assignments, s)
    candidatos = []
    for t in pattern.nodes:
        if t == s:
            continue
        atributos = atributos_candidatos(pattern, s, t, args, assignments)
        terminos = _terminos_arista(atributos, pattern.params.w_pairwise, pattern.params.q_none,
                                    args, origenes, _objetivos(assignments, t))
        candidatos.append((float(np.sum(terminos)), t, terminos))
    candidatos.sort(key=lambda c: (c[0], c[1]))
    return [(t, terminos) for _, t, terminos in candidatos]


# =============================================================================
# OP. 2: ESTIMACIÓN DE ATRIBUTOS
# =============================================================================

def estimate_attributes(pattern: Pattern,
                        args: Sequence[Arg],
                        assignments: Sequence[Assignment]) -> Pattern:
    """
    F^s = media de F^x̂s sobre ARGs con s emparejado; F^st igual sobre ARGs
    con s y t emparejados. Sin instancias emparejadas se conserva el valor
    anterior. Estructura y parámetros no cambian.
    """
    unarios = {s: _media_nodos(args, _objetivos(assignments, s), pattern.unary_attrs[s])
               for s in pattern.nodes}
    pares = {(s, t): _media_pares(args, _objetivos(assignments, s), _objetivos(assignments, t),
                                  pattern.pairwise_attrs[(s, t)])
             for (s, t) in pattern.edges}
    return pattern.con_atributos(unarios, pares)


# =============================================================================
# OP. 3: ELIMINACIÓN DE NODOS
# =============================================================================

def tentative_edge_set(pattern: Pattern, s: int, args: Sequence[Arg],
                       assignments: Sequence[Assignment], d) -> List[Tuple[int, int]]:
    """Las d₁ = min(d, |V|-1) aristas (s, t) de menor Σ_k Q_st, en orden de ranking"""
    d1 = int(min(d, pattern.n_nodos - 1))
    if d1 <= 0:
        return []
    return [(s, t) for t, _ in _ranking(pattern, s, args, assignments)[:d1]]


def energia_tentativa(pattern: Pattern, s: int, args: Sequence[Arg],
                      assignments: Sequence[Assignment], d) -> float:
    """E_s evaluada con las aristas tentativas y normalización 1/d₁"""
    d1 = int(min(d, pattern.n_nodos - 1))
    terminos = [term for _, term in _ranking(pattern, s, args, assignments)[:max(d1, 0)]]
    return _energia_media(_terminos_unarios(pattern, s, args, assignments), terminos)


def delete_worst_node(state: MiningState, tau: float, d) -> MiningState:
    """
    Elimina el nodo de menor ganancia Δ = τ - E_s si Δ < 0 (a lo sumo uno,
    nunca el último)
    """
    state = replace(state, eliminado=None, delta_eliminacion=None)
    pattern = state.pattern
    if pattern.n_nodos < 2:
        return state

    ganancias = []
    for s in pattern.nodes:
        delta = tau - energia_tentativa(pattern, s, state.args, state.assignments, d)
        ganancias.append(math.inf if math.isnan(delta) else delta)

    indice = int(np.argmin(ganancias))
    delta = ganancias[indice]
    if not delta < 0:
        return replace(state, delta_eliminacion=delta)

    s = pattern.nodes[indice]
    logger.debug("Se elimina el nodo %d (Δ=%.6g)", s, delta)
    return replace(
        state,
        pattern=pattern.sin_nodo(s),
        assignments=[a.sin(s) for a in state.assignments],
        eliminado=s,
        delta_eliminacion=delta,
    )


# =============================================================================
# OP. 4: DESCUBRIMIENTO DE NODOS
# =============================================================================

@dataclass
class PropuestaNodo:
    """Resultado de los cuatro pasos del descubrimiento de un nodo y"""
    variables: List[int]                  # índices de ARG con etiquetas disponibles
    etiquetas: List[List[int]]            # nodos libres de cada variable
    seleccion_inicial: List[int]          # paso 1 (nodo del ARG por variable)
    destinos: List[int]                   # paso 2: E_y
    seleccion: List[int]                  # paso 3
    unarios: Tuple[np.ndarray, ...]       # paso 4
    salientes: Dict[int, Tuple[np.ndarray, ...]]
    energia_media: float
    d2: int

    def indices(self, n_args: int) -> List[Optional[int]]:
        """Nodo de y en cada ARG activo (NONE si el ARG no tenía nodos libres)"""
        por_arg: List[Optional[int]] = [NONE] * n_args
        for k, x in zip(self.variables, self.seleccion):
            por_arg[k] = x
        return por_arg


def _costo_unario_pares(args, variables, etiquetas, pesos, k, l) -> np.ndarray:
    ak, al = args[variables[k]], args[variables[l]]
    costo = np.zeros((len(etiquetas[k]), len(etiquetas[l])))
    for w, uk, ul in zip(pesos, ak.unary, al.unary):
        fk = uk[etiquetas[k]]
        fl = ul[etiquetas[l]]
        costo += w * np.sum((fk[:, None, :] - fl[None, :, :]) ** 2, axis=2)
    return costo


def _terminos_m(pattern: Pattern, args: Sequence[Arg], assignments: Sequence[Assignment],
                variables, etiquetas, k: int, l: int, d2: int) -> Dict[int, np.ndarray]:
    """m^kl_t para cada t ∈ V como matriz (etiquetas de k, etiquetas de l)"""
    n = len(args)
    ak, al = args[variables[k]], args[variables[l]]
    asig_k, asig_l = assignments[variables[k]], assignments[variables[l]]
    forma = (len(etiquetas[k]), len(etiquetas[l]))
    q_none = pattern.params.q_none

    terminos = {}
    for t in pattern.nodes:
        xk, xl = asig_k.mapa.get(t), asig_l.mapa.get(t)
        suma_delta = sum(1 for a in assignments if a.mapa.get(t) is not NONE)
        if xk is not NONE and xl is not NONE:
            costo = np.zeros(forma)
            for w, pk, pl in zip(pattern.params.w_pairwise, ak.pairwise, al.pairwise):
                fk = pk[etiquetas[k], xk]
                fl = pl[etiquetas[l], xl]
                costo += w * np.sum((fk[:, None, :] - fl[None, :, :]) ** 2, axis=2)
            terminos[t] = costo / (2.0 * d2 * n * suma_delta)
        else:
            terminos[t] = np.full(forma, q_none / (d2 * n * (n + suma_delta)))
    return terminos


def potencial_descubrimiento(pattern: Pattern, args: Sequence[Arg],
                             assignments: Sequence[Assignment], variables, etiquetas,
                             k: int, l: int, d2: int,
                             destinos: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    M̃_kl (destinos = None: suma de los d₂ menores m^kl_t por par de
    etiquetas) o M_kl (suma sobre los destinos fijos de E_y)
    """
    n = len(args)
    costo = _costo_unario_pares(args, variables, etiquetas, pattern.params.w_unary, k, l)
    costo = costo / (2.0 * n * n)
    terminos = _terminos_m(pattern, args, assignments, variables, etiquetas, k, l, d2)
    if destinos is None:
        pila = np.sort(np.stack([terminos[t] for t in pattern.nodes]), axis=0)
        return costo + pila[:d2].sum(axis=0)
    return costo + sum((terminos[t] for t in destinos), np.zeros_like(costo))


def problema_descubrimiento(pattern: Pattern, args: Sequence[Arg],
                            assignments: Sequence[Assignment], variables, etiquetas,
                            d2: int, destinos: Optional[Sequence[int]] = None) -> ProblemaEtiquetado:
    """MRF Σ_{k,l} M_kl(x_y^k, x_y^l) sobre todos los pares ordenados, incluidos k = l"""
    problema = ProblemaEtiquetado([len(e) for e in etiquetas])
    for k in range(len(variables)):
        for l in range(len(variables)):
            potencial = potencial_descubrimiento(pattern, args, assignments, variables,
                                                 etiquetas, k, l, d2, destinos)
            if k == l:
                # constante: el par (a, a) no depende de la etiqueta
                problema.agregar_constante(float(potencial[0, 0]))
            else:
                problema.agregar_par(k, l, potencial)
    return problema


def _resolver(problema: ProblemaEtiquetado, cfg: MiningConfig) -> List[int]:
    if problema.tamano_espacio() <= cfg.exact_limit:
        return resolver_exacto(problema, cfg.exact_limit).etiquetas
    return resolver_aproximado(problema, cfg.restarts, cfg.rng_seed).etiquetas


def proponer_nodo(pattern: Pattern, args: Sequence[Arg], assignments: Sequence[Assignment],
                  cfg: MiningConfig) -> Optional[PropuestaNodo]:
    """
    Pasos 1 a 4 del descubrimiento sin decidir la aceptación

    Returns:
        None si ningún ARG activo tiene nodos libres
    """
    n = len(args)
    variables, etiquetas = [], []
    for k, (arg, a) in enumerate(zip(args, assignments)):
        libres = sorted(set(range(arg.n_nodos)) - a.nodos_usados())
        if libres:
            variables.append(k)
            etiquetas.append(libres)
    if not variables:
        return None

    d2 = int(min(cfg.d, pattern.n_nodos))
    params = pattern.params

    # Paso 1: MRF con M̃
    problema = problema_descubrimiento(pattern, args, assignments, variables, etiquetas, d2)
    inicial = [etiquetas[v][e] for v, e in enumerate(_resolver(problema, cfg))]
    por_arg: List[Optional[int]] = [NONE] * n
    for k, x in zip(variables, inicial):
        por_arg[k] = x

    # Paso 2: E_y = d₂ destinos de menor Σ_k Q_yt con atributos provisionales
    ranking = []
    for t in pattern.nodes:
        destinos_t = _objetivos(assignments, t)
        atributos = _media_pares(args, por_arg, destinos_t, _ceros_par(pattern))
        terminos = _terminos_arista(atributos, params.w_pairwise, params.q_none,
                                    args, por_arg, destinos_t)
        ranking.append((float(np.sum(terminos)), t))
    ranking.sort()
    destinos = sorted(t for _, t in ranking[:d2])

    # Paso 3: MRF con M y E_y fijo
    problema = problema_descubrimiento(pattern, args, assignments, variables, etiquetas,
                                       d2, destinos)
    seleccion = [etiquetas[v][e] for v, e in enumerate(_resolver(problema, cfg))]
    for k, x in zip(variables, seleccion):
        por_arg[k] = x

    # Paso 4: atributos de y y su energía media
    unarios = _media_nodos(args, por_arg, None)
    salientes = {t: _media_pares(args, por_arg, _objetivos(assignments, t), _ceros_par(pattern))
                 for t in destinos}
    u = np.array([
        params.p_none if x is NONE else float(sum(
            w * np.sum((f - arg.unary[i][x]) ** 2)
            for i, (w, f) in enumerate(zip(params.w_unary, unarios))))
        for arg, x in zip(args, por_arg)
    ])
    terminos = [_terminos_arista(salientes[t], params.w_pairwise, params.q_none,
                                 args, por_arg, _objetivos(assignments, t))
                for t in destinos]
    energia = float(np.mean(u + np.sum(terminos, axis=0) / d2))

    return PropuestaNodo(
        variables=variables, etiquetas=etiquetas, seleccion_inicial=inicial,
        destinos=destinos, seleccion=seleccion, unarios=unarios, salientes=salientes,
        energia_media=energia, d2=d2,
    )


def discover_node(state: MiningState, args: Sequence[Arg], cfg: MiningConfig) -> MiningState:
    """
    Agrega el nodo y propuesto si su energía media E_y < τ (a lo sumo uno)

    ``args`` debe estar alineado con ``state.assignments``. Los ARGs sin
    nodos libres no participan en el MRF y emparejan y con NONE.
    """
    state = replace(state, agregado=None, delta_agregado=None)
    propuesta = proponer_nodo(state.pattern, args, state.assignments, cfg)
    if propuesta is None:
        logger.debug("Sin nodos libres en los ARGs activos; no hay descubrimiento")
        return state

    delta = propuesta.energia_media - cfg.tau
    if not delta < 0:
        return replace(state, delta_agregado=delta)

    pattern, y = state.pattern.con_nodo(propuesta.unarios, propuesta.salientes)
    por_arg = propuesta.indices(len(args))
    logger.debug("Se agrega el nodo %d con E_y=%.6g", y, propuesta.energia_media)
    return replace(
        state,
        pattern=pattern,
        assignments=[a.con(y, x) for a, x in zip(state.assignments, por_arg)],
        agregado=y,
        delta_agregado=delta,
    )


# =============================================================================
# OP. 5: LLENADO DE ARISTAS
# =============================================================================

def aristas_greedy(pattern: Pattern, s: int, args: Sequence[Arg],
                   assignments: Sequence[Assignment], tau: float) -> List[int]:
    """
    Destinos de E_s: se agregan en orden de ranking mientras E_s < τ; la
    primera arista que lleva E_s >= τ se descarta y se detiene
    """
    ranking = _ranking(pattern, s, args, assignments)
    if math.isinf(tau) and tau > 0:
        return sorted(t for t, _ in ranking)

    unarios = _terminos_unarios(pattern, s, args, assignments)
    elegidos, terminos = [], []
    for t, termino in ranking:
        if not _energia_media(unarios, terminos + [termino]) < tau:
            break
        elegidos.append(t)
        terminos.append(termino)
    return sorted(elegidos)


def fill_edges(state: MiningState, tau: float) -> MiningState:
    """Reemplaza E_s de cada nodo por el resultado del llenado greedy"""
    pattern = state.pattern
    nuevas = {}
    for s in pattern.nodes:
        destinos = aristas_greedy(pattern, s, state.args, state.assignments, tau)
        nuevas[s] = {t: atributos_candidatos(pattern, s, t, state.args, state.assignments)
                     for t in destinos}
    return replace(state, pattern=pattern.con_aristas_salientes(nuevas))


# =============================================================================
# OP. 6: PARÁMETROS
# =============================================================================

def aristas_para_penalizaciones(pattern: Pattern, args: Sequence[Arg],
                                assignments: Sequence[Assignment], d) -> Dict:
    """
    Aristas sobre las que se miden las medias por pares: E del patrón y,
    para cada nodo con E_s vacío, sus aristas tentativas (rango <= d₁) con
    los atributos candidatos de los ARGs positivos
    """
    aristas = dict(pattern.pairwise_attrs)
    for s in pattern.nodes:
        if pattern.out_edges(s):
            continue
        for _, t in tentative_edge_set(pattern, s, args, assignments, d):
            aristas[(s, t)] = atributos_candidatos(pattern, s, t, args, assignments)
    return aristas


def penalizaciones_medias(pattern: Pattern, args: Sequence[Arg],
                          assignments: Sequence[Assignment],
                          aristas: Optional[Dict] = None) -> Tuple[Optional[float], Optional[float]]:
    """
    (P̄, Q̄): media de P_s sobre instancias (k, s) emparejadas y media sobre
    instancias (k, s) emparejadas con aristas a destinos emparejados de la
    disimilitud media por arista. None si el conjunto es vacío.

    Args:
        aristas: (s, t) -> atributos por pares; por defecto E del patrón
    """
    if aristas is None:
        aristas = pattern.pairwise_attrs
    salientes: Dict[int, List[int]] = {s: [] for s in pattern.nodes}
    for (s, t) in sorted(aristas):
        salientes[s].append(t)

    unarios, pares = [], []
    for arg, a in zip(args, assignments):
        for s in pattern.nodes:
            xs = a.mapa.get(s)
            if xs is NONE:
                continue
            unarios.append(disimilitud_unaria(pattern, s, arg, xs))
            destinos = [t for t in salientes[s] if a.mapa.get(t) is not NONE]
            if destinos:
                pares.append(np.mean([
                    disimilitud_par(aristas[(s, t)], pattern.params.w_pairwise,
                                    arg, xs, a.mapa[t])
                    for t in destinos
                ]))
    p = float(np.mean(unarios)) if unarios else None
    q = float(np.mean(pares)) if pares else None
    return p, q


def update_none_penalties(pattern: Pattern,
                          pos_args: Sequence[Arg],
                          neg_args: Sequence[Arg],
                          assignments: Sequence[Assignment],
                          neg_assignments: Sequence[Assignment],
                          alpha: float,
                          d=None) -> MatchParams:
    """
    P_none ← P̄⁺ + α(P̄⁻ - P̄⁺),  Q_none ← Q̄⁺ + α(Q̄⁻ - Q̄⁺)

    Con ``d``, los nodos sin aristas salientes aportan a Q̄⁺ y Q̄⁻ a través
    de sus aristas tentativas, de modo que Q_none se estima aunque el
    llenado haya dejado E vacío. Cada penalización se actualiza solo si
    sus dos medias están definidas; el resultado se acota inferiormente
    para mantenerla positiva.
    """
    aristas = None
    if d is not None:
        aristas = aristas_para_penalizaciones(pattern, pos_args, assignments, d)
    p_pos, q_pos = penalizaciones_medias(pattern, pos_args, assignments, aristas)
    p_neg, q_neg = penalizaciones_medias(pattern, neg_args, neg_assignments, aristas)
    params = pattern.params

    p_none, q_none = params.p_none, params.q_none
    if p_pos is not None and p_neg is not None:
        p_none = max(p_pos + alpha * (p_neg - p_pos), PISO_PENALIZACION)
    else:
        logger.warning("Medias unarias indefinidas; P_none sin cambios")
    if q_pos is not None and q_neg is not None:
        q_none = max(q_pos + alpha * (q_neg - q_pos), PISO_PENALIZACION)
    else:
        logger.warning("Medias por pares indefinidas; Q_none sin cambios")
    return params.con_penalizaciones(p_none, q_none)


def entrenar_parametros(state: MiningState, neg_args: Sequence[Arg],
                        cfg: MiningConfig) -> MiningState:
    """Op. 6: SVM sobre características de emparejamiento y actualización de penalizaciones"""
    pattern = state.pattern
    negativos = match_many(pattern, neg_args, cfg, forzar_infinito=True)
    neg_asig = [r.assignment for r in negativos]

    pos = muestras(pattern, state.args, state.assignments, POSITIVO)
    neg = muestras(pattern, neg_args, neg_asig, NEGATIVO)

    params = pattern.params
    sesgo = state.sesgo
    if pos and neg:
        resultado = train(pos, neg, cfg.c_svm)
        w = postprocess_and_blend(resultado.w, params.vector_pesos(), cfg.lambda_)
        params = params.con_pesos(w, trained=True)
        sesgo = resultado.b
    else:
        logger.warning("Entrenamiento omitido: %d muestras positivas, %d negativas",
                       len(pos), len(neg))

    pattern = pattern.con_parametros(params)
    params = update_none_penalties(pattern, state.args, neg_args, state.assignments,
                                   neg_asig, cfg.alpha, cfg.d)
    return replace(state, pattern=pattern.con_parametros(params), sesgo=sesgo)


# =============================================================================
# BUCLE
# =============================================================================

def filtrar_por_calidad(args: Sequence[Arg], resultados: Sequence[MatchResult],
                        cfg: MiningConfig) -> Tuple[List[Arg], List[MatchResult]]:
    """
    Descarta ARGs con cobertura < min_match_fraction y conserva la fracción
    top_fraction de menor energía (al menos uno; empates por orden de entrada)

    Raises:
        ErrorMineria: ningún ARG sobrevive
    """
    pares = []
    for arg, r in zip(args, resultados):
        n = len(r.assignment.mapa)
        cobertura = r.assignment.n_emparejados / n if n else 0.0
        if cobertura >= cfg.min_match_fraction:
            pares.append((arg, r))
    if not pares:
        raise ErrorMineria(
            f"Ningún ARG positivo alcanza la cobertura mínima {cfg.min_match_fraction}"
        )

    cupo = max(1, math.ceil(cfg.top_fraction * len(pares)))
    orden = sorted(range(len(pares)), key=lambda i: (pares[i][1].energy, i))[:cupo]
    elegidos = [pares[i] for i in sorted(orden)]
    return [a for a, _ in elegidos], [r for _, r in elegidos]


def _validar_entradas(init: Pattern, pos_args, neg_args, cfg: MiningConfig):
    errores = cfg.validar_parametros()
    if errores:
        raise ErrorValidacion("Configuración inválida: " + "; ".join(errores))
    if init.n_nodos == 0:
        raise ErrorValidacion("El patrón inicial no tiene nodos")
    if len(pos_args) == 0:
        raise ErrorValidacion("Se requiere al menos un ARG positivo")
    for arg in list(pos_args) + list(neg_args):
        verificar_esquema(init, arg)


def mine(init: Pattern, pos_args: Sequence[Arg], neg_args: Sequence[Arg],
         cfg: MiningConfig) -> Tuple[Pattern, MiningState]:
    """
    Transforma la plantilla inicial en un mVAP

    Termina cuando una iteración no agrega ni elimina nodos y el objetivo
    cambia menos de energy_tol, o al alcanzar max_iters (convergio = False).
    """
    _validar_entradas(init, pos_args, neg_args, cfg)
    state = MiningState(pattern=init)
    objetivo_previo = None

    for iteracion in range(1, cfg.max_iters + 1):
        inicio = time.perf_counter()

        resultados = match_many(state.pattern, pos_args, cfg)
        activos, resultados = filtrar_por_calidad(pos_args, resultados, cfg)
        state = replace(state, args=activos, assignments=[r.assignment for r in resultados])

        state = replace(state, pattern=estimate_attributes(state.pattern, state.args,
                                                           state.assignments))
        state = delete_worst_node(state, cfg.tau, cfg.d)
        state = discover_node(state, state.args, cfg)
        state = fill_edges(state, cfg.tau)
        objetivo = pattern_objective(state.pattern, state.args, state.assignments, cfg.tau)
        state = entrenar_parametros(state, neg_args, cfg)

        registro = RegistroIteracion(
            iteracion=iteracion,
            nodos=state.pattern.n_nodos,
            aristas=state.pattern.n_aristas,
            objetivo=objetivo,
            agregado=state.agregado,
            eliminado=state.eliminado,
            activos=len(state.args),
            delta_eliminacion=state.delta_eliminacion,
            delta_agregado=state.delta_agregado,
            tiempo_s=time.perf_counter() - inicio,
        )
        state.history.append(registro)
        state.iteration = iteracion
        logger.info(
            "iteracion=%d nodos=%d aristas=%d objetivo=%.6g agregado=%s eliminado=%s "
            "activos=%d tiempo_s=%.3f",
            registro.iteracion, registro.nodos, registro.aristas, registro.objetivo,
            registro.agregado, registro.eliminado, registro.activos, registro.tiempo_s,
        )

        estructural = state.agregado is not None or state.eliminado is not None
        if not estructural and objetivo_previo is not None and (
                objetivo == objetivo_previo or abs(objetivo - objetivo_previo) < cfg.energy_tol):
            state.convergio = True
            break
        objetivo_previo = objetivo

    return state.pattern, state


def historial_como_tabla(state: MiningState, con_tiempo: bool = True) -> pd.DataFrame:
    columnas = [f for f in RegistroIteracion.__dataclass_fields__
                if con_tiempo or f != "tiempo_s"]
    return pd.DataFrame([r.como_dict(con_tiempo) for r in state.history], columns=columnas)
