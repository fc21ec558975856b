"""
Generador de ARGs sintéticos con un patrón plantado

Cada ARG positivo contiene los nodos no ocluidos del prototipo (con ruido
gaussiano) mezclados con nodos de fondo uniformes; los negativos son solo
fondo. Las semillas derivadas son [seed, 0] para el prototipo,
[seed, 1, k] para el positivo k y [seed, 2, l] para el negativo l.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.modelo.arg_model import (
    NONE, Arg, Assignment, ErrorValidacion, MatchParams, Pattern,
)
from src.modelo.parametros import SyntheticSpec

logger = logging.getLogger(__name__)

# Nodo plantado ausente de un ARG positivo
OCCLUDED = NONE


@dataclass(frozen=True)
class GroundTruth:
    """Prototipo sin ruido y, por ARG positivo, nodo del prototipo -> índice en el ARG u OCCLUDED"""
    plant: Pattern
    correspondences: Tuple[Assignment, ...]

    def correspondencia(self, arg_id: str) -> Assignment:
        for c in self.correspondences:
            if c.arg_id == arg_id:
                return c
        raise KeyError(f"ARG '{arg_id}' sin correspondencia registrada")


@dataclass
class RecoveryReport:
    precision: float
    recall: float
    precision_mayoria: float
    size_error: int
    mayoria: Dict[int, Optional[int]]

    def to_dict(self) -> Dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "precision_mayoria": self.precision_mayoria,
            "size_error": self.size_error,
        }


def _validar(spec: SyntheticSpec):
    errores = spec.validar_parametros()
    if errores:
        raise ErrorValidacion("Especificación inválida: " + "; ".join(errores))


def _uniforme(rng: np.random.RandomState, spec: SyntheticSpec, forma) -> np.ndarray:
    bajo, alto = spec.attr_range
    return rng.uniform(bajo, alto, size=forma)


def _prototipo(spec: SyntheticSpec) -> Pattern:
    rng = np.random.RandomState([spec.rng_seed, 0])
    m = spec.pattern_size
    unarios = [_uniforme(rng, spec, (m, dim)) for dim in spec.schema.unary_dims]
    pares = [_uniforme(rng, spec, (m, m, dim)) for dim in spec.schema.pairwise_dims]
    aristas = {(s, t) for s in range(m) for t in range(m) if s != t}
    return Pattern(
        schema=spec.schema,
        nodes=tuple(range(m)),
        edges=frozenset(aristas),
        unary_attrs={s: tuple(u[s] for u in unarios) for s in range(m)},
        pairwise_attrs={(s, t): tuple(p[s, t] for p in pares) for (s, t) in aristas},
        params=MatchParams.inicial(spec.schema),
        next_id=m,
    )


def _permutar(unarios, pares, orden: np.ndarray):
    """Coloca el nodo local i en la posición orden[i]"""
    n = orden.shape[0]
    nuevos_u, nuevos_p = [], []
    for u in unarios:
        destino = np.empty_like(u)
        destino[orden] = u
        nuevos_u.append(destino)
    for p in pares:
        destino = np.empty_like(p)
        destino[np.ix_(orden, orden)] = p
        destino[np.arange(n), np.arange(n)] = 0.0
        nuevos_p.append(destino)
    return tuple(nuevos_u), tuple(nuevos_p)


def _positivo(spec: SyntheticSpec, plant: Pattern, k: int) -> Tuple[Arg, Assignment]:
    rng = np.random.RandomState([spec.rng_seed, 1, k])
    m = spec.pattern_size
    visibles = [s for s in range(m) if rng.uniform() >= spec.occlusion_prob]
    if not visibles and spec.n_background == 0:
        visibles = [0]
    n = len(visibles) + spec.n_background
    sigma = spec.noise_sigma

    unarios = []
    for i, dim in enumerate(spec.schema.unary_dims):
        u = _uniforme(rng, spec, (n, dim))
        for local, s in enumerate(visibles):
            u[local] = plant.unary_attrs[s][i] + rng.normal(0.0, sigma, dim)
        unarios.append(u)

    pares = []
    for j, dim in enumerate(spec.schema.pairwise_dims):
        p = _uniforme(rng, spec, (n, n, dim))
        for a, s in enumerate(visibles):
            for b, t in enumerate(visibles):
                if s != t:
                    p[a, b] = plant.pairwise_attrs[(s, t)][j] + rng.normal(0.0, sigma, dim)
        pares.append(p)

    orden = rng.permutation(n)
    unarios, pares = _permutar(unarios, pares, orden)
    arg = Arg(id=f"pos_{k:03d}", schema=spec.schema, unary=unarios, pairwise=pares)

    mapa = {s: OCCLUDED for s in range(m)}
    for local, s in enumerate(visibles):
        mapa[s] = int(orden[local])
    return arg, Assignment(arg.id, mapa)


def _negativo(spec: SyntheticSpec, l: int) -> Arg:
    rng = np.random.RandomState([spec.rng_seed, 2, l])
    n = spec.pattern_size + spec.n_background
    unarios = tuple(_uniforme(rng, spec, (n, dim)) for dim in spec.schema.unary_dims)
    pares = tuple(_uniforme(rng, spec, (n, n, dim)) for dim in spec.schema.pairwise_dims)
    return Arg(id=f"neg_{l:03d}", schema=spec.schema, unary=unarios, pairwise=pares)


def generate(spec: SyntheticSpec) -> Tuple[List[Arg], List[Arg], GroundTruth]:
    """
    Genera ARGs positivos y negativos deterministas dada la semilla

    Raises:
        ErrorValidacion: especificación inválida
    """
    _validar(spec)
    plant = _prototipo(spec)
    positivos, correspondencias = [], []
    for k in range(spec.n_positive):
        arg, asignacion = _positivo(spec, plant, k)
        positivos.append(arg)
        correspondencias.append(asignacion)
    negativos = [_negativo(spec, l) for l in range(spec.n_negative)]
    logger.info("positivos=%d negativos=%d tamano_patron=%d",
                len(positivos), len(negativos), spec.pattern_size)
    return positivos, negativos, GroundTruth(plant, tuple(correspondencias))


def score_recovery(mined: Pattern, assignments: Sequence[Assignment],
                   truth: GroundTruth) -> RecoveryReport:
    """
    Compara un patrón minado con el plantado

    precision: fracción de correspondencias reales (nodo minado, ARG) que
    caen en un nodo plantado. Cada nodo minado se asocia por voto de mayoría
    al nodo plantado en el que más cae; recall es la fracción de nodos
    plantados cubiertos así.

    Raises:
        ErrorValidacion: número o ids de ARGs distintos a la verdad de referencia
    """
    if len(assignments) != len(truth.correspondences):
        raise ErrorValidacion(
            f"{len(assignments)} asignaciones para {len(truth.correspondences)} ARGs positivos"
        )

    votos: Dict[int, Counter] = {s: Counter() for s in mined.nodes}
    total, aciertos = 0, 0
    for asignacion, verdad in zip(assignments, truth.correspondences):
        if asignacion.arg_id != verdad.arg_id:
            raise ErrorValidacion(f"ARG '{asignacion.arg_id}' no coincide con '{verdad.arg_id}'")
        inverso = {x: p for p, x in verdad.mapa.items() if x is not OCCLUDED}
        for s in mined.nodes:
            x = asignacion.mapa.get(s)
            if x is NONE:
                continue
            total += 1
            if x in inverso:
                aciertos += 1
                votos[s][inverso[x]] += 1

    mayoria = {}
    for s, conteo in votos.items():
        if conteo:
            maximo = max(conteo.values())
            mayoria[s] = min(p for p, c in conteo.items() if c == maximo)
        else:
            mayoria[s] = None

    cubiertos = {p for p in mayoria.values() if p is not None}
    tamano = truth.plant.n_nodos
    return RecoveryReport(
        precision=aciertos / total if total else 0.0,
        recall=len(cubiertos) / tamano,
        precision_mayoria=(sum(1 for p in mayoria.values() if p is not None) / mined.n_nodos
                           if mined.n_nodos else 0.0),
        size_error=mined.n_nodos - tamano,
        mayoria=mayoria,
    )


def build_init_pattern(arg: Arg, truth: GroundTruth, n_plant: int, n_background: int,
                       seed: int) -> Tuple[Pattern, List[int]]:
    """
    Plantilla inicial completa desde un ARG positivo: n_plant nodos plantados
    visibles y n_background nodos de fondo, elegidos al azar

    Los nodos plantados reciben los ids 0..n_plant-1 y los de fondo los
    siguientes.

    Returns:
        (patrón, ids de los nodos de fondo)
    """
    correspondencia = truth.correspondencia(arg.id)
    plantados = sorted(x for x in correspondencia.mapa.values() if x is not OCCLUDED)
    fondo = sorted(set(range(arg.n_nodos)) - set(plantados))
    if n_plant + n_background < 1:
        raise ErrorValidacion("La plantilla inicial necesita al menos un nodo")
    if n_plant > len(plantados) or n_background > len(fondo):
        raise ErrorValidacion(
            f"ARG '{arg.id}' tiene {len(plantados)} nodos plantados y {len(fondo)} de fondo"
        )

    rng = np.random.RandomState([seed, 3])
    elegidos = [int(x) for x in rng.choice(plantados, n_plant, replace=False)] if n_plant else []
    extra = [int(x) for x in rng.choice(fondo, n_background, replace=False)] if n_background else []
    pattern = Pattern.desde_subgrafo(arg, elegidos + extra)
    return pattern, list(range(n_plant, n_plant + n_background))
