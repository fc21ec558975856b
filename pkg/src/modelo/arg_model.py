"""
Tipos base: grafos relacionales atribuidos (ARG), patrones, parámetros de
emparejamiento y asignaciones

Todos los valores son inmutables tras su construcción; las operaciones que
"modifican" devuelven un objeto nuevo.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.config import TOLERANCIA_SIMPLEX


# Etiqueta dummy para nodos ocluidos
NONE = None


class ErrorFormato(ValueError):
    """Texto mal formado (JSON inválido)"""


class ErrorEsquema(ValueError):
    """Dimensiones incompatibles, pares faltantes o esquemas distintos"""


class ErrorValorNumerico(ValueError):
    """Número no finito donde se exige uno finito"""


class ErrorValidacion(ValueError):
    """Invariante de un patrón, configuración o especificación violado"""


class InstanciaDemasiadoGrande(ValueError):
    """La enumeración exacta excede el límite configurado"""


def _como_vector(valor, dim: int, contexto: str) -> np.ndarray:
    vector = np.asarray(valor, dtype=np.float64).reshape(-1)
    if vector.shape[0] != dim:
        raise ErrorEsquema(f"{contexto}: dimensión {vector.shape[0]}, se esperaba {dim}")
    if not np.all(np.isfinite(vector)):
        raise ErrorValorNumerico(f"{contexto}: valores no finitos")
    return vector


def _solo_lectura(arreglo: np.ndarray) -> np.ndarray:
    arreglo.setflags(write=False)
    return arreglo


@dataclass(frozen=True)
class AttributeSchema:
    """Dimensiones de los N_P tipos de atributo unario y N_Q tipos de atributo por pares"""
    unary_dims: Tuple[int, ...]
    pairwise_dims: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "unary_dims", tuple(int(d) for d in self.unary_dims))
        object.__setattr__(self, "pairwise_dims", tuple(int(d) for d in self.pairwise_dims))
        if len(self.unary_dims) < 1 or len(self.pairwise_dims) < 1:
            raise ErrorEsquema("Se requiere N_P >= 1 y N_Q >= 1")
        if min(self.unary_dims) < 1 or min(self.pairwise_dims) < 1:
            raise ErrorEsquema("Todas las dimensiones deben ser >= 1")

    @property
    def n_p(self) -> int:
        return len(self.unary_dims)

    @property
    def n_q(self) -> int:
        return len(self.pairwise_dims)


@dataclass(frozen=True, eq=False)
class Arg:
    """
    Grafo relacional atribuido completo

    Almacenamiento denso por tipo de atributo:
    - unary[i]: arreglo (n, dim_i)
    - pairwise[j]: arreglo (n, n, dim_j); la diagonal no se usa y vale 0
    """
    id: str
    schema: AttributeSchema
    unary: Tuple[np.ndarray, ...]
    pairwise: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.unary) != self.schema.n_p or len(self.pairwise) != self.schema.n_q:
            raise ErrorEsquema(f"ARG '{self.id}': número de tipos de atributo incompatible")

        unarios = tuple(np.array(u, dtype=np.float64) for u in self.unary)
        pares = tuple(np.array(p, dtype=np.float64) for p in self.pairwise)

        n = unarios[0].shape[0] if unarios[0].ndim == 2 else -1
        if n < 1:
            raise ErrorEsquema(f"ARG '{self.id}': debe tener al menos un nodo")

        for i, (u, dim) in enumerate(zip(unarios, self.schema.unary_dims)):
            if u.shape != (n, dim):
                raise ErrorEsquema(f"ARG '{self.id}': atributo unario {i} con forma {u.shape}")
        for j, (p, dim) in enumerate(zip(pares, self.schema.pairwise_dims)):
            if p.shape != (n, n, dim):
                raise ErrorEsquema(f"ARG '{self.id}': atributo por pares {j} con forma {p.shape}")
            p[np.arange(n), np.arange(n), :] = 0.0

        for a in unarios + pares:
            if not np.all(np.isfinite(a)):
                raise ErrorValorNumerico(f"ARG '{self.id}': valores no finitos")

        object.__setattr__(self, "unary", tuple(_solo_lectura(u) for u in unarios))
        object.__setattr__(self, "pairwise", tuple(_solo_lectura(p) for p in pares))

    @property
    def n_nodos(self) -> int:
        return self.unary[0].shape[0]

    @classmethod
    def desde_registros(cls,
                        id: str,
                        schema: AttributeSchema,
                        nodos: Sequence[Sequence],
                        pares: Mapping[Tuple[int, int], Sequence]) -> 'Arg':
        """
        Construye un ARG a partir de registros por nodo y por par ordenado

        Args:
            nodos: por nodo, lista de N_P vectores
            pares: (s, t) -> lista de N_Q vectores; deben estar los n(n-1) pares

        Raises:
            ErrorEsquema: par faltante, autoarco o dimensión incorrecta
        """
        n = len(nodos)
        if n < 1:
            raise ErrorEsquema(f"ARG '{id}': debe tener al menos un nodo")

        unarios = [np.zeros((n, dim)) for dim in schema.unary_dims]
        for x, atributos in enumerate(nodos):
            if len(atributos) != schema.n_p:
                raise ErrorEsquema(f"ARG '{id}': nodo {x} con {len(atributos)} tipos unarios")
            for i, valor in enumerate(atributos):
                unarios[i][x] = _como_vector(valor, schema.unary_dims[i], f"ARG '{id}' nodo {x}")

        esperados = {(s, t) for s in range(n) for t in range(n) if s != t}
        faltantes = esperados - set(pares.keys())
        sobrantes = set(pares.keys()) - esperados
        if faltantes:
            raise ErrorEsquema(f"ARG '{id}': faltan los pares {sorted(faltantes)[:5]}")
        if sobrantes:
            raise ErrorEsquema(f"ARG '{id}': pares inválidos {sorted(sobrantes)[:5]}")

        por_pares = [np.zeros((n, n, dim)) for dim in schema.pairwise_dims]
        for (s, t), atributos in pares.items():
            if len(atributos) != schema.n_q:
                raise ErrorEsquema(f"ARG '{id}': par ({s},{t}) con {len(atributos)} tipos")
            for j, valor in enumerate(atributos):
                por_pares[j][s, t] = _como_vector(
                    valor, schema.pairwise_dims[j], f"ARG '{id}' par ({s},{t})"
                )

        return cls(id=id, schema=schema, unary=tuple(unarios), pairwise=tuple(por_pares))

    def atributos_nodo(self, x: int) -> List[np.ndarray]:
        return [u[x] for u in self.unary]

    def atributos_par(self, s: int, t: int) -> List[np.ndarray]:
        return [p[s, t] for p in self.pairwise]

    def __eq__(self, otro) -> bool:
        if not isinstance(otro, Arg):
            return NotImplemented
        return (self.id == otro.id and self.schema == otro.schema
                and all(np.array_equal(a, b) for a, b in zip(self.unary, otro.unary))
                and all(np.array_equal(a, b) for a, b in zip(self.pairwise, otro.pairwise)))


@dataclass(frozen=True, eq=False)
class MatchParams:
    """
    Parámetros de emparejamiento W = {w^P, w^Q, P_none, Q_none}

    Las penalizaciones infinitas son math.inf (valor distinguido, nunca un
    flotante grande).
    """
    w_unary: np.ndarray
    w_pairwise: np.ndarray
    p_none: float = math.inf
    q_none: float = math.inf
    trained: bool = False

    def __post_init__(self):
        w_p = _solo_lectura(np.array(self.w_unary, dtype=np.float64).reshape(-1))
        w_q = _solo_lectura(np.array(self.w_pairwise, dtype=np.float64).reshape(-1))
        object.__setattr__(self, "w_unary", w_p)
        object.__setattr__(self, "w_pairwise", w_q)
        object.__setattr__(self, "p_none", float(self.p_none))
        object.__setattr__(self, "q_none", float(self.q_none))

        pesos = np.concatenate([w_p, w_q])
        if not np.all(np.isfinite(pesos)) or np.any(pesos < 0):
            raise ErrorValidacion("Los pesos deben ser finitos y >= 0")
        if not (self.p_none > 0) or not (self.q_none > 0):
            raise ErrorValidacion("P_none y Q_none deben estar en (0, +inf]")
        if self.trained and abs(pesos.sum() - 1.0) > TOLERANCIA_SIMPLEX:
            raise ErrorValidacion(f"Pesos entrenados fuera del símplex (suma={pesos.sum():.6g})")

    @classmethod
    def inicial(cls, schema: AttributeSchema) -> 'MatchParams':
        """W^0: pesos uniformes 1/(N_P+N_Q) y penalizaciones infinitas"""
        total = schema.n_p + schema.n_q
        return cls(
            w_unary=np.full(schema.n_p, 1.0 / total),
            w_pairwise=np.full(schema.n_q, 1.0 / total),
        )

    def vector_pesos(self) -> np.ndarray:
        return np.concatenate([self.w_unary, self.w_pairwise])

    def con_pesos(self, w: np.ndarray, trained: bool = True) -> 'MatchParams':
        n_p = self.w_unary.shape[0]
        return MatchParams(w[:n_p], w[n_p:], self.p_none, self.q_none, trained)

    def con_penalizaciones(self, p_none: float, q_none: float) -> 'MatchParams':
        return MatchParams(self.w_unary, self.w_pairwise, p_none, q_none, self.trained)

    def con_penalizaciones_infinitas(self) -> 'MatchParams':
        return self.con_penalizaciones(math.inf, math.inf)

    def __eq__(self, otro) -> bool:
        if not isinstance(otro, MatchParams):
            return NotImplemented
        return (np.array_equal(self.w_unary, otro.w_unary)
                and np.array_equal(self.w_pairwise, otro.w_pairwise)
                and self.p_none == otro.p_none and self.q_none == otro.q_none
                and self.trained == otro.trained)


@dataclass(frozen=True, eq=False)
class Pattern:
    """
    Patrón G = (V, E, F_V, F_E, W)

    Los ids de nodo son enteros estables emitidos por un contador propio
    (``next_id``); un id eliminado nunca se reutiliza. (s, t) y (t, s) son
    aristas dirigidas distintas.
    """
    schema: AttributeSchema
    nodes: Tuple[int, ...]
    edges: FrozenSet[Tuple[int, int]]
    unary_attrs: Dict[int, Tuple[np.ndarray, ...]]
    pairwise_attrs: Dict[Tuple[int, int], Tuple[np.ndarray, ...]]
    params: MatchParams
    next_id: int = -1

    def __post_init__(self):
        nodos = tuple(sorted(int(s) for s in self.nodes))
        if len(set(nodos)) != len(nodos):
            raise ErrorValidacion("Ids de nodo repetidos")
        aristas = frozenset((int(s), int(t)) for s, t in self.edges)
        conjunto = set(nodos)
        for s, t in aristas:
            if s == t:
                raise ErrorValidacion(f"Autoarco ({s},{t})")
            if s not in conjunto or t not in conjunto:
                raise ErrorValidacion(f"Arista ({s},{t}) con extremo fuera del patrón")

        if set(self.unary_attrs.keys()) != conjunto:
            raise ErrorValidacion("unary_attrs debe cubrir exactamente los nodos")
        if set(self.pairwise_attrs.keys()) != set(aristas):
            raise ErrorValidacion("pairwise_attrs debe cubrir exactamente las aristas")

        unarios = {
            s: tuple(_solo_lectura(_como_vector(v, dim, f"nodo {s}"))
                     for v, dim in zip(self._exigir_tipos(a, self.schema.n_p, f"nodo {s}"),
                                       self.schema.unary_dims))
            for s, a in self.unary_attrs.items()
        }
        por_pares = {
            e: tuple(_solo_lectura(_como_vector(v, dim, f"arista {e}"))
                     for v, dim in zip(self._exigir_tipos(a, self.schema.n_q, f"arista {e}"),
                                       self.schema.pairwise_dims))
            for e, a in self.pairwise_attrs.items()
        }
        if (self.params.w_unary.shape[0] != self.schema.n_p
                or self.params.w_pairwise.shape[0] != self.schema.n_q):
            raise ErrorEsquema("Número de pesos incompatible con el esquema")

        siguiente = int(self.next_id)
        minimo = (max(nodos) + 1) if nodos else 0
        if siguiente < 0:
            siguiente = minimo
        elif siguiente < minimo:
            raise ErrorValidacion("next_id debe superar todos los ids de nodo")

        object.__setattr__(self, "nodes", nodos)
        object.__setattr__(self, "edges", aristas)
        object.__setattr__(self, "unary_attrs", unarios)
        object.__setattr__(self, "pairwise_attrs", por_pares)
        object.__setattr__(self, "next_id", siguiente)

    @staticmethod
    def _exigir_tipos(atributos, n_tipos: int, contexto: str):
        if len(atributos) != n_tipos:
            raise ErrorEsquema(f"{contexto}: {len(atributos)} tipos, se esperaban {n_tipos}")
        return atributos

    @property
    def n_nodos(self) -> int:
        return len(self.nodes)

    @property
    def n_aristas(self) -> int:
        return len(self.edges)

    def out_edges(self, s: int) -> List[int]:
        """Destinos t de las aristas salientes E_s, ordenados por id"""
        return sorted(t for (u, t) in self.edges if u == s)

    def out_degree(self, s: int) -> int:
        return sum(1 for (u, _) in self.edges if u == s)

    @classmethod
    def desde_subgrafo(cls, arg: Arg, nodos_arg: Sequence[int]) -> 'Pattern':
        """
        Plantilla completa copiando atributos de un subgrafo de un ARG

        El nodo i del patrón corresponde a ``nodos_arg[i]``; los parámetros
        quedan en W^0.
        """
        nodos = list(range(len(nodos_arg)))
        aristas = {(s, t) for s in nodos for t in nodos if s != t}
        return cls(
            schema=arg.schema,
            nodes=tuple(nodos),
            edges=frozenset(aristas),
            unary_attrs={s: tuple(arg.atributos_nodo(nodos_arg[s])) for s in nodos},
            pairwise_attrs={(s, t): tuple(arg.atributos_par(nodos_arg[s], nodos_arg[t]))
                            for (s, t) in aristas},
            params=MatchParams.inicial(arg.schema),
            next_id=len(nodos),
        )

    def _reemplazar(self, **cambios) -> 'Pattern':
        datos = dict(schema=self.schema, nodes=self.nodes, edges=self.edges,
                     unary_attrs=self.unary_attrs, pairwise_attrs=self.pairwise_attrs,
                     params=self.params, next_id=self.next_id)
        datos.update(cambios)
        return Pattern(**datos)

    def sin_nodo(self, s: int) -> 'Pattern':
        """Elimina s y todas sus aristas incidentes (ambas direcciones); el id queda retirado"""
        aristas = {e for e in self.edges if s not in e}
        return self._reemplazar(
            nodes=tuple(v for v in self.nodes if v != s),
            edges=frozenset(aristas),
            unary_attrs={v: a for v, a in self.unary_attrs.items() if v != s},
            pairwise_attrs={e: a for e, a in self.pairwise_attrs.items() if e in aristas},
        )

    def con_nodo(self,
                 unarios: Sequence[np.ndarray],
                 salientes: Mapping[int, Sequence[np.ndarray]]) -> Tuple['Pattern', int]:
        """Agrega un nodo nuevo con id = next_id y sus aristas salientes"""
        y = self.next_id
        pares = dict(self.pairwise_attrs)
        for t, atributos in salientes.items():
            pares[(y, t)] = tuple(atributos)
        nuevo = self._reemplazar(
            nodes=self.nodes + (y,),
            edges=self.edges | {(y, t) for t in salientes},
            unary_attrs={**self.unary_attrs, y: tuple(unarios)},
            pairwise_attrs=pares,
            next_id=y + 1,
        )
        return nuevo, y

    def con_aristas_salientes(self,
                              aristas_por_nodo: Mapping[int, Mapping[int, Sequence[np.ndarray]]]
                              ) -> 'Pattern':
        """Reemplaza E_s de cada nodo s indicado por las aristas dadas (t -> atributos)"""
        pares = {e: a for e, a in self.pairwise_attrs.items() if e[0] not in aristas_por_nodo}
        for s, salientes in aristas_por_nodo.items():
            for t, atributos in salientes.items():
                pares[(s, t)] = tuple(atributos)
        return self._reemplazar(edges=frozenset(pares.keys()), pairwise_attrs=pares)

    def con_atributos(self,
                      unary_attrs: Mapping[int, Sequence[np.ndarray]],
                      pairwise_attrs: Mapping[Tuple[int, int], Sequence[np.ndarray]]) -> 'Pattern':
        return self._reemplazar(unary_attrs=dict(unary_attrs), pairwise_attrs=dict(pairwise_attrs))

    def con_parametros(self, params: MatchParams) -> 'Pattern':
        return self._reemplazar(params=params)

    def __eq__(self, otro) -> bool:
        if not isinstance(otro, Pattern):
            return NotImplemented
        if (self.schema != otro.schema or self.nodes != otro.nodes or self.edges != otro.edges
                or self.params != otro.params or self.next_id != otro.next_id):
            return False
        for s in self.nodes:
            if not all(np.array_equal(a, b)
                       for a, b in zip(self.unary_attrs[s], otro.unary_attrs[s])):
                return False
        for e in self.edges:
            if not all(np.array_equal(a, b)
                       for a, b in zip(self.pairwise_attrs[e], otro.pairwise_attrs[e])):
                return False
        return True


@dataclass(frozen=True)
class Assignment:
    """Correspondencias de un patrón en un ARG: id de nodo -> índice de nodo o NONE"""
    arg_id: str
    mapa: Dict[int, Optional[int]] = field(default_factory=dict)

    def __post_init__(self):
        mapa = {int(s): (None if x is None else int(x)) for s, x in self.mapa.items()}
        object.__setattr__(self, "mapa", mapa)
        if not self.es_inyectiva():
            raise ErrorValidacion(f"Asignación no inyectiva en '{self.arg_id}'")

    def es_inyectiva(self) -> bool:
        """Verificación O(|V|) de que no hay dos nodos con el mismo nodo real"""
        reales = [x for x in self.mapa.values() if x is not None]
        return len(reales) == len(set(reales))

    def objetivo(self, s: int) -> Optional[int]:
        return self.mapa[s]

    def emparejado(self, s: int) -> bool:
        return self.mapa.get(s) is not None

    @property
    def n_emparejados(self) -> int:
        return sum(1 for x in self.mapa.values() if x is not None)

    def nodos_usados(self) -> set:
        return {x for x in self.mapa.values() if x is not None}

    def con(self, s: int, x: Optional[int]) -> 'Assignment':
        return Assignment(self.arg_id, {**self.mapa, s: x})

    def sin(self, s: int) -> 'Assignment':
        return Assignment(self.arg_id, {v: x for v, x in self.mapa.items() if v != s})

    def restringida(self, nodos: Iterable[int]) -> 'Assignment':
        return Assignment(self.arg_id, {s: self.mapa[s] for s in nodos})


def verificar_esquema(pattern: Pattern, arg: Arg):
    """Lanza ErrorEsquema si patrón y ARG no comparten esquema"""
    if pattern.schema != arg.schema:
        raise ErrorEsquema(
            f"Esquema del patrón {pattern.schema} distinto al del ARG '{arg.id}' {arg.schema}"
        )
