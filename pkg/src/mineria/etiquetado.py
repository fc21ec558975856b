"""
Solucionador genérico de problemas de etiquetado discreto (MRF por pares)

Minimiza  Σ_i U_i(x_i) + Σ_{i<j} M_ij(x_i, x_j) + constante

Los costos pueden ser +inf. Internamente cada costo se separa en
(número de términos infinitos, parte finita) y las soluciones se comparan
lexicográficamente, de modo que +inf excluye etiquetas de forma exacta y,
cuando ningún etiquetado evita +inf, se minimiza la cantidad de términos
prohibidos.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import LIMITE_ENUMERACION
from src.modelo.arg_model import InstanciaDemasiadoGrande


# Marca de etiqueta ocupada en el descenso coordenado
_BLOQUEADA = np.int64(2**62)

MAX_BARRIDOS = 1000


def _dividir(costo: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    costo = np.asarray(costo, dtype=np.float64)
    infinitos = np.isinf(costo)
    return infinitos.astype(np.int64), np.where(infinitos, 0.0, costo)


@dataclass
class ResultadoEtiquetado:
    """Mejor etiquetado encontrado"""
    etiquetas: List[int]
    clave: Tuple[int, float]
    exacto: bool
    iteraciones: int

    @property
    def energia(self) -> float:
        return float("inf") if self.clave[0] > 0 else float(self.clave[1])


class ProblemaEtiquetado:
    """
    Problema de etiquetado con costos unarios y por pares

    Args:
        tamanos: número de etiquetas de cada variable
        exclusivo: si True, dos variables no pueden compartir etiqueta
            (todas comparten el mismo conjunto de etiquetas)
        etiqueta_nula: etiqueta exenta de la exclusividad (NONE)
    """

    def __init__(self,
                 tamanos: Sequence[int],
                 exclusivo: bool = False,
                 etiqueta_nula: Optional[int] = None):
        self.tamanos = [int(L) for L in tamanos]
        if any(L < 1 for L in self.tamanos):
            raise ValueError("Cada variable necesita al menos una etiqueta")
        if exclusivo and len(set(self.tamanos)) > 1:
            raise ValueError("Un problema exclusivo requiere el mismo conjunto de etiquetas")
        self.exclusivo = exclusivo
        self.etiqueta_nula = etiqueta_nula

        self.u_inf = [np.zeros(L, dtype=np.int64) for L in self.tamanos]
        self.u_fin = [np.zeros(L) for L in self.tamanos]
        self.p_inf: Dict[Tuple[int, int], np.ndarray] = {}
        self.p_fin: Dict[Tuple[int, int], np.ndarray] = {}
        self.constante_inf = 0
        self.constante_fin = 0.0

    @property
    def n_variables(self) -> int:
        return len(self.tamanos)

    def tamano_espacio(self) -> int:
        total = 1
        for L in self.tamanos:
            total *= L
        return total

    def agregar_unario(self, i: int, costo: np.ndarray):
        c_inf, c_fin = _dividir(costo)
        self.u_inf[i] = self.u_inf[i] + c_inf
        self.u_fin[i] = self.u_fin[i] + c_fin

    def agregar_par(self, i: int, j: int, costo: np.ndarray):
        """Suma un costo (L_i, L_j) al par de variables (i, j)"""
        if i == j:
            raise ValueError("Un término por pares requiere variables distintas")
        costo = np.asarray(costo, dtype=np.float64)
        if i > j:
            i, j, costo = j, i, costo.T
        c_inf, c_fin = _dividir(costo)
        if (i, j) in self.p_inf:
            self.p_inf[(i, j)] = self.p_inf[(i, j)] + c_inf
            self.p_fin[(i, j)] = self.p_fin[(i, j)] + c_fin
        else:
            self.p_inf[(i, j)] = c_inf
            self.p_fin[(i, j)] = c_fin

    def agregar_constante(self, costo: float):
        if np.isinf(costo):
            self.constante_inf += 1
        else:
            self.constante_fin += float(costo)

    def clave(self, etiquetas: Sequence[int]) -> Tuple[int, float]:
        """(términos infinitos, suma finita) de un etiquetado completo"""
        n_inf = self.constante_inf
        fin = self.constante_fin
        for i, l in enumerate(etiquetas):
            n_inf += int(self.u_inf[i][l])
            fin += float(self.u_fin[i][l])
        for (i, j), c_inf in self.p_inf.items():
            n_inf += int(c_inf[etiquetas[i], etiquetas[j]])
            fin += float(self.p_fin[(i, j)][etiquetas[i], etiquetas[j]])
        return n_inf, fin

    def energia(self, etiquetas: Sequence[int]) -> float:
        n_inf, fin = self.clave(etiquetas)
        return float("inf") if n_inf > 0 else fin

    def es_factible(self, etiquetas: Sequence[int]) -> bool:
        if not self.exclusivo:
            return True
        reales = [l for l in etiquetas if l != self.etiqueta_nula]
        return len(reales) == len(set(reales))

    def _vecinos(self) -> List[List[Tuple[int, np.ndarray, np.ndarray]]]:
        """Por variable i: (j, costo_inf (L_i, L_j), costo_fin (L_i, L_j))"""
        vecinos = [[] for _ in range(self.n_variables)]
        for (i, j), c_inf in self.p_inf.items():
            c_fin = self.p_fin[(i, j)]
            vecinos[i].append((j, c_inf, c_fin))
            vecinos[j].append((i, c_inf.T, c_fin.T))
        return vecinos


def resolver_exacto(problema: ProblemaEtiquetado,
                    limite: int = LIMITE_ENUMERACION) -> ResultadoEtiquetado:
    """
    Ramificación y acotamiento en orden lexicográfico de etiquetas

    Las variables se asignan en orden 0..m-1 y las etiquetas en orden
    creciente; ante empate se conserva el primer etiquetado encontrado.
    La cota usa el mínimo unario de las variables restantes (los costos
    por pares son no negativos).

    Raises:
        InstanciaDemasiadoGrande: el espacio de etiquetados excede ``limite``
    """
    espacio = problema.tamano_espacio()
    if espacio > limite:
        raise InstanciaDemasiadoGrande(
            f"Espacio de {espacio} etiquetados excede el límite {limite}"
        )

    m = problema.n_variables
    previos = [[] for _ in range(m)]
    for (i, j), c_inf in problema.p_inf.items():
        # j > i: al asignar j ya se conoce i
        previos[j].append((i, c_inf, problema.p_fin[(i, j)]))

    cota_inf = np.zeros(m + 1, dtype=np.int64)
    cota_fin = np.zeros(m + 1)
    for i in range(m - 1, -1, -1):
        cota_inf[i] = cota_inf[i + 1] + problema.u_inf[i].min()
        cota_fin[i] = cota_fin[i + 1] + problema.u_fin[i].min()

    etiquetas = [-1] * m
    usados = set()
    mejor = {"clave": (np.iinfo(np.int64).max, float("inf")), "etiquetas": None}
    visitados = [0]

    def visitar(i: int, acc_inf: int, acc_fin: float):
        visitados[0] += 1
        if i == m:
            clave = (acc_inf, acc_fin)
            if clave < mejor["clave"]:
                mejor["clave"] = clave
                mejor["etiquetas"] = list(etiquetas)
            return

        inc_inf = problema.u_inf[i].copy()
        inc_fin = problema.u_fin[i].copy()
        for j, c_inf, c_fin in previos[i]:
            inc_inf += c_inf[etiquetas[j], :]
            inc_fin += c_fin[etiquetas[j], :]

        for l in range(problema.tamanos[i]):
            restringida = problema.exclusivo and l != problema.etiqueta_nula
            if restringida and l in usados:
                continue
            n_inf = acc_inf + int(inc_inf[l])
            fin = acc_fin + float(inc_fin[l])
            cota = (n_inf + int(cota_inf[i + 1]), fin + float(cota_fin[i + 1]))
            if cota >= mejor["clave"]:
                continue
            etiquetas[i] = l
            if restringida:
                usados.add(l)
            visitar(i + 1, n_inf, fin)
            if restringida:
                usados.discard(l)
        etiquetas[i] = -1

    visitar(0, problema.constante_inf, problema.constante_fin)

    if mejor["etiquetas"] is None:
        raise ValueError("El problema no admite ningún etiquetado factible")

    return ResultadoEtiquetado(
        etiquetas=mejor["etiquetas"],
        clave=mejor["clave"],
        exacto=True,
        iteraciones=visitados[0],
    )


def _etiquetado_inicial(problema: ProblemaEtiquetado, rng: np.random.RandomState) -> List[int]:
    m = problema.n_variables
    if not problema.exclusivo:
        return [int(rng.randint(L)) for L in problema.tamanos]

    reales = [l for l in range(problema.tamanos[0]) if l != problema.etiqueta_nula]
    permutadas = [int(l) for l in rng.permutation(reales)]
    if m > len(permutadas):
        if problema.etiqueta_nula is None:
            raise ValueError("Más variables que etiquetas en un problema exclusivo sin NONE")
        permutadas += [problema.etiqueta_nula] * (m - len(permutadas))
    return permutadas[:m]


def _descenso_coordenado(problema: ProblemaEtiquetado,
                         etiquetas: List[int],
                         vecinos) -> Tuple[List[int], int]:
    """
    Cada variable toma, en turno, la etiqueta de menor costo condicional
    dado el resto; se repite hasta que un barrido completo no cambia nada
    """
    barridos = 0
    cambio = True
    while cambio and barridos < MAX_BARRIDOS:
        cambio = False
        barridos += 1
        for i in range(problema.n_variables):
            c_inf = problema.u_inf[i].copy()
            c_fin = problema.u_fin[i].copy()
            for j, v_inf, v_fin in vecinos[i]:
                c_inf += v_inf[:, etiquetas[j]]
                c_fin += v_fin[:, etiquetas[j]]

            if problema.exclusivo:
                ocupadas = [etiquetas[j] for j in range(problema.n_variables)
                            if j != i and etiquetas[j] != problema.etiqueta_nula]
                c_inf[ocupadas] = _BLOQUEADA

            # lexsort es estable: ante empate gana el índice menor
            mejor = int(np.lexsort((c_fin, c_inf))[0])
            actual = etiquetas[i]
            if (c_inf[mejor], c_fin[mejor]) < (c_inf[actual], c_fin[actual]):
                etiquetas[i] = mejor
                cambio = True
    return etiquetas, barridos


def resolver_aproximado(problema: ProblemaEtiquetado,
                        reinicios: int,
                        semilla: int) -> ResultadoEtiquetado:
    """
    Descenso coordenado (ICM) con reinicios aleatorios

    Cada reinicio termina con energía <= la de su etiquetado inicial; se
    devuelve el mejor reinicio (el primero ante empate). Determinista dada
    la semilla.
    """
    if reinicios < 1:
        raise ValueError("restarts debe ser >= 1")

    rng = np.random.RandomState(semilla)
    vecinos = problema._vecinos()
    mejor: Optional[ResultadoEtiquetado] = None
    total_barridos = 0

    for _ in range(reinicios):
        etiquetas = _etiquetado_inicial(problema, rng)
        etiquetas, barridos = _descenso_coordenado(problema, etiquetas, vecinos)
        total_barridos += barridos
        clave = problema.clave(etiquetas)
        if mejor is None or clave < mejor.clave:
            mejor = ResultadoEtiquetado(etiquetas=list(etiquetas), clave=clave,
                                        exacto=False, iteraciones=0)

    mejor.iteraciones = total_barridos
    return mejor
