"""
Módulo de lectura y escritura de archivos
ARGs, patrones, configuraciones, especificaciones sintéticas, verdad de
referencia y reportes en JSON (registros pydantic); tablas en CSV
"""
import hashlib
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Type, TypeVar, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.config import TOKEN_INF, TOKEN_NONE, TOKEN_OCLUIDO
from src.modelo.arg_model import (
    NONE, Arg, Assignment, AttributeSchema, ErrorEsquema, ErrorFormato,
    ErrorValidacion, ErrorValorNumerico, MatchParams, Pattern,
)
from src.modelo.parametros import MiningConfig, SyntheticSpec

logger = logging.getLogger(__name__)

Modelo = TypeVar("Modelo", bound=BaseModel)

Vectores = List[List[float]]


# =============================================================================
# REGISTROS
# =============================================================================

class _Registro(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class EsquemaRegistro(_Registro):
    unary_dims: List[int]
    pairwise_dims: List[int]


class NodoRegistro(_Registro):
    unary: Vectores


class ParRegistro(_Registro):
    s: int
    t: int
    attrs: Vectores


class ArgRegistro(_Registro):
    id: str
    esquema: EsquemaRegistro = Field(alias="schema")
    nodes: List[NodoRegistro]
    pairwise: List[ParRegistro]


class AtributoNodoRegistro(_Registro):
    node: int
    attrs: Vectores


class ParametrosRegistro(_Registro):
    w_unary: List[float]
    w_pairwise: List[float]
    p_none: Union[float, str]
    q_none: Union[float, str]
    trained: bool = False


class PatronRegistro(_Registro):
    esquema: EsquemaRegistro = Field(alias="schema")
    nodes: List[int]
    next_id: int
    edges: List[Tuple[int, int]]
    unary_attrs: List[AtributoNodoRegistro]
    pairwise_attrs: List[ParRegistro]
    params: ParametrosRegistro


class CorrespondenciaRegistro(_Registro):
    node: int
    target: Union[int, str]


class AsignacionRegistro(_Registro):
    arg_id: str
    map: List[CorrespondenciaRegistro]


class VerdadRegistro(_Registro):
    plant: PatronRegistro
    correspondences: List[AsignacionRegistro]


class ConfigRegistro(_Registro):
    """Archivo de configuración: objeto plano con campos de MiningConfig"""
    tau: Optional[Union[float, str]] = None
    d: Optional[Union[int, float, str]] = None
    c_svm: Optional[float] = None
    lambda_: Optional[float] = Field(default=None, alias="lambda")
    alpha: Optional[float] = None
    zeta: Optional[float] = None
    max_iters: Optional[int] = None
    energy_tol: Optional[float] = None
    min_match_fraction: Optional[float] = None
    top_fraction: Optional[float] = None
    rng_seed: Optional[int] = None
    solver: Optional[str] = None
    restarts: Optional[int] = None
    exact_limit: Optional[int] = None
    jobs: Optional[int] = None


class SpecRegistro(_Registro):
    """Archivo de especificación sintética (espejo de SyntheticSpec)"""
    esquema: Optional[EsquemaRegistro] = Field(default=None, alias="schema")
    pattern_size: Optional[int] = None
    n_background: Optional[int] = None
    n_positive: Optional[int] = None
    n_negative: Optional[int] = None
    noise_sigma: Optional[float] = None
    occlusion_prob: Optional[float] = None
    attr_range: Optional[Tuple[float, float]] = None
    rng_seed: Optional[int] = None
    init_plant_nodes: Optional[int] = None
    init_background_nodes: Optional[int] = None


class ManifestRegistro(BaseModel):
    """Manifiesto de cmd_generate"""
    spec_hash: str
    spec: SpecRegistro
    positives: List[str]
    negatives: List[str]
    truth: str
    init: Optional[str] = None
    init_background_ids: List[int] = []


class ReporteRegistro(BaseModel):
    """Reporte de cmd_mine"""
    config: Dict[str, Any]
    config_hash: str
    converged: bool
    iterations: int
    history: List[Dict[str, Any]]
    final_params: ParametrosRegistro
    svm_bias: Optional[float]
    active_args: List[str]
    assignments: List[AsignacionRegistro]


# =============================================================================
# CONVERSIONES
# =============================================================================

def _validar(modelo: Type[Modelo], texto: str, origen: str) -> Modelo:
    try:
        return modelo.model_validate_json(texto)
    except ValidationError as e:
        if any(err["type"] == "json_invalid" for err in e.errors()):
            raise ErrorFormato(f"{origen}: JSON mal formado") from e
        detalle = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()[:5]
        )
        raise ErrorEsquema(f"{origen}: estructura inválida ({detalle})") from e


def leer_real(valor: Union[float, str], contexto: str) -> float:
    """Convierte un número de archivo o el token "inf" a float"""
    if isinstance(valor, str):
        if valor == TOKEN_INF:
            return math.inf
        raise ErrorValorNumerico(f"{contexto}: token desconocido '{valor}'")
    valor = float(valor)
    if math.isnan(valor):
        raise ErrorValorNumerico(f"{contexto}: NaN no permitido")
    return valor


def escribir_real(valor: float) -> Union[float, str]:
    return TOKEN_INF if math.isinf(valor) and valor > 0 else float(valor)


def valor_serializable(valor):
    """Reales no finitos como token de texto ("inf", "-inf")"""
    if isinstance(valor, float) and not math.isfinite(valor):
        if math.isnan(valor):
            raise ErrorValorNumerico("NaN no serializable")
        return TOKEN_INF if valor > 0 else "-" + TOKEN_INF
    return valor


def _vectores(atributos: Sequence[np.ndarray]) -> Vectores:
    return [np.asarray(v, dtype=np.float64).tolist() for v in atributos]


def _esquema_desde(registro: EsquemaRegistro) -> AttributeSchema:
    return AttributeSchema(tuple(registro.unary_dims), tuple(registro.pairwise_dims))


def _esquema_a_registro(schema: AttributeSchema) -> EsquemaRegistro:
    return EsquemaRegistro(unary_dims=list(schema.unary_dims),
                           pairwise_dims=list(schema.pairwise_dims))


def arg_desde_registro(registro: ArgRegistro) -> Arg:
    schema = _esquema_desde(registro.esquema)
    pares = {}
    for par in registro.pairwise:
        if (par.s, par.t) in pares:
            raise ErrorEsquema(f"ARG '{registro.id}': par ({par.s},{par.t}) repetido")
        pares[(par.s, par.t)] = par.attrs
    return Arg.desde_registros(registro.id, schema, [n.unary for n in registro.nodes], pares)


def arg_a_registro(arg: Arg) -> ArgRegistro:
    n = arg.n_nodos
    return ArgRegistro(
        id=arg.id,
        esquema=_esquema_a_registro(arg.schema),
        nodes=[NodoRegistro(unary=_vectores(arg.atributos_nodo(x))) for x in range(n)],
        pairwise=[ParRegistro(s=s, t=t, attrs=_vectores(arg.atributos_par(s, t)))
                  for s in range(n) for t in range(n) if s != t],
    )


def params_desde_registro(registro: ParametrosRegistro) -> MatchParams:
    return MatchParams(
        w_unary=np.asarray(registro.w_unary, dtype=np.float64),
        w_pairwise=np.asarray(registro.w_pairwise, dtype=np.float64),
        p_none=leer_real(registro.p_none, "p_none"),
        q_none=leer_real(registro.q_none, "q_none"),
        trained=registro.trained,
    )


def params_a_registro(params: MatchParams) -> ParametrosRegistro:
    return ParametrosRegistro(
        w_unary=params.w_unary.tolist(),
        w_pairwise=params.w_pairwise.tolist(),
        p_none=escribir_real(params.p_none),
        q_none=escribir_real(params.q_none),
        trained=params.trained,
    )


def patron_desde_registro(registro: PatronRegistro) -> Pattern:
    unarios = {}
    for a in registro.unary_attrs:
        if a.node in unarios:
            raise ErrorEsquema(f"Atributos del nodo {a.node} repetidos")
        unarios[a.node] = a.attrs
    pares = {}
    for p in registro.pairwise_attrs:
        if (p.s, p.t) in pares:
            raise ErrorEsquema(f"Atributos de la arista ({p.s},{p.t}) repetidos")
        pares[(p.s, p.t)] = p.attrs
    return Pattern(
        schema=_esquema_desde(registro.esquema),
        nodes=tuple(registro.nodes),
        edges=frozenset(tuple(e) for e in registro.edges),
        unary_attrs=unarios,
        pairwise_attrs=pares,
        params=params_desde_registro(registro.params),
        next_id=registro.next_id,
    )


def patron_a_registro(pattern: Pattern) -> PatronRegistro:
    aristas = sorted(pattern.edges)
    return PatronRegistro(
        esquema=_esquema_a_registro(pattern.schema),
        nodes=list(pattern.nodes),
        next_id=pattern.next_id,
        edges=aristas,
        unary_attrs=[AtributoNodoRegistro(node=s, attrs=_vectores(pattern.unary_attrs[s]))
                     for s in pattern.nodes],
        pairwise_attrs=[ParRegistro(s=s, t=t, attrs=_vectores(pattern.pairwise_attrs[(s, t)]))
                        for (s, t) in aristas],
        params=params_a_registro(pattern.params),
    )


def asignacion_a_registro(asignacion: Assignment, token_nulo: str = TOKEN_NONE) -> AsignacionRegistro:
    return AsignacionRegistro(
        arg_id=asignacion.arg_id,
        map=[CorrespondenciaRegistro(node=s, target=token_nulo if x is NONE else x)
             for s, x in sorted(asignacion.mapa.items())],
    )


def asignacion_desde_registro(registro: AsignacionRegistro, token_nulo: str = TOKEN_NONE) -> Assignment:
    mapa = {}
    for c in registro.map:
        if isinstance(c.target, str):
            if c.target != token_nulo:
                raise ErrorEsquema(f"'{registro.arg_id}': destino desconocido '{c.target}'")
            mapa[c.node] = NONE
        else:
            mapa[c.node] = c.target
    return Assignment(registro.arg_id, mapa)


def _escribir(ruta: Union[str, Path], registro: BaseModel):
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    ruta.write_text(registro.model_dump_json(indent=2, by_alias=True) + "\n", encoding="utf-8")


def _leer(ruta: Union[str, Path]) -> str:
    return Path(ruta).read_text(encoding="utf-8")


# =============================================================================
# ARG Y PATRÓN
# =============================================================================

def load_arg(path: Union[str, Path]) -> Arg:
    """
    Carga un ARG desde JSON

    Raises:
        ErrorFormato: JSON mal formado
        ErrorEsquema: dimensiones incorrectas o pares faltantes
        ErrorValorNumerico: valores no finitos
        OSError: archivo inexistente o ilegible
    """
    return arg_desde_registro(_validar(ArgRegistro, _leer(path), str(path)))


def save_arg(arg: Arg, path: Union[str, Path]):
    _escribir(path, arg_a_registro(arg))


def load_pattern(path: Union[str, Path]) -> Pattern:
    return patron_desde_registro(_validar(PatronRegistro, _leer(path), str(path)))


def save_pattern(pattern: Pattern, path: Union[str, Path]):
    _escribir(path, patron_a_registro(pattern))


# =============================================================================
# CONFIGURACIÓN Y ESPECIFICACIÓN
# =============================================================================

def config_desde_texto(texto: str, base: Optional[MiningConfig] = None,
                       origen: str = "config") -> MiningConfig:
    """
    Construye un MiningConfig desde JSON plano sobre ``base``

    Raises:
        ErrorEsquema: clave desconocida o tipo incorrecto
        ErrorValidacion: valores fuera de rango
    """
    registro = _validar(ConfigRegistro, texto, origen)
    ajustes = registro.model_dump(exclude_none=True)
    for clave in ("tau", "d"):
        if clave in ajustes:
            ajustes[clave] = leer_real(ajustes[clave], clave)
    if "d" in ajustes and math.isfinite(ajustes["d"]) and ajustes["d"] == int(ajustes["d"]):
        ajustes["d"] = int(ajustes["d"])

    config = MiningConfig() if base is None else base.generar_escenario({})
    config.actualizar_desde_dict(ajustes, estricto=True)
    validar_config(config)
    return config


def validar_config(config: MiningConfig):
    errores = config.validar_parametros()
    if errores:
        raise ErrorValidacion("Configuración inválida: " + "; ".join(errores))


def load_config(path: Union[str, Path], base: Optional[MiningConfig] = None) -> MiningConfig:
    return config_desde_texto(_leer(path), base, str(path))


def config_serializable(config: MiningConfig) -> Dict[str, Any]:
    """Diccionario de configuración con "inf" para valores infinitos"""
    return {k: (escribir_real(v) if isinstance(v, float) else v)
            for k, v in config.to_dict().items()}


def save_config(config: MiningConfig, path: Union[str, Path]):
    _escribir(path, ConfigRegistro.model_validate(config_serializable(config)))


def hash_config(config: MiningConfig) -> str:
    texto = ConfigRegistro.model_validate(config_serializable(config)).model_dump_json(by_alias=True)
    return hashlib.sha256(texto.encode("utf-8")).hexdigest()


def load_spec(path: Union[str, Path]) -> SyntheticSpec:
    """
    Carga una especificación sintética; los campos ausentes toman el valor por defecto

    Raises:
        ErrorValidacion: especificación inconsistente (p. ej. occlusion_prob = 1)
    """
    registro = _validar(SpecRegistro, _leer(path), str(path))
    datos = registro.model_dump(exclude_none=True)
    datos.pop("esquema", None)
    spec = SyntheticSpec(**datos)
    if registro.esquema is not None:
        spec.schema = _esquema_desde(registro.esquema)
    spec.attr_range = tuple(spec.attr_range)
    errores = spec.validar_parametros()
    if errores:
        raise ErrorValidacion("Especificación inválida: " + "; ".join(errores))
    return spec


def save_spec(spec: SyntheticSpec, path: Union[str, Path]):
    _escribir(path, SpecRegistro.model_validate(spec.to_dict()))


def hash_spec(spec: SyntheticSpec) -> str:
    texto = SpecRegistro.model_validate(spec.to_dict()).model_dump_json(by_alias=True)
    return hashlib.sha256(texto.encode("utf-8")).hexdigest()


# =============================================================================
# VERDAD DE REFERENCIA, ASIGNACIONES Y REPORTES
# =============================================================================

def save_truth(plant: Pattern, correspondencias: Sequence[Assignment], path: Union[str, Path]):
    """Escribe el prototipo plantado y sus correspondencias (OCCLUDED = "occluded")"""
    _escribir(path, VerdadRegistro(
        plant=patron_a_registro(plant),
        correspondences=[asignacion_a_registro(a, TOKEN_OCLUIDO) for a in correspondencias],
    ))


def load_truth(path: Union[str, Path]) -> Tuple[Pattern, List[Assignment]]:
    registro = _validar(VerdadRegistro, _leer(path), str(path))
    return (patron_desde_registro(registro.plant),
            [asignacion_desde_registro(a, TOKEN_OCLUIDO) for a in registro.correspondences])


def save_report(reporte: ReporteRegistro, path: Union[str, Path]):
    _escribir(path, reporte)


def save_manifest(manifest: ManifestRegistro, path: Union[str, Path]):
    _escribir(path, manifest)


def load_manifest(path: Union[str, Path]) -> ManifestRegistro:
    return _validar(ManifestRegistro, _leer(path), str(path))


def load_report(path: Union[str, Path]) -> ReporteRegistro:
    return _validar(ReporteRegistro, _leer(path), str(path))


# =============================================================================
# DIRECTORIOS Y TABLAS
# =============================================================================

class ArgLoader:
    """Cargador de los ARGs de un directorio (un archivo .json por grafo)"""

    def __init__(self, data_dir: Union[str, Path]):
        self.data_dir = Path(data_dir)
        self.args_cargados: Dict[str, Arg] = {}

    def archivos(self) -> List[Path]:
        if not self.data_dir.is_dir():
            raise FileNotFoundError(f"Directorio no encontrado: {self.data_dir}")
        return sorted(self.data_dir.glob("*.json"))

    def cargar_todos(self) -> List[Arg]:
        """
        Carga todos los ARGs en orden de nombre de archivo

        Raises:
            ErrorEsquema: ids repetidos o esquemas distintos entre archivos
        """
        args = []
        for ruta in self.archivos():
            arg = load_arg(ruta)
            if arg.id in self.args_cargados:
                raise ErrorEsquema(f"Id de ARG repetido '{arg.id}' en {ruta}")
            if args and arg.schema != args[0].schema:
                raise ErrorEsquema(f"{ruta}: esquema distinto al del resto del directorio")
            self.args_cargados[arg.id] = arg
            args.append(arg)
        logger.info("directorio=%s args=%d", self.data_dir, len(args))
        return args


def guardar_args(args: Sequence[Arg], directorio: Union[str, Path]) -> List[Path]:
    directorio = Path(directorio)
    directorio.mkdir(parents=True, exist_ok=True)
    rutas = []
    for arg in args:
        ruta = directorio / f"{arg.id}.json"
        save_arg(arg, ruta)
        rutas.append(ruta)
    return rutas


def exportar_resultados(df: pd.DataFrame, ruta: Union[str, Path]) -> Path:
    """Exporta una tabla de resultados a CSV"""
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(ruta, index=False)
    logger.info("Resultados exportados a: %s", ruta)
    return ruta
