"""
Interfaz de línea de comandos: mvap

Subcomandos:
  generate  genera un conjunto sintético con patrón plantado
  mine      mina un mVAP desde una plantilla inicial
  match     empareja un patrón con un ARG y muestra la energía por nodo
  eval      métricas de un patrón sobre conjuntos de prueba
  sweep     barrido de (tau, d) con mine + eval por punto

Códigos de salida: 0 éxito, 2 máximo de iteraciones sin converger,
3 entrada o configuración inválida, 4 error de E/S.
"""
import argparse
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd
from tabulate import tabulate

from src.config import SALIDA_IO, SALIDA_MAX_ITER, SALIDA_OK, SALIDA_VALIDACION, TOKEN_INF
from src.mineria.matcher import match
from src.mineria.miner import ErrorMineria, historial_como_tabla, mine
from src.modelo.arg_model import NONE, verificar_esquema
from src.modelo.energy import desglose_por_nodo
from src.modelo.parametros import MiningConfig
from src.simulacion.analisis_resultados import (
    analizar_barrido, analizar_historial, generar_reporte,
)
from src.simulacion.barrido import BarridoParametros
from src.simulacion.escenarios import get_escenario
from src.simulacion.evaluacion import COLUMNAS_METRICAS, detection_score, evaluate_pattern
from src.simulacion.synth import GroundTruth, build_init_pattern, generate, score_recovery
from src.utils.io import (
    ArgLoader, ManifestRegistro, ReporteRegistro, SpecRegistro, asignacion_a_registro,
    config_serializable, exportar_resultados, guardar_args, hash_config, hash_spec,
    load_arg, load_config, load_pattern, load_spec, load_truth, params_a_registro,
    save_manifest, save_pattern, save_report, save_spec, save_truth, validar_config,
    valor_serializable,
)

logger = logging.getLogger("mvap")


class _Parser(argparse.ArgumentParser):
    """Errores de uso con código de salida de validación"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(SALIDA_VALIDACION, f"{self.prog}: error: {message}\n")


# =============================================================================
# TIPOS DE ARGUMENTO
# =============================================================================

def _real(texto: str) -> float:
    if texto.strip().lower() == TOKEN_INF:
        return math.inf
    try:
        return float(texto)
    except ValueError:
        raise argparse.ArgumentTypeError(f"real inválido: '{texto}'")


def _grado(texto: str):
    if texto.strip().lower() == TOKEN_INF:
        return math.inf
    try:
        return int(texto)
    except ValueError:
        raise argparse.ArgumentTypeError(f"d debe ser entero o 'inf': '{texto}'")


def _lista(tipo):
    def convertir(texto: str) -> List:
        return [tipo(v) for v in texto.split(",") if v.strip()]
    return convertir


# =============================================================================
# AUXILIARES
# =============================================================================

def _configuracion(args) -> MiningConfig:
    """Escenario base -> archivo --config -> banderas explícitas"""
    config = get_escenario(args.escenario) if getattr(args, "escenario", None) else MiningConfig()
    if getattr(args, "config", None):
        config = load_config(args.config, config)

    ajustes = {}
    for bandera, campo in (("tau", "tau"), ("d", "d"), ("seed", "rng_seed"), ("jobs", "jobs")):
        valor = getattr(args, bandera, None)
        if valor is not None:
            ajustes[campo] = valor
    config = config.generar_escenario(ajustes)
    validar_config(config)
    return config


def _cargar_args(directorio: Optional[str]):
    return ArgLoader(directorio).cargar_todos() if directorio else []


def _cargar_verdad(ruta: str) -> GroundTruth:
    plant, correspondencias = load_truth(ruta)
    return GroundTruth(plant, tuple(correspondencias))


def _reporte_mineria(config: MiningConfig, state) -> ReporteRegistro:
    historia = [{k: valor_serializable(v) for k, v in r.como_dict(con_tiempo=False).items()}
                for r in state.history]
    return ReporteRegistro(
        config=config_serializable(config),
        config_hash=hash_config(config),
        converged=state.convergio,
        iterations=state.iteration,
        history=historia,
        final_params=params_a_registro(state.pattern.params),
        svm_bias=state.sesgo,
        active_args=state.activos,
        assignments=[asignacion_a_registro(a) for a in state.assignments],
    )


# =============================================================================
# SUBCOMANDOS
# =============================================================================

def cmd_generate(args) -> int:
    spec = load_spec(args.spec)
    if args.seed is not None:
        spec.rng_seed = args.seed
    pos, neg, truth = generate(spec)

    salida = Path(args.out)
    rutas_pos = guardar_args(pos, salida / "pos")
    rutas_neg = guardar_args(neg, salida / "neg")
    save_truth(truth.plant, truth.correspondences, salida / "truth.json")
    save_spec(spec, salida / "spec.json")

    init, fondo = None, []
    if spec.init_plant_nodes + spec.init_background_nodes > 0:
        patron, fondo = build_init_pattern(pos[0], truth, spec.init_plant_nodes,
                                           spec.init_background_nodes, spec.rng_seed)
        save_pattern(patron, salida / "init.json")
        init = "init.json"

    save_manifest(ManifestRegistro(
        spec_hash=hash_spec(spec),
        spec=SpecRegistro.model_validate(spec.to_dict()),
        positives=[str(r.relative_to(salida)) for r in rutas_pos],
        negatives=[str(r.relative_to(salida)) for r in rutas_neg],
        truth="truth.json",
        init=init,
        init_background_ids=fondo,
    ), salida / "manifest.json")

    print(f"✓ {len(pos)} positivos y {len(neg)} negativos en {salida}")
    if init:
        print(f"✓ Plantilla inicial: {salida / init} (fondo: {fondo})")
    return SALIDA_OK


def cmd_mine(args) -> int:
    config = _configuracion(args)
    init = load_pattern(args.init)
    pos = _cargar_args(args.pos)
    neg = _cargar_args(args.neg)

    pattern, state = mine(init, pos, neg, config)
    save_pattern(pattern, args.out)
    if args.report:
        save_report(_reporte_mineria(config, state), args.report)

    recuperacion = None
    if args.truth:
        recuperacion = score_recovery(pattern, state.assignments,
                                      _cargar_verdad(args.truth)).to_dict()
    print(generar_reporte(analizar_historial(historial_como_tabla(state)), recuperacion))

    if not state.convergio:
        logger.warning("Sin convergencia tras %d iteraciones", state.iteration)
        return SALIDA_MAX_ITER
    return SALIDA_OK


def cmd_match(args) -> int:
    config = _configuracion(args)
    pattern = load_pattern(args.pattern)
    arg = load_arg(args.arg)
    verificar_esquema(pattern, arg)

    resultado = match(pattern, arg, config)
    filas = [[s, "NONE" if x is NONE else x, b.unary, b.pairwise, b.total]
             for s, x, b in desglose_por_nodo(pattern, arg, resultado.assignment)]
    print(tabulate(filas, headers=["nodo", "destino", "unario", "pares", "total"],
                   floatfmt=".6g"))
    print(f"\nEnergía total:        {resultado.energy:.6g}")
    print(f"Solución exacta:      {resultado.exacto}")
    if pattern.n_nodos:
        puntaje = detection_score(pattern, arg, resultado.assignment, config.zeta)
        print(f"Puntaje de detección: {puntaje:.6g}")
    return SALIDA_OK


def cmd_eval(args) -> int:
    config = _configuracion(args)
    pattern = load_pattern(args.pattern)
    fila = evaluate_pattern(pattern, _cargar_args(args.pos_test), _cargar_args(args.neg_test),
                            config)
    tabla = pd.DataFrame([fila], columns=COLUMNAS_METRICAS)
    print(tabulate(tabla, headers="keys", showindex=False, floatfmt=".6g"))
    if args.out:
        exportar_resultados(tabla, args.out)
    return SALIDA_OK


def cmd_sweep(args) -> int:
    config = _configuracion(args)
    barrido = BarridoParametros(
        config_base=config,
        init=load_pattern(args.init),
        pos_train=_cargar_args(args.pos),
        neg_train=_cargar_args(args.neg),
        pos_test=_cargar_args(args.pos_test),
        neg_test=_cargar_args(args.neg_test),
    )
    resultados = barrido.ejecutar_barrido(args.taus, args.ds, jobs=config.jobs,
                                          progreso=not args.sin_progreso)
    exportar_resultados(resultados, args.out)
    print(barrido.generar_reporte())

    analisis = analizar_barrido(resultados)
    for d, monotono in analisis["tamano_monotono_en_tau"].items():
        print(f"d={d}: tamaño no decreciente en tau = {monotono}")
    if analisis["comparacion_borrosidad"]:
        c = analisis["comparacion_borrosidad"]
        print(f"Borrosidad d=2: {c['fuzziness_d2']:.6g}  d=inf: {c['fuzziness_dinf']:.6g}")
        print(f"Puntos de grilla con d=2 menos borroso: {c['puntos_d2_menos_borroso']}"
              f"/{len(c['d2_menos_borroso_por_tau'])}")
    return SALIDA_OK


# =============================================================================
# PARSER
# =============================================================================

def _opciones_config(parser: argparse.ArgumentParser, mineria: bool = True):
    parser.add_argument("--config", help="Archivo JSON con campos de MiningConfig")
    parser.add_argument("--escenario", help="Escenario predefinido (base, imagenes_web, voc, kinect)")
    parser.add_argument("--seed", type=int, help="Semilla (rng_seed)")
    parser.add_argument("--jobs", type=int, help="Procesos en paralelo")
    if mineria:
        parser.add_argument("--tau", type=_real, help="Umbral de energía media por nodo")
        parser.add_argument("--d", type=_grado, help="Aristas salientes por nodo (entero o 'inf')")


def construir_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvap", description="Minería de patrones visuales atribuidos de tamaño máximo")
    parser.add_argument("-v", "--verbose", action="store_true", help="Logging en nivel DEBUG")
    sub = parser.add_subparsers(dest="comando", required=True)

    p = sub.add_parser("generate", help="Genera ARGs sintéticos con un patrón plantado")
    p.add_argument("--spec", required=True, help="Especificación sintética (JSON)")
    p.add_argument("--out", required=True, help="Directorio de salida")
    p.add_argument("--seed", type=int, help="Reemplaza rng_seed de la especificación")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("mine", help="Mina un mVAP")
    p.add_argument("--pos", required=True, help="Directorio de ARGs positivos")
    p.add_argument("--neg", help="Directorio de ARGs negativos")
    p.add_argument("--init", required=True, help="Plantilla inicial (JSON de patrón)")
    p.add_argument("--out", required=True, help="Patrón minado (JSON)")
    p.add_argument("--report", help="Reporte de la corrida (JSON)")
    p.add_argument("--truth", help="Verdad de referencia para medir recuperación")
    _opciones_config(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("match", help="Empareja un patrón con un ARG")
    p.add_argument("--pattern", required=True)
    p.add_argument("--arg", required=True)
    _opciones_config(p, mineria=False)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("eval", help="Métricas de un patrón sobre conjuntos de prueba")
    p.add_argument("--pattern", required=True)
    p.add_argument("--pos-test", dest="pos_test", required=True)
    p.add_argument("--neg-test", dest="neg_test", required=True)
    p.add_argument("--out", help="CSV con la fila de métricas")
    _opciones_config(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="Barrido de (tau, d)")
    p.add_argument("--pos", required=True)
    p.add_argument("--neg", required=True)
    p.add_argument("--init", required=True)
    p.add_argument("--pos-test", dest="pos_test")
    p.add_argument("--neg-test", dest="neg_test")
    p.add_argument("--taus", type=_lista(_real), required=True, help="Lista separada por comas")
    p.add_argument("--ds", type=_lista(_grado), required=True, help="Lista separada por comas")
    p.add_argument("--out", required=True, help="CSV de resultados")
    p.add_argument("--sin-progreso", dest="sin_progreso", action="store_true")
    _opciones_config(p, mineria=False)
    p.set_defaults(func=cmd_sweep)

    return parser


def configurar_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = construir_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else SALIDA_VALIDACION

    configurar_logging(args.verbose)
    try:
        return args.func(args)
    except (ValueError, KeyError, ErrorMineria) as e:
        logger.error("%s", e)
        print(f"✗ Error: {e}", file=sys.stderr)
        return SALIDA_VALIDACION
    except OSError as e:
        logger.error("%s", e)
        print(f"✗ Error de E/S: {e}", file=sys.stderr)
        return SALIDA_IO


if __name__ == "__main__":
    sys.exit(main())
