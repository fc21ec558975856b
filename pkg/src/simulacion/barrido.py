"""
Barrido de parámetros (τ, d) para minería y evaluación
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence

import pandas as pd
from tqdm import tqdm

from src.mineria.miner import mine
from src.modelo.arg_model import Arg, Pattern
from src.modelo.parametros import MiningConfig
from src.simulacion.evaluacion import COLUMNAS_METRICAS, evaluate_pattern

logger = logging.getLogger(__name__)


def _ejecutar_punto(datos) -> Dict:
    barrido, tau, d = datos
    return barrido.ejecutar_punto(tau, d)


class BarridoParametros:
    """
    Ejecuta mine + evaluate_pattern sobre una grilla de (τ, d)

    Cada punto usa la configuración base con τ y d reemplazados; las filas
    se devuelven en orden de grilla (τ externo, d interno) sin importar el
    orden en que terminan los procesos.
    """

    def __init__(self,
                 config_base: MiningConfig,
                 init: Pattern,
                 pos_train: Sequence[Arg],
                 neg_train: Sequence[Arg],
                 pos_test: Optional[Sequence[Arg]] = None,
                 neg_test: Optional[Sequence[Arg]] = None):
        self.config_base = config_base
        self.init = init
        self.pos_train = list(pos_train)
        self.neg_train = list(neg_train)
        self.pos_test = list(pos_test) if pos_test else self.pos_train
        self.neg_test = list(neg_test) if neg_test else self.neg_train
        self.resultados: Optional[pd.DataFrame] = None

    def ejecutar_punto(self, tau: float, d) -> Dict:
        """Mina y evalúa un punto de la grilla"""
        config = self.config_base.generar_escenario({"tau": tau, "d": d, "jobs": 1})
        inicio = time.perf_counter()
        pattern, state = mine(self.init, self.pos_train, self.neg_train, config)
        fila = evaluate_pattern(pattern, self.pos_test, self.neg_test, config)
        fila["wall_time_s"] = time.perf_counter() - inicio
        logger.info("tau=%s d=%s nodos=%d iteraciones=%d convergio=%s",
                    tau, d, pattern.n_nodos, state.iteration, state.convergio)
        return fila

    def ejecutar_barrido(self, taus: Sequence[float], ds: Sequence, jobs: int = 1,
                         progreso: bool = True) -> pd.DataFrame:
        grilla = [(tau, d) for tau in taus for d in ds]
        tareas = [(self, tau, d) for tau, d in grilla]

        if jobs > 1 and len(grilla) > 1:
            with ProcessPoolExecutor(max_workers=min(jobs, len(grilla))) as executor:
                futuros = [executor.submit(_ejecutar_punto, t) for t in tareas]
                filas = [f.result() for f in tqdm(futuros, desc="Barrido", disable=not progreso)]
        else:
            filas = [_ejecutar_punto(t) for t in tqdm(tareas, desc="Barrido", disable=not progreso)]

        self.resultados = pd.DataFrame(filas, columns=COLUMNAS_METRICAS)
        return self.resultados

    def generar_reporte(self) -> str:
        """Reporte textual de la última grilla"""
        lineas = []
        lineas.append("=" * 70)
        lineas.append("BARRIDO DE PARÁMETROS (tau, d)")
        lineas.append("=" * 70)
        if self.resultados is None or self.resultados.empty:
            lineas.append("Sin resultados")
        else:
            lineas.append(f"Puntos de grilla: {len(self.resultados)}")
            lineas.append(self.resultados.to_string(index=False))
        lineas.append("=" * 70)
        return "\n".join(lineas)
