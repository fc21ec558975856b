import math

import numpy as np
import pandas as pd


def analizar_historial(historial: pd.DataFrame) -> dict:
    """
    historial: DataFrame de historial_como_tabla con columnas:
      - iteracion, nodos, aristas, objetivo
      - agregado, eliminado (id o vacío)
      - delta_eliminacion, delta_agregado
    Devuelve estadísticas del recorrido de la minería.
    """
    if historial.empty:
        return {"estadisticas": {"iteraciones": 0}}

    agregados = historial["agregado"].dropna()
    eliminados = historial["eliminado"].dropna()

    # Toda eliminación y todo agregado deben tener ganancia negativa
    ganancias = pd.concat([
        historial.loc[historial["eliminado"].notna(), "delta_eliminacion"],
        historial.loc[historial["agregado"].notna(), "delta_agregado"],
    ])

    ultimo = historial.iloc[-1]
    objetivos = historial["objetivo"].to_numpy(dtype=float)
    finitos = objetivos[np.isfinite(objetivos)]

    estadisticas = {
        "iteraciones": int(len(historial)),
        "nodos_agregados": [int(x) for x in agregados],
        "nodos_eliminados": [int(x) for x in eliminados],
        "eventos_con_ganancia_negativa": bool((ganancias < 0).all()),
        "nodos_finales": int(ultimo["nodos"]),
        "aristas_finales": int(ultimo["aristas"]),
        "objetivo_inicial": float(objetivos[0]),
        "objetivo_final": float(objetivos[-1]),
        "objetivo_minimo": float(finitos.min()) if finitos.size else math.inf,
    }

    return {
        "estadisticas": estadisticas
    }


def _etiqueta_d(d) -> str:
    return "inf" if math.isinf(d) else str(int(d))


def analizar_barrido(resultados: pd.DataFrame) -> dict:
    """
    resultados: DataFrame del barrido con columnas tau, d, pattern_size, fuzziness
    Devuelve el tamaño medio por (d, τ), si crece con τ para cada d, y la
    comparación de borrosidad entre d = 2 y d = inf cuando ambos existen.
    """
    etiqueta_d = resultados["d"].map(_etiqueta_d)
    tamanos = (resultados.assign(d=etiqueta_d)
               .groupby(["d", "tau"])["pattern_size"].mean())

    monotono = {}
    for d, serie in tamanos.groupby(level="d"):
        valores = serie.sort_index(level="tau").to_numpy()
        monotono[d] = bool(np.all(np.diff(valores) >= 0))

    borrosidad = resultados.assign(d=etiqueta_d).groupby("d")["fuzziness"].mean()
    comparacion = None
    if "2" in borrosidad.index and "inf" in borrosidad.index:
        # Por punto de grilla: τ con ambas corridas
        por_tau = (resultados.assign(d=etiqueta_d)
                   .pivot_table(index="tau", columns="d", values="fuzziness", aggfunc="mean")
                   [["2", "inf"]].dropna())
        menos_borroso = {float(tau): bool(fila["2"] <= fila["inf"])
                         for tau, fila in por_tau.iterrows()}
        comparacion = {
            "fuzziness_d2": float(borrosidad["2"]),
            "fuzziness_dinf": float(borrosidad["inf"]),
            "d2_menos_borroso": bool(borrosidad["2"] <= borrosidad["inf"]),
            "d2_menos_borroso_por_tau": menos_borroso,
            "puntos_d2_menos_borroso": int(sum(menos_borroso.values())),
        }

    return {
        "tamano_medio": {f"{d}|{tau}": float(v) for (d, tau), v in tamanos.items()},
        "tamano_monotono_en_tau": monotono,
        "comparacion_borrosidad": comparacion,
    }


def generar_reporte(estadisticas_historial: dict, recuperacion: dict = None) -> str:
    """Genera reporte textual de una corrida de minería"""
    est = estadisticas_historial["estadisticas"]
    lineas = []
    lineas.append("=" * 70)
    lineas.append("REPORTE DE MINERÍA")
    lineas.append("=" * 70)
    lineas.append(f"Iteraciones:               {est['iteraciones']}")
    if est["iteraciones"]:
        lineas.append(f"Nodos finales:             {est['nodos_finales']}")
        lineas.append(f"Aristas finales:           {est['aristas_finales']}")
        lineas.append(f"Nodos agregados:           {est['nodos_agregados']}")
        lineas.append(f"Nodos eliminados:          {est['nodos_eliminados']}")
        lineas.append(f"Objetivo final:            {est['objetivo_final']:.6g}")
        lineas.append(f"Eventos con ganancia < 0:  {est['eventos_con_ganancia_negativa']}")

    if recuperacion:
        lineas.append("\n" + "-" * 70)
        lineas.append("RECUPERACIÓN DEL PATRÓN PLANTADO")
        lineas.append("-" * 70)
        lineas.append(f"Precisión:                 {recuperacion['precision']:.1%}")
        lineas.append(f"Recall:                    {recuperacion['recall']:.1%}")
        lineas.append(f"Error de tamaño:           {recuperacion['size_error']}")

    lineas.append("=" * 70)
    return "\n".join(lineas)
