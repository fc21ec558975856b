"""
Pruebas del generador sintético, las métricas y el barrido de parámetros
Ejecutar: python test_simulacion.py
"""
import math
import time

import numpy as np

from soporte_tests import arg_aleatorio, encabezado, main_de
from src.mineria.matcher import match_exact
from src.modelo.arg_model import Assignment, AttributeSchema, ErrorValidacion, Pattern
from src.modelo.parametros import ESCENARIOS, MiningConfig, SyntheticSpec
from src.simulacion.analisis_resultados import analizar_barrido
from src.simulacion.barrido import BarridoParametros
from src.simulacion.escenarios import get_escenario
from src.simulacion.evaluacion import (
    COLUMNAS_METRICAS, average_precision, detection_score, energy_ratio, evaluate_pattern,
    mean_out_degree, pattern_fuzziness,
)
from src.simulacion.synth import OCCLUDED, build_init_pattern, generate, score_recovery


def _spec_chica(**ajustes) -> SyntheticSpec:
    base = dict(pattern_size=3, n_background=2, n_positive=3, n_negative=3,
                noise_sigma=0.0, occlusion_prob=0.0, rng_seed=11)
    base.update(ajustes)
    return SyntheticSpec(**base)


def test_generador():
    """Test 1: Conteos, ids, determinismo y atributos plantados"""
    encabezado(1, "GENERADOR SINTÉTICO")
    spec = _spec_chica()
    pos, neg, truth = generate(spec)
    assert [a.id for a in pos] == ["pos_000", "pos_001", "pos_002"]
    assert [a.id for a in neg] == ["neg_000", "neg_001", "neg_002"]
    assert all(a.n_nodos == 5 for a in pos + neg)
    assert truth.plant.n_nodos == 3 and truth.plant.n_aristas == 6
    print("✓ Conteos e ids")

    pos2, neg2, truth2 = generate(spec)
    assert pos2 == pos and neg2 == neg and truth2.plant == truth.plant
    assert [c.mapa for c in truth2.correspondences] == [c.mapa for c in truth.correspondences]
    print("✓ Misma semilla -> mismos ARGs")

    # sin ruido las instancias reproducen exactamente el patrón plantado
    for arg in pos:
        mapa = truth.correspondencia(arg.id).mapa
        for s, x in mapa.items():
            assert np.array_equal(arg.unary[0][x], truth.plant.unary_attrs[s][0])
            for t, y in mapa.items():
                if s != t:
                    assert np.array_equal(arg.pairwise[0][x, y], truth.plant.pairwise_attrs[(s, t)][0])
    print("✓ Atributos plantados exactos con ruido 0")

    ocluidos, _, verdad = generate(_spec_chica(occlusion_prob=0.5, n_positive=6))
    for arg, c in zip(ocluidos, verdad.correspondences):
        visibles = sum(1 for x in c.mapa.values() if x is not OCCLUDED)
        assert arg.n_nodos == visibles + 2
    print("✓ Nodos ocluidos no aparecen en el ARG")

    # con occlusion_prob = 1 - ε sobreviven ~ Binomial(n_positive * pattern_size, ε)
    epsilon = 0.05
    casi_todos, _, verdad = generate(_spec_chica(occlusion_prob=1.0 - epsilon, n_background=1,
                                                 n_positive=1000, n_negative=0))
    sobrevivientes = sum(arg.n_nodos - 1 for arg in casi_todos)
    ensayos = 1000 * 3
    media = ensayos * epsilon
    sigma = math.sqrt(ensayos * epsilon * (1.0 - epsilon))
    assert abs(sobrevivientes - media) <= 3.0 * sigma, sobrevivientes
    assert sobrevivientes == sum(1 for c in verdad.correspondences
                                 for x in c.mapa.values() if x is not OCCLUDED)
    print(f"✓ Sobrevivientes con oclusión 1 - ε: {sobrevivientes} (esperado {media:.0f} ± {3 * sigma:.1f})")

    try:
        generate(_spec_chica(occlusion_prob=1.0))
        assert False, "occlusion_prob = 1"
    except ErrorValidacion:
        print("✓ occlusion_prob = 1 rechazado")


def test_recuperacion_y_plantilla():
    """Test 2: La verdad de referencia se recupera a sí misma"""
    encabezado(2, "RECUPERACIÓN Y PLANTILLA INICIAL")
    pos, _, truth = generate(_spec_chica())
    reporte = score_recovery(truth.plant, list(truth.correspondences), truth)
    assert reporte.precision == 1.0 and reporte.recall == 1.0
    assert reporte.size_error == 0
    assert reporte.mayoria == {0: 0, 1: 1, 2: 2}
    print(f"✓ {reporte.to_dict()}")

    try:
        score_recovery(truth.plant, list(truth.correspondences)[:2], truth)
        assert False, "Número de asignaciones distinto"
    except ErrorValidacion:
        print("✓ Asignaciones incompletas rechazadas")

    init, fondo = build_init_pattern(pos[0], truth, 2, 1, seed=4)
    assert init.nodes == (0, 1, 2) and fondo == [2]
    assert init.n_aristas == 6
    plantados = [truth.plant.unary_attrs[s][0] for s in truth.plant.nodes]
    for s in (0, 1):
        assert any(np.array_equal(init.unary_attrs[s][0], p) for p in plantados)
    assert not any(np.array_equal(init.unary_attrs[2][0], p) for p in plantados)
    print("✓ Plantilla con 2 nodos plantados y 1 de fondo")

    try:
        build_init_pattern(pos[0], truth, 4, 0, seed=4)
        assert False, "Más nodos plantados que los visibles"
    except ErrorValidacion:
        print("✓ Demasiados nodos plantados rechazado")


def test_metricas():
    """Test 3: AP, razón de energías, puntaje de detección y borrosidad"""
    encabezado(3, "MÉTRICAS")
    assert average_precision([3.0, 2.0], [1.0, 0.0]) == 1.0
    assert average_precision([1.0], [1.0]) == 0.5
    assert math.isclose(average_precision([2.0, 0.0], [1.0]), (1.0 + 2.0 / 3.0) / 2.0)
    print("✓ AP con separación perfecta, empate pesimista y caso mixto")

    rng = np.random.RandomState(7)
    arg = arg_aleatorio("a", 5, rng)
    pattern = Pattern.desde_subgrafo(arg, [0, 1, 2])
    identidad = Assignment("a", {0: 0, 1: 1, 2: 2})
    assert detection_score(pattern, arg, identidad, zeta=10.0) == 10.0
    assert pattern_fuzziness(pattern, [arg], [identidad]) == 0.0
    assert mean_out_degree(pattern) == 2.0
    print("✓ Patrón perfecto: puntaje = ζ, borrosidad 0")

    otros = [arg_aleatorio(f"g{k}", 4, rng) for k in range(2)]
    assert energy_ratio(pattern, otros, otros, MiningConfig()) == 1.0
    assert match_exact(pattern, otros[0]).energy > 0
    print("✓ Razón de energías 1 con conjuntos idénticos")

    fila = evaluate_pattern(pattern, [arg], otros, MiningConfig())
    assert list(fila) == COLUMNAS_METRICAS
    assert fila["ap"] == 1.0 and fila["pattern_size"] == 3
    try:
        evaluate_pattern(pattern, [], otros, MiningConfig())
        assert False, "Conjunto vacío"
    except ErrorValidacion:
        print("✓ Conjunto de prueba vacío rechazado")


def test_barrido():
    """Test 4: Grilla 2x2 en orden (τ externo, d interno)"""
    encabezado(4, "BARRIDO DE PARÁMETROS")
    pos, neg, truth = generate(_spec_chica(noise_sigma=0.01))
    init, _ = build_init_pattern(pos[0], truth, 2, 0, seed=1)
    barrido = BarridoParametros(MiningConfig(max_iters=3), init, pos, neg)
    resultados = barrido.ejecutar_barrido([0.5, 1.0], [1, math.inf], progreso=False)

    assert len(resultados) == 4
    assert list(resultados.columns) == COLUMNAS_METRICAS
    assert resultados["tau"].tolist() == [0.5, 0.5, 1.0, 1.0]
    assert resultados["d"].tolist() == [1, math.inf, 1, math.inf]
    assert (resultados["pattern_size"] >= 1).all()
    assert "Puntos de grilla: 4" in barrido.generar_reporte()
    print(resultados.to_string(index=False))

    analisis = analizar_barrido(resultados)
    assert set(analisis["tamano_monotono_en_tau"]) == {"1", "inf"}
    assert analisis["comparacion_borrosidad"] is None
    print("✓ Análisis del barrido")


def test_tendencias_barrido():
    """Test 5: Tamaño no decreciente en τ y borrosidad de d = 2 frente a d = inf"""
    encabezado(5, "TENDENCIAS DEL BARRIDO")
    esquema = AttributeSchema(unary_dims=(16,), pairwise_dims=(16,))
    spec = SyntheticSpec(schema=esquema, pattern_size=4, n_background=8, n_positive=6,
                         n_negative=6, noise_sigma=0.7, occlusion_prob=0.0, rng_seed=21)
    pos, neg, truth = generate(spec)
    init, _ = build_init_pattern(pos[0], truth, 2, 1, seed=21)
    config = MiningConfig(max_iters=6, alpha=0.1, solver="approximate", restarts=20,
                          exact_limit=1000)
    taus = [0.0, 1.0, 20.0, 40.0, 1e6]

    inicio = time.perf_counter()
    barrido = BarridoParametros(config, init, pos, neg)
    resultados = barrido.ejecutar_barrido(taus, [2, math.inf], progreso=False)
    duracion = time.perf_counter() - inicio
    print(resultados.to_string(index=False))

    analisis = analizar_barrido(resultados)
    assert analisis["tamano_monotono_en_tau"] == {"2": True, "inf": True}
    medios = resultados.groupby("tau")["pattern_size"].mean().sort_index().to_numpy()
    assert np.all(np.diff(medios) >= 0)
    print(f"✓ Tamaño medio por τ: {medios.tolist()}")

    comparacion = analisis["comparacion_borrosidad"]
    assert sorted(comparacion["d2_menos_borroso_por_tau"]) == taus
    assert comparacion["puntos_d2_menos_borroso"] >= 4
    assert duracion < 600.0
    print(f"✓ d = 2 no más borroso en {comparacion['puntos_d2_menos_borroso']} de 5 puntos "
          f"({duracion:.1f}s)")


def test_escenarios():
    """Test 6: Escenarios predefinidos válidos"""
    encabezado(6, "ESCENARIOS")
    for nombre in ESCENARIOS:
        config = get_escenario(nombre)
        assert config.validar_parametros() == [], nombre
    assert get_escenario("VOC").to_dict() == get_escenario("voc").to_dict()
    try:
        get_escenario("desconocido")
        assert False, "Escenario desconocido"
    except ValueError:
        print(f"✓ {len(ESCENARIOS)} escenarios válidos; nombre desconocido rechazado")


TESTS = [
    ("Generador sintético", test_generador),
    ("Recuperación y plantilla", test_recuperacion_y_plantilla),
    ("Métricas", test_metricas),
    ("Barrido", test_barrido),
    ("Tendencias del barrido", test_tendencias_barrido),
    ("Escenarios", test_escenarios),
]


if __name__ == "__main__":
    main_de("PRUEBAS DE SIMULACIÓN", TESTS)
