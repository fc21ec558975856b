"""
Pruebas del entrenamiento de pesos por margen máximo
Ejecutar: python test_entrenamiento.py
"""
import math

import numpy as np
from scipy.optimize import minimize

from soporte_tests import encabezado, main_de
from src.mineria.margin_trainer import (
    NEGATIVO, POSITIVO, MarginSample, MuestraDegenerada, extract_features, objetivo_primal,
    postprocess_and_blend, train,
)
from src.modelo.arg_model import (
    NONE, Arg, Assignment, AttributeSchema, ErrorValidacion, MatchParams, Pattern,
)

ESQUEMA_1D = AttributeSchema(unary_dims=(1,), pairwise_dims=(1,))


def _oraculo_primal(pos, neg, c: float) -> float:
    """Primal con holguras explícitas resuelto como QP (variables w, b, ξ)"""
    a = np.array([m.features for m in list(pos) + list(neg)])
    y = np.concatenate([-np.ones(len(pos)), np.ones(len(neg))])
    costo = c * np.concatenate([np.full(len(pos), 1.0 / len(pos)),
                                np.full(len(neg), 1.0 / len(neg))])
    n, dim = a.shape

    def f(x):
        w = x[:dim]
        return float(w @ w + costo @ x[dim + 1:])

    restricciones = [{
        "type": "ineq",
        "fun": lambda x, i=i: float(y[i] * (a[i] @ x[:dim] - x[dim]) - 1.0 + x[dim + 1 + i]),
    } for i in range(n)]
    x0 = np.concatenate([np.zeros(dim + 1), np.ones(n)])
    limites = [(None, None)] * (dim + 1) + [(0.0, None)] * n
    resultado = minimize(f, x0, method="SLSQP", bounds=limites, constraints=restricciones,
                         options={"maxiter": 10**4, "ftol": 1e-14})
    return float(resultado.fun)


def test_ejemplo_postproceso():
    """Test 1: Recorte, normalización y mezcla"""
    encabezado(1, "POSTPROCESO")
    w = postprocess_and_blend(np.array([-1.0, 3.0]), np.array([0.5, 0.5]), 0.5)
    assert np.allclose(w, [0.25, 0.75], rtol=0, atol=1e-15)
    print(f"✓ [-1, 3] -> {w.tolist()}")

    previo = np.array([0.2, 0.3, 0.5])
    assert np.array_equal(postprocess_and_blend(np.array([-1.0, -2.0, 0.0]), previo, 0.5), previo)
    print("✓ Todo recortado -> pesos anteriores")

    rng = np.random.RandomState(0)
    for _ in range(100):
        dim = rng.randint(2, 6)
        previo = rng.dirichlet(np.ones(dim))
        w = postprocess_and_blend(rng.normal(size=dim), previo, rng.uniform())
        assert np.all(w >= 0)
        assert abs(w.sum() - 1.0) < 1e-12
    print("✓ Resultado siempre en el símplex")


def test_oraculo_svm():
    """Test 2: Objetivo primal del dual = QP primal (30 instancias)"""
    encabezado(2, "ORÁCULO SVM")
    rng = np.random.RandomState(1)
    for ensayo in range(30):
        dim = rng.randint(2, 4)
        n_pos = rng.randint(1, 4)
        n_neg = rng.randint(1, 7 - n_pos)
        pos = [MarginSample(rng.uniform(0, 2, dim), POSITIVO) for _ in range(n_pos)]
        neg = [MarginSample(rng.uniform(0.5, 3, dim), NEGATIVO) for _ in range(n_neg)]
        c = float(rng.choice([0.1, 1.0, 10.0]))

        resultado = train(pos, neg, c)
        oraculo = _oraculo_primal(pos, neg, c)
        assert math.isclose(resultado.objetivo, objetivo_primal(resultado.w, resultado.b, pos, neg, c))
        escala = max(1.0, abs(oraculo))
        assert abs(resultado.objetivo - oraculo) <= 1e-4 * escala, \
            f"ensayo {ensayo}: {resultado.objetivo} vs {oraculo}"
    print("✓ Diferencia relativa <= 1e-4 en 30 instancias")


def test_separable():
    """Test 3: Caso separable; los positivos quedan del lado de baja energía"""
    encabezado(3, "CASO SEPARABLE")
    pos = [MarginSample(np.array([0.1, 0.2]), POSITIVO), MarginSample(np.array([0.2, 0.1]), POSITIVO)]
    neg = [MarginSample(np.array([3.0, 2.5]), NEGATIVO), MarginSample(np.array([2.0, 3.5]), NEGATIVO)]
    w, b = train(pos, neg, 10.0)
    assert all(w @ m.features - b < 0 for m in pos)
    assert all(w @ m.features - b > 0 for m in neg)
    print(f"✓ w = {np.round(w, 4).tolist()}, b = {b:.4f}")

    try:
        train(pos, [], 1.0)
        assert False, "Clase vacía"
    except ErrorValidacion:
        print("✓ Clase sin muestras rechazada")

    try:
        MarginSample(np.array([-1.0, 0.0]), POSITIVO)
        assert False, "Característica negativa"
    except ErrorValidacion:
        print("✓ Características negativas rechazadas")


def test_caracteristicas():
    """Test 4: Vector de características a mano"""
    encabezado(4, "CARACTERÍSTICAS")
    pattern = Pattern(
        schema=ESQUEMA_1D,
        nodes=(0, 1),
        edges=frozenset({(0, 1), (1, 0)}),
        unary_attrs={0: (np.array([0.0]),), 1: (np.array([0.0]),)},
        pairwise_attrs={(0, 1): (np.array([0.0]),), (1, 0): (np.array([0.0]),)},
        params=MatchParams.inicial(ESQUEMA_1D),
    )
    arg = Arg.desde_registros("a", ESQUEMA_1D, nodos=[[[1.0]], [[3.0]]],
                              pares={(0, 1): [[2.0]], (1, 0): [[4.0]]})

    completo = extract_features(pattern, arg, Assignment("a", {0: 0, 1: 1}))
    assert np.allclose(completo, [5.0, 10.0])      # (1+9)/2, (4+16)/2

    parcial = extract_features(pattern, arg, Assignment("a", {0: 0, 1: NONE}))
    assert np.allclose(parcial, [1.0, 0.0])
    print(f"✓ a = {completo.tolist()} y {parcial.tolist()}")

    try:
        extract_features(pattern, arg, Assignment("a", {0: NONE, 1: NONE}))
        assert False, "Asignación toda NONE"
    except MuestraDegenerada:
        print("✓ Muestra degenerada")


def test_invarianzas():
    """Test 5: Conjunto duplicado y escala de las características"""
    encabezado(5, "INVARIANZAS DEL SVM")
    rng = np.random.RandomState(4)
    pos = [MarginSample(rng.uniform(0.0, 1.0, 3), POSITIVO) for _ in range(4)]
    neg = [MarginSample(rng.uniform(2.0, 3.0, 3), NEGATIVO) for _ in range(4)]
    # una negativa idéntica a una positiva: clases no separables
    neg.append(MarginSample(pos[0].features.copy(), NEGATIVO))
    original = train(pos, neg, 10.0)
    duplicado = train(pos + pos, neg + neg, 10.0)
    assert np.allclose(original.w, duplicado.w, rtol=0, atol=1e-4), (original.w, duplicado.w)
    assert abs(original.b - duplicado.b) <= 1e-3 * max(1.0, abs(original.b))
    assert math.isclose(original.objetivo, duplicado.objetivo, rel_tol=1e-4, abs_tol=1e-6)
    print(f"✓ Duplicado: w = {np.round(duplicado.w, 5).tolist()}, b = {duplicado.b:.5f}")

    # cada característica separa las clases: la primera crece en los negativos, la segunda en los positivos
    base_pos = [np.array([0.1, 3.0]), np.array([0.2, 2.5])]
    base_neg = [np.array([3.0, 0.2]), np.array([2.5, 0.1])]
    signos = None
    for escala in (0.01, 0.5, 1.0, 2.0, 100.0):
        w = train([MarginSample(escala * a, POSITIVO) for a in base_pos],
                  [MarginSample(escala * a, NEGATIVO) for a in base_neg], 10.0).w
        if signos is None:
            signos = np.sign(w)
        assert np.array_equal(np.sign(w), signos), (escala, w)
    assert signos.tolist() == [1.0, -1.0]
    print("✓ El patrón de signos de w no depende de la escala")


TESTS = [
    ("Postproceso", test_ejemplo_postproceso),
    ("Oráculo SVM", test_oraculo_svm),
    ("Caso separable", test_separable),
    ("Características", test_caracteristicas),
    ("Invarianzas", test_invarianzas),
]


if __name__ == "__main__":
    main_de("PRUEBAS DE ENTRENAMIENTO", TESTS)
