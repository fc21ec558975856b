"""
Script de prueba completo del sistema
Ejecutar: python test_basico.py
"""
import sys
import tempfile
from pathlib import Path

# Agregar src al path
proyecto_root = Path(__file__).parent
sys.path.insert(0, str(proyecto_root))


def test_imports():
    """Test 1: Verificar que todos los módulos se pueden importar"""
    print("=" * 70)
    print("TEST 1: IMPORTACIÓN DE MÓDULOS")
    print("=" * 70)

    modulos = [
        ("MiningConfig", "src.modelo.parametros", "MiningConfig, ESCENARIOS"),
        ("Pattern", "src.modelo.arg_model", "Pattern, Arg, MatchParams"),
        ("Energía", "src.modelo.energy", "node_energy, pattern_objective"),
        ("Matcher", "src.mineria.matcher", "match, match_many"),
        ("Miner", "src.mineria.miner", "mine"),
        ("ArgLoader", "src.utils.io", "ArgLoader"),
        ("CLI", "src.cli", "main"),
    ]

    resultados = []
    for nombre, modulo, imports in modulos:
        try:
            exec(f"from {modulo} import {imports}")
            print(f"✓ {nombre} importado correctamente")
            resultados.append(True)
        except Exception as e:
            print(f"✗ ERROR en {nombre}: {e}")
            resultados.append(False)

    return all(resultados)


def test_configuracion():
    """Test 2: Crear y validar configuración"""
    print("\n" + "=" * 70)
    print("TEST 2: CONFIGURACIÓN DE MINERÍA")
    print("=" * 70)

    try:
        from src.modelo.parametros import ESCENARIOS, MiningConfig

        config = MiningConfig()
        print("✓ Configuración creada")

        print(f"  - tau: {config.tau}")
        print(f"  - d: {config.d}")
        print(f"  - C (SVM): {config.c_svm}")
        print(f"  - Escenarios: {list(ESCENARIOS.keys())}")

        errores = config.validar_parametros()
        if errores:
            print(f"⚠ Errores de validación: {errores}")
            return False
        print("✓ Parámetros válidos")
        return True

    except Exception as e:
        print(f"✗ ERROR: {e}")
        import traceback
        traceback.print_exc()
        return False


def test_carga_datos():
    """Test 3: Generar y cargar un directorio de ARGs"""
    print("\n" + "=" * 70)
    print("TEST 3: CARGA DE ARGs")
    print("=" * 70)

    try:
        from src.modelo.parametros import SyntheticSpec
        from src.simulacion.synth import generate
        from src.utils.io import ArgLoader, guardar_args

        pos, _, _ = generate(SyntheticSpec(pattern_size=3, n_background=2, n_positive=4,
                                           n_negative=1))
        with tempfile.TemporaryDirectory() as tmp:
            guardar_args(pos, tmp)
            archivos = list(Path(tmp).glob("*.json"))
            print(f"  Archivos escritos: {len(archivos)}")

            cargados = ArgLoader(tmp).cargar_todos()
            print(f"✓ {len(cargados)} ARGs cargados correctamente")
            for arg in cargados:
                print(f"  - {arg.id}: {arg.n_nodos} nodos")

        return [a.id for a in cargados] == [a.id for a in pos]

    except Exception as e:
        print(f"✗ ERROR: {e}")
        import traceback
        traceback.print_exc()
        return False


def test_mineria():
    """Test 4: Ejecutar una minería corta"""
    print("\n" + "=" * 70)
    print("TEST 4: MINERÍA BÁSICA")
    print("=" * 70)

    try:
        from src.mineria.miner import historial_como_tabla, mine
        from src.modelo.parametros import MiningConfig, SyntheticSpec
        from src.simulacion.synth import build_init_pattern, generate, score_recovery

        spec = SyntheticSpec(pattern_size=4, n_background=3, n_positive=4, n_negative=4,
                             noise_sigma=0.05, rng_seed=1)
        pos, neg, truth = generate(spec)
        init, _ = build_init_pattern(pos[0], truth, 2, 1, seed=1)
        print(f"✓ Plantilla inicial con {init.n_nodos} nodos")

        print("  Minando (máximo 5 iteraciones)...")
        pattern, state = mine(init, pos, neg, MiningConfig(tau=0.5, d=2, max_iters=5))

        print("✓ Minería completada")
        print(f"  - Iteraciones: {state.iteration}")
        print(f"  - Convergió: {state.convergio}")

        historial = historial_como_tabla(state)
        if len(historial) > 0:
            ultimo = historial.iloc[-1]
            reporte = score_recovery(pattern, state.assignments, truth)
            print("\n📊 RESULTADOS FINALES:")
            print(f"  - Nodos: {ultimo['nodos']}")
            print(f"  - Aristas: {ultimo['aristas']}")
            print(f"  - Objetivo: {ultimo['objetivo']:.4f}")
            print(f"  - Precisión: {reporte.precision:.1%}")
            print(f"  - Recall: {reporte.recall:.1%}")

        return pattern.n_nodos >= 1 and len(historial) == state.iteration

    except Exception as e:
        print(f"✗ ERROR: {e}")
        import traceback
        traceback.print_exc()
        return False


def main():
    """Ejecuta todos los tests"""
    print("\n")
    print("*" * 70)
    print("*" + " " * 68 + "*")
    print("*" + "  SISTEMA DE PRUEBAS - MINERÍA DE PATRONES mVAP".center(68) + "*")
    print("*" + " " * 68 + "*")
    print("*" * 70)
    print("\n")

    tests = [
        ("Importación de módulos", test_imports),
        ("Configuración", test_configuracion),
        ("Carga de ARGs", test_carga_datos),
        ("Minería", test_mineria),
    ]

    resultados = []

    for nombre, test_func in tests:
        try:
            resultado = test_func()
            resultados.append((nombre, resultado))
        except Exception as e:
            print(f"\n✗ Error crítico en {nombre}: {e}")
            resultados.append((nombre, False))

    # Resumen
    print("\n" + "=" * 70)
    print("RESUMEN DE TESTS")
    print("=" * 70)

    for nombre, resultado in resultados:
        simbolo = "✓" if resultado else "✗"
        print(f"{simbolo} {nombre}")

    exitosos = sum(1 for _, r in resultados if r)
    total = len(resultados)

    print("\n" + "=" * 70)
    print(f"Tests exitosos: {exitosos}/{total}")
    print("=" * 70)

    if exitosos == total:
        print("\n✓✓✓ TODOS LOS TESTS PASARON ✓✓✓")
        print("\n🚀 Próximos pasos:")
        print("1. Genera un conjunto: mvap generate --spec spec.json --out datos/")
        print("2. Mina un patrón: mvap mine --pos datos/pos --neg datos/neg --init datos/init.json --out patron.json")
        print("3. Ejecuta las demás pruebas: python test_mineria.py")
    else:
        print("\n⚠️ ALGUNOS TESTS FALLARON")
        print("Revisa los errores arriba y corrige antes de continuar")

    return exitosos == total


if __name__ == "__main__":
    try:
        success = main()
        sys.exit(0 if success else 1)
    except KeyboardInterrupt:
        print("\n\nTests interrumpidos por el usuario")
        sys.exit(1)
    except Exception as e:
        print(f"\n\nError crítico: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)
