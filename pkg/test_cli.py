"""
Pruebas de la interfaz de línea de comandos (mvap)
Ejecutar: python test_cli.py
"""
import io as io_texto
import json
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import pandas as pd

from soporte_tests import encabezado, main_de
from src.cli import main
from src.modelo.parametros import SyntheticSpec
from src.utils import io

SPEC = SyntheticSpec(pattern_size=3, n_background=2, n_positive=3, n_negative=3,
                     noise_sigma=0.01, rng_seed=5, init_plant_nodes=2)


def _correr(*argv) -> tuple:
    """Ejecuta main y devuelve (código, stdout)"""
    salida = io_texto.StringIO()
    with redirect_stdout(salida), redirect_stderr(io_texto.StringIO()):
        codigo = main([str(a) for a in argv])
    return codigo, salida.getvalue()


def _contenido(directorio: Path) -> dict:
    return {str(r.relative_to(directorio)): r.read_bytes()
            for r in sorted(directorio.rglob("*")) if r.is_file()}


def _generar(tmp: Path, nombre: str = "datos") -> Path:
    io.save_spec(SPEC, tmp / "spec.json")
    codigo, _ = _correr("generate", "--spec", tmp / "spec.json", "--out", tmp / nombre)
    assert codigo == 0
    return tmp / nombre


def test_generate():
    """Test 1: Directorios idénticos con la misma semilla"""
    encabezado(1, "GENERATE")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        a = _generar(tmp, "a")
        b = _generar(tmp, "b")
        assert _contenido(a) == _contenido(b)
        nombres = set(_contenido(a))
        assert {"truth.json", "spec.json", "init.json", "manifest.json",
                "pos/pos_000.json", "neg/neg_002.json"} <= nombres
        manifiesto = json.loads((a / "manifest.json").read_text(encoding="utf-8"))
        assert manifiesto["init"] == "init.json" and manifiesto["init_background_ids"] == []
        print("✓ Salidas byte a byte idénticas")

        codigo, _ = _correr("generate", "--spec", tmp / "spec.json", "--out", tmp / "c",
                            "--seed", "6")
        assert codigo == 0 and _contenido(tmp / "c") != _contenido(a)
        print("✓ --seed cambia la salida")

        (tmp / "mala.json").write_text('{"occlusion_prob": 1.0}', encoding="utf-8")
        assert _correr("generate", "--spec", tmp / "mala.json", "--out", tmp / "d")[0] == 3
        assert _correr("generate", "--spec", tmp / "spec.json", "--out", tmp / "d",
                       "--desconocida")[0] == 3
        print("✓ Entrada inválida -> código 3")


def test_mine():
    """Test 2: max_iters = 0, determinismo y reporte"""
    encabezado(2, "MINE")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        datos = _generar(tmp)
        (tmp / "cero.json").write_text('{"max_iters": 0}', encoding="utf-8")

        codigo, _ = _correr("mine", "--pos", datos / "pos", "--neg", datos / "neg",
                            "--init", datos / "init.json", "--out", tmp / "cero_out.json",
                            "--config", tmp / "cero.json")
        assert codigo == 2
        assert io.load_pattern(tmp / "cero_out.json") == io.load_pattern(datos / "init.json")
        print("✓ max_iters = 0 -> código 2 y la plantilla sin cambios")

        (tmp / "corta.json").write_text('{"max_iters": 4}', encoding="utf-8")
        codigos = []
        for sufijo in ("1", "2"):
            codigo, texto = _correr("mine", "--pos", datos / "pos", "--neg", datos / "neg",
                                    "--init", datos / "init.json",
                                    "--out", tmp / f"p{sufijo}.json",
                                    "--report", tmp / f"r{sufijo}.json",
                                    "--truth", datos / "truth.json",
                                    "--config", tmp / "corta.json", "--tau", "0.5")
            codigos.append(codigo)
        assert codigos[0] == codigos[1] and codigos[0] in (0, 2)
        assert (tmp / "p1.json").read_bytes() == (tmp / "p2.json").read_bytes()
        assert (tmp / "r1.json").read_bytes() == (tmp / "r2.json").read_bytes()
        assert "RECUPERACIÓN DEL PATRÓN PLANTADO" in texto

        reporte = io.load_report(tmp / "r1.json")
        assert reporte.config["tau"] == 0.5 and reporte.iterations == len(reporte.history)
        assert reporte.active_args == ["pos_000", "pos_001", "pos_002"]
        print("✓ Corridas repetidas byte a byte idénticas")


def test_match_eval_sweep():
    """Test 3: match, eval y sweep sobre el conjunto generado"""
    encabezado(3, "MATCH, EVAL Y SWEEP")
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        datos = _generar(tmp)

        codigo, texto = _correr("match", "--pattern", datos / "init.json",
                                "--arg", datos / "pos" / "pos_000.json")
        assert codigo == 0
        total = [l for l in texto.splitlines() if l.startswith("Energía total:")][0]
        assert total.split()[-1] == "0"
        assert "nodo" in texto and "Solución exacta:      True" in texto
        print("✓ Plantilla contra su propio ARG -> energía 0")

        assert _correr("match", "--pattern", tmp / "no_existe.json",
                       "--arg", datos / "pos" / "pos_000.json")[0] == 4
        print("✓ Archivo inexistente -> código 4")

        codigo, _ = _correr("eval", "--pattern", datos / "init.json", "--pos-test", datos / "pos",
                            "--neg-test", datos / "neg", "--out", tmp / "eval.csv")
        assert codigo == 0
        fila = pd.read_csv(tmp / "eval.csv")
        assert len(fila) == 1 and fila["pattern_size"].iloc[0] == 2
        print("✓ eval escribe una fila")

        (tmp / "corta.json").write_text('{"max_iters": 2}', encoding="utf-8")
        codigo, _ = _correr("sweep", "--pos", datos / "pos", "--neg", datos / "neg",
                            "--init", datos / "init.json", "--taus", "0.5,1", "--ds", "1,inf",
                            "--out", tmp / "barrido.csv", "--config", tmp / "corta.json",
                            "--sin-progreso")
        assert codigo == 0
        tabla = pd.read_csv(tmp / "barrido.csv")
        assert len(tabla) == 4
        assert tabla["tau"].tolist() == [0.5, 0.5, 1.0, 1.0]
        print("✓ sweep 2x2 -> 4 filas")

        assert _correr("sweep", "--pos", datos / "pos", "--neg", datos / "neg",
                       "--init", datos / "init.json", "--taus", "0.5", "--ds", "x",
                       "--out", tmp / "malo.csv")[0] == 3
        print("✓ d inválido -> código 3")


TESTS = [
    ("generate", test_generate),
    ("mine", test_mine),
    ("match, eval y sweep", test_match_eval_sweep),
]


if __name__ == "__main__":
    main_de("PRUEBAS DE LA CLI", TESTS)
