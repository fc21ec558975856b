"""
Parámetros de la minería de patrones visuales (mVAP) y de la generación sintética
"""
import copy
import math
from dataclasses import dataclass, field, fields
from typing import Dict, List, Tuple, Union

from src.config import LIMITE_ENUMERACION
from src.modelo.arg_model import AttributeSchema


SOLUCIONADORES = ("exact", "approximate")

# Nombres en archivo que difieren del atributo Python
_ALIAS_ARCHIVO = {"lambda": "lambda_"}


@dataclass
class MiningConfig:
    """Parámetros del bucle de minería"""

    # Definición del patrón
    tau: float = 1.0
    d: Union[int, float] = 2

    # Entrenamiento (Op. 6)
    c_svm: float = 1.0
    lambda_: float = 0.5
    alpha: float = 1.0

    # Detección
    zeta: float = 10.0

    # Control del bucle
    max_iters: int = 20
    energy_tol: float = 1e-6

    # Filtros de calidad por iteración
    min_match_fraction: float = 0.0
    top_fraction: float = 1.0

    # Emparejamiento
    rng_seed: int = 0
    solver: str = "exact"
    restarts: int = 20
    exact_limit: int = LIMITE_ENUMERACION

    # Paralelismo (match_many y barridos)
    jobs: int = 1

    def to_dict(self) -> Dict:
        """Convierte los parámetros a diccionario plano (claves de archivo)"""
        inverso = {v: k for k, v in _ALIAS_ARCHIVO.items()}
        return {inverso.get(f.name, f.name): getattr(self, f.name) for f in fields(self)}

    def actualizar_desde_dict(self, parametros: Dict, estricto: bool = False):
        """
        Actualiza parámetros desde un diccionario

        Args:
            parametros: claves de archivo (``lambda``) o de atributo (``lambda_``)
            estricto: si True, una clave desconocida es un error
        """
        nombres = {f.name for f in fields(self)}
        for clave, valor in parametros.items():
            nombre = _ALIAS_ARCHIVO.get(clave, clave)
            if nombre not in nombres:
                if estricto:
                    raise KeyError(f"Parámetro desconocido: '{clave}'")
                continue
            setattr(self, nombre, valor)

    def validar_parametros(self) -> List[str]:
        """Valida que los parámetros sean consistentes"""
        errores = []

        if not (self.tau >= 0):
            errores.append("tau debe ser >= 0")

        if not (self.d >= 1):
            errores.append("d debe ser >= 1 (o inf)")
        elif not math.isinf(self.d) and int(self.d) != self.d:
            errores.append("d debe ser entero o inf")

        if not (self.c_svm > 0) or math.isinf(self.c_svm):
            errores.append("c_svm debe ser real positivo")

        if not (0 <= self.lambda_ <= 1):
            errores.append("lambda debe estar entre 0 y 1")

        if not (self.alpha > 0) or math.isinf(self.alpha):
            errores.append("alpha debe ser real positivo")

        if not math.isfinite(self.zeta):
            errores.append("zeta debe ser finito")

        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            errores.append("max_iters debe ser entero >= 0")

        if not (self.energy_tol >= 0):
            errores.append("energy_tol debe ser >= 0")

        if not (0 <= self.min_match_fraction <= 1):
            errores.append("min_match_fraction debe estar entre 0 y 1")

        if not (0 < self.top_fraction <= 1):
            errores.append("top_fraction debe estar en (0, 1]")

        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            errores.append("rng_seed debe ser entero sin signo")

        if self.solver not in SOLUCIONADORES:
            errores.append(f"solver debe ser uno de {SOLUCIONADORES}")

        if int(self.restarts) != self.restarts or self.restarts < 1:
            errores.append("restarts debe ser entero >= 1")

        if self.exact_limit < 1:
            errores.append("exact_limit debe ser >= 1")

        if int(self.jobs) != self.jobs or self.jobs < 1:
            errores.append("jobs debe ser entero >= 1")

        return errores

    def generar_escenario(self, ajustes: Dict) -> 'MiningConfig':
        """Genera una nueva configuración con parámetros ajustados"""
        nuevo_config = copy.deepcopy(self)
        nuevo_config.actualizar_desde_dict(ajustes)
        return nuevo_config


@dataclass
class SyntheticSpec:
    """Parámetros del generador de ARGs con patrón plantado"""

    schema: AttributeSchema = field(
        default_factory=lambda: AttributeSchema(unary_dims=(2,), pairwise_dims=(2,))
    )
    pattern_size: int = 6
    n_background: int = 20
    n_positive: int = 10
    n_negative: int = 10
    noise_sigma: float = 0.0
    occlusion_prob: float = 0.0
    attr_range: Tuple[float, float] = (0.0, 10.0)
    rng_seed: int = 0

    # Plantilla inicial opcional (0 = no se construye)
    init_plant_nodes: int = 0
    init_background_nodes: int = 0

    def to_dict(self) -> Dict:
        """Convierte la especificación a diccionario plano"""
        datos = {f.name: getattr(self, f.name) for f in fields(self)}
        datos["schema"] = {
            "unary_dims": list(self.schema.unary_dims),
            "pairwise_dims": list(self.schema.pairwise_dims),
        }
        datos["attr_range"] = list(self.attr_range)
        return datos

    def validar_parametros(self) -> List[str]:
        """Valida que la especificación sea consistente"""
        errores = []

        if self.pattern_size < 1:
            errores.append("pattern_size debe ser >= 1")

        if self.n_background < 0:
            errores.append("n_background debe ser >= 0")

        if self.pattern_size + self.n_background < 2:
            errores.append("pattern_size + n_background debe ser >= 2")

        if self.n_positive < 0 or self.n_negative < 0:
            errores.append("n_positive y n_negative deben ser >= 0")

        if not (self.noise_sigma >= 0) or math.isinf(self.noise_sigma):
            errores.append("noise_sigma debe ser real >= 0")

        if not (0 <= self.occlusion_prob < 1):
            errores.append("occlusion_prob debe estar en [0, 1)")

        bajo, alto = self.attr_range
        if not (math.isfinite(bajo) and math.isfinite(alto) and bajo < alto):
            errores.append("attr_range debe ser un intervalo finito con bajo < alto")

        if int(self.rng_seed) != self.rng_seed or self.rng_seed < 0:
            errores.append("rng_seed debe ser entero sin signo")

        if not (0 <= self.init_plant_nodes <= self.pattern_size):
            errores.append("init_plant_nodes debe estar entre 0 y pattern_size")

        if not (0 <= self.init_background_nodes <= self.n_background):
            errores.append("init_background_nodes debe estar entre 0 y n_background")

        return errores


# Escenarios predefinidos (configuraciones de los experimentos)
ESCENARIOS = {
    "base": {
        "descripcion": "Parámetros por defecto de la librería",
        "ajustes": {}
    },

    "imagenes_web": {
        "descripcion": "Imágenes web: patrones dispersos, más del 60% de nodos emparejados",
        "ajustes": {
            "d": 2,
            "min_match_fraction": 0.6
        }
    },

    "voc": {
        "descripcion": "Estilo Pascal VOC: d=10, tau=1.0, solo el 10% de ARGs con menor energía",
        "ajustes": {
            "d": 10,
            "tau": 1.0,
            "top_fraction": 0.1
        }
    },

    "kinect": {
        "descripcion": "Patrones completos (d = inf) sobre ARGs de objetos RGB-D",
        "ajustes": {
            "d": math.inf
        }
    }
}
