from src.modelo.parametros import ESCENARIOS, MiningConfig


def get_escenario(nombre: str) -> MiningConfig:
    nombre = nombre.lower()

    if nombre not in ESCENARIOS:
        raise ValueError(
            f"Escenario desconocido '{nombre}'; disponibles: {', '.join(ESCENARIOS)}"
        )

    return MiningConfig().generar_escenario(ESCENARIOS[nombre]["ajustes"])
