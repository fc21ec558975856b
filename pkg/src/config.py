"""
Constantes compartidas del proyecto
"""

# Límite de enumeraciones del solucionador exacto: (n+1)^|V|
LIMITE_ENUMERACION = 10**7

# Tokens de los archivos JSON
TOKEN_INF = "inf"
TOKEN_NONE = "none"
TOKEN_OCLUIDO = "occluded"

# Piso positivo para P_none / Q_none tras el re-estimado
PISO_PENALIZACION = 1e-12

# Tolerancia de la suma de pesos sobre el símplex
TOLERANCIA_SIMPLEX = 1e-9

# Códigos de salida de la CLI
SALIDA_OK = 0
SALIDA_MAX_ITER = 2
SALIDA_VALIDACION = 3
SALIDA_IO = 4
