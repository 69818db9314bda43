"""
Paquete de configuración del laboratorio
"""

__version__ = "1.0.0"
