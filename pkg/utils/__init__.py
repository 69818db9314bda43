"""
Utilidades: validación de entradas y generación de SVG
"""
