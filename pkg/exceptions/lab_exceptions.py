"""
============================================
EXCEPCIONES PERSONALIZADAS DEL LABORATORIO
============================================
Define excepciones específicas para manejar errores
de simulación, cómputo y entrenamiento de forma
clara y consistente.
============================================
"""


class LabException(Exception):
    """Excepción base para errores del laboratorio"""

    def __init__(self, message: str, details: dict = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)

    def __str__(self):
        if self.details:
            return f"{self.message} - Detalles: {self.details}"
        return self.message


class MapaInvalidoException(LabException):
    """Se lanza cuando un archivo de mapa no se puede interpretar"""

    def __init__(self, linea: int, columna: int, razon: str):
        message = f"Mapa inválido en línea {linea}, columna {columna}: {razon}"
        details = {'linea': linea, 'columna': columna, 'razon': razon}
        super().__init__(message, details)


class MundoDesconocidoException(LabException):
    """Se lanza cuando se pide un mundo de referencia que no existe"""

    def __init__(self, mundo: str, validos: tuple = ()):
        message = f"Mundo desconocido: '{mundo}'"
        if validos:
            message += f" (válidos: {', '.join(validos)})"
        details = {'mundo': mundo, 'validos': list(validos)}
        super().__init__(message, details)


class VarianteInvalidaException(LabException):
    """Se lanza cuando la etiqueta de variante no es válida o no coincide"""

    def __init__(self, variante: str, validos: tuple = (), razon: str = None):
        message = f"Variante inválida: '{variante}'"
        if razon:
            message = f"{message}: {razon}"
        if validos:
            message += f" (válidas: {', '.join(validos)})"
        details = {'variante': variante, 'validos': list(validos)}
        super().__init__(message, details)


class FormaIncompatibleException(LabException):
    """Se lanza cuando las formas de los tensores no concuerdan"""

    def __init__(self, operacion: str, esperado, recibido):
        message = f"Forma incompatible en '{operacion}': se esperaba {esperado}, se recibió {recibido}"
        details = {
            'operacion': operacion,
            'esperado': str(esperado),
            'recibido': str(recibido)
        }
        super().__init__(message, details)


class AccionInvalidaException(LabException):
    """Se lanza cuando una acción no pertenece al espacio de acciones"""

    def __init__(self, accion):
        message = f"Acción inválida: {accion!r}"
        details = {'accion': str(accion)}
        super().__init__(message, details)


class CheckpointIncompatibleException(LabException):
    """Se lanza cuando un checkpoint no corresponde a lo esperado"""

    def __init__(self, ruta: str, razon: str):
        message = f"Checkpoint incompatible '{ruta}': {razon}"
        details = {'ruta': str(ruta), 'razon': razon}
        super().__init__(message, details)


class ConfiguracionInvalidaException(LabException):
    """Se lanza cuando un archivo o valor de configuración es inválido"""

    def __init__(self, clave: str, razon: str):
        message = f"Configuración inválida en '{clave}': {razon}"
        details = {'clave': clave, 'razon': razon}
        super().__init__(message, details)


class DatosInvalidosException(LabException):
    """Se lanza cuando los datos proporcionados son inválidos"""

    def __init__(self, campo: str, razon: str):
        message = f"Datos inválidos en campo '{campo}': {razon}"
        details = {'campo': campo, 'razon': razon}
        super().__init__(message, details)


class InvarianteVioladaException(LabException):
    """Se lanza cuando una propiedad que siempre debe cumplirse falla"""

    def __init__(self, invariante: str, detalle: str):
        message = f"Invariante violada ({invariante}): {detalle}"
        details = {'invariante': invariante, 'detalle': detalle}
        super().__init__(message, details)
