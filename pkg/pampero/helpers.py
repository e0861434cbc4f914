# Copyright (c) 2026, Los autores de Pampero (ver AUTHORS.md)

# This file is part of Pampero.

# Pampero is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.

# Pampero is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.

# You should have received a copy of the GNU General Public License
# along with Pampero.  If not, see <https://www.gnu.org/licenses/>.

import hashlib
import json
import math


def json_canonico(objeto):
    """Serializa un objeto a JSON de forma canónica: claves ordenadas, sin
    espacios y UTF-8 sin escapar.

    :rtype: str
    """
    return json.dumps(
        objeto, ensure_ascii=False, sort_keys=True, separators=(',', ':')
    )


def sha256(texto):
    return hashlib.sha256(texto.encode('utf-8')).hexdigest()


def contar_palabras(texto):
    return len(texto.split()) if texto else 0


def estimar_tokens(palabras):
    """Estimador de tokens usado cuando el backend no informa el consumo.

    :param int palabras: Cantidad de palabras separadas por espacios.
    :returns: ``ceil(palabras * 4 / 3)``.
    :rtype: int
    """
    return math.ceil(palabras * 4 / 3)


def escribir_jsonl(ruta, registros):
    with open(ruta, 'w', encoding='utf-8', newline='\n') as archivo:
        for registro in registros:
            archivo.write(json.dumps(registro, ensure_ascii=False))
            archivo.write('\n')


def leer_jsonl(ruta):
    with open(ruta, encoding='utf-8') as archivo:
        return [json.loads(linea) for linea in archivo if linea.strip()]
