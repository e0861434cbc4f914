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

import json
import logging
from .excepciones import ProtocolError
from .http import HttpBackend
from .wire import parsear_respuesta

logger = logging.getLogger(__name__)

REDACTADO = '<redactado>'


def record_fixture(cfg, mensajes, tools, ruta, session=None):
    """Graba una solicitud y su respuesta contra un endpoint real.

    Escribe ``<ruta>.req.json`` y ``<ruta>.resp.json`` con los cuerpos exactos y
    ``<ruta>.meta.json`` con la URL y los encabezados, sin credenciales. No
    escribe nada si la solicitud falla.

    :returns: Rutas de los dos cuerpos grabados.
    :rtype: tuple
    :raises TransportError: Si el endpoint no responde.
    :raises AuthError: Si rechaza las credenciales.
    :raises ProtocolError: Si la respuesta no es JSON o no respeta el protocolo.
    """
    with HttpBackend(cfg, session=session) as backend:
        cuerpo = backend.solicitud(mensajes, tools)
        respuesta = backend.enviar(cuerpo)
        headers = {
            nombre: (REDACTADO if nombre.lower() == 'authorization' else valor)
            for nombre, valor in backend.headers().items()
        }
    try:
        datos = respuesta.json()
    except ValueError:
        raise ProtocolError(f'{backend.url}: el cuerpo no es JSON') from None
    parsear_respuesta(cfg, datos, tools)
    solicitud, resultado = f'{ruta}.req.json', f'{ruta}.resp.json'
    with open(solicitud, 'wb') as archivo:
        archivo.write(cuerpo)
    with open(resultado, 'wb') as archivo:
        archivo.write(respuesta.content)
    with open(f'{ruta}.meta.json', 'w', encoding='utf-8') as archivo:
        json.dump({'url': backend.url, 'headers': headers}, archivo, indent=2)
        archivo.write('\n')
    logger.info('fixture grabada en %s', ruta)
    return solicitud, resultado
