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

import logging
import os
import time
import requests
from .excepciones import AuthError, ConfigError, ProtocolError, TransportError
from .wire import RUTAS, cuerpo_solicitud, parsear_respuesta, serializar

logger = logging.getLogger(__name__)

PURPOSES = ('turn', 'reflect', 'confirm', 'route')

# Errores de la URL o de los encabezados: reintentar no cambia nada.
ERRORES_DE_USO = (
    requests.exceptions.MissingSchema, requests.exceptions.InvalidSchema,
    requests.exceptions.InvalidURL, requests.exceptions.InvalidHeader,
)


def _verificar(mensajes):
    if not mensajes or mensajes[0].role != 'system':
        raise ValueError('la vista de mensajes debe empezar con un mensaje system')


class Backend:
    """Cliente de chat. ``purpose`` indica para qué se hace la llamada: un
    turno normal, una reflexión, una confirmación de cierre o el ruteo.

    Se puede usar como administrador de contexto; al salir se llama a
    :meth:`cerrar`.
    """
    def __init__(self, cfg):
        self.cfg = cfg

    def complete(self, mensajes, tools, purpose='turn'):
        raise NotImplementedError

    def cerrar(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.cerrar()


class HttpBackend(Backend):
    """Cliente HTTP para los protocolos compatibles con OpenAI y de Ollama.

    Es seguro usarlo desde varias ejecuciones en paralelo siempre que cada
    hilo use su propia sesión.

    :param cfg: Una instancia de :class:`BackendConfig`.
    :param session: Una ``requests.Session`` (opcional). Una sesión recibida
        no se cierra en :meth:`cerrar`; la propia sí.
    :param sleep: Función de espera entre reintentos.
    """
    def __init__(self, cfg, session=None, sleep=time.sleep):
        super().__init__(cfg)
        self.propia = session is None
        self.session = requests.Session() if session is None else session
        self.sleep = sleep

    def cerrar(self):
        if self.propia:
            self.session.close()

    @property
    def url(self):
        return self.cfg.url_base + RUTAS[self.cfg.kind]

    def headers(self):
        headers = {'Content-Type': 'application/json'}
        if self.cfg.api_key_env:
            clave = os.environ.get(self.cfg.api_key_env)
            if clave:
                headers['Authorization'] = f'Bearer {clave}'
        return headers

    def solicitud(self, mensajes, tools):
        """Cuerpo canónico de la solicitud, en bytes."""
        _verificar(mensajes)
        return serializar(cuerpo_solicitud(self.cfg, mensajes, tools))

    def enviar(self, cuerpo):
        """Envía el cuerpo con reintentos ante fallas de transporte.

        Los reintentos esperan ``1, 2, 4, ...`` segundos.

        :returns: La ``requests.Response``.
        :raises TransportError: Si se agotan los reintentos.
        :raises AuthError: Ante HTTP 401 o 403.
        :raises ProtocolError: Ante cualquier otro estado 4xx.
        :raises ConfigError: Si la URL o los encabezados son inválidos.
        """
        intentos = self.cfg.max_retries + 1
        for intento in range(intentos):
            try:
                respuesta = self.session.post(
                    self.url, data=cuerpo, headers=self.headers(),
                    timeout=self.cfg.request_timeout
                )
            except ERRORES_DE_USO as error:
                raise ConfigError(f'{self.url}: {type(error).__name__}: {error}') from None
            except requests.RequestException as error:
                motivo = f'{type(error).__name__}: {error}'
            else:
                if respuesta.status_code in (401, 403):
                    raise AuthError(f'{self.url}: HTTP {respuesta.status_code}')
                if respuesta.status_code < 400:
                    return respuesta
                if respuesta.status_code < 500:
                    raise ProtocolError(f'{self.url}: HTTP {respuesta.status_code}')
                motivo = f'HTTP {respuesta.status_code}'
            if intento == intentos - 1:
                raise TransportError(f'{self.url}: {motivo} después de {intentos} intentos')
            espera = 2 ** intento
            logger.warning('%s: %s, reintento en %d s', self.url, motivo, espera)
            self.sleep(espera)

    def complete(self, mensajes, tools, purpose='turn'):
        cuerpo = self.solicitud(mensajes, tools)
        inicio = time.perf_counter()
        respuesta = self.enviar(cuerpo)
        segundos = time.perf_counter() - inicio
        try:
            datos = respuesta.json()
        except ValueError:
            raise ProtocolError(f'{self.url}: el cuerpo no es JSON') from None
        intercambio = parsear_respuesta(self.cfg, datos, tools, segundos)
        logger.debug('%s (%s): %d llamadas', self.cfg.model, purpose,
                     len(intercambio.tool_calls))
        return intercambio._replace(request=cuerpo)
