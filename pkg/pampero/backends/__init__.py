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

from .excepciones import (
    ErrorBackend, TransportError, ProtocolError, AuthError, ReplayExhausted, ConfigError
)
from .config import BackendConfig, backend_config, load_backend_config
from .wire import ChatExchange, cuerpo_solicitud, parsear_respuesta, serializar
from .text_tools import extract_tool_calls_text
from .http import Backend, HttpBackend, PURPOSES
from .replay import (
    ReplayEntry, ReplayScript, ReplayBackend, load_replay_bundle, write_replay_bundle,
    clave_mensaje
)
from .fixtures import record_fixture


def make_backend(cfg, script=None, session=None):
    """Crea el cliente que corresponde a ``cfg.kind``.

    :param script: :class:`ReplayScript` de la tarea, solo para ``replay``.
    :raises ConfigError: Si falta el guion de un backend de replay.
    """
    if cfg.kind == 'replay':
        if script is None:
            raise ConfigError('el backend de replay necesita un guion')
        return ReplayBackend(cfg, script)
    return HttpBackend(cfg, session=session)


def complete(cfg, mensajes, tools, script=None, purpose='turn', session=None):
    """Un único intercambio de chat con el backend de ``cfg``.

    El cliente se crea y se cierra en cada llamada.

    :rtype: ChatExchange
    """
    with make_backend(cfg, script, session) as backend:
        return backend.complete(mensajes, tools, purpose)
