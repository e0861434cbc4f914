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
from collections import namedtuple, defaultdict
from pampero import helpers
from pampero.ledger import ToolCall, UsageRecord, usage_a_dict
from .excepciones import ReplayExhausted, ConfigError
from .http import Backend, PURPOSES, _verificar
from .wire import ChatExchange

logger = logging.getLogger(__name__)

ReplayEntry = namedtuple(
    'ReplayEntry', 'channel key text tool_calls usage', defaults=('turn', None, '', (), None)
)


def clave_mensaje(msg):
    """Clave de un mensaje para las entradas indexadas por hash: sha256 del
    JSON canónico de su rol, contenido y ``tool_call_id``."""
    return helpers.sha256(helpers.json_canonico(
        {'role': msg.role, 'content': msg.content, 'tool_call_id': msg.tool_call_id}
    ))


def _ultimo_no_asistente(mensajes):
    for msg in reversed(mensajes):
        if msg.role != 'assistant':
            return msg
    return None


class ReplayScript:
    """Guion de respuestas de una tarea.

    :param str task_id: Identificador de la tarea.
    :param entries: Secuencia de :class:`ReplayEntry`.
    """
    def __init__(self, task_id, entries):
        self.task_id = task_id
        self.entries = tuple(entries)
        for entrada in self.entries:
            if entrada.channel not in PURPOSES:
                raise ConfigError(f'{task_id}: canal desconocido {entrada.channel!r}')

    def __len__(self):
        return len(self.entries)

    def to_dict(self):
        entradas = []
        for entrada in self.entries:
            registro = {'channel': entrada.channel, 'text': entrada.text}
            if entrada.key is not None:
                registro['key'] = entrada.key
            registro['tool_calls'] = [
                {'name': call.name, 'arguments': call.arguments} for call in entrada.tool_calls
            ]
            if entrada.usage is not None:
                registro['usage'] = usage_a_dict(entrada.usage)
            entradas.append(registro)
        return {'task_id': self.task_id, 'entries': entradas}

    @classmethod
    def from_dict(cls, datos):
        entradas = []
        for registro in datos.get('entries', ()):
            uso = registro.get('usage')
            entradas.append(ReplayEntry(
                registro.get('channel', 'turn'), registro.get('key'),
                registro.get('text', ''),
                tuple(ToolCall(None, c['name'], dict(c.get('arguments') or {}))
                      for c in registro.get('tool_calls', ())),
                UsageRecord(**uso) if uso is not None else None
            ))
        return cls(datos['task_id'], entradas)


def load_replay_bundle(ruta):
    """Lee un paquete de guiones: una línea JSON ``{task_id, entries}`` por tarea.

    :returns: ``dict`` ``task_id`` -> :class:`ReplayScript`.
    """
    try:
        registros = helpers.leer_jsonl(ruta)
    except OSError as error:
        raise ConfigError(f'{ruta}: {error.strerror}') from None
    except ValueError as error:
        raise ConfigError(f'{ruta}: JSON inválido ({error})') from None
    guiones = {}
    for registro in registros:
        guion = ReplayScript.from_dict(registro)
        guiones[guion.task_id] = guion
    return guiones


def write_replay_bundle(ruta, guiones):
    helpers.escribir_jsonl(ruta, [guion.to_dict() for guion in guiones])


class ReplayBackend(Backend):
    """Backend determinístico que reproduce un :class:`ReplayScript`.

    Las entradas indexadas por hash tienen prioridad y se consumen una sola
    vez; el resto se consume en orden dentro de su canal. Su estado pertenece
    a una única ejecución.
    """
    def __init__(self, cfg, script):
        super().__init__(cfg)
        self.script = script
        self.cursores = defaultdict(int)
        self.ordinales = defaultdict(list)
        self.indexadas = {}
        for entrada in script.entries:
            if entrada.key is None:
                self.ordinales[entrada.channel].append(entrada)
            else:
                self.indexadas[entrada.key] = entrada

    def complete(self, mensajes, tools, purpose='turn'):
        _verificar(mensajes)
        ultimo = _ultimo_no_asistente(mensajes)
        clave = clave_mensaje(ultimo) if ultimo is not None else None
        entrada = self.indexadas.pop(clave, None)
        if entrada is None:
            canal = self.ordinales[purpose]
            cursor = self.cursores[purpose]
            if cursor >= len(canal):
                raise ReplayExhausted(
                    f'{self.script.task_id}: el canal {purpose!r} no tiene más entradas'
                )
            entrada = canal[cursor]
            self.cursores[purpose] += 1
        uso = entrada.usage or UsageRecord(reported=False)
        return ChatExchange(entrada.text, list(entrada.tool_calls), uso)
