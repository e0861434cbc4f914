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
import re
from collections import namedtuple
from cached_property import cached_property
from pampero import helpers
from pampero.excepciones import RoleViolation, OrderViolation, InvalidToolDefinition


ROLES = ('system', 'user', 'assistant', 'tool')

KINDS = ('string', 'integer', 'number', 'boolean', 'enum', 'array')

_NOMBRE_HERRAMIENTA = re.compile(r'[a-z][a-z0-9_]*\Z')

ParamSpec = namedtuple(
    'ParamSpec', 'name kind required description values items',
    defaults=(True, '', (), None)
)

ToolCall = namedtuple('ToolCall', 'call_id name arguments')

ToolResult = namedtuple('ToolResult', 'call_id status payload')

UsageRecord = namedtuple(
    'UsageRecord', 'input_tokens cached_tokens output_tokens wall_seconds reported',
    defaults=(0, 0, 0, 0.0, True)
)

TokenTotals = namedtuple(
    'TokenTotals', 'input_tokens cached_tokens output_tokens estimated',
    defaults=(0, 0, 0, False)
)

ChatMessage = namedtuple(
    'ChatMessage', 'role content tool_calls tool_call_id turn_index usage',
    defaults=(None, None, 0, None)
)

_TIPOS_JSON = {
    'string': 'string', 'integer': 'integer', 'number': 'number',
    'boolean': 'boolean', 'enum': 'string'
}


class ToolDefinition:
    """Definición de una herramienta en el formato de *function calling*.

    :param str name: Nombre de la herramienta, ``[a-z][a-z0-9_]*``.
    :param str description: Descripción que recibe el modelo.
    :param parameters: Secuencia de :class:`ParamSpec`.
    """
    def __init__(self, name, description, parameters=()):
        if not _NOMBRE_HERRAMIENTA.match(name or ''):
            raise InvalidToolDefinition(f'nombre de herramienta inválido: {name!r}')
        nombres = [param.name for param in parameters]
        if len(nombres) != len(set(nombres)):
            raise InvalidToolDefinition(f'{name}: parámetros repetidos')
        for param in parameters:
            if param.kind not in KINDS:
                raise InvalidToolDefinition(
                    f'{name}.{param.name}: tipo desconocido {param.kind!r}'
                )
            if param.kind == 'enum' and not param.values:
                raise InvalidToolDefinition(f'{name}.{param.name}: enum sin valores')
            if param.kind == 'array' and param.items not in _TIPOS_JSON:
                raise InvalidToolDefinition(
                    f'{name}.{param.name}: tipo de elemento inválido {param.items!r}'
                )
        self.name = name
        self.description = description
        self.parameters = tuple(parameters)

    def __repr__(self):
        return f'ToolDefinition({self.name!r})'

    def param(self, nombre):
        return self.parametros_por_nombre.get(nombre)

    @cached_property
    def parametros_por_nombre(self):
        return {param.name: param for param in self.parameters}

    @cached_property
    def requeridos(self):
        return tuple(param.name for param in self.parameters if param.required)

    def schema(self):
        """Esquema JSON que se envía a los backends en el campo ``tools``.

        El orden de las claves es fijo para que la serialización sea canónica.

        :rtype: dict
        """
        propiedades = {}
        for param in self.parameters:
            if param.kind == 'array':
                propiedad = {'type': 'array', 'items': {'type': _TIPOS_JSON[param.items]}}
            else:
                propiedad = {'type': _TIPOS_JSON[param.kind]}
                if param.kind == 'enum':
                    propiedad['enum'] = list(param.values)
            propiedad['description'] = param.description
            propiedades[param.name] = propiedad
        return {
            'type': 'function',
            'function': {
                'name': self.name,
                'description': self.description,
                'parameters': {
                    'type': 'object',
                    'properties': propiedades,
                    'required': list(self.requeridos),
                },
            },
        }


def tool_call_a_dict(call):
    return {'call_id': call.call_id, 'name': call.name, 'arguments': call.arguments}


def tool_call_desde_dict(datos):
    return ToolCall(datos['call_id'], datos['name'], dict(datos.get('arguments') or {}))


def usage_a_dict(usage):
    return dict(usage._asdict())


def usage_desde_dict(datos):
    return UsageRecord(**datos)


class Ledger:
    """Historial de mensajes de una ejecución. Solo admite agregar mensajes.

    El primer mensaje debe tener rol ``system`` y los ``turn_index`` crecen de a
    uno. Cada mensaje ``tool`` debe responder a exactamente una llamada previa
    de un mensaje ``assistant``.
    """
    def __init__(self):
        self._mensajes = []
        self._llamadas = {}
        self._respondidas = set()

    def __len__(self):
        return len(self._mensajes)

    def __iter__(self):
        return iter(self._mensajes)

    def __getitem__(self, indice):
        return self._mensajes[indice]

    @property
    def messages(self):
        return tuple(self._mensajes)

    @property
    def siguiente_turno(self):
        if not self._mensajes:
            return 0
        return self._mensajes[-1].turn_index + 1

    def append(self, msg):
        """Agrega un mensaje validando los invariantes de rol y orden.

        :param msg: Una instancia de :class:`ChatMessage`.
        :returns: El mismo ledger.
        :raises RoleViolation: Si ``tool_calls`` o ``tool_call_id`` están mal
            ubicados.
        :raises OrderViolation: Si ``turn_index`` no es el siguiente.
        """
        if msg.role not in ROLES:
            raise RoleViolation(f'rol desconocido: {msg.role!r}')
        if not self._mensajes and msg.role != 'system':
            raise RoleViolation('el primer mensaje debe tener rol system')
        if msg.tool_calls and msg.role != 'assistant':
            raise RoleViolation(f'tool_calls en un mensaje {msg.role}')
        if (msg.tool_call_id is not None) != (msg.role == 'tool'):
            raise RoleViolation(f'tool_call_id mal ubicado en un mensaje {msg.role}')
        if msg.turn_index != self.siguiente_turno:
            raise OrderViolation(
                f'turn_index {msg.turn_index}, se esperaba {self.siguiente_turno}'
            )
        if msg.role == 'assistant' and msg.tool_calls:
            ids = [call.call_id for call in msg.tool_calls]
            if len(ids) != len(set(ids)) or any(i in self._llamadas for i in ids):
                raise RoleViolation(f'call_id repetido en {ids}')
        if msg.role == 'tool':
            if msg.tool_call_id not in self._llamadas:
                raise RoleViolation(f'{msg.tool_call_id}: no hay una llamada previa')
            if msg.tool_call_id in self._respondidas:
                raise RoleViolation(f'{msg.tool_call_id}: la llamada ya fue respondida')
            self._respondidas.add(msg.tool_call_id)
        if msg.role == 'assistant' and msg.tool_calls:
            for call in msg.tool_calls:
                self._llamadas[call.call_id] = call
            msg = msg._replace(tool_calls=tuple(msg.tool_calls))
        elif msg.tool_calls is not None and not msg.tool_calls:
            msg = msg._replace(tool_calls=None)
        self._mensajes.append(msg)
        return self

    def add(self, role, content, tool_calls=None, tool_call_id=None, usage=None):
        """Atajo de :meth:`append` que asigna el ``turn_index`` siguiente."""
        return self.append(ChatMessage(
            role, content, tool_calls, tool_call_id, self.siguiente_turno, usage
        ))

    def llamada(self, call_id):
        return self._llamadas.get(call_id)

    def token_totals(self):
        return token_totals(self)

    def to_records(self):
        """Registros del formato de transcripción, uno por mensaje.

        :rtype: list
        """
        registros = []
        for msg in self._mensajes:
            registro = {'turn_index': msg.turn_index, 'role': msg.role,
                        'content': msg.content}
            if msg.tool_calls:
                registro['tool_calls'] = [tool_call_a_dict(c) for c in msg.tool_calls]
            if msg.tool_call_id is not None:
                registro['tool_call_id'] = msg.tool_call_id
            if msg.usage is not None:
                registro['usage'] = usage_a_dict(msg.usage)
            registros.append(registro)
        return registros

    @classmethod
    def from_records(cls, registros):
        ledger = cls()
        for registro in registros:
            tool_calls = registro.get('tool_calls')
            usage = registro.get('usage')
            ledger.append(ChatMessage(
                registro['role'], registro['content'],
                [tool_call_desde_dict(c) for c in tool_calls] if tool_calls else None,
                registro.get('tool_call_id'), registro['turn_index'],
                usage_desde_dict(usage) if usage is not None else None
            ))
        return ledger

    def replay(self):
        """Reconstruye un ledger nuevo agregando los mismos mensajes."""
        return Ledger.from_records(self.to_records())

    def serializar(self):
        return ''.join(
            json.dumps(registro, ensure_ascii=False) + '\n'
            for registro in self.to_records()
        )


def append(ledger, msg):
    return ledger.append(msg)


def _palabras_mensaje(msg):
    palabras = helpers.contar_palabras(msg.content)
    for call in msg.tool_calls or ():
        palabras += helpers.contar_palabras(helpers.json_canonico(call.arguments))
    return palabras


def token_totals(ledger):
    """Suma el consumo de tokens de todos los intercambios del ledger.

    Los intercambios sin consumo informado por el backend (``usage`` ausente o
    ``reported=False``) aportan la estimación ``ceil(palabras * 4 / 3)``: la
    entrada se estima con los mensajes agregados desde el mensaje ``assistant``
    anterior y la salida con el contenido del propio mensaje.

    :returns: Una instancia de :class:`TokenTotals`.
    """
    entrada = cache = salida = 0
    estimado = False
    palabras_pendientes = 0
    for msg in ledger:
        if msg.role != 'assistant':
            palabras_pendientes += _palabras_mensaje(msg)
            continue
        usage = msg.usage
        if usage is not None and usage.reported:
            entrada += usage.input_tokens
            cache += usage.cached_tokens
            salida += usage.output_tokens
        else:
            entrada += helpers.estimar_tokens(palabras_pendientes)
            salida += helpers.estimar_tokens(_palabras_mensaje(msg))
            estimado = True
        palabras_pendientes = 0
    return TokenTotals(entrada, cache, salida, estimado)


def sumar_totales(*totales):
    return TokenTotals(
        sum(t.input_tokens for t in totales), sum(t.cached_tokens for t in totales),
        sum(t.output_tokens for t in totales), any(t.estimated for t in totales)
    )


def write_transcript(ledger, ruta):
    with open(ruta, 'w', encoding='utf-8', newline='\n') as archivo:
        archivo.write(ledger.serializar())


def read_transcript(ruta):
    return Ledger.from_records(helpers.leer_jsonl(ruta))
