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
from collections import namedtuple
from pampero import helpers
from pampero.ledger import ToolCall, UsageRecord
from .excepciones import ProtocolError
from .text_tools import catalogo, extract_tool_calls_text, render_tool_call

logger = logging.getLogger(__name__)

ChatExchange = namedtuple('ChatExchange', 'text tool_calls usage request', defaults=(None,))

RUTAS = {'openai_compat': '/v1/chat/completions', 'ollama': '/api/chat'}


def serializar(cuerpo):
    """Cuerpo de la solicitud en bytes. El orden de los campos lo fija quien
    arma el ``dict``; no hay espacios."""
    return json.dumps(cuerpo, ensure_ascii=False, separators=(',', ':')).encode('utf-8')


def _llamada_openai(call):
    return {
        'id': call.call_id,
        'type': 'function',
        'function': {'name': call.name, 'arguments': helpers.json_canonico(call.arguments)},
    }


def _llamada_ollama(call):
    return {'function': {'name': call.name, 'arguments': call.arguments}}


def mensajes_nativos(kind, mensajes):
    salida = []
    for msg in mensajes:
        if msg.role == 'assistant':
            mensaje = {'role': 'assistant', 'content': msg.content or ''}
            if msg.tool_calls:
                convertir = _llamada_openai if kind == 'openai_compat' else _llamada_ollama
                mensaje['tool_calls'] = [convertir(call) for call in msg.tool_calls]
        elif msg.role == 'tool':
            mensaje = {'role': 'tool', 'content': msg.content}
            if kind == 'openai_compat':
                mensaje['tool_call_id'] = msg.tool_call_id
        else:
            mensaje = {'role': msg.role, 'content': msg.content}
        salida.append(mensaje)
    return salida


def mensajes_texto(mensajes, tools):
    """Vista de los mensajes para modelos sin soporte nativo de herramientas.

    El catálogo va al final del mensaje de sistema, las llamadas previas se
    reescriben como spans ``<tool_call>`` y los resultados como mensajes de
    usuario.
    """
    salida = []
    for msg in mensajes:
        if msg.role == 'system':
            contenido = msg.content
            if tools:
                contenido = f'{contenido}\n\n{catalogo(tools)}'
            salida.append({'role': 'system', 'content': contenido})
        elif msg.role == 'assistant':
            partes = [msg.content] if msg.content else []
            partes.extend(render_tool_call(call) for call in msg.tool_calls or ())
            salida.append({'role': 'assistant', 'content': '\n'.join(partes)})
        elif msg.role == 'tool':
            salida.append({
                'role': 'user', 'content': f'TOOL RESULT {msg.tool_call_id}:\n{msg.content}'
            })
        else:
            salida.append({'role': msg.role, 'content': msg.content})
    return salida


def cuerpo_solicitud(cfg, mensajes, tools):
    """Arma el cuerpo de la solicitud para el protocolo de ``cfg``.

    :rtype: dict
    """
    if cfg.tool_mode == 'text':
        vista = mensajes_texto(mensajes, tools)
        esquemas = []
    else:
        vista = mensajes_nativos(cfg.kind, mensajes)
        esquemas = [definicion.schema() for definicion in tools]
    temperatura = float(cfg.temperature)
    if cfg.kind == 'openai_compat':
        cuerpo = {'model': cfg.model, 'messages': vista}
        if esquemas:
            cuerpo['tools'] = esquemas
        cuerpo['temperature'] = temperatura
        cuerpo['stream'] = False
    else:
        cuerpo = {'model': cfg.model, 'messages': vista}
        if esquemas:
            cuerpo['tools'] = esquemas
        cuerpo['stream'] = False
        cuerpo['options'] = {'temperature': temperatura}
    return cuerpo


def _argumentos(crudos, nombre):
    if isinstance(crudos, dict):
        return crudos
    if crudos in (None, ''):
        return {}
    try:
        argumentos = json.loads(crudos)
    except (TypeError, ValueError):
        logger.warning('%s: argumentos ilegibles %.80r', nombre, crudos)
        return {}
    return argumentos if isinstance(argumentos, dict) else {}


def _llamadas(crudas):
    llamadas = []
    for cruda in crudas or ():
        try:
            funcion = cruda['function']
            nombre = funcion['name']
        except (KeyError, TypeError):
            raise ProtocolError('tool_calls con formato inválido') from None
        llamadas.append(ToolCall(
            cruda.get('id'), nombre, _argumentos(funcion.get('arguments'), nombre)
        ))
    return llamadas


def _uso_openai(datos, segundos):
    uso = datos.get('usage')
    if not isinstance(uso, dict):
        return UsageRecord(wall_seconds=segundos, reported=False)
    prompt = int(uso.get('prompt_tokens') or 0)
    detalles = uso.get('prompt_tokens_details') or {}
    cache = int(detalles.get('cached_tokens') or 0)
    return UsageRecord(
        max(prompt - cache, 0), cache, int(uso.get('completion_tokens') or 0), segundos
    )


def _uso_ollama(datos, segundos):
    if 'prompt_eval_count' not in datos and 'eval_count' not in datos:
        return UsageRecord(wall_seconds=segundos, reported=False)
    return UsageRecord(
        int(datos.get('prompt_eval_count') or 0), 0, int(datos.get('eval_count') or 0),
        segundos
    )


def parsear_respuesta(cfg, datos, tools, segundos=0.0):
    """Convierte el cuerpo de la respuesta en un :class:`ChatExchange`.

    :raises ProtocolError: Si el cuerpo no tiene la forma del protocolo.
    """
    try:
        if cfg.kind == 'openai_compat':
            mensaje = datos['choices'][0]['message']
            uso = _uso_openai(datos, segundos)
        else:
            mensaje = datos['message']
            uso = _uso_ollama(datos, segundos)
        texto = mensaje.get('content') or ''
    except (KeyError, IndexError, TypeError, AttributeError):
        raise ProtocolError('el cuerpo de la respuesta no tiene un mensaje') from None
    if not isinstance(texto, str):
        raise ProtocolError('el contenido del mensaje no es texto')
    if cfg.tool_mode == 'text':
        llamadas = extract_tool_calls_text(texto, tools)
    else:
        llamadas = _llamadas(mensaje.get('tool_calls'))
    return ChatExchange(texto, llamadas, uso)
