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
import re
from pampero import helpers, reportes
from pampero.ledger import ToolCall

logger = logging.getLogger(__name__)

_BLOQUE = re.compile(r'```[A-Za-z_]*[ \t]*\n?(.*?)```', re.DOTALL)

_SPAN = re.compile(r'<tool_call>(.*?)</tool_call>', re.DOTALL)

_ENTERO = re.compile(r'[+-]?\d+\Z')

_NUMERO = re.compile(r'[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\Z')


def _coercionar(valor, kind):
    if not isinstance(valor, str):
        return valor
    texto = valor.strip()
    if kind == 'integer' and _ENTERO.match(texto):
        return int(texto)
    if kind == 'number' and _NUMERO.match(texto):
        return int(texto) if _ENTERO.match(texto) else float(texto)
    return valor


def coercionar_argumentos(definicion, argumentos):
    """Convierte textos numéricos al tipo declarado del parámetro.

    Solo se convierten valores que no pierden información; el resto queda
    como texto.
    """
    resultado = {}
    for nombre, valor in argumentos.items():
        param = definicion.param(nombre)
        if param is None:
            resultado[nombre] = valor
        elif param.kind == 'array' and isinstance(valor, list):
            resultado[nombre] = [_coercionar(v, param.items) for v in valor]
        else:
            resultado[nombre] = _coercionar(valor, param.kind)
    return resultado


def _candidatos(texto):
    coincidencias = sorted(
        [m for m in _BLOQUE.finditer(texto)] + [m for m in _SPAN.finditer(texto)],
        key=lambda m: m.start()
    )
    fin = -1
    for coincidencia in coincidencias:
        if coincidencia.start() < fin:
            continue
        fin = coincidencia.end()
        yield coincidencia.group(1).strip()


def extract_tool_calls_text(texto, tools):
    """Extrae las llamadas a herramientas de una respuesta en modo texto.

    Reconoce bloques de código con un objeto ``{"name": ..., "arguments":
    {...}}`` y spans ``<tool_call>{...}</tool_call>``, en el orden en que
    aparecen. Las llamadas a herramientas que no están en ``tools`` se
    descartan y se registran en el log.

    :param str texto: Texto del asistente.
    :param tools: Secuencia de :class:`ToolDefinition`.
    :returns: Lista de :class:`ToolCall` sin ``call_id``.
    :rtype: list
    """
    definiciones = {definicion.name: definicion for definicion in tools}
    llamadas = []
    for candidato in _candidatos(texto or ''):
        try:
            objeto = json.loads(candidato)
        except ValueError:
            logger.warning('span de llamada ilegible: %.80s', candidato)
            continue
        for llamada in objeto if isinstance(objeto, list) else [objeto]:
            if not isinstance(llamada, dict) or 'name' not in llamada:
                logger.warning('span sin nombre de herramienta: %.80s', candidato)
                continue
            argumentos = llamada.get('arguments') or {}
            if not isinstance(argumentos, dict):
                logger.warning('%s: los argumentos no son un objeto', llamada['name'])
                continue
            definicion = definiciones.get(llamada['name'])
            if definicion is None:
                logger.warning('llamada descartada, herramienta desconocida %r',
                               llamada['name'])
                continue
            llamadas.append(ToolCall(
                None, definicion.name, coercionar_argumentos(definicion, argumentos)
            ))
    return llamadas


def render_tool_call(call):
    contenido = helpers.json_canonico({'name': call.name, 'arguments': call.arguments})
    return f'<tool_call>{contenido}</tool_call>'


def catalogo(tools):
    """Catálogo de herramientas que se agrega al mensaje de sistema en modo texto."""
    return reportes.reporte('catalogo_herramientas.txt', tools=tools)
