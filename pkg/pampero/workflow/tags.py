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

import re
from collections import namedtuple


StageTag = namedtuple('StageTag', 'stage raw_span')

IntentTag = namedtuple('IntentTag', 'intent raw_span')


def _patron(palabra_clave):
    return re.compile(
        rf'(?<![A-Za-z0-9_]){palabra_clave}[ \t]*=[ \t]*([A-Za-z][A-Za-z0-9_]*)'
    )


_STAGE = _patron('CURRENT_STAGE')

_INTENT = _patron('USER_INTENT')

_TERMINATE = re.compile(r'(?<![A-Za-z0-9_])TERMINATE(?![A-Za-z0-9_])')


def _ultima(patron, texto):
    ultima = None
    for ultima in patron.finditer(texto or ''):
        pass
    return ultima


def parse_stage(texto):
    """Extrae la última etiqueta ``CURRENT_STAGE = <estado>`` del texto.

    La palabra clave distingue mayúsculas y el identificador termina en el
    primer carácter que no sea alfanumérico o ``_``, de modo que la puntuación
    final queda afuera.

    :param str texto: Texto de la respuesta del asistente.
    :returns: Una instancia de :class:`StageTag` o ``None``.
    """
    coincidencia = _ultima(_STAGE, texto)
    if coincidencia is None:
        return None
    return StageTag(coincidencia.group(1), coincidencia.span())


def parse_intent(texto):
    """Como :func:`parse_stage` pero para ``USER_INTENT = <intención>``."""
    coincidencia = _ultima(_INTENT, texto)
    if coincidencia is None:
        return None
    return IntentTag(coincidencia.group(1), coincidencia.span())


def has_terminate(texto):
    return _TERMINATE.search(texto or '') is not None
