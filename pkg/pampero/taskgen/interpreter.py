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
from collections import namedtuple
from pampero.ledger import ToolCall
from pampero.sandbox import REGISTRY, Sandbox
from pampero.sandbox.registry import es_handle
from .excepciones import ErrorTaskgen, SlotError

InterpretedRun = namedtuple('InterpretedRun', 'calls results answer sandbox')

_TIPOS_HANDLE = ('image_set', 'detection_set')


def interpret_trajectory(matchers, world, task_id='gold', sandbox=None):
    """Ejecuta literalmente una trayectoria esperada contra el sandbox.

    Cada parámetro de tipo handle que el matcher no fija se enlaza con el
    último handle de imágenes o detecciones producido.

    :param matchers: Secuencia de :class:`CallMatcher`.
    :returns: Una instancia de :class:`InterpretedRun`; ``answer`` es el último
        ``value`` (o ``count``) devuelto antes de ``final_answer``.
    :raises ErrorTaskgen: Si alguna llamada falla.
    """
    sandbox = sandbox or Sandbox(world, task_id)
    ultimo = None
    derivado = None
    llamadas, resultados = [], []
    for k, matcher in enumerate(matchers, 1):
        argumentos = dict(matcher.required_args)
        for param in REGISTRY[matcher.name].parameters:
            if es_handle(param) and param.name not in argumentos:
                if ultimo is None:
                    raise SlotError(f'{matcher.name}: no hay un handle previo para {param.name}')
                argumentos[param.name] = ultimo
        call = ToolCall(f'g{k}', matcher.name, argumentos)
        resultado = sandbox.execute(call)
        if resultado.status != 'ok':
            raise ErrorTaskgen(f'{task_id}: {matcher.name} falló ({resultado.payload})')
        payload = json.loads(resultado.payload)
        if payload.get('kind') in _TIPOS_HANDLE:
            ultimo = payload['handle']
        if matcher.name != 'final_answer':
            derivado = payload.get('value', payload.get('count', derivado))
        llamadas.append(call)
        resultados.append(resultado)
    return InterpretedRun(llamadas, resultados, derivado, sandbox)
