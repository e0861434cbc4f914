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
from collections import namedtuple
from .excepciones import UnknownCurrentState

logger = logging.getLogger(__name__)

TransitionDecision = namedtuple('TransitionDecision', 'kind state reason', defaults=('',))

FINAL_ANSWER = 'final_answer'


def validate_transition(spec, current, proposed, strict=False):
    """Decide si el estado propuesto por el modelo es una transición válida.

    Se acepta el propio estado, cualquier sucesor declarado y el estado de
    error (arista implícita desde todo estado no terminal). Un estado
    desconocido se recorta al estado actual; un estado conocido pero no
    permitido también se recorta, salvo en modo estricto, donde se rechaza.

    :param spec: Una instancia de :class:`WorkflowSpec`.
    :param str current: El estado actual.
    :param str proposed: El estado que propone el modelo.
    :param bool strict: Rechazar en lugar de recortar.
    :returns: Una instancia de :class:`TransitionDecision` con ``kind`` igual a
        ``accept``, ``clamp`` o ``reject``.
    """
    if current not in spec.estados:
        raise UnknownCurrentState(f'{spec.name}: estado actual desconocido {current!r}')
    if proposed == current or proposed in spec.successors(current):
        return TransitionDecision('accept', proposed)
    if proposed == spec.error_state and not spec.estados[current].is_terminal:
        return TransitionDecision('accept', proposed)
    if proposed not in spec.estados:
        razon = f'{current} -> {proposed}: estado desconocido'
        logger.info('transición recortada, %s', razon)
        return TransitionDecision('clamp', current, razon)
    razon = f'{current} -> {proposed}: transición no permitida'
    if strict:
        return TransitionDecision('reject', current, razon)
    logger.info('transición recortada, %s', razon)
    return TransitionDecision('clamp', current, razon)


def tools_for_state(spec, state, registry):
    """Definiciones de las herramientas habilitadas en un estado.

    Respeta el orden declarado en el workflow y agrega siempre
    ``final_answer`` al final.

    :param registry: ``dict`` nombre -> :class:`ToolDefinition`.
    :rtype: list
    """
    estado = spec.state(state)
    definiciones = [
        registry[nombre] for nombre in estado.allowed_tools
        if nombre != FINAL_ANSWER and nombre in registry
    ]
    if FINAL_ANSWER in registry:
        definiciones.append(registry[FINAL_ANSWER])
    else:
        from pampero.sandbox.registry import REGISTRY
        definiciones.append(REGISTRY[FINAL_ANSWER])
    return definiciones
