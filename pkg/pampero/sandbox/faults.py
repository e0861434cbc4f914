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
from .excepciones import ConfigSandboxError
from .registry import DATA_TOOLS
from .rng import semilla, uniforme

logger = logging.getLogger(__name__)

FaultPlan = namedtuple('FaultPlan', 'fault_rate seed scope', defaults=(0.0, 0, DATA_TOOLS))

SIN_FALLAS = FaultPlan(0.0, 0, ())


def arm_faults(plan):
    """Valida un plan de fallas y lo devuelve normalizado.

    :param plan: Una instancia de :class:`FaultPlan`.
    :raises ConfigSandboxError: Si la tasa no está en [0, 1].
    """
    if not 0 <= plan.fault_rate <= 1:
        raise ConfigSandboxError(f'fault_rate fuera de [0, 1]: {plan.fault_rate}')
    return plan._replace(scope=frozenset(plan.scope))


def next_fault(plan, task_id, call_index):
    """Decide si la llamada ``call_index`` de la tarea falla.

    Es una función pura de ``(seed, task_id, call_index)``.

    :rtype: bool
    """
    if plan.fault_rate <= 0:
        return False
    if plan.fault_rate >= 1:
        return True
    return uniforme(semilla(plan.seed, task_id, call_index)) < plan.fault_rate


def fires(plan, task_id, call_index, tool):
    dispara = tool in plan.scope and next_fault(plan, task_id, call_index)
    if dispara:
        logger.debug('falla inyectada en %s #%d (%s)', task_id, call_index, tool)
    return dispara
