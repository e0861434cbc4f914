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
from pampero.backends import ReplayEntry, ReplayScript
from pampero.ledger import ToolCall, UsageRecord
from pampero.sandbox import Sandbox
from .excepciones import TemplateError
from .interpreter import interpret_trajectory

logger = logging.getLogger(__name__)

# Uso declarado en cada respuesta de un guion.
USO_GUION = UsageRecord(500, 0, 50, 0.0, True)

# Turnos de reintento por grupo cuando la corrección también falla.
MAX_REINTENTOS = 8


def _inferir_etapas(wf, llamadas):
    etapas = []
    previa = None
    for call in llamadas:
        etapa = previa
        if call.name != 'final_answer' or previa is None:
            etapa = next(
                (e.name for e in wf.states if call.name in e.allowed_tools), previa
            )
        if etapa is None:
            raise TemplateError(f'{wf.name}: ningún estado habilita {call.name}')
        etapas.append(etapa)
        previa = etapa
    return etapas


def _grupos(task, wf, llamadas):
    etapas = task.stages or _inferir_etapas(wf, llamadas)
    grupos = []
    for call, etapa in zip(llamadas, etapas):
        if grupos and grupos[-1][0] == etapa:
            grupos[-1][1].append(call)
        else:
            grupos.append((etapa, [call]))
    return grupos


def _simular(sandbox, llamadas):
    """Ejecuta las llamadas como lo haría el agente.

    :returns: Índice de la primera llamada que falla o ``None``.
    """
    for i, call in enumerate(llamadas):
        if sandbox.execute(call._replace(call_id=f's{i}')).status != 'ok':
            return i
    return None


class _Guion:
    def __init__(self, task_id, terminar_en):
        self.task_id = task_id
        self.terminar_en = terminar_en
        self.entradas = []
        self.turnos = 0

    def agregar(self, canal, texto, llamadas=()):
        self.entradas.append(ReplayEntry(canal, None, texto, tuple(llamadas), USO_GUION))

    def turno(self, texto, llamadas):
        self.turnos += 1
        if self.turnos == self.terminar_en:
            texto += '\nTERMINATE'
        self.agregar('turn', texto, llamadas)


def build_gold_script(task, workflow, world, fault_plan=None, premature_terminate_at=None):
    """Construye el guion de replay que sigue la trayectoria esperada.

    Las llamadas se agrupan en turnos según la etapa de la plantilla y cada
    turno anuncia la etapa siguiente; el último anuncia el estado terminal y
    ``TERMINATE``. Con un plan de fallas se simula el sandbox tal como lo verá
    el agente: cada falla de un turno agrega una reflexión que repite las
    llamadas pendientes y, si la corrección también falla, un turno de
    reintento.

    :param task: La tarea (:class:`TaskSpec`).
    :param workflow: El :class:`WorkflowSpec` de la tarea.
    :param fault_plan: Un :class:`FaultPlan` (opcional).
    :param int premature_terminate_at: Turno (desde 1) que además anuncia
        ``TERMINATE`` antes de tiempo.
    :rtype: ReplayScript
    """
    oro = interpret_trajectory(task.gold_trajectory, world, task.task_id)
    llamadas = [ToolCall(None, call.name, call.arguments) for call in oro.calls]
    grupos = _grupos(task, workflow, llamadas)
    guion = _Guion(task.task_id, premature_terminate_at)
    if workflow.intent_routes:
        intencion = task.intent_gold or workflow.default_intent
        guion.agregar('route', f'USER_INTENT = {intencion}')
        estado = workflow.intent_routes[intencion]
    else:
        estado = workflow.initial
    if grupos[0][0] != estado:
        guion.turno(f'Starting the workflow.\nCURRENT_STAGE = {grupos[0][0]}', [])
    sandbox = Sandbox(world, task.task_id, None, fault_plan)
    for g, (etapa, pendientes) in enumerate(grupos):
        ultimo = g == len(grupos) - 1
        siguiente = workflow.terminal_successor(etapa) if ultimo else grupos[g + 1][0]
        if siguiente is None:
            raise TemplateError(f'{workflow.name}: {etapa} no tiene un sucesor terminal')
        texto = f'Calling {", ".join(c.name for c in pendientes)}.\nCURRENT_STAGE = {siguiente}'
        if ultimo:
            texto += '\nTERMINATE'
        for _ in range(MAX_REINTENTOS):
            guion.turno(texto, pendientes)
            fallo = _simular(sandbox, pendientes)
            if fallo is None:
                break
            correctivas = pendientes[fallo:]
            guion.agregar(
                'reflect', 'The failure looks transient; retrying the same call.', correctivas
            )
            fallo = _simular(sandbox, correctivas)
            if fallo is None:
                break
            pendientes = correctivas[fallo:]
        else:
            logger.warning('%s: la etapa %s sigue fallando después de %d reintentos',
                           task.task_id, etapa, MAX_REINTENTOS)
    if premature_terminate_at:
        guion.agregar('confirm', 'Not finished yet: the workflow still has pending steps.')
    guion.agregar('confirm', 'All requested steps are done and the answer was submitted.\n'
                  'TERMINATE')
    return ReplayScript(task.task_id, guion.entradas)
