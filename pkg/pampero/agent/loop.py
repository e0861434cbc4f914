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

import itertools
import logging
from collections import namedtuple
from pampero.backends import Backend, ErrorBackend, make_backend
from pampero.ledger import ChatMessage, Ledger, ToolResult, token_totals, tool_call_a_dict
from pampero.sandbox import REGISTRY, Sandbox, full_registry
from pampero.workflow import has_terminate, parse_intent, parse_stage
from pampero.workflow import tools_for_state, validate_transition
from . import prompts
from .config import AgentConfig
from .excepciones import BackendFailure, ConfigAgenteError
from .records import RunRecord, write_run

logger = logging.getLogger(__name__)

TerminationDecision = namedtuple('TerminationDecision', 'confirmed reason')


class _TransicionRechazada(Exception):
    pass


class _BackendAuditado:
    """Registra cada llamada al backend con su propósito y turno, y convierte
    las fallas del backend en :class:`BackendFailure`."""
    def __init__(self, backend, registro):
        self.backend = backend
        self.registro = registro
        self.turno = 0

    def complete(self, mensajes, tools, purpose='turn'):
        self.registro.append({'purpose': purpose, 'turn': self.turno})
        try:
            return self.backend.complete(mensajes, tools, purpose)
        except ErrorBackend as error:
            raise BackendFailure(f'{type(error).__name__}: {error}') from error


def _con_ids(llamadas, contador):
    return [call._replace(call_id=f'c{next(contador)}') for call in llamadas]


def handle_error(last_call, last_result, tooldef, backend, ledger, tools, contador):
    """Llamada de reflexión ante una herramienta que falló.

    Agrega al historial el bloque SELF-REFLECT con la llamada, el error y la
    definición de la herramienta, hace exactamente una llamada al backend y
    agrega la respuesta correctiva.

    :returns: Las llamadas correctivas, con ``call_id`` asignado.
    :rtype: list
    """
    ledger.add('user', prompts.reflection_message(last_call, last_result, tooldef))
    intercambio = backend.complete(ledger.messages, tools, 'reflect')
    correctivas = _con_ids(intercambio.tool_calls, contador)
    ledger.add('assistant', intercambio.text, correctivas or None, usage=intercambio.usage)
    return correctivas


def handle_terminate(ledger, backend):
    """Pide al modelo que confirme el cierre resumiendo lo que produjo.

    Una falla del backend se toma como rechazo.

    :rtype: TerminationDecision
    """
    ledger.add('user', prompts.confirmation_message())
    try:
        intercambio = backend.complete(ledger.messages, [], 'confirm')
    except BackendFailure as error:
        logger.info('validación del cierre sin respuesta: %s', error)
        return TerminationDecision(False, str(error))
    ledger.add('assistant', intercambio.text, usage=intercambio.usage)
    if has_terminate(intercambio.text):
        return TerminationDecision(True, 'cierre confirmado')
    return TerminationDecision(False, 'el modelo no confirmó el cierre')


def route_intent(task, wf, backend, ledger):
    """Elige la intención de la consulta y su estado de entrada.

    Si la respuesta no nombra una intención válida se reintenta una vez; luego
    se usa la intención por defecto del workflow.

    :returns: ``(intencion, estado, diagnosticos)``.
    :rtype: tuple
    """
    diagnosticos = []
    for intento in range(2):
        ledger.add('user', prompts.routing_message(wf, reintento=intento > 0))
        try:
            intercambio = backend.complete(ledger.messages, [], 'route')
        except BackendFailure as error:
            diagnosticos.append(f'ruteo: {error}')
            break
        ledger.add('assistant', intercambio.text, usage=intercambio.usage)
        etiqueta = parse_intent(intercambio.text)
        if etiqueta is not None and etiqueta.intent in wf.intent_routes:
            return etiqueta.intent, wf.intent_routes[etiqueta.intent], diagnosticos
        diagnosticos.append(f'ruteo: intención inválida en el intento {intento + 1}')
    intencion = wf.default_intent
    diagnosticos.append(f'ruteo: se usa la intención por defecto {intencion}')
    logger.info('%s: %s', task.task_id, diagnosticos[-1])
    return intencion, wf.intent_routes[intencion], diagnosticos


class AgentRun:
    """Una ejecución del agente sobre una tarea.

    Es estrictamente secuencial y es dueña de su historial, su sandbox y su
    backend; el mundo y el workflow se comparten en modo lectura.
    """
    def __init__(self, task, wf, backend, world, cfg, out_dir=None, fault_plan=None):
        if cfg.stateflow and wf is None:
            raise ConfigAgenteError('el modo stateflow necesita un workflow')
        self.task = task
        self.wf = wf
        self.cfg = cfg
        self.out_dir = out_dir
        self.sandbox = Sandbox(world, task.task_id, out_dir, fault_plan)
        self.ledger = Ledger()
        self.contador = itertools.count(1)
        backend_cfg = backend.cfg
        self.record = RunRecord(
            task.task_id, cfg.mode, wf.name if wf is not None else None,
            billing=backend_cfg.facturacion, pricing_model=backend_cfg.modelo_precios
        )
        self.backend = _BackendAuditado(backend, self.record.backend_calls)
        self.estado = None
        self.omisiones = 0
        self.recordatorio = False
        self.fin = None

    def run(self):
        self.ledger.add('system', prompts.system_message(self.wf, self.cfg.mode))
        self.ledger.add('user', self.task.query)
        abortada = False
        try:
            self._iniciar()
            for turno in range(1, self.cfg.max_turns + 1):
                self.backend.turno = turno
                if self._turno(turno):
                    break
        except BackendFailure as error:
            abortada = True
            self.record.diagnostics.append(f'ejecución abortada: {error}')
            logger.warning('%s: ejecución abortada, %s', self.task.task_id, error)
        except _TransicionRechazada as error:
            abortada = True
            self.record.diagnostics.append(f'transición rechazada: {error}')
        return self._cerrar(abortada)

    def _mover(self, estado):
        if estado != self.estado:
            self.estado = estado
            self.record.states_visited.append(estado)

    def _iniciar(self):
        if not self.cfg.stateflow:
            return
        self._mover(self.wf.initial)
        if self.wf.intent_routes:
            intencion, entrada, diagnosticos = route_intent(
                self.task, self.wf, self.backend, self.ledger
            )
            self.record.intent_resolved = intencion
            self.record.diagnostics.extend(diagnosticos)
            self._mover(entrada)

    def _herramientas(self, estado):
        if self.cfg.tool_gating:
            return tools_for_state(self.wf, estado, REGISTRY)
        return full_registry()

    def _turno(self, turno):
        estado_previo = self.estado
        tools = self._herramientas(estado_previo)
        vista = list(self.ledger.messages)
        if self.cfg.stateflow:
            vista.append(ChatMessage(
                'user', prompts.state_message(self.wf, estado_previo, tools, self.recordatorio),
                turn_index=self.ledger.siguiente_turno
            ))
        intercambio = self.backend.complete(vista, tools, 'turn')
        llamadas = _con_ids(intercambio.tool_calls, self.contador)
        self.ledger.add('assistant', intercambio.text, llamadas or None, usage=intercambio.usage)
        fallida = self._ejecutar(llamadas, tools, estado_previo, turno, False)
        pendiente = False
        if fallida is not None and self.cfg.error_state_enabled:
            pendiente = not self._reflexionar(fallida, estado_previo, turno)
        terminal = False
        if self.cfg.stateflow:
            terminal = self._etapa(intercambio.text, pendiente, turno)
        self.record.turns.append({
            'turn': turno, 'state_before': estado_previo, 'state_after': self.estado,
            'assistant_text': intercambio.text, 'calls': [c.call_id for c in llamadas],
            'usage': intercambio.usage._asdict(),
        })
        if terminal:
            self.fin = 'terminal'
            return True
        if not has_terminate(intercambio.text) or pendiente:
            return False
        if not self.cfg.terminate_validation:
            self.fin = 'terminate'
            return True
        decision = handle_terminate(self.ledger, self.backend)
        if decision.confirmed:
            self.fin = 'terminate'
            return True
        self.record.diagnostics.append(f'turno {turno}: cierre rechazado ({decision.reason})')
        return False

    def _ejecutar(self, llamadas, tools, estado, turno, correctiva):
        """Ejecuta las llamadas en orden y se detiene en el primer error.

        :returns: ``(llamada, resultado)`` del primer error o ``None``.
        """
        permitidas = {definicion.name for definicion in tools}
        fallida = None
        for call in llamadas:
            if fallida is not None:
                self.ledger.add(
                    'tool', 'Skipped: una llamada anterior del turno falló',
                    tool_call_id=call.call_id
                )
                continue
            if self.cfg.tool_gating and call.name not in permitidas:
                resultado = ToolResult(
                    call.call_id, 'error',
                    f'UnknownTool: {call.name!r} no está habilitada en el estado {estado}'
                )
                self.ledger.add('tool', resultado.payload, tool_call_id=call.call_id)
                self.record.diagnostics.append(f'turno {turno}: {resultado.payload}')
                fallida = (call, resultado)
                continue
            resultado = self.sandbox.execute(call)
            self.ledger.add('tool', resultado.payload, tool_call_id=call.call_id)
            self.record.trajectory.append({
                'turn': turno, 'state': estado, 'corrective': correctiva,
                'call': tool_call_a_dict(call),
                'result': {'status': resultado.status, 'payload': resultado.payload},
            })
            if resultado.status == 'error':
                fallida = (call, resultado)
        return fallida

    def _reflexionar(self, fallida, estado_previo, turno):
        """Estado de error: reflexión y ejecución inmediata de la corrección.

        :returns: ``True`` si todas las llamadas correctivas tuvieron éxito.
        """
        call, resultado = fallida
        error = self.wf.error_state if self.cfg.stateflow else None
        if error is not None:
            self._mover(error)
        tools = self._herramientas(estado_previo)
        correctivas = handle_error(
            call, resultado, REGISTRY.get(call.name), self.backend, self.ledger, tools,
            self.contador
        )
        if error is not None:
            self._mover(estado_previo)
        if not correctivas:
            self.record.diagnostics.append(f'turno {turno}: la reflexión no propuso llamadas')
            return False
        if self._ejecutar(correctivas, tools, estado_previo, turno, True) is not None:
            self.record.diagnostics.append(f'turno {turno}: la corrección también falló')
            return False
        return True

    def _etapa(self, texto, pendiente, turno):
        if pendiente:
            self.record.diagnostics.append(
                f'turno {turno}: etiqueta de etapa ignorada por errores sin resolver'
            )
            return False
        etiqueta = parse_stage(texto)
        if etiqueta is None:
            self.omisiones += 1
            self.recordatorio = True
            self.record.diagnostics.append(f'turno {turno}: falta CURRENT_STAGE')
            logger.info('%s: turno %d sin etiqueta de etapa', self.task.task_id, turno)
            if self.omisiones > self.cfg.reminder_cap and self.wf.error_state is not None:
                self._mover(self.wf.error_state)
                self.omisiones = 0
            return self.wf.is_terminal(self.estado)
        self.omisiones = 0
        self.recordatorio = False
        decision = validate_transition(
            self.wf, self.estado, etiqueta.stage, self.cfg.strict_transitions
        )
        if decision.kind != 'accept':
            self.record.diagnostics.append(f'turno {turno}: {decision.kind}, {decision.reason}')
        if decision.kind == 'reject':
            raise _TransicionRechazada(decision.reason)
        self._mover(decision.state)
        return self.wf.is_terminal(self.estado)

    def _cerrar(self, abortada):
        r = self.record
        r.final_answer = self.sandbox.answer
        r.artifacts = list(self.sandbox.artifacts)
        if r.artifacts:
            mapa = self.sandbox.maps[r.artifacts[-1]]
            r.map_detections = [
                {clave: f['properties'][clave] for clave in ('id', 'category', 'bbox')}
                for f in mapa['features']
            ]
        if abortada:
            r.status = 'aborted'
        elif r.final_answer is not None or self.fin == 'terminal':
            r.status = 'completed'
        elif self.fin == 'terminate':
            r.status = 'terminated_early'
        else:
            r.status = 'max_turns_exhausted'
        totales = token_totals(self.ledger)
        r.usage = dict(totales._asdict())
        r.usage['wall_seconds'] = sum(
            msg.usage.wall_seconds for msg in self.ledger if msg.usage is not None
        )
        r.transcript = self.ledger
        logger.info('%s: %s en %d turnos', r.task_id, r.status, len(r.turns))
        if self.out_dir is not None:
            write_run(r, self.out_dir)
        return r


def run_task(task, wf, backend, world, cfg=None, out_dir=None, fault_plan=None, script=None):
    """Ejecuta el bucle del agente sobre una tarea.

    :param task: La tarea; se usan ``task_id`` y ``query``.
    :param wf: El :class:`WorkflowSpec` (puede ser ``None`` en los modos react).
    :param backend: Un :class:`BackendConfig` o un :class:`Backend` ya creado. El
        cliente creado a partir de una configuración se cierra al terminar.
    :param world: El :class:`World` compartido.
    :param cfg: Un :class:`AgentConfig`; por defecto ``stateflow``.
    :param script: :class:`ReplayScript` de la tarea para backends de replay.
    :rtype: RunRecord
    """
    cfg = cfg or AgentConfig()
    if isinstance(backend, Backend):
        return AgentRun(task, wf, backend, world, cfg, out_dir, fault_plan).run()
    with make_backend(backend, script) as cliente:
        return AgentRun(task, wf, cliente, world, cfg, out_dir, fault_plan).run()
