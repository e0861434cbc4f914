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

from collections import namedtuple, deque
from typing import Optional
import yaml
from cached_property import cached_property
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pampero import recursos
from .excepciones import SchemaError, GraphError, UnknownTool, UnknownState


IDENTIFICADOR = r'^[A-Za-z][A-Za-z0-9_]*$'

StateSpec = namedtuple(
    'StateSpec', 'name instructions allowed_tools few_shot is_terminal is_error'
)

FewShot = namedtuple('FewShot', 'user assistant tool_calls')


class _FewShotDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    user: str
    assistant: str
    tool_calls: list[dict] = []


class _StateDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str = Field(pattern=IDENTIFICADOR)
    instructions: str = ''
    tools: list[str] = []
    few_shot: list[_FewShotDoc] = []
    terminal: bool = False
    error: bool = False
    next: list[str] = []


class _WorkflowDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str = Field(pattern=IDENTIFICADOR)
    preamble: str
    initial: str
    intents: dict[str, str] = {}
    default_intent: Optional[str] = None
    states: list[_StateDoc] = Field(min_length=1)


class WorkflowSpec:
    """Máquina de estados de un workflow.

    Es inmutable una vez construida y puede compartirse entre ejecuciones
    concurrentes.

    :param str name: Nombre del workflow.
    :param str preamble: Definición explícita del workflow que recibe el modelo.
    :param str initial: Nombre del estado inicial.
    :param states: Secuencia de :class:`StateSpec`.
    :param dict transitions: Estado -> tupla de estados sucesores.
    :param dict intent_routes: Intención -> estado de entrada (opcional).
    :param str default_intent: Intención usada cuando el ruteo falla.
    """
    def __init__(self, name, preamble, initial, states, transitions,
                 intent_routes=None, default_intent=None):
        self.name = name
        self.preamble = preamble
        self.initial = initial
        self.states = tuple(states)
        self.transitions = {
            estado: tuple(sucesores) for estado, sucesores in transitions.items()
        }
        self.intent_routes = dict(intent_routes or {})
        if default_intent is None and self.intent_routes:
            default_intent = next(iter(self.intent_routes))
        self.default_intent = default_intent

    def __repr__(self):
        return f'WorkflowSpec({self.name!r}, {len(self.states)} estados)'

    @cached_property
    def estados(self):
        return {estado.name: estado for estado in self.states}

    @cached_property
    def error_state(self):
        for estado in self.states:
            if estado.is_error:
                return estado.name
        return None

    @cached_property
    def terminal_states(self):
        return tuple(estado.name for estado in self.states if estado.is_terminal)

    def state(self, nombre):
        try:
            return self.estados[nombre]
        except KeyError:
            raise UnknownState(f'{self.name}: estado desconocido {nombre!r}') from None

    def successors(self, nombre):
        return self.transitions.get(nombre, ())

    def is_terminal(self, nombre):
        return self.state(nombre).is_terminal

    def terminal_successor(self, nombre):
        """Primer sucesor terminal de un estado, si existe."""
        for sucesor in self.successors(nombre):
            if self.estados[sucesor].is_terminal:
                return sucesor
        return None


def _ruta(loc):
    ruta = ''
    for parte in loc:
        if isinstance(parte, int):
            ruta += f'[{parte}]'
        else:
            ruta += f'.{parte}' if ruta else str(parte)
    return ruta or '<documento>'


def _parsear(documento):
    if isinstance(documento, str):
        try:
            documento = yaml.safe_load(documento)
        except yaml.YAMLError as error:
            raise SchemaError(f'<documento>: YAML inválido ({error})') from None
    if not isinstance(documento, dict):
        raise SchemaError('<documento>: se esperaba un mapeo en el nivel superior')
    try:
        return _WorkflowDoc.model_validate(documento)
    except ValidationError as error:
        raise SchemaError([
            f'{_ruta(detalle["loc"])}: {detalle["msg"]}' for detalle in error.errors()
        ]) from None


def _validar_grafo(doc):
    diagnosticos = []
    nombres = [estado.name for estado in doc.states]
    vistos = set()
    for i, nombre in enumerate(nombres):
        if nombre in vistos:
            diagnosticos.append(f'states[{i}].name: estado repetido {nombre!r}')
        vistos.add(nombre)
    if doc.initial not in vistos:
        diagnosticos.append(f'initial: estado desconocido {doc.initial!r}')
    errores = [i for i, estado in enumerate(doc.states) if estado.error]
    if len(errores) > 1:
        diagnosticos.append(
            f'states: hay {len(errores)} estados de error, se admite uno como máximo'
        )
    for i, estado in enumerate(doc.states):
        for j, sucesor in enumerate(estado.next):
            if sucesor not in vistos:
                diagnosticos.append(
                    f'states[{i}].next[{j}]: estado desconocido {sucesor!r}'
                )
        if estado.terminal and estado.next:
            diagnosticos.append(f'states[{i}].next: un estado terminal no tiene sucesores')
        if not estado.terminal and not estado.next:
            diagnosticos.append(f'states[{i}].next: un estado no terminal necesita sucesores')
        if estado.terminal and estado.error:
            diagnosticos.append(f'states[{i}]: el estado de error no puede ser terminal')
    for intencion, destino in doc.intents.items():
        if destino not in vistos:
            diagnosticos.append(f'intents.{intencion}: estado desconocido {destino!r}')
    if doc.default_intent is not None and doc.default_intent not in doc.intents:
        diagnosticos.append(f'default_intent: intención desconocida {doc.default_intent!r}')
    if diagnosticos:
        raise GraphError(diagnosticos)

    # Alcanzabilidad desde el estado inicial, con las aristas implícitas al
    # estado de error y las rutas de intención.
    por_nombre = {estado.name: estado for estado in doc.states}
    error = next((doc.states[i].name for i in errores), None)
    alcanzados = {doc.initial, *doc.intents.values()}
    pendientes = deque(alcanzados)
    while pendientes:
        estado = por_nombre[pendientes.popleft()]
        sucesores = list(estado.next)
        if error is not None and not estado.terminal:
            sucesores.append(error)
        for sucesor in sucesores:
            if sucesor not in alcanzados:
                alcanzados.add(sucesor)
                pendientes.append(sucesor)
    for i, estado in enumerate(doc.states):
        if estado.name not in alcanzados:
            diagnosticos.append(f'states[{i}]: {estado.name!r} no es alcanzable')
    if diagnosticos:
        raise GraphError(diagnosticos)


def _validar_herramientas(doc, registry):
    if registry is None:
        from pampero.sandbox.registry import REGISTRY
        registry = REGISTRY
    conocidas = set(registry)
    diagnosticos = [
        f'states[{i}].tools[{j}]: herramienta no registrada {herramienta!r}'
        for i, estado in enumerate(doc.states)
        for j, herramienta in enumerate(estado.tools)
        if herramienta not in conocidas
    ]
    if diagnosticos:
        raise UnknownTool(diagnosticos)


def load_workflow_spec(documento, registry=None):
    """Carga y valida un documento de workflow.

    :param documento: Texto YAML o un ``dict`` ya parseado.
    :param registry: Nombres de las herramientas registradas (o un ``dict``
        nombre -> definición). Por defecto el registro del sandbox.
    :returns: Una instancia de :class:`WorkflowSpec`.
    :raises SchemaError: Si el documento no respeta el esquema.
    :raises GraphError: Si el grafo de estados es inválido.
    :raises UnknownTool: Si un estado usa una herramienta no registrada.
    """
    doc = _parsear(documento)
    _validar_grafo(doc)
    _validar_herramientas(doc, registry)
    estados = [
        StateSpec(
            estado.name, estado.instructions.strip(), tuple(estado.tools),
            tuple(FewShot(f.user, f.assistant, tuple(f.tool_calls))
                  for f in estado.few_shot),
            estado.terminal, estado.error
        )
        for estado in doc.states
    ]
    transiciones = {estado.name: tuple(estado.next) for estado in doc.states}
    return WorkflowSpec(
        doc.name, doc.preamble.strip(), doc.initial, estados, transiciones,
        doc.intents, doc.default_intent
    )


def load_workflow_file(ruta, registry=None):
    with open(ruta, encoding='utf-8') as archivo:
        return load_workflow_spec(archivo.read(), registry)


def bundled_workflow(nombre):
    """Carga uno de los workflows incluidos: ``eo_single``, ``eo_multi`` o
    ``quake_case``."""
    return load_workflow_file(recursos.flow(nombre))
