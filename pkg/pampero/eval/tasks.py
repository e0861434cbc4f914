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

from collections import namedtuple
from typing import Literal, Optional, Union
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pampero import helpers
from .excepciones import TaskFileError

INTENTS = ('Vision', 'Forest', 'Urban', 'Climate', 'Agriculture')

# Parámetros de coordenadas: tolerancia relativa por defecto.
COORDENADAS = ('bbox', 'lat', 'lon')

TOLERANCIA_COORDENADAS = 0.10

CallMatcher = namedtuple(
    'CallMatcher', 'name required_args arg_tolerances', defaults=({}, {})
)

TaskSpec = namedtuple(
    'TaskSpec',
    'task_id query intent_gold gold_trajectory gold_answer scenario workflow template_id stages',
    defaults=(None, None, None, None)
)


class _MatcherDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str
    required_args: dict = {}
    arg_tolerances: dict[str, float] = {}


class _NumericDoc(BaseModel):
    kind: Literal['numeric']
    value: float
    tolerance: float = Field(0.10, ge=0)


class _DetectionsDoc(BaseModel):
    kind: Literal['detections']
    detections: list[dict]


class _ArtifactDoc(BaseModel):
    kind: Literal['artifact']
    suffix: str = '.geojson'


class _TaskDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    task_id: str
    query: str
    intent_gold: Optional[Literal[INTENTS]] = None
    gold_trajectory: list[_MatcherDoc] = Field(min_length=1)
    gold_answer: Optional[Union[_NumericDoc, _DetectionsDoc, _ArtifactDoc]] = Field(
        None, discriminator='kind'
    )
    scenario: Optional[dict] = None
    workflow: Optional[str] = None
    template_id: Optional[str] = None
    stages: Optional[list[str]] = None


def default_tolerance(param):
    return TOLERANCIA_COORDENADAS if param in COORDENADAS else 0.0


def task_a_dict(task):
    datos = task._asdict()
    datos['gold_trajectory'] = [m._asdict() for m in task.gold_trajectory]
    return datos


def task_desde_dict(datos):
    """Valida un registro del archivo de tareas.

    :raises TaskFileError: Si el registro es inválido.
    :rtype: TaskSpec
    """
    try:
        doc = _TaskDoc.model_validate(datos)
    except ValidationError as error:
        raise TaskFileError(
            f'{datos.get("task_id", "<tarea>")}: {error.errors()[0]["msg"]}'
        ) from None
    for matcher in doc.gold_trajectory:
        for param, tolerancia in matcher.arg_tolerances.items():
            if not 0 <= tolerancia < 1:
                raise TaskFileError(f'{doc.task_id}: tolerancia de {param} fuera de [0, 1)')
    return TaskSpec(
        doc.task_id, doc.query, doc.intent_gold,
        tuple(CallMatcher(m.name, m.required_args, m.arg_tolerances)
              for m in doc.gold_trajectory),
        doc.gold_answer.model_dump() if doc.gold_answer is not None else None,
        doc.scenario, doc.workflow, doc.template_id,
        tuple(doc.stages) if doc.stages is not None else None
    )


def write_tasks(ruta, tasks):
    helpers.escribir_jsonl(ruta, [task_a_dict(task) for task in tasks])


def read_tasks(ruta):
    """Lee un archivo de tareas (una tarea JSON por línea)."""
    try:
        registros = helpers.leer_jsonl(ruta)
    except OSError as error:
        raise TaskFileError(f'{ruta}: {error.strerror}') from None
    except ValueError as error:
        raise TaskFileError(f'{ruta}: JSON inválido ({error})') from None
    tasks = [task_desde_dict(registro) for registro in registros]
    ids = [task.task_id for task in tasks]
    if len(ids) != len(set(ids)):
        raise TaskFileError(f'{ruta}: task_id repetido')
    return tasks
