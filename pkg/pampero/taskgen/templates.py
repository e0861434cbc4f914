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
from typing import Literal, Optional
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pampero import recursos
from pampero.eval import INTENTS
from pampero.sandbox import REGISTRY
from .excepciones import TemplateError

# Tipo de slot -> nombres que produce para las plantillas.
SLOTS = {
    'product': ('product',),
    'region': ('region',),
    'category': ('category',),
    'month': ('start_date', 'end_date', 'month_name'),
    'event': ('start_date', 'end_date', 'event_date'),
    'empty_bbox': ('bbox',),
}

ANSWERS = ('count', 'detections', 'series', 'correlate')

TemplateStep = namedtuple('TemplateStep', 'tool stage args')

TaskTemplate = namedtuple(
    'TaskTemplate',
    'template_id intent workflow query slots answer trajectory probe variable aggregate'
)

MARCADOR = re.compile(r'\{([A-Za-z_][A-Za-z0-9_]*)\}')


class _PasoDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    tool: str
    stage: Optional[str] = None
    args: dict = {}


class _PlantillaDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    template_id: str = Field(pattern=r'^[a-z][a-z0-9_]*$')
    intent: Optional[Literal[INTENTS]] = None
    workflow: str
    query: str
    slots: list[Literal[tuple(SLOTS)]] = []
    answer: Literal[ANSWERS]
    probe: bool = False
    variable: Optional[str] = None
    aggregate: Optional[str] = None
    trajectory: list[_PasoDoc] = Field(min_length=1)


def marcadores(valor):
    """Nombres ``{slot}`` usados en un valor de plantilla."""
    if isinstance(valor, str):
        return set(MARCADOR.findall(valor))
    if isinstance(valor, dict):
        return set().union(*(marcadores(v) for v in valor.values())) if valor else set()
    if isinstance(valor, (list, tuple)):
        return set().union(*(marcadores(v) for v in valor)) if valor else set()
    return set()


def _validar(doc):
    producidos = {'answer'}
    for slot in doc.slots:
        producidos.update(SLOTS[slot])
    usados = set()
    for i, paso in enumerate(doc.trajectory):
        if paso.tool not in REGISTRY:
            raise TemplateError(
                f'{doc.template_id}: trajectory[{i}]: herramienta desconocida {paso.tool!r}'
            )
        usados |= marcadores(paso.args)
    faltantes = marcadores(doc.query) - producidos
    if faltantes:
        raise TemplateError(f'{doc.template_id}: slots sin definir en query: {sorted(faltantes)}')
    faltantes = usados - producidos
    if faltantes:
        raise TemplateError(
            f'{doc.template_id}: slots sin definir en trajectory: {sorted(faltantes)}'
        )
    for slot in doc.slots:
        if not set(SLOTS[slot]) & usados:
            raise TemplateError(f'{doc.template_id}: el slot {slot!r} no se usa en trajectory')
    if doc.answer == 'series' and (doc.variable is None or doc.aggregate is None):
        raise TemplateError(f'{doc.template_id}: una plantilla series necesita variable y '
                            'aggregate')


def template(datos):
    """Valida una plantilla de tareas.

    :raises TemplateError: Si la plantilla es inválida o deja slots sin usar.
    :rtype: TaskTemplate
    """
    try:
        doc = _PlantillaDoc.model_validate(datos)
    except ValidationError as error:
        detalle = error.errors()[0]
        raise TemplateError(
            f'{datos.get("template_id", "<plantilla>")}: '
            f'{".".join(str(p) for p in detalle["loc"])}: {detalle["msg"]}'
        ) from None
    _validar(doc)
    return TaskTemplate(
        doc.template_id, doc.intent, doc.workflow, doc.query.strip(), tuple(doc.slots),
        doc.answer, tuple(TemplateStep(p.tool, p.stage, p.args) for p in doc.trajectory),
        doc.probe, doc.variable, doc.aggregate
    )


def load_templates(ruta=None):
    """Lee el archivo YAML de plantillas; por defecto el incluido en el paquete."""
    ruta = ruta or recursos.TEMPLATES_TAREAS
    try:
        with open(ruta, encoding='utf-8') as archivo:
            datos = yaml.safe_load(archivo)
    except OSError as error:
        raise TemplateError(f'{ruta}: {error.strerror}') from None
    except yaml.YAMLError as error:
        raise TemplateError(f'{ruta}: YAML inválido ({error})') from None
    if not isinstance(datos, dict) or not isinstance(datos.get('templates'), list):
        raise TemplateError(f'{ruta}: se esperaba una lista templates')
    plantillas = [template(item) for item in datos['templates']]
    ids = [p.template_id for p in plantillas]
    if len(ids) != len(set(ids)):
        raise TemplateError(f'{ruta}: template_id repetido')
    return plantillas
