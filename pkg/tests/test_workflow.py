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

import pytest
from pampero.sandbox import REGISTRY
from pampero.workflow import (
    GraphError, SchemaError, UnknownCurrentState, UnknownTool, has_terminate, load_workflow_spec,
    parse_intent, parse_stage, tools_for_state, validate_transition
)

MINIMO = '''
name: minimo
preamble: Un workflow de prueba.
initial: Init
states:
  - name: Init
    next: [Load]
  - name: Load
    tools: [load_product]
    next: [End]
  - name: End
    terminal: true
'''


def test_carga_los_workflows_incluidos(eo_single, eo_multi, quake):
    assert eo_single.initial == 'Init'
    assert eo_single.error_state == 'Error'
    assert eo_single.terminal_states == ('End',)
    assert eo_multi.intent_routes['Forest'] == 'Forest'
    assert eo_multi.default_intent == 'Vision'
    assert quake.successors('Correlate') == ('Answer',)


def test_workflow_minimo():
    wf = load_workflow_spec(MINIMO)
    assert wf.error_state is None
    assert wf.terminal_successor('Load') == 'End'
    assert wf.is_terminal('End')


def test_error_de_esquema_con_ruta():
    with pytest.raises(SchemaError) as error:
        load_workflow_spec(MINIMO.replace('initial: Init', 'initial: Init\nversion: 2'))
    assert any('version' in d for d in error.value.diagnosticos)


def test_sucesor_desconocido():
    with pytest.raises(GraphError) as error:
        load_workflow_spec(MINIMO.replace('next: [End]', 'next: [Fin]'))
    assert any('states[1].next[0]' in d for d in error.value.diagnosticos)


def test_estado_inalcanzable():
    documento = MINIMO + '''  - name: Huerfano
    next: [End]
'''
    with pytest.raises(GraphError) as error:
        load_workflow_spec(documento)
    assert any('Huerfano' in d for d in error.value.diagnosticos)


def test_terminal_con_sucesores():
    with pytest.raises(GraphError):
        load_workflow_spec(MINIMO.replace('terminal: true', 'terminal: true\n    next: [Init]'))


def test_herramienta_no_registrada():
    with pytest.raises(UnknownTool) as error:
        load_workflow_spec(MINIMO.replace('[load_product]', '[load_products]'))
    assert error.value.diagnosticos == [
        "states[1].tools[0]: herramienta no registrada 'load_products'"
    ]


def test_dos_estados_de_error():
    documento = MINIMO + '''  - name: E1
    error: true
    next: [Init]
  - name: E2
    error: true
    next: [Init]
'''
    with pytest.raises(GraphError):
        load_workflow_spec(documento)


@pytest.mark.parametrize('texto, etapa', [
    ('Done. CURRENT_STAGE = Filter', 'Filter'),
    ('CURRENT_STAGE=Detect.', 'Detect'),
    ('CURRENT_STAGE = Load then CURRENT_STAGE = Map', 'Map'),
    ('current_stage = Map', None),
    ('no tag here', None),
])
def test_parse_stage(texto, etapa):
    etiqueta = parse_stage(texto)
    assert (etiqueta.stage if etiqueta else None) == etapa


def test_parse_intent_y_terminate():
    assert parse_intent('USER_INTENT = Forest').intent == 'Forest'
    assert has_terminate('All done.\nTERMINATE')
    assert not has_terminate('TERMINATED early')


def test_transiciones(eo_single):
    assert validate_transition(eo_single, 'Load', 'Filter').kind == 'accept'
    assert validate_transition(eo_single, 'Load', 'Load').kind == 'accept'
    assert validate_transition(eo_single, 'Filter', 'Error').kind == 'accept'
    recorte = validate_transition(eo_single, 'Load', 'Map')
    assert (recorte.kind, recorte.state) == ('clamp', 'Load')
    assert validate_transition(eo_single, 'Load', 'Map', strict=True).kind == 'reject'
    assert validate_transition(eo_single, 'Load', 'Nowhere', strict=True).kind == 'clamp'


def test_estado_actual_desconocido(eo_single):
    with pytest.raises(UnknownCurrentState):
        validate_transition(eo_single, 'Nowhere', 'Load')


def test_herramientas_por_estado(eo_single):
    nombres = [d.name for d in tools_for_state(eo_single, 'Filter', REGISTRY)]
    assert nombres == ['filter_spatial', 'filter_temporal', 'final_answer']
    assert [d.name for d in tools_for_state(eo_single, 'Init', REGISTRY)] == ['final_answer']
