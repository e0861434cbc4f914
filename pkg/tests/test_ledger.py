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
from pampero.excepciones import InvalidToolDefinition, OrderViolation, RoleViolation
from pampero.ledger import (
    ChatMessage, Ledger, ParamSpec, ToolCall, ToolDefinition, UsageRecord, read_transcript,
    sumar_totales, token_totals, write_transcript
)


def _ledger():
    ledger = Ledger()
    ledger.add('system', 'Eres un analista.')
    ledger.add('user', 'How many ships are there?')
    return ledger


def test_primer_mensaje_system():
    with pytest.raises(RoleViolation):
        Ledger().add('user', 'hola')


def test_turn_index_consecutivo():
    ledger = _ledger()
    with pytest.raises(OrderViolation):
        ledger.append(ChatMessage('user', 'otra', turn_index=5))
    assert [m.turn_index for m in ledger] == [0, 1]


def test_tool_sin_llamada_previa():
    ledger = _ledger()
    with pytest.raises(RoleViolation):
        ledger.add('tool', '{}', tool_call_id='c9')


def test_tool_responde_una_sola_vez():
    ledger = _ledger()
    ledger.add('assistant', 'ok', [ToolCall('c1', 'list_products', {})])
    ledger.add('tool', '{"products":[]}', tool_call_id='c1')
    with pytest.raises(RoleViolation):
        ledger.add('tool', '{}', tool_call_id='c1')


def test_tool_calls_solo_en_assistant():
    ledger = _ledger()
    with pytest.raises(RoleViolation):
        ledger.add('user', 'x', [ToolCall('c1', 'list_products', {})])


def test_call_id_repetido():
    ledger = _ledger()
    ledger.add('assistant', '', [ToolCall('c1', 'list_products', {})])
    with pytest.raises(RoleViolation):
        ledger.add('assistant', '', [ToolCall('c1', 'list_products', {})])


def test_replay_reproduce_el_historial():
    ledger = _ledger()
    ledger.add('assistant', 'Cargando.', [ToolCall('c1', 'load_product', {'product': 'xview1'})],
               usage=UsageRecord(10, 2, 5, 0.1, True))
    ledger.add('tool', '{"count":3}', tool_call_id='c1')
    copia = ledger.replay()
    assert copia.messages == ledger.messages
    assert copia.serializar() == ledger.serializar()


def test_transcripcion_en_disco(tmp_path):
    ledger = _ledger()
    ledger.add('assistant', 'Listo. TERMINATE')
    ruta = tmp_path / 't.transcript.jsonl'
    write_transcript(ledger, str(ruta))
    assert read_transcript(str(ruta)).messages == ledger.messages


def test_totales_informados():
    ledger = _ledger()
    ledger.add('assistant', 'a', usage=UsageRecord(100, 20, 7, 0.5, True))
    ledger.add('user', 'b')
    ledger.add('assistant', 'c', usage=UsageRecord(50, 0, 3, 0.2, True))
    totales = token_totals(ledger)
    assert (totales.input_tokens, totales.cached_tokens, totales.output_tokens) == (150, 20, 10)
    assert not totales.estimated


def test_totales_estimados_sin_uso():
    ledger = Ledger()
    ledger.add('system', 'uno dos tres')
    ledger.add('user', 'cuatro cinco seis')
    ledger.add('assistant', 'siete ocho nueve', usage=UsageRecord(reported=False))
    totales = token_totals(ledger)
    # ceil(6 * 4 / 3) y ceil(3 * 4 / 3)
    assert totales.input_tokens == 8
    assert totales.output_tokens == 4
    assert totales.estimated


def test_sumar_totales():
    a = token_totals(_ledger().add('assistant', 'x', usage=UsageRecord(1, 0, 1)))
    b = token_totals(_ledger().add('assistant', 'y'))
    total = sumar_totales(a, b)
    assert total.estimated
    assert total.input_tokens >= 1


def test_schema_de_herramienta():
    definicion = ToolDefinition('load_product', 'Load.', (
        ParamSpec('product', 'enum', True, 'Product.', ('xview1', 'sentinel2')),
        ParamSpec('bbox', 'array', False, 'Box.', items='number'),
    ))
    funcion = definicion.schema()['function']
    assert funcion['parameters']['required'] == ['product']
    assert funcion['parameters']['properties']['product']['enum'] == ['xview1', 'sentinel2']
    assert funcion['parameters']['properties']['bbox']['items'] == {'type': 'number'}


@pytest.mark.parametrize('nombre, parametros', [
    ('Load-Product', ()),
    ('load', (ParamSpec('a', 'string'), ParamSpec('a', 'string'))),
    ('load', (ParamSpec('a', 'tuple'),)),
    ('load', (ParamSpec('a', 'enum'),)),
])
def test_definiciones_invalidas(nombre, parametros):
    with pytest.raises(InvalidToolDefinition):
        ToolDefinition(nombre, '', parametros)
