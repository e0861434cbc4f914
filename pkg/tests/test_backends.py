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
import os
import pytest
import requests
from conftest import guion, tarea, turno
from pampero.agent import run_task
from pampero.backends import (
    AuthError, ConfigError, HttpBackend, ProtocolError, ReplayBackend, ReplayEntry,
    ReplayExhausted, ReplayScript, TransportError, backend_config, clave_mensaje, complete,
    cuerpo_solicitud, extract_tool_calls_text, load_backend_config, load_replay_bundle,
    parsear_respuesta, record_fixture, serializar, write_replay_bundle
)
from pampero.ledger import ChatMessage, Ledger, ParamSpec, ToolCall, ToolDefinition
from pampero.sandbox import REGISTRY, Sandbox

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')

LOAD = ToolDefinition('load_product', 'Load a satellite product.', (
    ParamSpec('product', 'enum', True, 'Product name.', ('xview1', 'sentinel2')),
))

OPENAI = {'kind': 'openai_compat', 'endpoint': 'http://localhost:8000/', 'model': 'gpt-4o'}

OLLAMA = {'kind': 'ollama', 'endpoint': 'http://localhost:11434', 'model': 'llama3.1:70b'}


def _fixture(nombre):
    with open(os.path.join(FIXTURES, nombre), 'rb') as archivo:
        return archivo.read()


def _mensajes():
    ledger = Ledger()
    ledger.add('system', 'You are an Earth observation analyst.')
    ledger.add('user', 'How many ships are in region R1?')
    return ledger.messages


def _respuesta(estado=200, contenido=b'{}'):
    respuesta = requests.Response()
    respuesta.status_code = estado
    respuesta._content = contenido
    return respuesta


class SesionFalsa:
    """Devuelve las respuestas en orden y registra cada envío."""
    def __init__(self, *respuestas):
        self.respuestas = list(respuestas)
        self.envios = []
        self.cerrada = False

    def post(self, url, data=None, headers=None, timeout=None):
        self.envios.append({'url': url, 'data': data, 'headers': headers})
        respuesta = self.respuestas.pop(0)
        if isinstance(respuesta, Exception):
            raise respuesta
        return respuesta

    def close(self):
        self.cerrada = True


@pytest.mark.parametrize('cfg, nombre', [(OPENAI, 'openai'), (OLLAMA, 'ollama')])
def test_solicitud_identica_a_la_fixture(cfg, nombre):
    cuerpo = serializar(cuerpo_solicitud(backend_config(cfg), _mensajes(), [LOAD]))
    assert cuerpo == _fixture(f'{nombre}_toolcall.req.json')


def test_respuesta_openai():
    cfg = backend_config(OPENAI)
    datos = json.loads(_fixture('openai_toolcall.resp.json'))
    intercambio = parsear_respuesta(cfg, datos, [LOAD], 0.5)
    assert intercambio.text == 'Loading the product. CURRENT_STAGE = Filter'
    assert intercambio.tool_calls == [ToolCall('call_1', 'load_product', {'product': 'xview1'})]
    uso = intercambio.usage
    assert (uso.input_tokens, uso.cached_tokens, uso.output_tokens) == (100, 20, 18)
    assert uso.reported and uso.wall_seconds == 0.5


def test_respuesta_ollama():
    cfg = backend_config(OLLAMA)
    datos = json.loads(_fixture('ollama_toolcall.resp.json'))
    intercambio = parsear_respuesta(cfg, datos, [LOAD])
    assert intercambio.tool_calls == [ToolCall(None, 'load_product', {'product': 'xview1'})]
    assert (intercambio.usage.input_tokens, intercambio.usage.output_tokens) == (95, 12)


def test_respuesta_sin_uso():
    cfg = backend_config(OPENAI)
    datos = {'choices': [{'message': {'role': 'assistant', 'content': 'hola'}}]}
    assert not parsear_respuesta(cfg, datos, []).usage.reported


def test_respuesta_sin_mensaje():
    with pytest.raises(ProtocolError):
        parsear_respuesta(backend_config(OPENAI), {'choices': []}, [])


def test_complete_contra_sesion_falsa():
    sesion = SesionFalsa(_respuesta(contenido=_fixture('openai_toolcall.resp.json')))
    backend = HttpBackend(backend_config(OPENAI), session=sesion)
    intercambio = backend.complete(_mensajes(), [LOAD])
    assert sesion.envios[0]['url'] == 'http://localhost:8000/v1/chat/completions'
    assert sesion.envios[0]['data'] == _fixture('openai_toolcall.req.json')
    assert intercambio.request == sesion.envios[0]['data']


def test_reintentos_con_espera_exponencial():
    esperas = []
    sesion = SesionFalsa(
        _respuesta(503), requests.ConnectionError('caído'),
        _respuesta(contenido=_fixture('openai_toolcall.resp.json'))
    )
    backend = HttpBackend(backend_config(OPENAI), session=sesion, sleep=esperas.append)
    backend.complete(_mensajes(), [LOAD])
    assert esperas == [1, 2]


def test_reintentos_agotados():
    cfg = backend_config(dict(OPENAI, max_retries=2))
    sesion = SesionFalsa(*[requests.Timeout('lento')] * 3)
    with pytest.raises(TransportError):
        HttpBackend(cfg, session=sesion, sleep=lambda s: None).complete(_mensajes(), [LOAD])
    assert len(sesion.envios) == 3


@pytest.mark.parametrize('estado, error', [(401, AuthError), (403, AuthError),
                                           (400, ProtocolError)])
def test_errores_sin_reintento(estado, error):
    sesion = SesionFalsa(_respuesta(estado))
    with pytest.raises(error):
        HttpBackend(backend_config(OPENAI), session=sesion).complete(_mensajes(), [LOAD])
    assert len(sesion.envios) == 1


@pytest.mark.parametrize('error', [
    requests.exceptions.ChunkedEncodingError('cortado'),
    requests.exceptions.ContentDecodingError('gzip roto'),
    requests.exceptions.TooManyRedirects('bucle'),
])
def test_otras_fallas_de_transporte_se_reintentan(error):
    cfg = backend_config(dict(OPENAI, max_retries=1))
    esperas = []
    sesion = SesionFalsa(error, error)
    with pytest.raises(TransportError, match=type(error).__name__):
        HttpBackend(cfg, session=sesion, sleep=esperas.append).complete(_mensajes(), [LOAD])
    assert len(sesion.envios) == 2
    assert esperas == [1]


def test_respuesta_cortada_y_reintento_exitoso():
    sesion = SesionFalsa(
        requests.exceptions.ChunkedEncodingError('cortado'),
        _respuesta(contenido=_fixture('openai_toolcall.resp.json'))
    )
    backend = HttpBackend(backend_config(OPENAI), session=sesion, sleep=lambda s: None)
    assert backend.complete(_mensajes(), [LOAD]).tool_calls[0].name == 'load_product'


@pytest.mark.parametrize('error', [
    requests.exceptions.InvalidSchema('sin adaptador'),
    requests.exceptions.MissingSchema('falta http'),
    requests.exceptions.InvalidURL('url rota'),
])
def test_url_invalida_es_error_de_configuracion(error):
    sesion = SesionFalsa(error)
    with pytest.raises(ConfigError):
        HttpBackend(backend_config(OPENAI), session=sesion).complete(_mensajes(), [LOAD])
    assert len(sesion.envios) == 1


def test_falla_de_transporte_aborta_la_ejecucion(mundo, eo_single):
    cfg = backend_config(dict(OPENAI, max_retries=1))
    sesion = SesionFalsa(*[requests.exceptions.ChunkedEncodingError('cortado')] * 2)
    backend = HttpBackend(cfg, session=sesion, sleep=lambda s: None)
    run = run_task(tarea(), eo_single, backend, mundo)
    assert run.status == 'aborted'
    assert any('TransportError' in d for d in run.diagnostics)


def test_run_task_cierra_su_sesion(monkeypatch, mundo, eo_single):
    sesion = SesionFalsa(requests.ConnectionError('caído'))
    monkeypatch.setattr(requests, 'Session', lambda: sesion)
    run = run_task(tarea(), eo_single, backend_config(dict(OPENAI, max_retries=0)), mundo)
    assert run.status == 'aborted'
    assert sesion.cerrada


def test_sesion_recibida_no_se_cierra():
    sesion = SesionFalsa()
    with HttpBackend(backend_config(OPENAI), session=sesion):
        pass
    assert not sesion.cerrada


def test_complete_con_cada_backend():
    sesion = SesionFalsa(_respuesta(contenido=_fixture('openai_toolcall.resp.json')))
    intercambio = complete(backend_config(OPENAI), _mensajes(), [LOAD], session=sesion)
    assert intercambio.tool_calls == [ToolCall('call_1', 'load_product', {'product': 'xview1'})]
    assert not sesion.cerrada
    script = guion('t1', turno('Routing. USER_INTENT = Vision', canal='route'))
    intercambio = complete(backend_config({'kind': 'replay'}), _mensajes(), [], script=script,
                           purpose='route')
    assert intercambio.text == 'Routing. USER_INTENT = Vision'
    with pytest.raises(ConfigError):
        complete(backend_config({'kind': 'replay'}), _mensajes(), [])


def test_cuerpo_no_json():
    sesion = SesionFalsa(_respuesta(contenido=b'<html>'))
    with pytest.raises(ProtocolError):
        HttpBackend(backend_config(OPENAI), session=sesion).complete(_mensajes(), [LOAD])


def test_credencial_desde_el_entorno(monkeypatch):
    monkeypatch.setenv('PAMPERO_TEST_KEY', 'secreta')
    backend = HttpBackend(backend_config(dict(OPENAI, api_key_env='PAMPERO_TEST_KEY')))
    assert backend.headers()['Authorization'] == 'Bearer secreta'


def test_modo_texto():
    cfg = backend_config(dict(OLLAMA, tool_mode='text'))
    cuerpo = cuerpo_solicitud(cfg, _mensajes(), [LOAD])
    assert 'tools' not in cuerpo
    assert 'load_product' in cuerpo['messages'][0]['content']
    datos = {'message': {'role': 'assistant', 'content':
                         'Sure.\n<tool_call>{"name": "load_product", '
                         '"arguments": {"product": "xview1"}}</tool_call>'}}
    intercambio = parsear_respuesta(cfg, datos, [LOAD])
    assert intercambio.tool_calls == [ToolCall(None, 'load_product', {'product': 'xview1'})]


def test_extraccion_de_llamadas_en_texto():
    tools = [REGISTRY['run_detection'], REGISTRY['filter_category']]
    texto = (
        'First:\n```json\n{"name": "run_detection", "arguments": '
        '{"handle": "h1", "drop_rate": "0.2"}}\n```\n'
        'then <tool_call>{"name": "filter_category", "arguments": '
        '{"handle": "h2", "category": "ship"}}</tool_call>\n'
        '<tool_call>{"name": "delete_catalog", "arguments": {}}</tool_call>\n'
        '<tool_call>{not json}</tool_call>'
    )
    llamadas = extract_tool_calls_text(texto, tools)
    assert [c.name for c in llamadas] == ['run_detection', 'filter_category']
    assert llamadas[0].arguments == {'handle': 'h1', 'drop_rate': 0.2}


@pytest.mark.parametrize('datos', [
    {'kind': 'openai_compat', 'model': 'gpt-4o'},
    {'kind': 'ollama', 'endpoint': 'http://localhost:11434'},
    {'kind': 'replay', 'tool_mode': 'text'},
    {'kind': 'grpc'},
    dict(OPENAI, temperatura=0.2),
    dict(OPENAI, max_retries=-1),
    dict(OLLAMA, endpoint='localhost:11434'),
])
def test_configuracion_invalida(datos):
    with pytest.raises(ConfigError):
        backend_config(datos)


def test_configuracion_de_facturacion():
    assert backend_config(OLLAMA).facturacion == 'local'
    assert backend_config(OPENAI).facturacion == 'api'
    assert backend_config(dict(OPENAI, pricing_model='gpt-4o-mini')).modelo_precios == \
        'gpt-4o-mini'


def test_config_desde_yaml(tmp_path):
    ruta = tmp_path / 'replay.yaml'
    ruta.write_text('kind: replay\nscript: guiones.jsonl\n', encoding='utf-8')
    cfg = load_backend_config(str(ruta))
    assert cfg.script == os.path.join(str(tmp_path), 'guiones.jsonl')
    with pytest.raises(ConfigError):
        load_backend_config(str(tmp_path / 'no_existe.yaml'))


def test_replay_por_canal():
    cfg = backend_config({'kind': 'replay'})
    script = ReplayScript('t', [
        ReplayEntry('turn', None, 'uno', (ToolCall(None, 'list_products', {}),)),
        ReplayEntry('reflect', None, 'reflexión'),
        ReplayEntry('turn', None, 'dos'),
    ])
    backend = ReplayBackend(cfg, script)
    mensajes = _mensajes()
    assert backend.complete(mensajes, [], 'turn').text == 'uno'
    assert backend.complete(mensajes, [], 'reflect').text == 'reflexión'
    assert backend.complete(mensajes, [], 'turn').text == 'dos'
    with pytest.raises(ReplayExhausted):
        backend.complete(mensajes, [], 'turn')
    with pytest.raises(ReplayExhausted):
        backend.complete(mensajes, [], 'confirm')


def test_replay_por_clave():
    mensajes = _mensajes()
    clave = clave_mensaje(mensajes[-1])
    script = ReplayScript('t', [
        ReplayEntry('turn', None, 'en orden'),
        ReplayEntry('turn', clave, 'por clave'),
    ])
    backend = ReplayBackend(backend_config({'kind': 'replay'}), script)
    assert backend.complete(mensajes, []).text == 'por clave'
    assert backend.complete(mensajes, []).text == 'en orden'


def test_replay_exige_mensaje_system():
    backend = ReplayBackend(backend_config({'kind': 'replay'}), ReplayScript('t', []))
    with pytest.raises(ValueError):
        backend.complete([ChatMessage('user', 'hola')], [])


def test_canal_desconocido():
    with pytest.raises(ConfigError):
        ReplayScript('t', [ReplayEntry('plan', None, 'x')])


def test_paquete_de_guiones(tmp_path):
    ruta = str(tmp_path / 'guiones.jsonl')
    script = ReplayScript('t1', [
        ReplayEntry('route', None, 'USER_INTENT = Forest'),
        ReplayEntry('turn', None, 'ok', (ToolCall(None, 'load_product', {'product': 'xview1'}),)),
    ])
    write_replay_bundle(ruta, [script])
    leido = load_replay_bundle(ruta)['t1']
    assert leido.to_dict() == script.to_dict()


def test_grabar_fixture(tmp_path, monkeypatch):
    monkeypatch.setenv('PAMPERO_TEST_KEY', 'secreta')
    cfg = backend_config(dict(OPENAI, api_key_env='PAMPERO_TEST_KEY'))
    sesion = SesionFalsa(_respuesta(contenido=_fixture('openai_toolcall.resp.json')))
    ruta = str(tmp_path / 'openai_toolcall')
    record_fixture(cfg, _mensajes(), [LOAD], ruta, session=sesion)
    with open(ruta + '.req.json', 'rb') as archivo:
        assert archivo.read() == _fixture('openai_toolcall.req.json')
    with open(ruta + '.meta.json', encoding='utf-8') as archivo:
        meta = json.load(archivo)
    assert meta['headers']['Authorization'] == '<redactado>'


def test_grabar_fixture_no_escribe_si_falla(tmp_path):
    sesion = SesionFalsa(_respuesta(401))
    ruta = str(tmp_path / 'openai_toolcall')
    with pytest.raises(AuthError):
        record_fixture(backend_config(OPENAI), _mensajes(), [LOAD], ruta, session=sesion)
    assert os.listdir(str(tmp_path)) == []


def test_correccion_de_argumento_en_modo_texto(mundo):
    sandbox = Sandbox(mundo, 't1')
    handle = json.loads(sandbox.execute(
        ToolCall('c1', 'load_product', {'product': 'xview1'})
    ).payload)['handle']
    tools = [REGISTRY['filter_temporal']]
    erronea = extract_tool_calls_text(
        '<tool_call>{"name": "filter_temporal", "arguments": {"handle": "%s", '
        '"startdate": "2020-05-01", "end_date": "2020-05-31"}}</tool_call>' % handle, tools
    )
    assert erronea[0].arguments['startdate'] == '2020-05-01'
    resultado = sandbox.execute(erronea[0]._replace(call_id='c2'))
    assert resultado.status == 'error'
    assert resultado.payload.startswith('UnknownArgument')
    corregida = extract_tool_calls_text(
        'The parameter is start_date.\n```json\n{"name": "filter_temporal", "arguments": '
        '{"handle": "%s", "start_date": "2020-05-01", "end_date": "2020-05-31"}}\n```'
        % handle, tools
    )
    assert sandbox.execute(corregida[0]._replace(call_id='c3')).status == 'ok'


def test_grabar_fixture_con_cuerpo_no_json(tmp_path):
    sesion = SesionFalsa(_respuesta(contenido=b'<html>'))
    ruta = str(tmp_path / 'openai_toolcall')
    with pytest.raises(ProtocolError):
        record_fixture(backend_config(OPENAI), _mensajes(), [LOAD], ruta, session=sesion)
    assert os.listdir(str(tmp_path)) == []
