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

import os
import pytest
from conftest import guion, turno
from pampero import main
from pampero.backends import write_replay_bundle
from pampero.eval import read_report, read_tasks


@pytest.fixture(scope='module')
def banco(tmp_path_factory):
    carpeta = tmp_path_factory.mktemp('banco')
    tareas = str(carpeta / 'tasks.jsonl')
    codigo = main.main([
        'gen-tasks', '--world-seed', '7', '-n', '1', '--out', tareas,
        '--scripts', str(carpeta / 'guiones.jsonl')
    ])
    assert codigo == main.EXITO
    backend = carpeta / 'replay.yaml'
    backend.write_text('kind: replay\nscript: guiones.jsonl\npricing_model: gpt-4o\n',
                       encoding='utf-8')
    return carpeta, tareas, str(backend)


def test_version(capsys):
    with pytest.raises(SystemExit):
        main.main(['--version'])
    assert capsys.readouterr().out.strip() == '0.1.0'


def test_gen_catalog(tmp_path, capsys):
    carpeta = str(tmp_path / 'mundo')
    assert main.main(['gen-catalog', '--seed', '3', '--images', '40', '--regions', '2',
                      '--out', carpeta]) == main.EXITO
    assert sorted(os.listdir(carpeta)) == [
        'catalog.jsonl', 'regions.json', 'series.csv', 'world.json'
    ]
    assert '40 imágenes y 2 regiones' in capsys.readouterr().out


@pytest.mark.parametrize('opciones', [['--images', '0'], ['--regions', '1000']])
def test_gen_catalog_con_cantidades_invalidas(tmp_path, capsys, opciones):
    carpeta = tmp_path / 'mundo'
    assert main.main(['gen-catalog', '--out', str(carpeta)] + opciones) == \
        main.ERROR_CONFIGURACION
    assert not carpeta.exists()
    assert 'error:' in capsys.readouterr().err


def test_gen_tasks(banco):
    carpeta, tareas, _ = banco
    leidas = read_tasks(tareas)
    assert {t.template_id for t in leidas} >= {'forest_loss_sum', 'vision_ship_count'}
    assert all(t.scenario['seed'] == 7 for t in leidas)
    assert os.path.exists(carpeta / 'guiones.jsonl')


def test_bench_y_report(banco, capsys):
    carpeta, tareas, backend = banco
    salida = str(carpeta / 'bench')
    assert main.main(['bench', '--backend', backend, '--tasks', tareas,
                      '--out', salida]) == main.EXITO
    reporte = read_report(salida)
    assert reporte.success_rate == 100.0
    assert len([n for n in os.listdir(os.path.join(salida, 'runs'))
                if n.endswith('.run.json')]) == len(read_tasks(tareas))
    assert 'Pampero - reporte del benchmark' in capsys.readouterr().out
    recalculado = str(carpeta / 'recalculado')
    assert main.main(['report', '--tasks', tareas, '--runs', os.path.join(salida, 'runs'),
                      '--out', recalculado]) == main.EXITO
    assert read_report(recalculado) == reporte


def test_bench_en_paralelo(banco):
    carpeta, tareas, backend = banco
    for paralelo in ('1', '3'):
        assert main.main(['bench', '--backend', backend, '--tasks', tareas, '--parallel',
                          paralelo, '--out', str(carpeta / f'p{paralelo}')]) == main.EXITO
    assert read_report(str(carpeta / 'p1')) == read_report(str(carpeta / 'p3'))


def test_bench_sin_precios(banco, capsys):
    carpeta, tareas, backend = banco
    salida = carpeta / 'sin_precios'
    codigo = main.main(['bench', '--backend', backend, '--tasks', tareas, '--out', str(salida),
                        '--pricing', str(carpeta / 'no_existe.toml')])
    assert codigo == main.ERROR_CONFIGURACION
    assert not salida.exists()
    assert 'no_existe.toml' in capsys.readouterr().err


def test_bench_con_modelo_sin_tarifa(banco):
    carpeta, tareas, _ = banco
    backend = carpeta / 'otro.yaml'
    backend.write_text('kind: replay\nscript: guiones.jsonl\npricing_model: gpt-5\n',
                       encoding='utf-8')
    salida = carpeta / 'sin_tarifa'
    assert main.main(['bench', '--backend', str(backend), '--tasks', tareas,
                      '--out', str(salida)]) == main.ERROR_CONFIGURACION
    assert not salida.exists()


def test_bench_con_tasa_de_fallas_invalida(banco):
    carpeta, tareas, backend = banco
    salida = carpeta / 'tasa_invalida'
    assert main.main(['bench', '--backend', backend, '--tasks', tareas, '--fault-rate', '1.5',
                      '--out', str(salida)]) == main.ERROR_CONFIGURACION
    assert not salida.exists()


def test_bench_con_endpoint_sin_esquema(banco, capsys):
    carpeta, tareas, _ = banco
    backend = carpeta / 'sin_esquema.yaml'
    backend.write_text('kind: ollama\nendpoint: localhost:11434\nmodel: llama3.1:70b\n',
                       encoding='utf-8')
    salida = carpeta / 'sin_esquema'
    assert main.main(['bench', '--backend', str(backend), '--tasks', tareas,
                      '--out', str(salida)]) == main.ERROR_CONFIGURACION
    assert not salida.exists()
    assert 'http://' in capsys.readouterr().err


def test_bench_con_workflow_invalido(banco, capsys):
    carpeta, tareas, backend = banco
    flujo = carpeta / 'malo.flow'
    flujo.write_text('name: malo\ninitial: A\nstates:\n  - name: A\n    next: [B]\n',
                     encoding='utf-8')
    assert main.main(['bench', '--backend', backend, '--tasks', tareas, '--workflow',
                      str(flujo), '--out', str(carpeta / 'malo')]) == main.ERROR_CONFIGURACION
    assert 'error:' in capsys.readouterr().err


def test_run(banco, capsys):
    carpeta, tareas, backend = banco
    argumentos = ['run', '--backend', backend, '--tasks', tareas, '--out', str(carpeta / 'run')]
    assert main.main(argumentos + ['--task-id', 'forest_loss_sum_00']) == main.EXITO
    assert 'forest_loss_sum_00: completed' in capsys.readouterr().out
    assert main.main(argumentos + ['--task-id', 'no_existe']) == main.ERROR_CONFIGURACION


def test_run_react_con_cierre_prematuro(banco, tmp_path):
    _, tareas, _ = banco
    guiones = tmp_path / 'prematuro.jsonl'
    assert main.main(['gen-tasks', '--world-seed', '7', '-n', '1', '--out',
                      str(tmp_path / 'tasks.jsonl'), '--scripts', str(guiones),
                      '--premature-terminate', '1']) == main.EXITO
    backend = tmp_path / 'replay.yaml'
    backend.write_text('kind: replay\nscript: prematuro.jsonl\n', encoding='utf-8')
    argumentos = ['run', '--backend', str(backend), '--tasks', tareas, '--out',
                  str(tmp_path / 'run'), '--task-id', 'vision_ship_count_00']
    assert main.main(argumentos + ['--mode', 'react']) == main.FALLAS
    assert main.main(argumentos) == main.EXITO


def test_repl(tmp_path, capsys):
    write_replay_bundle(str(tmp_path / 'repl.jsonl'), [guion(
        'repl_001',
        turno('Counting.\nTERMINATE', ('load_product', {'product': 'xview1'}),
              ('final_answer', {'value': 3}))
    )])
    backend = tmp_path / 'replay.yaml'
    backend.write_text('kind: replay\nscript: repl.jsonl\npricing_model: gpt-4o\n',
                       encoding='utf-8')
    lineas = iter(['', 'How many ships are there?', 'And vehicles?'])

    def entrada(_):
        try:
            return next(lineas)
        except StopIteration:
            raise EOFError from None

    codigo = main.repl(main.crear_parser().parse_args(
        ['repl', '--backend', str(backend), '--mode', 'react', '--out', str(tmp_path)]
    ), entrada)
    assert codigo == main.EXITO
    salida = capsys.readouterr().out
    assert 'respuesta: 3' in salida
    assert 'estado: completed' in salida
    assert 'error:' in salida


def test_logging():
    main.configurar_logging(5)
    main.configurar_logging(-3)
