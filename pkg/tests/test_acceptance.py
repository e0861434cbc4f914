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

import time
from concurrent.futures import ThreadPoolExecutor
import pytest
from pampero import main, recursos
from pampero.agent import AgentConfig, run_task
from pampero.eval import aggregate_report, load_pricing, read_report
from pampero.sandbox import REGISTRY, FaultPlan
from pampero.taskgen import build_gold_script, generate_tasks, load_templates
from pampero.workflow import bundled_workflow, tools_for_state


@pytest.fixture(scope='module')
def tareas(mundo):
    return generate_tasks(mundo, load_templates(), 2, 11)


@pytest.fixture(scope='module')
def workflows():
    return {nombre: bundled_workflow(nombre) for nombre in ('eo_multi', 'quake_case')}


@pytest.fixture(scope='module')
def precios():
    return load_pricing(recursos.PRICING)


def _banco(tareas, workflows, mundo, cfg, agente, plan=None, prematuro=None, paralelo=1):
    guiones = {
        t.task_id: build_gold_script(t, workflows[t.workflow], mundo, plan, prematuro)
        for t in tareas
    }

    def ejecutar(tarea):
        return run_task(tarea, workflows[tarea.workflow], cfg, mundo, agente,
                        fault_plan=plan, script=guiones[tarea.task_id])

    with ThreadPoolExecutor(max_workers=paralelo) as pool:
        return list(pool.map(ejecutar, tareas))


@pytest.mark.parametrize('modo', ['stateflow', 'react', 'react_errtrm'])
def test_techo_con_guiones_de_referencia(modo, tareas, workflows, mundo, replay_cfg, precios):
    runs = _banco(tareas, workflows, mundo, replay_cfg, AgentConfig.for_mode(modo))
    reporte = aggregate_report(runs, tareas, precios)
    assert reporte.success_rate == 100.0
    assert reporte.correctness_rate == 100.0
    assert reporte.flags['missing_prediction'] == 0
    assert reporte.total_cost > 0
    assert all(r.status == 'completed' for r in runs)
    if modo == 'stateflow':
        for run in runs:
            wf = workflows[run.workflow]
            for paso in run.trajectory:
                habilitadas = {d.name for d in tools_for_state(wf, paso['state'], REGISTRY)}
                assert paso['call']['name'] in habilitadas


def test_estados_visitados(tareas, workflows, mundo, replay_cfg):
    sismo = [t for t in tareas if t.template_id == 'quake_damage_population']
    runs = _banco(sismo, workflows, mundo, replay_cfg, AgentConfig())
    for run in runs:
        assert run.states_visited == [
            'Init', 'Load', 'Filter', 'Detect', 'Correlate', 'Answer', 'End'
        ]


def test_cierre_prematuro(tareas, workflows, mundo, replay_cfg, precios):
    react = aggregate_report(
        _banco(tareas, workflows, mundo, replay_cfg, AgentConfig.for_mode('react'),
               prematuro=1),
        tareas, precios
    )
    validado = _banco(tareas, workflows, mundo, replay_cfg, AgentConfig(), prematuro=1)
    assert react.success_rate < 100.0
    assert any(f['status'] == 'terminated_early' for f in react.rows)
    assert aggregate_report(validado, tareas, precios).success_rate == 100.0
    assert any(run.count_calls('confirm') for run in validado)


def test_fallas_transitorias(tareas, workflows, mundo, replay_cfg, precios):
    plan = FaultPlan(0.2, 5)
    runs = _banco(tareas, workflows, mundo, replay_cfg, AgentConfig(), plan)
    assert aggregate_report(runs, tareas, precios).success_rate == 100.0
    total = 0
    for run in runs:
        turnos_con_falla = {
            paso['turn'] for paso in run.trajectory
            if not paso['corrective'] and paso['result']['status'] == 'error'
        }
        assert run.count_calls('reflect') == len(turnos_con_falla)
        total += len(turnos_con_falla)
    assert total > 0
    sin_reflexion = _banco(tareas, workflows, mundo, replay_cfg, AgentConfig.for_mode('react'),
                           plan)
    assert aggregate_report(sin_reflexion, tareas, precios).success_rate < 100.0
    assert not any(run.count_calls('reflect') for run in sin_reflexion)


def test_reporte_independiente_del_paralelismo(tareas, workflows, mundo, replay_cfg, precios):
    agente = AgentConfig()
    secuencial = _banco(tareas, workflows, mundo, replay_cfg, agente)
    paralelo = _banco(tareas, workflows, mundo, replay_cfg, agente, paralelo=4)
    assert aggregate_report(secuencial, tareas, precios).to_dict() == \
        aggregate_report(paralelo, tareas, precios).to_dict()
    assert [r.to_dict() for r in secuencial] == [r.to_dict() for r in paralelo]


def test_banco_por_defecto_desde_la_linea_de_comandos(tmp_path):
    tareas = str(tmp_path / 'tasks.jsonl')
    assert main.main(['gen-tasks', '-n', '15', '--out', tareas,
                      '--scripts', str(tmp_path / 'guiones.jsonl')]) == main.EXITO
    backend = tmp_path / 'replay.yaml'
    backend.write_text('kind: replay\nscript: guiones.jsonl\npricing_model: gpt-4o\n',
                       encoding='utf-8')
    salida = str(tmp_path / 'bench')
    inicio = time.perf_counter()
    assert main.main(['bench', '--backend', str(backend), '--tasks', tareas,
                      '--out', salida]) == main.EXITO
    assert time.perf_counter() - inicio < 60
    reporte = read_report(salida)
    assert reporte.tasks >= 100
    assert reporte.success_rate == 100.0
    assert reporte.correctness_rate == 100.0
