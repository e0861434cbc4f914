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
from pampero.backends import ReplayEntry, ReplayScript, backend_config
from pampero.eval import CallMatcher, TaskSpec
from pampero.ledger import ToolCall, UsageRecord
from pampero.sandbox import World
from pampero.workflow import bundled_workflow


@pytest.fixture(scope='session')
def mundo():
    return World.generate(7)


@pytest.fixture(scope='session')
def eo_single():
    return bundled_workflow('eo_single')


@pytest.fixture(scope='session')
def eo_multi():
    return bundled_workflow('eo_multi')


@pytest.fixture(scope='session')
def quake():
    return bundled_workflow('quake_case')


@pytest.fixture
def replay_cfg():
    return backend_config({'kind': 'replay', 'pricing_model': 'gpt-4o'})


def turno(texto, *llamadas, canal='turn'):
    """Entrada de guion con llamadas ``(nombre, argumentos)``."""
    return ReplayEntry(
        canal, None, texto, tuple(ToolCall(None, n, a) for n, a in llamadas),
        UsageRecord(100, 0, 10, 0.0, True)
    )


def guion(task_id, *entradas):
    return ReplayScript(task_id, entradas)


def tarea(task_id='t1', query='How many ships are there?', trayectoria=(), respuesta=None,
          intent=None, workflow='eo_single'):
    return TaskSpec(
        task_id, query, intent,
        tuple(CallMatcher(n, a) for n, a in trayectoria) or (CallMatcher('final_answer'),),
        respuesta, None, workflow
    )
