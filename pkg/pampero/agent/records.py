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
from dataclasses import dataclass, field, fields
from typing import Optional
from pampero import ledger as ledger_
from pampero.ledger import ToolCall

STATUSES = ('completed', 'terminated_early', 'max_turns_exhausted', 'aborted')


@dataclass
class RunRecord:
    """Resultado completo de una ejecución.

    ``trajectory`` tiene una entrada por llamada ejecutada contra el sandbox:
    ``{turn, state, corrective, call, result}``. ``backend_calls`` registra
    ``{purpose, turn}`` por cada llamada al backend.
    """
    task_id: str
    mode: str
    workflow: Optional[str] = None
    status: str = 'aborted'
    intent_resolved: Optional[str] = None
    final_answer: Optional[dict] = None
    artifacts: list = field(default_factory=list)
    map_detections: list = field(default_factory=list)
    trajectory: list = field(default_factory=list)
    turns: list = field(default_factory=list)
    backend_calls: list = field(default_factory=list)
    states_visited: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    usage: dict = field(default_factory=dict)
    cost: Optional[float] = None
    billing: str = 'api'
    pricing_model: Optional[str] = None
    transcript: Optional[ledger_.Ledger] = field(default=None, repr=False, compare=False)

    def executed_calls(self):
        return [
            ToolCall(e['call']['call_id'], e['call']['name'], e['call']['arguments'])
            for e in self.trajectory
        ]

    def count_calls(self, purpose):
        return sum(1 for llamada in self.backend_calls if llamada['purpose'] == purpose)

    @property
    def total_tokens(self):
        return sum(self.usage.get(clave, 0) for clave in
                   ('input_tokens', 'cached_tokens', 'output_tokens'))

    def to_dict(self):
        return {
            campo.name: getattr(self, campo.name) for campo in fields(self)
            if campo.name != 'transcript'
        }

    @classmethod
    def from_dict(cls, datos):
        return cls(**datos)


def write_run(run, carpeta):
    """Escribe ``{task_id}.run.json`` y, si hay historial,
    ``{task_id}.transcript.jsonl``."""
    os.makedirs(carpeta, exist_ok=True)
    ruta = os.path.join(carpeta, f'{run.task_id}.run.json')
    with open(ruta, 'w', encoding='utf-8', newline='\n') as archivo:
        json.dump(run.to_dict(), archivo, indent=2, ensure_ascii=False)
        archivo.write('\n')
    if run.transcript is not None:
        ledger_.write_transcript(
            run.transcript, os.path.join(carpeta, f'{run.task_id}.transcript.jsonl')
        )
    return ruta


def read_run(ruta, transcript=True):
    with open(ruta, encoding='utf-8') as archivo:
        run = RunRecord.from_dict(json.load(archivo))
    ruta_transcript = ruta[:-len('.run.json')] + '.transcript.jsonl'
    if transcript and os.path.exists(ruta_transcript):
        run.transcript = ledger_.read_transcript(ruta_transcript)
    return run


def read_runs(carpeta):
    """Todas las ejecuciones de una carpeta, ordenadas por ``task_id``."""
    rutas = sorted(
        os.path.join(carpeta, nombre) for nombre in os.listdir(carpeta)
        if nombre.endswith('.run.json')
    )
    return [read_run(ruta, transcript=False) for ruta in rutas]
