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
import logging
import os
from dataclasses import dataclass, field, asdict
from typing import Optional
import numpy as np
from pampero import reportes
from .cost import compute_cost
from .excepciones import ErrorEval, MissingPrediction
from .matching import match_trajectory
from .metrics import detection_metrics, eo_error, success_check

logger = logging.getLogger(__name__)

DOMINIOS = {'Agriculture': 'agro', 'Climate': 'climate', 'Urban': 'urban', 'Forest': 'forest'}

# Valor de ε para tareas sin respuesta numérica.
EPS_TOPE = 1.0


@dataclass
class MetricsReport:
    """Métricas agregadas de un benchmark. Las tasas están en porcentaje."""
    success_rate: float
    correctness_rate: float
    per_domain_eps: dict
    vision_recall: Optional[float]
    detection_f1: Optional[float]
    avg_tokens_k: float
    total_cost: float
    tasks: int
    flags: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, datos):
        return cls(**datos)


def _media(valores):
    return float(np.mean(valores)) if len(valores) else None


def _fila(task, run, pricing):
    fila = {
        'task_id': task.task_id, 'intent': task.intent_gold, 'status': run.status,
        'success': success_check(task, run),
        'correctness': match_trajectory(task.gold_trajectory, run.executed_calls()).correctness,
        'tokens': run.total_tokens, 'wall_seconds': run.usage.get('wall_seconds', 0.0),
        'estimated': bool(run.usage.get('estimated')),
        'eps': None, 'eps_flag': None, 'recall': None, 'f1': None, 'detections_flag': False,
        'cost': compute_cost(run, pricing) if pricing is not None else 0.0,
    }
    esperado = task.gold_answer or {}
    if esperado.get('kind') == 'numeric':
        try:
            eps = eo_error((run.final_answer or {}).get('value'), esperado['value'])
        except MissingPrediction:
            fila['eps'], fila['eps_flag'] = EPS_TOPE, 'missing'
        else:
            fila['eps'] = eps.value
            fila['eps_flag'] = 'absolute' if eps.absolute else None
    elif esperado.get('kind') == 'detections':
        if run.artifacts:
            puntaje = detection_metrics(run.map_detections, esperado['detections'])
            fila['recall'], fila['f1'] = puntaje.recall, puntaje.f1
            fila['detections_flag'] = puntaje.flagged
        else:
            fila['recall'], fila['f1'] = 0.0, 0.0
    return fila


def aggregate_report(runs, tasks, pricing=None):
    """Agrega las métricas de un conjunto de ejecuciones.

    Las tasas de éxito y de corrección son medias sin ponderar sobre las
    tareas; ε se agrupa por la intención esperada de cada tarea. Una tarea sin
    ejecución cuenta como fallida.

    :param runs: Secuencia de :class:`RunRecord`.
    :param tasks: Secuencia de :class:`TaskSpec`.
    :param pricing: Una :class:`PricingTable`; sin tarifas el costo es 0.
    :rtype: MetricsReport
    """
    por_tarea = {task.task_id: task for task in tasks}
    por_run = {}
    for run in runs:
        if run.task_id not in por_tarea:
            raise ErrorEval(f'la ejecución {run.task_id!r} no corresponde a ninguna tarea')
        por_run[run.task_id] = run
    filas = []
    for task in tasks:
        run = por_run.get(task.task_id)
        if run is None:
            filas.append({
                'task_id': task.task_id, 'intent': task.intent_gold, 'status': 'missing',
                'success': False, 'correctness': 0.0, 'tokens': 0, 'wall_seconds': 0.0,
                'estimated': False,
                'eps': EPS_TOPE, 'eps_flag': 'missing', 'recall': None, 'f1': None,
                'detections_flag': False, 'cost': 0.0,
            })
            continue
        fila = _fila(task, run, pricing)
        run.cost = fila['cost']
        filas.append(fila)
    eps = {}
    for intencion, dominio in DOMINIOS.items():
        valores = [f['eps'] for f in filas if f['intent'] == intencion and f['eps'] is not None]
        media = _media(valores)
        eps[dominio] = None if media is None else 100 * media
    recall = _media([f['recall'] for f in filas if f['recall'] is not None])
    f1 = _media([f['f1'] for f in filas if f['f1'] is not None])
    banderas = {
        'estimated_usage': sum(f['estimated'] for f in filas),
        'missing_prediction': sum(f['eps_flag'] == 'missing' for f in filas),
        'absolute_eps': sum(f['eps_flag'] == 'absolute' for f in filas),
        'empty_detections': sum(f['detections_flag'] for f in filas),
    }
    return MetricsReport(
        success_rate=100 * (_media([f['success'] for f in filas]) or 0.0),
        correctness_rate=100 * (_media([f['correctness'] for f in filas]) or 0.0),
        per_domain_eps=eps,
        vision_recall=None if recall is None else 100 * recall,
        detection_f1=None if f1 is None else 100 * f1,
        avg_tokens_k=(_media([f['tokens'] for f in filas]) or 0.0) / 1000,
        total_cost=float(sum(f['cost'] for f in filas)),
        tasks=len(filas), flags=banderas, rows=filas,
    )


def write_report(report, carpeta):
    """Escribe ``report.json`` y la tabla de texto ``report.txt``."""
    os.makedirs(carpeta, exist_ok=True)
    with open(os.path.join(carpeta, 'report.json'), 'w', encoding='utf-8') as archivo:
        json.dump(report.to_dict(), archivo, indent=2)
        archivo.write('\n')
    with open(os.path.join(carpeta, 'report.txt'), 'w', encoding='utf-8') as archivo:
        archivo.write(render_report(report))
    logger.info('reporte escrito en %s', carpeta)


def read_report(carpeta):
    with open(os.path.join(carpeta, 'report.json'), encoding='utf-8') as archivo:
        return MetricsReport.from_dict(json.load(archivo))


def render_report(report):
    return reportes.reporte('reporte.txt', r=report, dominios=list(DOMINIOS.values()))
