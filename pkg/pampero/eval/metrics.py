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
from collections import namedtuple
import numpy as np
from .excepciones import MissingPrediction
from .matching import es_numero

EoError = namedtuple('EoError', 'value absolute')

DetectionScores = namedtuple('DetectionScores', 'precision recall f1 flagged')


def eo_error(predicted, gold):
    """Error relativo de una respuesta numérica.

    Con ``gold == 0`` se usa el error absoluto y se marca.

    :raises MissingPrediction: Si no hay predicción.
    :rtype: EoError
    """
    if predicted is None or not es_numero(predicted):
        raise MissingPrediction('la ejecución no produjo una respuesta numérica')
    if gold == 0:
        return EoError(abs(predicted), True)
    return EoError(abs(predicted - gold) / abs(gold), False)


def _imagen(deteccion):
    if 'image_id' in deteccion:
        return deteccion['image_id']
    return str(deteccion.get('id', '')).rsplit(':', 1)[0]


def iou(a, b):
    """Intersección sobre unión de dos cajas ``[x0, y0, x1, y1]``."""
    ancho = min(a[2], b[2]) - max(a[0], b[0])
    alto = min(a[3], b[3]) - max(a[1], b[1])
    if ancho <= 0 or alto <= 0:
        return 0.0
    interseccion = ancho * alto
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - interseccion
    return interseccion / union


def detection_metrics(predicted, gold, iou_threshold=0.5):
    """Precisión, recall y F1 de un conjunto de detecciones.

    El emparejamiento es greedy por IoU descendente, uno a uno, y exige la
    misma categoría y la misma imagen. Dos conjuntos vacíos valen 1.0 y se
    marcan; si solo uno está vacío las métricas valen 0 y también se marcan.

    :param predicted: Detecciones ``{id, category, bbox}``.
    :param gold: Detecciones esperadas con el mismo formato.
    :rtype: DetectionScores
    """
    if not 0 < iou_threshold < 1:
        raise ValueError('iou_threshold debe estar en (0, 1)')
    if not predicted and not gold:
        return DetectionScores(1.0, 1.0, 1.0, True)
    if not predicted or not gold:
        return DetectionScores(0.0, 0.0, 0.0, True)
    matriz = np.zeros((len(predicted), len(gold)))
    for i, p in enumerate(predicted):
        for j, g in enumerate(gold):
            if p['category'] == g['category'] and _imagen(p) == _imagen(g):
                matriz[i, j] = iou(p['bbox'], g['bbox'])
    aciertos = 0
    orden = np.argsort(-matriz, axis=None, kind='stable')
    usados_p, usados_g = set(), set()
    for plano in orden:
        i, j = np.unravel_index(plano, matriz.shape)
        if matriz[i, j] < iou_threshold:
            break
        if i in usados_p or j in usados_g:
            continue
        usados_p.add(i)
        usados_g.add(j)
        aciertos += 1
    precision = aciertos / len(predicted)
    recall = aciertos / len(gold)
    f1 = 2 * precision * recall / (precision + recall) if aciertos else 0.0
    return DetectionScores(precision, recall, f1, False)


def _artefacto_valido(ruta, sufijo):
    if not ruta.endswith(sufijo) or not os.path.exists(ruta):
        return False
    try:
        with open(ruta, encoding='utf-8') as archivo:
            json.load(archivo)
    except (OSError, ValueError):
        return False
    return True


def success_check(task, run):
    """Indica si la ejecución completó la tarea con el resultado correcto.

    Los errores intermedios no cuentan: solo importan el estado final y la
    respuesta.

    :rtype: bool
    """
    if run.status != 'completed':
        return False
    esperado = task.gold_answer
    if esperado is None:
        return True
    if esperado['kind'] == 'numeric':
        respuesta = (run.final_answer or {}).get('value')
        if not es_numero(respuesta):
            return False
        gold = esperado['value']
        tolerancia = esperado.get('tolerance', 0.10)
        if gold == 0:
            return abs(respuesta) <= tolerancia
        return abs(respuesta - gold) <= tolerancia * abs(gold)
    if esperado['kind'] == 'detections':
        if not run.artifacts:
            return False
        renderizadas = {d['id'] for d in run.map_detections}
        return all(d['id'] in renderizadas for d in esperado['detections'])
    return any(_artefacto_valido(ruta, esperado.get('suffix', '')) for ruta in run.artifacts)
