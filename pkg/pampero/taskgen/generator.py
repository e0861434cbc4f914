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

import logging
from datetime import date
from pampero import helpers
from pampero.eval import CallMatcher, TaskSpec
from pampero.eval.tasks import COORDENADAS, TOLERANCIA_COORDENADAS
from pampero.sandbox import CATEGORIES, PRODUCTS, agregar
from pampero.sandbox.catalog import EPOCH_DIAS, contiene, fechas_epoch
from pampero.sandbox.rng import SplitMix64, semilla
from pampero.sandbox.tools import detection_id
from .excepciones import SlotError, TemplateError
from .templates import MARCADOR

logger = logging.getLogger(__name__)

# Tolerancia relativa del valor de final_answer en la trayectoria esperada.
TOLERANCIA_RESPUESTA = 0.10

# Intentos de muestreo por variante pedida.
INTENTOS_POR_VARIANTE = 20

# Lado de la caja de las sondas vacías, en grados.
LADO_SONDA = 2


def _meses():
    fechas = fechas_epoch()
    meses = {}
    for fecha in fechas:
        meses.setdefault(fecha[:7], []).append(fecha)
    return [
        (dias[0], dias[-1], date.fromisoformat(dias[0]).strftime('%B %Y'))
        for dias in meses.values()
    ]


def _caja_vacia(world, rng):
    for _ in range(1000):
        lon = round(rng.uniform(-180, 180 - LADO_SONDA), 2)
        lat = round(rng.uniform(-60, 60 - LADO_SONDA), 2)
        caja = [lon, lat, round(lon + LADO_SONDA, 2), round(lat + LADO_SONDA, 2)]
        if not any(contiene(caja, imagen.lon, imagen.lat) for imagen in world.catalog):
            return caja
    raise TemplateError('no se encontró una caja sin imágenes para la sonda')


def sample_slots(plantilla, world, rng):
    """Muestrea los valores de los slots de una plantilla sobre el mundo.

    :rtype: dict
    """
    valores = {}
    for slot in plantilla.slots:
        if slot == 'product':
            valores['product'] = rng.choice(PRODUCTS)
        elif slot == 'region':
            valores['region'] = rng.choice(sorted(world.regions))
        elif slot == 'category':
            valores['category'] = rng.choice(CATEGORIES)
        elif slot == 'month':
            inicio, fin, nombre = rng.choice(_meses())
            valores.update(start_date=inicio, end_date=fin, month_name=nombre)
        elif slot == 'event':
            fechas = fechas_epoch()
            evento = fechas[EPOCH_DIAS // 2]
            valores.update(start_date=evento, end_date=fechas[-1], event_date=evento)
        elif slot == 'empty_bbox':
            valores['bbox'] = _caja_vacia(world, rng)
    return valores


def sustituir(valor, slots):
    """Reemplaza los marcadores ``{slot}`` de un valor de plantilla.

    Un texto que es exactamente un marcador toma el valor del slot con su
    tipo; en cualquier otro texto el valor se interpola.

    :raises SlotError: Si falta un slot.
    """
    if isinstance(valor, dict):
        return {k: sustituir(v, slots) for k, v in valor.items()}
    if isinstance(valor, list):
        return [sustituir(v, slots) for v in valor]
    if not isinstance(valor, str):
        return valor
    entero = MARCADOR.fullmatch(valor)
    try:
        if entero:
            return slots[entero.group(1)]
        return MARCADOR.sub(lambda m: str(slots[m.group(1)]), valor)
    except KeyError as error:
        raise SlotError(f'falta el slot {error.args[0]!r}') from None


def derive_gold_trajectory(plantilla, slots):
    """Instancia la trayectoria de una plantilla con los valores de sus slots.

    Los parámetros de coordenadas y el valor de ``final_answer`` llevan una
    tolerancia relativa de 0.10; fechas y nombres deben coincidir exactamente.

    :raises SlotError: Si falta algún slot.
    :rtype: list
    """
    matchers = []
    for paso in plantilla.trajectory:
        argumentos = sustituir(paso.args, slots)
        tolerancias = {p: TOLERANCIA_COORDENADAS for p in argumentos if p in COORDENADAS}
        if paso.tool == 'final_answer' and 'value' in argumentos:
            tolerancias['value'] = TOLERANCIA_RESPUESTA
        matchers.append(CallMatcher(paso.tool, argumentos, tolerancias))
    return matchers


def _argumentos(plantilla, slots, tool):
    for paso in plantilla.trajectory:
        if paso.tool == tool:
            return sustituir(paso.args, slots)
    return {}


def _detecciones(plantilla, slots, world):
    producto = _argumentos(plantilla, slots, 'load_product')['product']
    espacial = _argumentos(plantilla, slots, 'filter_spatial')
    temporal = _argumentos(plantilla, slots, 'filter_temporal')
    categoria = _argumentos(plantilla, slots, 'filter_category').get('category')
    if 'region' in espacial:
        caja = world.regions[espacial['region']]
    else:
        caja = espacial.get('bbox')
    detecciones = []
    for image_id in world.por_producto[producto]:
        imagen = world.imagenes[image_id]
        if caja is not None and not contiene(caja, imagen.lon, imagen.lat):
            continue
        if temporal and not temporal['start_date'] <= imagen.timestamp <= temporal['end_date']:
            continue
        for i, objeto in enumerate(imagen.objects):
            if categoria is None or objeto.category == categoria:
                detecciones.append((imagen, i, objeto))
    return detecciones


def brute_force_answer(plantilla, slots, world):
    """Calcula la respuesta de una tarea recorriendo el catálogo completo.

    :returns: Tupla ``(valor, detecciones, filas)``. ``filas`` es la cantidad
        de elementos del catálogo de los que se deriva la respuesta.
    """
    if plantilla.answer in ('count', 'detections'):
        encontradas = _detecciones(plantilla, slots, world)
        detecciones = [
            {'id': detection_id(imagen.image_id, i), 'category': objeto.category,
             'bbox': list(objeto.bbox)}
            for imagen, i, objeto in encontradas
        ]
        return len(detecciones), detecciones, len(detecciones)
    if plantilla.answer == 'series':
        consulta = _argumentos(plantilla, slots, 'query_series')
        filas = world.serie(
            consulta['region'], plantilla.variable, consulta['start_date'], consulta['end_date']
        )
        valor = agregar([v for _, v in filas], plantilla.aggregate)
        return (None if valor is None else round(valor, 6)), None, len(filas)
    variable = _argumentos(plantilla, slots, 'correlate')['population_variable']
    total, edificios = 0, 0
    for imagen, _, objeto in _detecciones(plantilla, slots, world):
        region = world.region_de(imagen.lon, imagen.lat)
        if objeto.category != 'building' or region is None:
            continue
        valor = world.valor(region, variable, imagen.timestamp)
        if valor is not None:
            total += valor
            edificios += 1
    return total, None, edificios


def _tarea(plantilla, slots, numero, world, valor, detecciones):
    slots = dict(slots, answer=valor)
    if plantilla.answer == 'detections':
        gold = {'kind': 'detections', 'detections': detecciones}
    else:
        gold = {'kind': 'numeric', 'value': valor, 'tolerance': TOLERANCIA_RESPUESTA}
    escenario = None
    if world.seed is not None:
        escenario = {
            'seed': world.seed, 'n_images': len(world.catalog),
            'n_regions': len(world.regions),
        }
    etapas = None
    if all(paso.stage for paso in plantilla.trajectory):
        etapas = tuple(paso.stage for paso in plantilla.trajectory)
    return TaskSpec(
        f'{plantilla.template_id}_{numero:02d}', sustituir(plantilla.query, slots),
        plantilla.intent, tuple(derive_gold_trajectory(plantilla, slots)), gold,
        escenario, plantilla.workflow, plantilla.template_id, etapas
    )


def generate_tasks(world, templates, n_per_template, seed):
    """Genera las tareas del benchmark.

    Los slots se muestrean del mundo y las respuestas se calculan recorriendo
    el catálogo, nunca ejecutando un agente. Las variantes repetidas o sin
    filas que respalden la respuesta se descartan, salvo en las sondas
    vacías, que deben dar cero.

    :param world: El mundo sintético.
    :param templates: Plantillas validadas.
    :param int n_per_template: Variantes pedidas por plantilla.
    :param int seed: Semilla de las tareas.
    :rtype: list
    """
    if n_per_template < 1:
        raise TemplateError('n_per_template debe ser al menos 1')
    tareas = []
    for plantilla in templates:
        vistos = set()
        generadas = 0
        for intento in range(n_per_template * INTENTOS_POR_VARIANTE):
            if generadas == n_per_template:
                break
            rng = SplitMix64(semilla(seed, plantilla.template_id, intento))
            slots = sample_slots(plantilla, world, rng)
            clave = helpers.json_canonico(slots)
            if clave in vistos:
                continue
            vistos.add(clave)
            valor, detecciones, filas = brute_force_answer(plantilla, slots, world)
            if plantilla.probe:
                if filas:
                    raise TemplateError(f'{plantilla.template_id}: la sonda no quedó vacía')
            elif not filas or valor is None:
                continue
            tareas.append(_tarea(plantilla, slots, generadas, world, valor, detecciones))
            generadas += 1
        if generadas < n_per_template:
            logger.info('%s: %d de %d variantes', plantilla.template_id, generadas,
                        n_per_template)
    return tareas
