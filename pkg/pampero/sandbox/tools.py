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

import hashlib
import json
import logging
import os
from collections import namedtuple
from datetime import date
from pampero import helpers
from pampero.ledger import ToolResult
from . import excepciones as exc
from .catalog import UNIDADES, SEMILADO_IMAGEN, agregar, contiene
from .faults import SIN_FALLAS, arm_faults, fires
from .registry import REGISTRY, HANDLE_KINDS, es_handle
from .rng import SplitMix64, semilla

logger = logging.getLogger(__name__)

Handle = namedtuple('Handle', 'handle_id kind contents parent')

Detection = namedtuple('Detection', 'detection_id image_id category bbox')

ERROR = 'error'

OK = 'ok'

# Cantidad de identificadores que se muestran en cada resultado.
MUESTRA = 5

_TIPOS = {
    'string': (str,),
    'integer': (int,),
    'number': (int, float),
    'boolean': (bool,),
}


def _tipo_valido(valor, kind):
    if kind in ('integer', 'number') and isinstance(valor, bool):
        return False
    return isinstance(valor, _TIPOS[kind])


def _fecha(valor, nombre):
    try:
        return date.fromisoformat(valor).isoformat()
    except (TypeError, ValueError):
        raise exc.KindMismatch(f'{nombre}: se esperaba una fecha YYYY-MM-DD, no {valor!r}') \
            from None


def describir(error):
    """Texto ``<Nombre>: <mensaje>`` de un error del sandbox."""
    return f'{type(error).__name__}: {error}'


def handle_id(tool, parent, argumentos):
    """Identificador de un handle, determinado por su contenido."""
    clave = helpers.json_canonico([tool, parent, argumentos])
    return 'h' + hashlib.sha1(clave.encode('utf-8')).hexdigest()[:10]


def detection_id(image_id, indice):
    return f'{image_id}:{indice}'


def huella(imagen, bbox):
    """Polígono GeoJSON de una caja normalizada dentro de la huella de la imagen.

    La huella cubre ``±0.05°`` alrededor del centro; ``y`` crece hacia el sur.
    """
    lon0 = imagen.lon - SEMILADO_IMAGEN
    lat0 = imagen.lat + SEMILADO_IMAGEN
    lado = 2 * SEMILADO_IMAGEN
    x0, y0, x1, y1 = bbox
    esquinas = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
    return {
        'type': 'Polygon',
        'coordinates': [[
            [round(lon0 + x * lado, 6), round(lat0 - y * lado, 6)] for x, y in esquinas
        ]],
    }


class Sandbox:
    """Espacio de trabajo de una ejecución sobre un :class:`World` compartido.

    Mantiene la tabla de handles, el cursor de llamadas para el plan de fallas,
    la respuesta final y los artefactos generados. Ningún error del sandbox
    escapa de :meth:`execute`: se devuelven como ``ToolResult`` con estado
    ``error``.

    :param world: El mundo sintético.
    :param str task_id: Identificador de la tarea.
    :param str out_dir: Carpeta de artefactos. Con ``None`` los mapas se guardan
        solo en memoria.
    :param fault_plan: Una instancia de :class:`FaultPlan` (opcional).
    """
    def __init__(self, world, task_id, out_dir=None, fault_plan=None):
        self.world = world
        self.task_id = task_id
        self.out_dir = out_dir
        self.fault_plan = arm_faults(fault_plan or SIN_FALLAS)
        self.handles = {}
        self.call_index = 0
        self.answer = None
        self.artifacts = []
        self.maps = {}

    def execute(self, call):
        """Ejecuta una llamada a herramienta.

        :param call: Una instancia de :class:`ToolCall`.
        :rtype: ToolResult
        """
        indice = self.call_index
        self.call_index += 1
        try:
            if call.name not in REGISTRY:
                raise exc.UnknownFunction(f'herramienta desconocida {call.name!r}')
            if fires(self.fault_plan, self.task_id, indice, call.name):
                raise exc.InjectedFault('transient backend failure')
            argumentos = self._validar(REGISTRY[call.name], call.arguments)
            payload = getattr(self, f'_{call.name}')(**argumentos)
        except exc.ErrorSandbox as error:
            return ToolResult(call.call_id, ERROR, describir(error))
        return ToolResult(call.call_id, OK, helpers.json_canonico(payload))

    def _validar(self, definicion, argumentos):
        if not isinstance(argumentos, dict):
            raise exc.KindMismatch(f'{definicion.name}: los argumentos deben ser un objeto')
        for nombre in argumentos:
            if definicion.param(nombre) is None:
                esperados = ', '.join(p.name for p in definicion.parameters) or '-'
                raise exc.UnknownArgument(
                    f'{definicion.name}: argumento desconocido {nombre!r} '
                    f'(se esperaba uno de: {esperados})'
                )
        for nombre in definicion.requeridos:
            if argumentos.get(nombre) is None:
                raise exc.MissingArgument(f'{definicion.name}: falta el argumento {nombre!r}')
        validados = {}
        for param in definicion.parameters:
            valor = argumentos.get(param.name)
            if valor is None:
                continue
            if param.kind == 'enum':
                if valor not in param.values:
                    error = exc.UnknownProduct if param.name == 'product' else exc.KindMismatch
                    raise error(
                        f'{param.name}: valor desconocido {valor!r} '
                        f'(valores: {", ".join(param.values)})'
                    )
            elif param.kind == 'array':
                if not isinstance(valor, list) or \
                        not all(_tipo_valido(v, param.items) for v in valor):
                    raise exc.KindMismatch(
                        f'{param.name}: se esperaba una lista de {param.items}'
                    )
            elif not _tipo_valido(valor, param.kind):
                raise exc.KindMismatch(
                    f'{param.name}: se esperaba {param.kind}, no {type(valor).__name__}'
                )
            if es_handle(param):
                valor = self._handle(valor, HANDLE_KINDS[definicion.name], param.name)
            elif param.name.endswith('_date'):
                valor = _fecha(valor, param.name)
            validados[param.name] = valor
        return validados

    def _handle(self, identificador, tipos, nombre):
        try:
            handle = self.handles[identificador]
        except KeyError:
            raise exc.UnknownHandle(f'{nombre}: handle desconocido {identificador!r}') from None
        if handle.kind not in tipos:
            raise exc.KindMismatch(
                f'{nombre}: se esperaba {" o ".join(tipos)}, no {handle.kind}'
            )
        return handle

    def _registrar(self, tool, kind, contents, parent, argumentos):
        args = {
            k: (v.handle_id if isinstance(v, Handle) else v) for k, v in argumentos.items()
        }
        handle = Handle(handle_id(tool, parent, args), kind, tuple(contents), parent)
        self.handles[handle.handle_id] = handle
        return handle

    def _resumen(self, handle):
        if handle.kind == 'detection_set':
            ids = [d.detection_id for d in handle.contents]
        else:
            ids = list(handle.contents)
        resumen = {
            'handle': handle.handle_id, 'kind': handle.kind, 'count': len(ids),
            'sample': ids[:MUESTRA],
        }
        if not ids:
            resumen['warning'] = describir(exc.EmptyResult('el resultado no tiene elementos'))
        return resumen

    def _imagen(self, elemento):
        image_id = elemento.image_id if isinstance(elemento, Detection) else elemento
        return self.world.imagenes[image_id]

    def _list_products(self):
        return {
            'products': [
                {'product': producto, 'images': len(ids)}
                for producto, ids in self.world.por_producto.items()
            ]
        }

    def _load_product(self, product):
        handle = self._registrar(
            'load_product', 'image_set', self.world.por_producto[product], None,
            {'product': product}
        )
        return self._resumen(handle)

    def _filter_spatial(self, handle, bbox=None, region=None):
        if (bbox is None) == (region is None):
            raise exc.MissingArgument('filter_spatial: se necesita bbox o region, uno solo')
        if region is not None:
            if region not in self.world.regions:
                raise exc.UnknownRegion(f'region desconocida {region!r}')
            caja = self.world.regions[region]
        else:
            if len(bbox) != 4 or bbox[0] >= bbox[2] or bbox[1] >= bbox[3]:
                raise exc.KindMismatch(
                    'bbox: se esperaba [min_lon, min_lat, max_lon, max_lat] ordenado'
                )
            caja = tuple(bbox)
        contenido = [
            e for e in handle.contents
            if contiene(caja, self._imagen(e).lon, self._imagen(e).lat)
        ]
        argumentos = {'handle': handle, 'bbox': bbox, 'region': region}
        nuevo = self._registrar(
            'filter_spatial', handle.kind, contenido, handle.handle_id,
            {k: v for k, v in argumentos.items() if v is not None}
        )
        return self._resumen(nuevo)

    def _filter_temporal(self, handle, start_date, end_date):
        contenido = [
            e for e in handle.contents
            if start_date <= self._imagen(e).timestamp <= end_date
        ]
        nuevo = self._registrar(
            'filter_temporal', handle.kind, contenido, handle.handle_id,
            {'handle': handle, 'start_date': start_date, 'end_date': end_date}
        )
        return self._resumen(nuevo)

    def _run_detection(self, handle, drop_rate=0, jitter=0):
        if not 0 <= drop_rate <= 1 or not 0 <= jitter <= 1:
            raise exc.KindMismatch('drop_rate y jitter deben estar en [0, 1]')
        detecciones = []
        for image_id in handle.contents:
            imagen = self.world.imagenes[image_id]
            for i, objeto in enumerate(imagen.objects):
                bbox = objeto.bbox
                if drop_rate or jitter:
                    rng = SplitMix64(semilla('detection', image_id, i, repr(drop_rate),
                                             repr(jitter)))
                    if rng.random() < drop_rate:
                        continue
                    bbox = _ruido(rng, bbox, jitter)
                detecciones.append(
                    Detection(detection_id(image_id, i), image_id, objeto.category, bbox)
                )
        argumentos = {'handle': handle}
        if drop_rate:
            argumentos['drop_rate'] = drop_rate
        if jitter:
            argumentos['jitter'] = jitter
        nuevo = self._registrar(
            'run_detection', 'detection_set', detecciones, handle.handle_id, argumentos
        )
        return self._resumen(nuevo)

    def _filter_category(self, handle, category):
        contenido = [d for d in handle.contents if d.category == category]
        nuevo = self._registrar(
            'filter_category', 'detection_set', contenido, handle.handle_id,
            {'handle': handle, 'category': category}
        )
        return self._resumen(nuevo)

    def _render_map(self, handle, out_path=None):
        nombre = os.path.basename(out_path) if out_path else f'{self.task_id}_map.geojson'
        features = [
            {
                'type': 'Feature',
                'geometry': huella(self._imagen(d), d.bbox),
                'properties': {
                    'id': d.detection_id, 'image_id': d.image_id,
                    'category': d.category, 'bbox': list(d.bbox),
                },
            }
            for d in handle.contents
        ]
        geojson = {'type': 'FeatureCollection', 'features': features}
        ruta = nombre
        if self.out_dir is not None:
            os.makedirs(self.out_dir, exist_ok=True)
            ruta = os.path.join(self.out_dir, nombre)
            with open(ruta, 'w', encoding='utf-8') as archivo:
                json.dump(geojson, archivo, indent=1)
        self.maps[ruta] = geojson
        if ruta not in self.artifacts:
            self.artifacts.append(ruta)
        resultado = {'artifact': ruta, 'features': len(features)}
        if not features:
            resultado['warning'] = describir(exc.EmptyResult('el mapa no tiene detecciones'))
        return resultado

    def _query_series(self, region, variable, start_date, end_date, aggregate):
        if region not in self.world.regions:
            raise exc.UnknownRegion(f'region desconocida {region!r}')
        filas = self.world.serie(region, variable, start_date, end_date)
        valor = agregar([v for _, v in filas], aggregate)
        nuevo = self._registrar(
            'query_series', 'series_slice', filas, None,
            {'region': region, 'variable': variable, 'start_date': start_date,
             'end_date': end_date, 'aggregate': aggregate}
        )
        resultado = {
            'value': None if valor is None else round(valor, 6),
            'units': UNIDADES[variable], 'handle': nuevo.handle_id, 'days': len(filas),
        }
        if not filas:
            resultado['warning'] = describir(exc.EmptyResult('no hay datos en el período'))
        return resultado

    def _correlate(self, damage_handle, population_variable):
        total = 0
        contadas = 0
        for d in damage_handle.contents:
            if d.category != 'building':
                continue
            imagen = self._imagen(d)
            region = self.world.region_de(imagen.lon, imagen.lat)
            if region is None:
                continue
            valor = self.world.valor(region, population_variable, imagen.timestamp)
            if valor is not None:
                total += valor
                contadas += 1
        return {'value': total, 'buildings': contadas}

    def _final_answer(self, value=None, text=None):
        if value is None and text is None:
            raise exc.MissingArgument('final_answer: se necesita value o text')
        self.answer = {'value': value, 'text': text}
        return {'accepted': True}


def _ruido(rng, bbox, jitter):
    if not jitter:
        return bbox
    valores = [
        min(max(c + rng.uniform(-jitter, jitter), 0.0), 1.0) for c in bbox
    ]
    x0, x1 = sorted((valores[0], valores[2]))
    y0, y1 = sorted((valores[1], valores[3]))
    return (round(x0, 4), round(y0, 4), round(x1, 4), round(y1, 4))
