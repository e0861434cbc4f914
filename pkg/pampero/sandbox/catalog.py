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

import csv
import json
import math
import os
from collections import namedtuple, defaultdict
from datetime import date, timedelta
import numpy as np
from cached_property import cached_property
from .excepciones import ConfigSandboxError
from .rng import SplitMix64


PRODUCTS = ('xview1', 'sentinel2', 'modis_terra')

CATEGORIES = ('ship', 'building', 'vehicle', 'aircraft')

VARIABLES = (
    'ndvi', 'lst', 'builtup', 'forest_loss', 'crop_index', 'damage_count', 'population'
)

VARIABLES_CONTEO = ('damage_count', 'population')

# Unidades de Pint de cada variable.
UNIDADES = {
    'ndvi': 'dimensionless', 'lst': 'kelvin', 'builtup': 'dimensionless',
    'forest_loss': 'hectare', 'crop_index': 'dimensionless',
    'damage_count': 'dimensionless', 'population': 'dimensionless'
}

AGGREGATES = ('mean', 'sum', 'min', 'max')

EPOCH_INICIO = date(2020, 4, 1)

EPOCH_DIAS = 90

# Mitad del lado de la huella de una imagen, en grados.
SEMILADO_IMAGEN = 0.05

CatalogObject = namedtuple('CatalogObject', 'category bbox')

CatalogImage = namedtuple('CatalogImage', 'image_id product lat lon timestamp objects')

ProductSeries = namedtuple('ProductSeries', 'region date variable value')


def fechas_epoch():
    return [(EPOCH_INICIO + timedelta(days=d)).isoformat() for d in range(EPOCH_DIAS)]


def agregar(valores, aggregate):
    """Aplica una función de agregación sobre una secuencia de valores.

    :param str aggregate: Valores aceptados = (mean, sum, min, max)
    :returns: El valor agregado o ``None`` si no hay valores.
    :rtype: float o None
    """
    if not len(valores):
        return None
    array = np.asarray(valores, dtype=float)
    funciones = {'mean': np.mean, 'sum': np.sum, 'min': np.min, 'max': np.max}
    return float(funciones[aggregate](array))


def _regiones(rng, n_regiones):
    celdas = [(lon, lat) for lat in range(-40, 40, 10) for lon in range(-180, 180, 10)]
    if n_regiones > len(celdas):
        raise ConfigSandboxError(f'a lo sumo {len(celdas)} regiones')
    rng.shuffle(celdas)
    regiones = {}
    for i, (lon, lat) in enumerate(celdas[:n_regiones]):
        x0 = round(lon + rng.uniform(0, 5), 2)
        y0 = round(lat + rng.uniform(0, 5), 2)
        regiones[f'R{i + 1}'] = (x0, y0, round(x0 + 4, 2), round(y0 + 4, 2))
    return regiones


def _objetos(rng):
    objetos = []
    for _ in range(rng.randint(0, 6)):
        categoria = rng.choice(CATEGORIES)
        ancho = 0.02 + 0.1 * rng.random()
        alto = 0.02 + 0.1 * rng.random()
        x0 = rng.random() * (1 - ancho)
        y0 = rng.random() * (1 - alto)
        bbox = (round(x0, 4), round(y0, 4), round(x0 + ancho, 4), round(y0 + alto, 4))
        objetos.append(CatalogObject(categoria, bbox))
    return tuple(objetos)


def _producto(rng):
    u = rng.random()
    if u < 0.5:
        return 'xview1'
    if u < 0.8:
        return 'sentinel2'
    return 'modis_terra'


def _imagenes(rng, n_imagenes, regiones):
    nombres = list(regiones)
    imagenes = []
    for i in range(n_imagenes):
        producto = _producto(rng)
        if rng.random() < 0.7:
            x0, y0, x1, y1 = regiones[rng.choice(nombres)]
            lon, lat = rng.uniform(x0, x1), rng.uniform(y0, y1)
        else:
            lon, lat = rng.uniform(-180, 180), rng.uniform(-60, 60)
        dia = EPOCH_INICIO + timedelta(days=rng.randint(0, EPOCH_DIAS - 1))
        imagenes.append(CatalogImage(
            f'{producto}_{i:05d}', producto, round(lat, 4), round(lon, 4),
            dia.isoformat(), _objetos(rng)
        ))
    return imagenes


def _acotar(valor, minimo, maximo):
    return min(max(valor, minimo), maximo)


def _series(rng, regiones):
    filas = []
    fechas = fechas_epoch()
    for region in regiones:
        ndvi = rng.uniform(0.1, 0.7)
        lst = rng.uniform(275, 305)
        urbano = rng.uniform(0.05, 0.6)
        bosque = rng.uniform(0, 50)
        cultivo = rng.uniform(0.2, 1.5)
        poblacion = rng.randint(1000, 500000)
        for d, fecha in enumerate(fechas):
            ciclo = math.sin(2 * math.pi * d / EPOCH_DIAS)
            valores = {
                'ndvi': _acotar(ndvi + 0.1 * ciclo + rng.uniform(-0.05, 0.05), -1, 1),
                'lst': lst + 8 * ciclo + rng.uniform(-2, 2),
                'builtup': _acotar(urbano + 0.0005 * d + rng.uniform(-0.01, 0.01), 0, 1),
                'forest_loss': bosque * rng.random(),
                'crop_index': max(0.0, cultivo + 0.3 * ciclo + rng.uniform(-0.1, 0.1)),
                # El evento del escenario sísmico ocurre a mitad del período.
                'damage_count': rng.randint(0, 20) if d >= EPOCH_DIAS // 2 else rng.randint(0, 2),
                'population': max(0, poblacion + rng.randint(-50, 50)),
            }
            for variable in VARIABLES:
                valor = valores[variable]
                if variable not in VARIABLES_CONTEO:
                    valor = round(valor, 4)
                filas.append(ProductSeries(region, fecha, variable, valor))
    return filas


def generate_catalog(seed, n_images, n_regions):
    """Genera el mundo sintético a partir de una semilla.

    El resultado es completamente determinístico en ``seed``: todas las
    muestras salen de un único generador splitmix64.

    :param int seed: La semilla.
    :param int n_images: Cantidad de imágenes del catálogo.
    :param int n_regions: Cantidad de regiones con series diarias.
    :returns: Tupla ``(catalogo, series, regiones)``.
    :rtype: tuple
    :raises ConfigSandboxError: Si las cantidades no son válidas.
    """
    if n_images < 1 or n_regions < 1:
        raise ConfigSandboxError('n_images y n_regions deben ser al menos 1')
    rng = SplitMix64(seed)
    regiones = _regiones(rng, n_regions)
    imagenes = _imagenes(rng, n_images, regiones)
    series = _series(rng, regiones)
    return imagenes, series, regiones


def contiene(bbox, lon, lat):
    x0, y0, x1, y1 = bbox
    return x0 <= lon <= x1 and y0 <= lat <= y1


class World:
    """Mundo sintético inmutable: catálogo de imágenes, series y regiones.

    Se comparte entre ejecuciones; cada ejecución trabaja sobre su propio
    :class:`Sandbox`.

    :param catalog: Secuencia de :class:`CatalogImage`.
    :param series: Secuencia de :class:`ProductSeries`.
    :param dict regions: Nombre -> ``(min_lon, min_lat, max_lon, max_lat)``.
    :param int seed: La semilla con que se generó (opcional).
    """
    def __init__(self, catalog, series, regions, seed=None):
        self.catalog = tuple(catalog)
        self.series = tuple(series)
        self.regions = dict(regions)
        self.seed = seed

    @classmethod
    def generate(cls, seed, n_images=400, n_regions=6):
        catalogo, series, regiones = generate_catalog(seed, n_images, n_regions)
        return cls(catalogo, series, regiones, seed)

    @cached_property
    def imagenes(self):
        return {imagen.image_id: imagen for imagen in self.catalog}

    @cached_property
    def por_producto(self):
        productos = {producto: [] for producto in PRODUCTS}
        for imagen in self.catalog:
            productos[imagen.product].append(imagen.image_id)
        return {producto: tuple(sorted(ids)) for producto, ids in productos.items()}

    @cached_property
    def _series_indexadas(self):
        indice = defaultdict(dict)
        for fila in self.series:
            indice[(fila.region, fila.variable)][fila.date] = fila.value
        return indice

    def serie(self, region, variable, inicio, fin):
        """Valores diarios de una variable de una región entre dos fechas ISO,
        ambas inclusive, en orden cronológico.

        :rtype: list
        """
        valores = self._series_indexadas.get((region, variable), {})
        return [(fecha, valores[fecha]) for fecha in sorted(valores) if inicio <= fecha <= fin]

    def valor(self, region, variable, fecha):
        return self._series_indexadas.get((region, variable), {}).get(fecha)

    def region_de(self, lon, lat):
        for nombre, bbox in self.regions.items():
            if contiene(bbox, lon, lat):
                return nombre
        return None

    def save(self, carpeta):
        """Escribe ``catalog.jsonl``, ``series.csv``, ``regions.json`` y
        ``world.json`` en una carpeta."""
        os.makedirs(carpeta, exist_ok=True)
        with open(os.path.join(carpeta, 'catalog.jsonl'), 'w', encoding='utf-8',
                  newline='\n') as archivo:
            for imagen in self.catalog:
                registro = {
                    'image_id': imagen.image_id, 'product': imagen.product,
                    'lat': imagen.lat, 'lon': imagen.lon, 'timestamp': imagen.timestamp,
                    'objects': [{'category': o.category, 'bbox': list(o.bbox)}
                                for o in imagen.objects],
                }
                archivo.write(json.dumps(registro) + '\n')
        with open(os.path.join(carpeta, 'series.csv'), 'w', encoding='utf-8',
                  newline='') as archivo:
            escritor = csv.writer(archivo, lineterminator='\n')
            escritor.writerow(('region', 'date', 'variable', 'value'))
            for fila in self.series:
                escritor.writerow(fila)
        with open(os.path.join(carpeta, 'regions.json'), 'w', encoding='utf-8') as archivo:
            json.dump({nombre: list(bbox) for nombre, bbox in self.regions.items()},
                      archivo, indent=2)
            archivo.write('\n')
        with open(os.path.join(carpeta, 'world.json'), 'w', encoding='utf-8') as archivo:
            json.dump({'seed': self.seed}, archivo)
            archivo.write('\n')

    @classmethod
    def load(cls, carpeta):
        catalogo = []
        with open(os.path.join(carpeta, 'catalog.jsonl'), encoding='utf-8') as archivo:
            for linea in archivo:
                if not linea.strip():
                    continue
                r = json.loads(linea)
                catalogo.append(CatalogImage(
                    r['image_id'], r['product'], r['lat'], r['lon'], r['timestamp'],
                    tuple(CatalogObject(o['category'], tuple(o['bbox'])) for o in r['objects'])
                ))
        series = []
        with open(os.path.join(carpeta, 'series.csv'), encoding='utf-8', newline='') as archivo:
            for fila in csv.DictReader(archivo):
                tipo = int if fila['variable'] in VARIABLES_CONTEO else float
                series.append(ProductSeries(
                    fila['region'], fila['date'], fila['variable'], tipo(fila['value'])
                ))
        with open(os.path.join(carpeta, 'regions.json'), encoding='utf-8') as archivo:
            regiones = {nombre: tuple(bbox) for nombre, bbox in json.load(archivo).items()}
        seed = None
        ruta_mundo = os.path.join(carpeta, 'world.json')
        if os.path.exists(ruta_mundo):
            with open(ruta_mundo, encoding='utf-8') as archivo:
                seed = json.load(archivo).get('seed')
        return cls(catalogo, series, regiones, seed)
