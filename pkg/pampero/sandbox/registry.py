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

from pampero.ledger import ParamSpec, ToolDefinition
from .catalog import PRODUCTS, CATEGORIES, VARIABLES, AGGREGATES

# Tipo de handle que espera cada parámetro de tipo handle.
HANDLE_KINDS = {
    'filter_spatial': ('image_set', 'detection_set'),
    'filter_temporal': ('image_set', 'detection_set'),
    'run_detection': ('image_set',),
    'filter_category': ('detection_set',),
    'render_map': ('detection_set',),
    'correlate': ('detection_set',),
}


def es_handle(param):
    return param.name.endswith('handle')


def _handle(descripcion='Identificador de un handle devuelto por otra herramienta.'):
    return ParamSpec('handle', 'string', True, descripcion)


_DEFINICIONES = (
    ToolDefinition(
        'list_products', 'List the satellite products available in the catalog.'
    ),
    ToolDefinition(
        'load_product', 'Load every image of a satellite product into a new image set handle.',
        (ParamSpec('product', 'enum', True, 'Product name.', PRODUCTS),)
    ),
    ToolDefinition(
        'filter_spatial',
        'Keep the images or detections whose centre lies inside a bounding box or a '
        'named region.',
        (
            _handle(),
            ParamSpec('bbox', 'array', False,
                      'Bounding box [min_lon, min_lat, max_lon, max_lat] in degrees.',
                      items='number'),
            ParamSpec('region', 'string', False, 'Region name, for example R1.'),
        )
    ),
    ToolDefinition(
        'filter_temporal',
        'Keep the images or detections acquired between two dates, both inclusive.',
        (
            _handle(),
            ParamSpec('start_date', 'string', True, 'Start date, YYYY-MM-DD.'),
            ParamSpec('end_date', 'string', True, 'End date, YYYY-MM-DD.'),
        )
    ),
    ToolDefinition(
        'run_detection', 'Run the object detector over an image set.',
        (
            _handle('Image set handle.'),
            ParamSpec('drop_rate', 'number', False,
                      'Probability of missing each object (default 0).'),
            ParamSpec('jitter', 'number', False,
                      'Uniform noise added to each box coordinate (default 0).'),
        )
    ),
    ToolDefinition(
        'filter_category', 'Keep the detections of one object category.',
        (
            _handle('Detection set handle.'),
            ParamSpec('category', 'enum', True, 'Object category.', CATEGORIES),
        )
    ),
    ToolDefinition(
        'render_map', 'Render a detection set onto a GeoJSON map.',
        (
            _handle('Detection set handle.'),
            ParamSpec('out_path', 'string', False, 'Output file name (optional).'),
        )
    ),
    ToolDefinition(
        'query_series', 'Aggregate a daily product time series of a region.',
        (
            ParamSpec('region', 'string', True, 'Region name, for example R1.'),
            ParamSpec('variable', 'enum', True, 'Series variable.', VARIABLES),
            ParamSpec('start_date', 'string', True, 'Start date, YYYY-MM-DD.'),
            ParamSpec('end_date', 'string', True, 'End date, YYYY-MM-DD.'),
            ParamSpec('aggregate', 'enum', True, 'Aggregation function.', AGGREGATES),
        )
    ),
    ToolDefinition(
        'correlate',
        'Sum the population of the regions containing each damaged building detection.',
        (
            ParamSpec('damage_handle', 'string', True, 'Detection set of damaged buildings.'),
            ParamSpec('population_variable', 'enum', True, 'Population variable.',
                      ('population',)),
        )
    ),
    ToolDefinition(
        'final_answer', 'Submit the final answer of the task and close the run.',
        (
            ParamSpec('value', 'number', False, 'Numeric answer.'),
            ParamSpec('text', 'string', False, 'Textual answer.'),
        )
    ),
)

REGISTRY = {definicion.name: definicion for definicion in _DEFINICIONES}

# Herramientas sujetas a fallas inyectadas por defecto.
DATA_TOOLS = tuple(
    nombre for nombre in REGISTRY if nombre not in ('list_products', 'final_answer')
)


def full_registry():
    """Todas las definiciones en orden de registro, como las ve el modo react."""
    return list(_DEFINICIONES)
