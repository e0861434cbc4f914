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

CARPETA = os.path.dirname(os.path.realpath(__file__))

CARPETA_FLOWS = os.path.join(CARPETA, 'recursos', 'flows')

CARPETA_PLANTILLAS = os.path.join(CARPETA, 'recursos', 'plantillas')

CARPETA_TAREAS = os.path.join(CARPETA, 'recursos', 'tareas')

CARPETA_CONFIG = os.path.join(CARPETA, 'recursos', 'config')

TEMPLATES_TAREAS = os.path.join(CARPETA_TAREAS, 'templates.yaml')

PRICING = os.path.join(CARPETA_CONFIG, 'pricing.toml')


def flow(nombre):
    """Ruta de un workflow incluido en el paquete.

    :param str nombre: Nombre del workflow sin extensión, por ejemplo
        ``eo_single``.
    :rtype: str
    """
    return os.path.join(CARPETA_FLOWS, f'{nombre}.flow')
