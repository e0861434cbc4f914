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

from jinja2 import Environment, FileSystemLoader
from pint import UnitRegistry
from pampero import recursos

ureg = UnitRegistry()


def convertir(valor, unidad_inicial, unidad_final):
    if unidad_inicial == unidad_final:
        return valor
    valor *= ureg(unidad_inicial)
    return valor.to(unidad_final).magnitude


def porcentaje(valor, decimales=2):
    if valor is None:
        return '-'
    return f'{valor:.{decimales}f}'


file_loader = FileSystemLoader(recursos.CARPETA_PLANTILLAS)
env = Environment(
    loader=file_loader, keep_trailing_newline=True, trim_blocks=True,
    lstrip_blocks=True
)
env.filters['convertir'] = convertir
env.filters['porcentaje'] = porcentaje


def reporte(plantilla, **kwargs):
    plantilla_ = env.get_template(plantilla)
    return plantilla_.render(**kwargs)
