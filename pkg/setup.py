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
from setuptools import find_packages, setup

CARPETA = os.path.dirname(os.path.realpath(__file__))

about = {}
with open(os.path.join(CARPETA, 'pampero', '__about__.py'), encoding='utf-8') as archivo:
    exec(archivo.read(), about)

setup(
    name='pampero',
    version=about['__version__'],
    description='Agente de herramientas guiado por estados para workflows de observación '
                'de la Tierra',
    url=about['__url__'],
    license=about['__licencia__'],
    python_requires='>=3.11',
    packages=find_packages(exclude=('tests',)),
    package_data={'pampero': ['recursos/*/*']},
    install_requires=[
        'cached-property', 'Jinja2', 'numpy', 'Pint', 'pydantic>=2', 'PyYAML', 'requests'
    ],
    extras_require={'dev': ['flake8', 'pytest']},
    entry_points={'console_scripts': ['pampero=pampero.main:main']},
)
