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

from pampero.excepciones import ErrorPampero, ErrorConfiguracion


class ErrorAgente(ErrorPampero):
    pass


class BackendFailure(ErrorAgente):
    """El backend falló durante una ejecución; la ejecución se aborta."""


class ConfigAgenteError(ErrorAgente, ErrorConfiguracion):
    pass
