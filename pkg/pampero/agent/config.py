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

from dataclasses import dataclass
from .excepciones import ConfigAgenteError

MODES = ('stateflow', 'react', 'react_errtrm')


@dataclass(frozen=True)
class AgentConfig:
    """Configuración del bucle del agente.

    ``stateflow`` fuerza el filtrado de herramientas por estado. ``react`` es
    la línea de base sin estados, sin reflexión y sin validación del cierre;
    ``react_errtrm`` agrega a ``react`` el manejo de errores y la validación
    del cierre.
    """
    mode: str = 'stateflow'
    max_turns: int = 25
    tool_gating: bool = True
    error_state_enabled: bool = True
    terminate_validation: bool = True
    reminder_cap: int = 2
    strict_transitions: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigAgenteError(f'modo desconocido {self.mode!r}')
        if self.max_turns < 1:
            raise ConfigAgenteError('max_turns debe ser al menos 1')
        if self.reminder_cap < 0:
            raise ConfigAgenteError('reminder_cap no puede ser negativo')
        if self.mode == 'stateflow' and not self.tool_gating:
            raise ConfigAgenteError('stateflow siempre filtra herramientas')
        if self.mode == 'react' and (
                self.tool_gating or self.error_state_enabled or self.terminate_validation):
            raise ConfigAgenteError('react no admite filtrado, reflexión ni validación')
        if self.mode == 'react_errtrm' and (
                self.tool_gating or not self.error_state_enabled
                or not self.terminate_validation):
            raise ConfigAgenteError('react_errtrm usa reflexión y validación sin filtrado')

    @property
    def stateflow(self):
        return self.mode == 'stateflow'

    @classmethod
    def for_mode(cls, mode, **kwargs):
        """Configuración con los valores que impone cada modo.

        Acepta ``react-errtrm`` como alias de ``react_errtrm``.
        """
        mode = mode.replace('-', '_')
        if mode == 'react':
            valores = dict(tool_gating=False, error_state_enabled=False,
                           terminate_validation=False)
        elif mode == 'react_errtrm':
            valores = dict(tool_gating=False, error_state_enabled=True,
                           terminate_validation=True)
        else:
            valores = dict(tool_gating=True)
        valores.update(kwargs)
        return cls(mode=mode, **valores)
