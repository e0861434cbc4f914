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

from pampero import reportes
from pampero.ledger import tool_call_a_dict


def system_message(wf, mode):
    """Mensaje de sistema: la definición del workflow en ``stateflow`` o el
    preámbulo ReAct en los modos de línea de base."""
    if mode != 'stateflow':
        return reportes.reporte('sistema_react.txt').strip()
    return reportes.reporte(
        'sistema_stateflow.txt', preamble=wf.preamble, estados=wf.states,
        sucesores=wf.transitions
    ).strip()


def state_message(wf, estado, herramientas, recordatorio=False):
    return reportes.reporte(
        'instrucciones_estado.txt', estado=wf.state(estado),
        herramientas=[h.name for h in herramientas], recordatorio=recordatorio
    ).strip()


def reflection_message(llamada, resultado, definicion):
    """Bloque SELF-REFLECT con la llamada fallida, su error y la definición
    completa de la herramienta."""
    return reportes.reporte(
        'reflexion.txt', llamada=tool_call_a_dict(llamada), error=resultado.payload,
        definicion=definicion.schema() if definicion is not None else None
    ).strip()


def confirmation_message():
    return reportes.reporte('confirmacion.txt').strip()


def routing_message(wf, reintento=False):
    return reportes.reporte(
        'ruteo.txt', intenciones=list(wf.intent_routes), reintento=reintento
    ).strip()
