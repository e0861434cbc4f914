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

import numbers
from collections import namedtuple
import numpy as np
from .tasks import default_tolerance

TrajectoryMatch = namedtuple('TrajectoryMatch', 'correctness alignment lcs')


def es_numero(valor):
    return isinstance(valor, numbers.Real) and not isinstance(valor, bool)


def value_matches(gold, executed, tolerancia=0.0):
    """Compara un valor esperado con el ejecutado.

    Los textos se comparan sin espacios extremos y sin distinguir mayúsculas;
    los números por error relativo; las listas elemento a elemento.
    """
    if isinstance(gold, str):
        return isinstance(executed, str) and \
            gold.strip().casefold() == executed.strip().casefold()
    if es_numero(gold):
        if not es_numero(executed):
            return False
        return abs(executed - gold) <= tolerancia * abs(gold)
    if isinstance(gold, (list, tuple)):
        return isinstance(executed, (list, tuple)) and len(gold) == len(executed) and all(
            value_matches(g, e, tolerancia) for g, e in zip(gold, executed)
        )
    return gold == executed


def call_matches(matcher, call):
    if matcher.name != call.name:
        return False
    for param, esperado in matcher.required_args.items():
        if param not in call.arguments:
            return False
        tolerancia = matcher.arg_tolerances.get(param, default_tolerance(param))
        if not value_matches(esperado, call.arguments[param], tolerancia):
            return False
    return True


def match_trajectory(gold, executed):
    """Compara la trayectoria ejecutada con la esperada.

    Usa la subsecuencia común más larga: un par coincide si el nombre es igual
    y todos los argumentos requeridos coinciden.

    :param gold: Secuencia de :class:`CallMatcher`.
    :param executed: Secuencia de :class:`ToolCall`.
    :returns: Una instancia de :class:`TrajectoryMatch`; ``correctness`` es
        ``|LCS| / max(|gold|, |executed|)`` y ``alignment`` la lista de pares
        de índices ``(gold, executed)`` alineados.
    """
    n, m = len(gold), len(executed)
    if max(n, m) == 0:
        return TrajectoryMatch(1.0, [], 0)
    tabla = np.zeros((n + 1, m + 1), dtype=int)
    for i in range(n):
        for j in range(m):
            if call_matches(gold[i], executed[j]):
                tabla[i + 1, j + 1] = tabla[i, j] + 1
            else:
                tabla[i + 1, j + 1] = max(tabla[i, j + 1], tabla[i + 1, j])
    alineacion = []
    i, j = n, m
    while i > 0 and j > 0:
        if tabla[i, j] == tabla[i - 1, j]:
            i -= 1
        elif tabla[i, j] == tabla[i, j - 1]:
            j -= 1
        else:
            alineacion.append((i - 1, j - 1))
            i -= 1
            j -= 1
    alineacion.reverse()
    largo = int(tabla[n, m])
    return TrajectoryMatch(largo / max(n, m), alineacion, largo)
