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

from collections import namedtuple
import numpy as np

GatingSimulation = namedtuple('GatingSimulation', 'full gated')


def _probabilidades(eta, tamanos):
    return (1 - eta) + eta / np.asarray(tamanos, dtype=float)


def _politica(eta, tamanos, trials, rng):
    p = _probabilidades(eta, tamanos)
    analitico = float(np.prod(p))
    aciertos = rng.random((trials, len(p))) < p
    empirico = float(aciertos.all(axis=1).mean())
    return analitico, empirico


def simulate_gating_policy(eta, full_toolset_size, gated_sizes, steps, trials=10000, seed=0):
    """Modelo sintético del beneficio de filtrar herramientas por estado.

    En cada paso el agente elige la herramienta correcta con probabilidad
    ``(1 - eta) + eta / |T_k|``; la tarea tiene éxito si acierta en todos los
    pasos.

    :param float eta: Tasa de error de la política, en [0, 1].
    :param int full_toolset_size: Tamaño del registro completo.
    :param gated_sizes: Tamaño del conjunto filtrado, uno solo o uno por paso.
    :param int steps: Cantidad de pasos.
    :param int trials: Repeticiones del Monte Carlo.
    :param int seed: Semilla.
    :returns: ``GatingSimulation(full, gated)``, cada uno ``(analitico, empirico)``.
    """
    if not 0 <= eta <= 1:
        raise ValueError('eta debe estar en [0, 1]')
    if trials < 1 or steps < 1:
        raise ValueError('trials y steps deben ser al menos 1')
    if np.isscalar(gated_sizes):
        gated_sizes = [gated_sizes] * steps
    if len(gated_sizes) != steps:
        raise ValueError('se necesita un tamaño filtrado por paso')
    rng = np.random.default_rng(seed)
    completo = _politica(eta, [full_toolset_size] * steps, trials, rng)
    filtrado = _politica(eta, gated_sizes, trials, rng)
    return GatingSimulation(completo, filtrado)
