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

import hashlib

MASCARA = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15


def _mezclar(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASCARA
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASCARA
    return z ^ (z >> 31)


def _entero(parte):
    if isinstance(parte, int):
        return parte & MASCARA
    digest = hashlib.blake2b(str(parte).encode('utf-8'), digest_size=8).digest()
    return int.from_bytes(digest, 'little')


def semilla(*partes):
    """Deriva una semilla de 64 bits a partir de enteros y textos.

    Es una función pura de sus argumentos, estable entre plataformas.
    """
    estado = 0
    for parte in partes:
        estado = _mezclar(((estado + _GOLDEN) & MASCARA) ^ _entero(parte))
    return estado


def uniforme(valor):
    """Convierte un entero de 64 bits en un ``float`` en [0, 1)."""
    return (valor >> 11) * (2.0 ** -53)


class SplitMix64:
    """Generador splitmix64. Determinístico y sin dependencias de plataforma.

    :param int seed: Semilla de 64 bits.
    """
    def __init__(self, seed):
        self.estado = seed & MASCARA

    def next_u64(self):
        self.estado = (self.estado + _GOLDEN) & MASCARA
        return _mezclar(self.estado)

    def random(self):
        return uniforme(self.next_u64())

    def uniform(self, a, b):
        return a + (b - a) * self.random()

    def randint(self, a, b):
        """Entero en [a, b], ambos inclusive."""
        return a + self.next_u64() % (b - a + 1)

    def choice(self, secuencia):
        return secuencia[self.randint(0, len(secuencia) - 1)]

    def shuffle(self, lista):
        for i in range(len(lista) - 1, 0, -1):
            j = self.randint(0, i)
            lista[i], lista[j] = lista[j], lista[i]
