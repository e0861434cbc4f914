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

import tomllib
from collections import namedtuple
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pampero.reportes import convertir
from .excepciones import PricingError, UnknownModelPricing

ModelRates = namedtuple('ModelRates', 'input cached output')

LocalRates = namedtuple('LocalRates', 'hourly_rate capacity')

# Las tarifas de los modelos se expresan por millón de tokens.
POR_TOKENS = 1e6


class _TarifaDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    input: float = Field(ge=0)
    cached: float = Field(0.0, ge=0)
    output: float = Field(ge=0)


class _LocalDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    hourly_rate: float = Field(ge=0)
    capacity: int = Field(1, ge=1)


class _PreciosDoc(BaseModel):
    model_config = ConfigDict(extra='forbid')

    models: dict[str, _TarifaDoc] = {}
    local: _LocalDoc | None = None


class PricingTable:
    """Tarifas de los modelos de API y del despliegue local.

    :param dict models: Nombre del modelo -> :class:`ModelRates`.
    :param local: Una instancia de :class:`LocalRates` (opcional).
    """
    def __init__(self, models=None, local=None):
        self.models = dict(models or {})
        self.local = local

    def rates(self, modelo):
        try:
            return self.models[modelo]
        except KeyError:
            raise UnknownModelPricing(f'no hay tarifas para el modelo {modelo!r}') from None


def pricing_table(datos):
    try:
        doc = _PreciosDoc.model_validate(datos)
    except ValidationError as error:
        detalles = '; '.join(
            f'{".".join(str(p) for p in e["loc"])}: {e["msg"]}' for e in error.errors()
        )
        raise PricingError(detalles) from None
    modelos = {
        nombre: ModelRates(t.input, t.cached, t.output) for nombre, t in doc.models.items()
    }
    local = LocalRates(doc.local.hourly_rate, doc.local.capacity) if doc.local else None
    return PricingTable(modelos, local)


def load_pricing(ruta):
    """Lee un archivo ``pricing.toml``::

        [models."gpt-4o"]
        input = 2.50
        cached = 1.25
        output = 10.00

        [local]
        hourly_rate = 10.0
        capacity = 8

    :raises PricingError: Si el archivo no existe o es inválido.
    :rtype: PricingTable
    """
    try:
        with open(ruta, 'rb') as archivo:
            datos = tomllib.load(archivo)
    except OSError as error:
        raise PricingError(f'{ruta}: {error.strerror}') from None
    except tomllib.TOMLDecodeError as error:
        raise PricingError(f'{ruta}: TOML inválido ({error})') from None
    return pricing_table(datos)


def api_cost(input_tokens, cached_tokens, output_tokens, rates):
    return (
        input_tokens * rates.input + cached_tokens * rates.cached
        + output_tokens * rates.output
    ) / POR_TOKENS


def local_cost(wall_seconds, local):
    """Costo amortizado: tarifa horaria dividida por la cantidad de modelos que
    caben en simultáneo, por las horas de ejecución."""
    return local.hourly_rate / local.capacity * convertir(wall_seconds, 'second', 'hour')


def compute_cost(run, pricing, backend_kind=None):
    """Costo de una ejecución.

    :param run: Un :class:`RunRecord`.
    :param pricing: Una :class:`PricingTable`.
    :param str backend_kind: ``api`` o ``local``; por defecto la facturación
        registrada en la ejecución.
    :raises UnknownModelPricing: Si el modelo no tiene tarifas.
    :rtype: float
    """
    facturacion = backend_kind or run.billing
    uso = run.usage
    if facturacion == 'local':
        if pricing.local is None:
            raise UnknownModelPricing('no hay tarifas para el despliegue local')
        return local_cost(uso.get('wall_seconds', 0.0), pricing.local)
    return api_cost(
        uso.get('input_tokens', 0), uso.get('cached_tokens', 0), uso.get('output_tokens', 0),
        pricing.rates(run.pricing_model)
    )
