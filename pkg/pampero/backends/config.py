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
from typing import Literal, Optional
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from .excepciones import ConfigError


class BackendConfig(BaseModel):
    """Configuración de un backend de chat.

    ``billing`` indica el modelo de costo (``api`` o ``local``); por defecto es
    ``local`` para Ollama y ``api`` para el resto. ``script`` es la ruta de un
    paquete de guiones de replay y solo se usa con ``kind: replay``.
    """
    model_config = ConfigDict(extra='forbid', frozen=True)

    kind: Literal['openai_compat', 'ollama', 'replay']
    endpoint: str = ''
    model: str = ''
    api_key_env: str = ''
    temperature: float = Field(0.0, ge=0)
    tool_mode: Literal['native', 'text'] = 'native'
    request_timeout: float = Field(60.0, gt=0)
    max_retries: int = Field(3, ge=0, le=10)
    billing: Optional[Literal['api', 'local']] = None
    script: Optional[str] = None
    pricing_model: Optional[str] = None

    @model_validator(mode='after')
    def _validar(self):
        if self.kind != 'replay':
            if not self.endpoint:
                raise ValueError(f'{self.kind}: falta endpoint')
            if not self.endpoint.startswith(('http://', 'https://')):
                raise ValueError(f'{self.kind}: el endpoint debe empezar con http:// o https://')
            if not self.model:
                raise ValueError(f'{self.kind}: falta model')
        elif self.tool_mode != 'native':
            raise ValueError('replay: tool_mode debe ser native')
        return self

    @property
    def url_base(self):
        return self.endpoint.rstrip('/')

    @property
    def facturacion(self):
        if self.billing is not None:
            return self.billing
        return 'local' if self.kind == 'ollama' else 'api'

    @property
    def modelo_precios(self):
        return self.pricing_model or self.model


def backend_config(datos):
    """Valida un ``dict`` de configuración.

    :raises ConfigError: Si algún campo es inválido.
    :rtype: BackendConfig
    """
    if not isinstance(datos, dict):
        raise ConfigError('la configuración del backend debe ser un mapeo')
    try:
        return BackendConfig.model_validate(datos)
    except ValidationError as error:
        detalles = '; '.join(
            f'{".".join(str(p) for p in e["loc"]) or "<documento>"}: {e["msg"]}'
            for e in error.errors()
        )
        raise ConfigError(detalles) from None


def load_backend_config(ruta):
    """Lee un archivo YAML de configuración de backend.

    Una ruta ``script`` relativa se resuelve desde la carpeta del archivo.
    """
    try:
        with open(ruta, encoding='utf-8') as archivo:
            datos = yaml.safe_load(archivo)
    except OSError as error:
        raise ConfigError(f'{ruta}: {error.strerror}') from None
    except yaml.YAMLError as error:
        raise ConfigError(f'{ruta}: YAML inválido ({error})') from None
    if isinstance(datos, dict) and datos.get('script'):
        datos['script'] = os.path.join(os.path.dirname(os.path.abspath(ruta)), datos['script'])
    return backend_config(datos)
