"""Named integrand specifications.

A spec is ``"name"`` or ``"name:param"``.  Path integrands read the
integrator through its left limit, so they are predictable on skeletons.

=====================  ====================================  ==========
spec                   integrand                             bound
=====================  ====================================  ==========
``x_left``             ``X(t-)``                             none
``clip:c``             ``X(t-)`` clipped to ``[-c, c]``      ``c``
``weighted_x_left``    ``X(t-) * (1 + 1/(0.1 + t))``         none
``const:c``            ``c``                                 ``|c|``
``time``               ``t``                                 1
``sin:k``              ``sin(2 pi k t)``                     1
``indicator_after:a``  ``1{t > a}`` (left-continuous)        1
``indicator_from:a``   ``1{t >= a}`` (right-continuous)      1
``inv_sqrt``           ``t**-0.5`` for ``t > 0``, 0 at 0      none
=====================  ====================================  ==========
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .exceptions import ConfigError
from .paths import CadlagPath, Mode, SampledIntegrand


@dataclass(frozen=True)
class IntegrandSpec:
    name: str
    param: Optional[float]
    uses_path: bool
    left_continuous: bool

    def __str__(self):
        return self.name if self.param is None else f"{self.name}:{self.param:g}"


_PATH = {"x_left", "clip", "weighted_x_left"}
_DETERMINISTIC = {"const", "time", "sin", "indicator_after", "indicator_from", "inv_sqrt"}
_NEEDS_PARAM = {"clip", "const", "sin", "indicator_after", "indicator_from"}


def parse_integrand(spec: str) -> IntegrandSpec:
    name, _, raw = spec.strip().partition(":")
    if name not in _PATH | _DETERMINISTIC:
        raise ConfigError(f"unknown integrand {name!r}")
    if name in _NEEDS_PARAM and not raw:
        raise ConfigError(f"integrand {name!r} needs a parameter, e.g. '{name}:1'")
    try:
        param = float(raw) if raw else None
    except ValueError:
        raise ConfigError(f"bad integrand parameter in {spec!r}") from None
    if name == "clip" and param <= 0:
        raise ConfigError("clip level must be positive")
    return IntegrandSpec(name, param, name in _PATH, name != "indicator_from")


def _inv_sqrt(t):
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = 1.0 / np.sqrt(t[pos])
    return out


def make_integrand(spec: Union[str, IntegrandSpec], x: CadlagPath) -> SampledIntegrand:
    """Build the integrand for one path ``x`` from a spec."""
    if isinstance(spec, str):
        spec = parse_integrand(spec)
    c = spec.param
    if spec.name == "x_left":
        return SampledIntegrand(x, mode=Mode.LEFT_LIMIT)
    if spec.name == "clip":
        return SampledIntegrand(
            x, bound=c, mode=Mode.LEFT_LIMIT, func=lambda t, v: np.clip(v, -c, c)
        )
    if spec.name == "weighted_x_left":
        return SampledIntegrand(
            x, mode=Mode.LEFT_LIMIT, func=lambda t, v: v * (1.0 + 1.0 / (0.1 + t))
        )
    if spec.name == "const":
        return SampledIntegrand(lambda t: np.full_like(t, c), bound=abs(c))
    if spec.name == "time":
        return SampledIntegrand(lambda t: t, bound=1.0)
    if spec.name == "sin":
        return SampledIntegrand(lambda t: np.sin(2 * np.pi * c * t), bound=1.0)
    if spec.name == "indicator_after":
        return SampledIntegrand(lambda t: (t > c).astype(float), bound=1.0)
    if spec.name == "indicator_from":
        return SampledIntegrand(lambda t: (t >= c).astype(float), bound=1.0)
    return SampledIntegrand(_inv_sqrt)


IntegrandFactory = Callable[[CadlagPath], SampledIntegrand]


def integrand_factory(spec: Union[str, IntegrandSpec, IntegrandFactory]) -> IntegrandFactory:
    if callable(spec) and not isinstance(spec, IntegrandSpec):
        return spec
    parsed = parse_integrand(spec) if isinstance(spec, str) else spec
    return lambda x: make_integrand(parsed, x)
