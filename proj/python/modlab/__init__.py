"""Python access to the modlab experiments and closed forms.

Model and modulator parameters are passed as keyword arguments using the
config-file key names, e.g. ``moments(64, family="student-t", nu=6)``.
"""

from . import _modlab
from ._modlab import (
    ConfigError,
    canonical_config,
    config_hash,
    stable_variance_closed_form,
    version,
    wishart_det_invsqrt_exact,
)

__all__ = [
    "ConfigError",
    "canonical_config",
    "config_hash",
    "gram_rate",
    "moments",
    "polya_residual",
    "psi",
    "quant_constant",
    "run",
    "sample",
    "stable_variance_closed_form",
    "v_inverse_moment",
    "version",
    "wishart_det_invsqrt_exact",
]

__version__ = version()


def _kv(params):
    out = []
    for key, value in params.items():
        if isinstance(value, (list, tuple)):
            value = ", ".join(str(v) for v in value)
        out.append(f"{key}={value}")
    return out


def run(config, **overrides):
    """Run a config given as text or a path. Overrides use section__key=value."""
    text = config
    if "\n" not in config:
        with open(config, encoding="utf-8") as fh:
            text = fh.read()
    sets = _kv({k.replace("__", "."): v for k, v in overrides.items()})
    return _modlab.run_config(text, sets)


def moments(d, **model):
    return _modlab.moments(_kv(model), d)


def sample(d, seed, path=(), **model):
    return _modlab.sample(_kv(model), d, seed, list(path))


def psi(s, **modulator):
    return _modlab.psi(_kv(modulator), s)


def v_inverse_moment(k, **modulator):
    return _modlab.v_inverse_moment(_kv(modulator), k)


def polya_residual(t_grid, **modulator):
    return _modlab.polya_residual(_kv(modulator), list(t_grid))


def quant_constant(sigma, j, **modulator):
    return _modlab.quant_constant(_kv(modulator), sigma, j)


def gram_rate(d, j, reps=10000, seed=1, **model):
    """Returns (value, se, exact)."""
    return _modlab.gram_rate(_kv(model), d, j, reps, seed)
