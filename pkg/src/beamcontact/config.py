"""Line-oriented ``key = value`` config files for the CLI.

Recognized keys: a, b, alpha1, alpha2, beta1, beta2, K, g, N, Ns, tol,
max_iter, seed, out.  ``#`` starts a comment, blank lines are skipped,
keys may appear once.  The surface g is an expression in x (see
``expressions``); its derivative is built here so a non-differentiable
expression is rejected up front.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .expressions import Expression, ParseError, parse_expression
from .model import BVPSpec, PiecewiseLinearContact

__all__ = ["ConfigError", "StudyConfig", "parse_config", "load_config"]

_FLOAT_KEYS = ("a", "b", "alpha1", "alpha2", "beta1", "beta2", "K", "tol")
_INT_KEYS = ("N", "max_iter", "seed")
_ALL_KEYS = set(_FLOAT_KEYS) | set(_INT_KEYS) | {"g", "Ns", "out"}
_REQUIRED = ("a", "b", "alpha1", "alpha2", "beta1", "beta2", "K", "g")


class ConfigError(ValueError):
    """Malformed or invalid config; carries the line number when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        prefix = f"line {line}: " if line is not None else ""
        middle = f"key {key!r}: " if key is not None else ""
        super().__init__(f"{prefix}{middle}{message}")
        self.line = line
        self.key = key


@dataclass(frozen=True)
class StudyConfig:
    """Validated problem plus harness settings from one config file."""

    spec: BVPSpec
    stiffness: float
    surface_text: str
    surface: Expression
    surface_slope: Expression
    n: int | None
    n_list: tuple[int, ...] | None
    tol: float | None
    max_iter: int
    seed: int
    output_dir: Path

    def contact(self) -> PiecewiseLinearContact:
        return PiecewiseLinearContact(
            stiffness=self.stiffness,
            surface=self.surface,
            surface_slope=self.surface_slope,
        )

    def with_overrides(
        self, output_dir: Path | None = None, seed: int | None = None
    ) -> "StudyConfig":
        out = self
        if output_dir is not None:
            out = replace(out, output_dir=Path(output_dir))
        if seed is not None:
            out = replace(out, seed=seed)
        return out


def _parse_lines(text: str) -> dict:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError("unknown key", line=lineno, key=key)
        if key in entries:
            raise ConfigError("duplicate key", line=lineno, key=key)
        if not value:
            raise ConfigError("empty value", line=lineno, key=key)
        entries[key] = (lineno, value)
    return entries


def _to_float(entries: dict, key: str) -> float | None:
    if key not in entries:
        return None
    lineno, value = entries[key]
    try:
        out = float(value)
    except ValueError:
        raise ConfigError(f"not a number: {value!r}", line=lineno, key=key) from None
    if not np.isfinite(out):
        raise ConfigError(f"not finite: {value!r}", line=lineno, key=key)
    return out


def _to_int(entries: dict, key: str) -> int | None:
    if key not in entries:
        return None
    lineno, value = entries[key]
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"not an integer: {value!r}", line=lineno, key=key) from None


def parse_config(text: str) -> StudyConfig:
    """Parse and fully validate config text; raises ConfigError otherwise."""
    entries = _parse_lines(text)
    for key in _REQUIRED:
        if key not in entries:
            raise ConfigError("missing required key", key=key)

    floats = {key: _to_float(entries, key) for key in _FLOAT_KEYS}
    ints = {key: _to_int(entries, key) for key in _INT_KEYS}

    try:
        spec = BVPSpec(
            a=floats["a"],
            b=floats["b"],
            alpha1=floats["alpha1"],
            alpha2=floats["alpha2"],
            beta1=floats["beta1"],
            beta2=floats["beta2"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc), line=entries["a"][0], key="a") from None

    if floats["K"] < 0.0:
        raise ConfigError("stiffness must be >= 0", line=entries["K"][0], key="K")

    g_line, g_text = entries["g"]
    try:
        surface = parse_expression(g_text)
        slope = surface.derivative()
    except (ParseError, ValueError) as exc:
        raise ConfigError(str(exc), line=g_line, key="g") from None
    samples = surface(np.linspace(spec.a, spec.b, 257))
    if not np.all(np.isfinite(samples)):
        raise ConfigError("expression is not finite everywhere on [a, b]", line=g_line, key="g")

    n = ints["N"]
    if n is not None and n < 5:
        raise ConfigError("need N >= 5", line=entries["N"][0], key="N")

    n_list = None
    if "Ns" in entries:
        ns_line, ns_text = entries["Ns"]
        try:
            n_list = tuple(int(part.strip()) for part in ns_text.split(","))
        except ValueError:
            raise ConfigError(f"not a comma-separated integer list: {ns_text!r}",
                              line=ns_line, key="Ns") from None
        if any(nk < 5 for nk in n_list):
            raise ConfigError("every entry must be >= 5", line=ns_line, key="Ns")
        if any(n2 <= n1 for n1, n2 in zip(n_list, n_list[1:])):
            raise ConfigError("entries must be strictly increasing", line=ns_line, key="Ns")

    tol = floats["tol"]
    if tol is not None and tol <= 0.0:
        raise ConfigError("tol must be positive", line=entries["tol"][0], key="tol")
    max_iter = ints["max_iter"] if ints["max_iter"] is not None else 100000
    if max_iter < 1:
        raise ConfigError("max_iter must be >= 1", line=entries["max_iter"][0], key="max_iter")
    out_dir = Path(entries["out"][1]) if "out" in entries else Path(".")

    return StudyConfig(
        spec=spec,
        stiffness=floats["K"],
        surface_text=g_text,
        surface=surface,
        surface_slope=slope,
        n=n,
        n_list=n_list,
        tol=tol,
        max_iter=max_iter,
        seed=ints["seed"] if ints["seed"] is not None else 0,
        output_dir=out_dir,
    )


def load_config(path) -> StudyConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
