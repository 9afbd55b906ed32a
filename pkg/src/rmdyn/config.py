"""Flat sectioned key-value configs: parsing, validation, canonical snapshots.

Format: ``[section]`` headers, ``key = value`` lines, ``#``/``;`` comment
lines.  Every experiment kind has a schema of allowed keys with defaults;
unknown sections or keys are rejected with the offending line number, and
all defaults are echoed into the snapshot so a record's config is complete.

Units: natural units hbar = m = 1 by default (both overridable); lengths,
times and momenta are in those units throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigurationError

__all__ = ["RunConfig", "parse_config", "parse_config_text", "emit_snapshot", "default_config", "EXPERIMENT_KINDS"]

EXPERIMENT_KINDS = (
    "born",
    "half_prob",
    "brownian",
    "qct",
    "double_slit",
    "epr",
    "zeno",
    "product_form",
    "geometry_suite",
    "decomposition_suite",
)


def _positive(x) -> bool:
    return x > 0


def _nonnegative(x) -> bool:
    return x >= 0


def _any(_) -> bool:
    return True


def _positive_list(xs) -> bool:
    return len(xs) > 0 and all(x > 0 for x in xs)


# key spec: (type, default, validator); default None means required
_COMMON = {
    "experiment": {
        "kind": ("str", None, _any),
        "trials": ("int", 1000, _positive),
        "seed": ("int", 1, _nonnegative),
    },
    "grid": {
        "n": ("int", 128, _positive),
        "x_min": ("float", -16.0, _any),
        "x_max": ("float", 16.0, _any),
    },
    "walk": {
        "dt": ("float", 1e-3, _positive),
        "dz": ("float", 0.25, _positive),
        "max_steps": ("int", 20000, _positive),
        "hbar": ("float", 1.0, _positive),
        "mass": ("float", 1.0, _positive),
    },
    "gue": {
        "scale": ("float_or_auto", "auto", _any),
        "calib_trials": ("int", 200, lambda x: x >= 100),
        "calib_dim": ("int", 128, _positive),
    },
    "detector": {
        "sigma": ("float", 1.0, _positive),
        "mu_tol": ("float", 0.25, _positive),
        "spacing": ("float", 6.0, _positive),
        "center": ("float", 0.0, _any),
    },
    "output": {
        "dir": ("str", "out", _any),
    },
}

_PER_KIND = {
    "born": {
        "source": {
            "separation": ("float", 6.0, _positive),
            "weight_left": ("float", 0.5, lambda x: 0.0 <= x <= 1.0),
            "sigma": ("float", 1.0, _positive),
        },
    },
    "half_prob": {
        "source": {
            "separation": ("float", 6.0, _positive),
            "weight_left": ("float", 0.5, lambda x: 0.0 <= x <= 1.0),
            "sigma": ("float", 1.0, _positive),
        },
        "experiment_extra": {
            "t_obs_steps": ("int", 1000, lambda x: x >= 100),
        },
    },
    "brownian": {
        "detector_extra": {
            "spacing": ("float", 0.5, _positive),
        },
        "experiment_extra": {
            "n_records": ("int", 100, _positive),
            "max_steps_per_record": ("int", 10000, _positive),
        },
    },
    "qct": {
        "source": {
            "a0": ("float", 0.0, _any),
            "p0": ("float", 1.0, _any),
            "sigma": ("float", 0.8, _positive),
        },
        "potential": {
            "kind": ("str", "free", lambda s: s in ("free", "harmonic")),
            "k": ("float", 1.0, _positive),
        },
        "detector_extra": {
            "spacing": ("float", 0.5, _positive),
        },
        "walk_extra": {
            "dt": ("float", 0.01, _positive),
            "dz": ("float", 0.02, _positive),
        },
        "experiment_extra": {
            "kick_every": ("int", 4, _positive),
            "total_time": ("float", 8.0, _positive),
        },
    },
    "double_slit": {
        "grid_extra": {
            "n": ("int", 256, _positive),
            "x_min": ("float", -32.0, _any),
            "x_max": ("float", 48.0, _any),
        },
        "walk_extra": {
            "dz": ("float", 0.1, _positive),
        },
        "slits": {
            "separation": ("float", 8.0, _positive),
            "sigma": ("float", 0.7, _positive),
            "momentum": ("float", 1.0, _any),
            "mu_tol": ("float", 0.5, _positive),
        },
        "detector_extra": {
            "sigma": ("float", 0.5, _positive),
            "spacing": ("float", 1.5, _positive),
            "mu_tol": ("float", 0.3, _positive),
            "center": ("float", 10.0, _any),
        },
        "experiment_extra": {
            "screen_time": ("float", 10.0, _positive),
            "measure_at_slits": ("bool", False, _any),
        },
    },
    "epr": {
        "grid_extra": {
            "n": ("int", 64, _positive),
        },
        "source": {
            "u": ("float", 3.0, _positive),
            "sigma": ("float", 1.0, _positive),
        },
        "detector_extra": {
            "sigma_b": ("float", 1.0, _positive),
            "sigma_b_alt": ("float", 0.5, _positive),
        },
    },
    "zeno": {
        "grid_extra": {
            "n": ("int", 32, _positive),
            "x_min": ("float", -5.0, _any),
            "x_max": ("float", 5.0, _any),
        },
        "detector_extra": {
            "mu_tol": ("float", 0.5, _positive),
        },
        "gue_extra": {
            "scale": ("float_or_auto", 0.12, _any),
        },
        "experiment_extra": {
            "horizon": ("float", 3.2, _positive),
            "kick_intervals": ("floats", [0.2, 0.3, 0.4, 0.5], _positive_list),
            "rep_width_fraction": ("float", 0.7, lambda x: 0 < x <= 1),
        },
    },
    "product_form": {
        "grid_extra": {
            "n": ("int", 16, _positive),
            "x_min": ("float", -6.0, _any),
            "x_max": ("float", 6.0, _any),
        },
        "device": {
            "n": ("int", 64, _positive),
            "x_min": ("float", -6.0, _any),
            "x_max": ("float", 6.0, _any),
            "sigma_list": ("floats", [1.0, 0.5, 0.25], _positive_list),
            "pointer_cell": ("float", 0.02, _positive),
        },
        "source": {
            "sigma": ("float", 1.0, _positive),
        },
        "walk_extra": {
            "dt": ("float", 0.01, _positive),
        },
        "gue_extra": {
            "scale": ("float_or_auto", 1.0, _any),
        },
    },
    "geometry_suite": {},
    "decomposition_suite": {},
}


def _schema_for(kind: str) -> dict[str, dict]:
    if kind not in EXPERIMENT_KINDS:
        raise ConfigurationError(
            f"unknown experiment kind {kind!r}; choose one of {', '.join(EXPERIMENT_KINDS)}"
        )
    schema = {name: dict(keys) for name, keys in _COMMON.items()}
    for name, keys in _PER_KIND.get(kind, {}).items():
        target = name[: -len("_extra")] if name.endswith("_extra") else name
        schema[target] = {**schema.get(target, {}), **keys}
    return schema


@dataclass(frozen=True)
class RunConfig:
    """A fully-defaulted, validated experiment configuration."""

    kind: str
    sections: dict = field(default_factory=dict)

    def get(self, section: str, key: str):
        return self.sections[section][key]

    def __eq__(self, other):
        return (
            isinstance(other, RunConfig)
            and self.kind == other.kind
            and self.sections == other.sections
        )


def _parse_value(kind: str, text: str, where: str):
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            v = float(text)
            if math.isnan(v) or math.isinf(v):
                raise ValueError("non-finite")
            return v
        if kind == "float_or_auto":
            if text.lower() == "auto":
                return "auto"
            return float(text)
        if kind == "bool":
            if text.lower() in ("true", "yes", "1", "on"):
                return True
            if text.lower() in ("false", "no", "0", "off"):
                return False
            raise ValueError("expected a boolean")
        if kind == "floats":
            return [float(t) for t in text.split(",") if t.strip()]
        return text
    except ValueError as exc:
        raise ConfigurationError(f"{where}: cannot parse {text!r} as {kind} ({exc})") from exc


def _raw_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigurationError(f"line {lineno}: key outside any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in sections[current]:
            raise ConfigurationError(f"line {lineno}: duplicate key '{current}.{key}'")
        sections[current][key] = (value.strip(), lineno)
    return sections


def parse_config_text(text: str) -> RunConfig:
    raw = _raw_sections(text)
    exp = raw.get("experiment", {})
    if "kind" not in exp:
        raise ConfigurationError("missing required key 'experiment.kind'")
    kind = exp["kind"][0]
    schema = _schema_for(kind)

    for sec_name, keys in raw.items():
        if sec_name not in schema:
            first_line = min(line for _, line in keys.values()) if keys else 0
            raise ConfigurationError(
                f"line {first_line}: unknown section [{sec_name}] for experiment '{kind}'"
            )
        for key, (_, lineno) in keys.items():
            if key not in schema[sec_name]:
                raise ConfigurationError(
                    f"line {lineno}: unknown key '{sec_name}.{key}' for experiment '{kind}'"
                )

    sections: dict[str, dict] = {}
    for sec_name, keys in schema.items():
        out: dict = {}
        for key, (typ, default, validator) in keys.items():
            if sec_name in raw and key in raw[sec_name]:
                text_value, lineno = raw[sec_name][key]
                value = _parse_value(typ, text_value, f"line {lineno}: '{sec_name}.{key}'")
                if not validator(value):
                    raise ConfigurationError(
                        f"line {lineno}: '{sec_name}.{key}' = {text_value!r} fails validation"
                    )
            elif default is None:
                raise ConfigurationError(f"missing required key '{sec_name}.{key}'")
            else:
                value = default
            out[key] = value
        sections[sec_name] = out
    return RunConfig(kind=kind, sections=sections)


def parse_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def emit_snapshot(cfg: RunConfig) -> str:
    """Canonical re-parseable text: fixed section order, sorted keys."""
    lines: list[str] = []
    for sec in sorted(cfg.sections):
        lines.append(f"[{sec}]")
        for key in sorted(cfg.sections[sec]):
            lines.append(f"{key} = {_format_value(cfg.sections[sec][key])}")
        lines.append("")
    return "\n".join(lines)


def default_config(kind: str, **overrides) -> RunConfig:
    """Fully-defaulted config for a kind; overrides given as 'section.key' pairs."""
    cfg = parse_config_text(f"[experiment]\nkind = {kind}\n")
    for dotted, value in overrides.items():
        section, key = dotted.split(".")
        if section not in cfg.sections or key not in cfg.sections[section]:
            raise ConfigurationError(f"unknown override '{dotted}'")
        cfg.sections[section][key] = value
    return cfg
