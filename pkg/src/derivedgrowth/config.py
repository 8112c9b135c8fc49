"""Flat ``key=value`` experiment configs.

Example::

    kind=subdirect
    phi=1,0
    degree=3
    perm.a=2,1,3
    perm.b=1,3,2

Blank lines and ``#`` comments are ignored. Permutations are 1-based image
lists keyed by the compact letter name of the generator (``perm.a``,
``perm.b``, ...; ``perm.a1`` style is accepted too). :func:`dump_config`
writes the canonical form, which parses back to the same config.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from .quotient import (GroupOracle, make_finite_perm, make_free_abelian,
                       make_nilpotent_class2, make_subdirect)
from .words import PhiSpec

KINDS = ("free_abelian", "nilpotent_class2", "finite_perm", "subdirect")
_ALIASES = {"subdirect_phi_finite": "subdirect", "abelian": "free_abelian",
            "nilpotent": "nilpotent_class2", "perm": "finite_perm"}
_INT_KEYS = ("m", "degree", "k", "t", "n_max", "budget", "seed", "max_len", "max_states")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str | None = None
    m: int | None = None
    phi: tuple | None = None
    degree: int | None = None
    perms: dict = field(default_factory=dict)  # generator index -> 1-based images
    k: int | None = None
    t: int | None = None
    n_max: int | None = None
    budget: int | None = None
    seed: int | None = None
    max_len: int | None = None
    max_states: int | None = None

    def rank(self) -> int:
        if self.m is not None:
            return self.m
        if self.phi is not None:
            return len(self.phi)
        if self.perms:
            return max(self.perms)
        raise ConfigError("cannot tell the rank: give m, phi or perm.* keys")

    def phi_spec(self) -> PhiSpec:
        m = self.rank()
        images = self.phi if self.phi is not None else (1,) + (0,) * (m - 1)
        if len(images) != m:
            raise ConfigError(f"phi has {len(images)} images but m={m}")
        try:
            return PhiSpec(images)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def build_oracle(self) -> GroupOracle:
        if self.kind is None:
            raise ConfigError("config has no kind")
        m = self.rank()
        try:
            if self.kind == "free_abelian":
                return make_free_abelian(m)
            if self.kind == "nilpotent_class2":
                return make_nilpotent_class2(m)
            finite = self._finite(m)
            if self.kind == "finite_perm":
                return finite
            return make_subdirect(self.phi_spec(), finite)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def _finite(self, m):
        if self.degree is None:
            raise ConfigError(f"kind={self.kind} needs degree")
        missing = [i for i in range(1, m + 1) if i not in self.perms]
        if missing:
            raise ConfigError(f"missing permutations for generators {missing}")
        return make_finite_perm(m, [self.perms[i] for i in range(1, m + 1)], self.degree)


def _ints(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _gen_index(name: str) -> int:
    if len(name) == 1 and name.isalpha() and name.islower():
        return ord(name) - ord("a") + 1
    if len(name) >= 2 and name[0] == "a" and name[1:].isdigit() and int(name[1:]) >= 1:
        return int(name[1:])
    raise ConfigError(f"bad generator name {name!r}")


def _gen_name(i: int) -> str:
    return chr(ord("a") + i - 1) if i <= 26 else f"a{i}"


def set_value(cfg: ExperimentConfig, key: str, value: str) -> None:
    key, value = key.strip(), value.strip()
    if key == "kind":
        kind = _ALIASES.get(value, value)
        if kind not in KINDS:
            raise ConfigError(f"unknown kind {value!r}; expected one of {', '.join(KINDS)}")
        cfg.kind = kind
    elif key == "phi":
        cfg.phi = _ints(value)
    elif key.startswith("perm."):
        cfg.perms[_gen_index(key[5:])] = _ints(value)
    elif key in _INT_KEYS:
        try:
            setattr(cfg, key, int(value))
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    else:
        raise ConfigError(f"unknown config key {key!r}")


def parse_config(text: str) -> ExperimentConfig:
    cfg = ExperimentConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        set_value(cfg, key, value)
    return cfg


def load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name == "perms":
            for i in sorted(v):
                lines.append(f"perm.{_gen_name(i)}={','.join(map(str, v[i]))}")
        elif f.name == "phi":
            if v is not None:
                lines.append(f"phi={','.join(map(str, v))}")
        elif v is not None:
            lines.append(f"{f.name}={v}")
    return "".join(line + "\n" for line in lines)


def config_for_oracle(o: GroupOracle) -> ExperimentConfig:
    """Config text that rebuilds ``o`` (kinds loadable from config only)."""
    from .quotient import FinitePerm, FreeAbelian, NilpotentClass2, Subdirect

    if isinstance(o, FreeAbelian):
        return ExperimentConfig(kind="free_abelian", m=o.m)
    if isinstance(o, NilpotentClass2):
        return ExperimentConfig(kind="nilpotent_class2", m=o.m)
    if isinstance(o, FinitePerm):
        return ExperimentConfig(kind="finite_perm", m=o.m, degree=o.degree,
                                perms={i + 1: tuple(v + 1 for v in p) for i, p in enumerate(o.perms)})
    if isinstance(o, Subdirect):
        f = o.finite
        return ExperimentConfig(kind="subdirect", m=o.m, phi=o.phi.images, degree=f.degree,
                                perms={i + 1: tuple(v + 1 for v in p) for i, p in enumerate(f.perms)})
    raise ConfigError(f"oracle kind {o.kind} has no config form")
