"""Run configuration: a single JSON document with per-task sections."""

import copy
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

FORMATS = ("json", "csv", "both")


@dataclass
class SolverOptions:
    eps_max: float = 0.05
    tol: float = 1e-10
    max_iter: int = 50


@dataclass
class VerifyOptions:
    z0: float = None
    resolution: float = 1e-3
    hausdorff_bound: float = 0.25
    delta: float = 0.01


@dataclass
class SimulatorOptions:
    L: float = 200.0
    h: float = 0.05
    dt: float = None
    t_end: float = 300.0
    tracking_start: float = 200.0
    record_every: float = 0.5
    bump_center: float = None
    bump_width: float = None
    bump_height: float = None
    one_sided: bool = None


@dataclass
class ProfileOptions:
    z_min: float = None
    z_max: float = None
    n: int = 2001


@dataclass
class RunConfig:
    kernel: dict
    theta: float
    gamma: float
    epsilon: float = 0.005
    epsilons: list = field(default_factory=lambda: [0.04, 0.02, 0.01, 0.005])
    solver: SolverOptions = field(default_factory=SolverOptions)
    verification: VerifyOptions = field(default_factory=VerifyOptions)
    simulator: SimulatorOptions = field(default_factory=SimulatorOptions)
    profile: ProfileOptions = field(default_factory=ProfileOptions)
    out: str = "out"
    format: str = "both"
    workers: int = 1
    base_dir: str = field(default=".", compare=False)

    _SECTIONS = {"solver": SolverOptions, "verification": VerifyOptions,
                 "simulator": SimulatorOptions, "profile": ProfileOptions}

    @classmethod
    def from_dict(cls, data, base_dir="."):
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        data = copy.deepcopy(data)
        for key in ("kernel", "theta", "gamma"):
            if key not in data:
                raise ConfigError(f"configuration is missing required field '{key}'")
        known = {f.name for f in fields(cls)} - {"base_dir"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration fields: {sorted(unknown)}")
        kw = {}
        for key, value in data.items():
            if key in cls._SECTIONS:
                section = cls._SECTIONS[key]
                if not isinstance(value, dict):
                    raise ConfigError(f"'{key}' must be an object")
                allowed = {f.name for f in fields(section)}
                bad = set(value) - allowed
                if bad:
                    raise ConfigError(f"unknown fields in '{key}': {sorted(bad)}")
                kw[key] = section(**value)
            else:
                kw[key] = value
        cfg = cls(base_dir=str(base_dir), **kw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(data, base_dir=path.parent)

    def to_dict(self):
        out = asdict(self)
        out.pop("base_dir")
        return out

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def validate(self):
        if not isinstance(self.kernel, dict) or "type" not in self.kernel:
            raise ConfigError("'kernel' must be an object with a 'type' field")
        for name in ("theta", "gamma", "epsilon"):
            val = getattr(self, name)
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise ConfigError(f"'{name}' must be a number")
        if not isinstance(self.epsilons, list) or not all(
                isinstance(e, (int, float)) and e > 0 for e in self.epsilons):
            raise ConfigError("'epsilons' must be a list of positive numbers")
        positive = [("solver.eps_max", self.solver.eps_max), ("solver.tol", self.solver.tol),
                    ("solver.max_iter", self.solver.max_iter),
                    ("verification.resolution", self.verification.resolution),
                    ("verification.hausdorff_bound", self.verification.hausdorff_bound),
                    ("verification.delta", self.verification.delta),
                    ("simulator.L", self.simulator.L), ("simulator.h", self.simulator.h),
                    ("simulator.t_end", self.simulator.t_end),
                    ("simulator.record_every", self.simulator.record_every),
                    ("profile.n", self.profile.n), ("workers", self.workers)]
        for name, val in positive:
            if not isinstance(val, (int, float)) or not val > 0:
                raise ConfigError(f"'{name}' must be positive, got {val!r}")
        for name, val in (("verification.z0", self.verification.z0),
                          ("simulator.dt", self.simulator.dt)):
            if val is not None and not val > 0:
                raise ConfigError(f"'{name}' must be positive, got {val!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"'format' must be one of {FORMATS}, got {self.format!r}")
