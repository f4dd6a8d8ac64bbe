"""Flat ``key = value`` experiment configuration.

Blank lines and ``#`` comments are ignored.  Recognized keys, with defaults::

    n = 51                  extent = 7            t_final = 2
    n_slices = 40           detectors = full      # or 21x21, 7x7, 3x3, ...
    phantom = dots          # or lines
    phantom_count = 20      phantom_box = -3,3,-3,3
    phantom_amplitude = 1   phantom_seed = 0
    noise_level = 0.02      noise_seed = 1
    method = lsqr           # ls | lsqr | fista | igmrf
    max_iters = 100         lambda = 6.6e-05      # fista
    lambda_schedule = exp   # igmrf: "exp" for e^k, or comma-separated values
    beta = 0.001            outer_iters = 5       cg_max = 100
    tol = 1e-08             rank_tolerance = 1e-12
    visible_tolerance = auto   # dx/2
    output_dir = out        keep_iterates = false
"""
from dataclasses import asdict, dataclass, fields, replace


class ConfigError(ValueError):
    pass


METHODS = ("ls", "lsqr", "fista", "igmrf")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 51
    extent: float = 7.0
    t_final: float = 2.0
    n_slices: int = 40
    detectors: str = "full"
    phantom: str = "dots"
    phantom_count: int = 20
    phantom_box: tuple = (-3.0, 3.0, -3.0, 3.0)
    phantom_amplitude: float = 1.0
    phantom_seed: int = 0
    noise_level: float = 0.02
    noise_seed: int = 1
    method: str = "lsqr"
    max_iters: int = 100
    lam: float = 6.6e-5
    lambda_schedule: str = "exp"
    beta: float = 1e-3
    outer_iters: int = 5
    cg_max: int = 100
    tol: float = 1e-8
    rank_tolerance: float = 1e-12
    visible_tolerance: str = "auto"
    output_dir: str = "out"
    keep_iterates: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.phantom not in ("dots", "lines"):
            raise ConfigError(f"phantom must be dots or lines, got {self.phantom!r}")
        if len(self.phantom_box) != 4:
            raise ConfigError("phantom_box needs four numbers xmin,xmax,ymin,ymax")
        for name in ("max_iters", "outer_iters", "cg_max"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.noise_level < 0 or self.lam < 0 or self.beta <= 0:
            raise ConfigError("noise_level and lambda must be >= 0, beta > 0")
        self.schedule()  # validates

    def schedule(self):
        """The IGMRF ``lambda_k`` sequence for ``k = 1..outer_iters``."""
        import math

        if self.lambda_schedule.strip() == "exp":
            return [math.exp(k) for k in range(1, self.outer_iters + 1)]
        try:
            vals = [float(v) for v in self.lambda_schedule.split(",")]
        except ValueError:
            raise ConfigError(f"bad lambda_schedule {self.lambda_schedule!r}") from None
        if len(vals) < self.outer_iters or min(vals) <= 0:
            raise ConfigError("lambda_schedule needs outer_iters positive values")
        return vals[: self.outer_iters]

    def with_seed(self, seed):
        return replace(self, phantom_seed=int(seed), noise_seed=int(seed))


_KEY_ALIASES = {"lambda": "lam", "K": "outer_iters"}
_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _convert(name, raw):
    kind = _FIELDS[name].type
    try:
        if kind in ("int", int):
            return int(raw)
        if kind in ("float", float):
            return float(raw)
        if kind in ("bool", bool):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind in ("tuple", tuple):
            return tuple(float(v) for v in raw.split(","))
    except ValueError:
        raise ConfigError(f"invalid value for {name}: {raw!r}") from None
    return raw


def parse_config(text):
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key = _KEY_ALIASES.get(key.strip(), key.strip())
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _convert(key, raw.strip())
    return ExperimentConfig(**values)


def load_config(path):
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def dump_config(cfg):
    inverse = {v: k for k, v in _KEY_ALIASES.items() if k == "lambda"}
    lines = []
    for name, val in asdict(cfg).items():
        if isinstance(val, bool):
            val = "true" if val else "false"
        elif isinstance(val, tuple):
            val = ",".join(repr(float(v)) for v in val)
        elif isinstance(val, float):
            val = repr(val)
        lines.append(f"{inverse.get(name, name)} = {val}")
    return "\n".join(lines) + "\n"
