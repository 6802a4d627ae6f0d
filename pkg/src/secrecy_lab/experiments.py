"""Sweep engine, figure presets, and the flat config / sweep / CSV file formats.

All files are plain text: configs and sweep specs are `key = value` lines with
`#` comments (vectors comma-separated, matrices with `;` between rows), and
sweep output is a fixed-schema CSV whose floats use shortest round-trip
rendering so files re-parse to exactly the values written.
"""

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .closed_form import EnumerationBudgetError, proposed_outage, roundrobin_outage
from .model import SystemConfig
from .oracle import Policy, SimulationSpec, quadrature_proposed, quadrature_roundrobin_user, simulate_outage

__all__ = [
    "Scheme",
    "SweepAxis",
    "Figure",
    "SweepSpec",
    "SweepRow",
    "VerificationError",
    "run_sweep",
    "figure_specs",
    "reproduce_figure",
    "load_config",
    "load_sweep_spec",
    "write_rows",
    "read_rows",
    "CSV_HEADER",
    "VERIFY_TOLERANCE",
]

CSV_HEADER = "scheme,M,N,rs_bits,gamma_db,mer_db,p_out_closed,p_out_mc,mc_stderr,trials"
VERIFY_TOLERANCE = 1e-8
DEFAULT_TRIALS = 1_000_000
DEFAULT_SEED = 42


class Scheme(Enum):
    ROUND_ROBIN = "round_robin"
    PROPOSED = "proposed"


class SweepAxis(Enum):
    MER_DB = "mer_db"
    NUM_USERS = "num_users"


class Figure(Enum):
    FIG2 = 2
    FIG3 = 3
    FIG4 = 4


class VerificationError(ArithmeticError):
    """A closed-form value disagreed with the quadrature oracle."""


@dataclass(frozen=True)
class SweepSpec:
    """One sweep request over homogeneous configurations.

    Exactly one of num_users / mer_db is fixed here; the other is the sweep
    axis.  num_eves, rs_bits and gamma_db are always fixed.  Monte Carlo
    columns are produced when with_monte_carlo is set, using trials and seed.
    """

    schemes: tuple
    sweep_axis: SweepAxis
    axis_values: tuple
    num_eves: int
    rs_bits: float
    gamma_db: float
    num_users: int | None = None
    mer_db: float | None = None
    with_monte_carlo: bool = False
    trials: int | None = None
    seed: int | None = None

    def __post_init__(self):
        requested = list(self.schemes)
        if not requested or any(not isinstance(s, Scheme) for s in requested):
            raise ValueError("schemes must be a non-empty collection of Scheme members")
        ordered = tuple(s for s in Scheme if s in requested)
        object.__setattr__(self, "schemes", ordered)
        if not isinstance(self.sweep_axis, SweepAxis):
            raise ValueError(f"sweep_axis must be a SweepAxis, got {self.sweep_axis!r}")
        values = list(self.axis_values)
        if not values:
            raise ValueError("axis_values must be non-empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("axis_values must be strictly increasing")
        if self.sweep_axis is SweepAxis.NUM_USERS:
            if any(float(v) != int(v) or int(v) < 1 for v in values):
                raise ValueError("axis_values for a num_users sweep must be integers >= 1")
            object.__setattr__(self, "axis_values", tuple(int(v) for v in values))
            if self.mer_db is None:
                raise ValueError("a num_users sweep requires a fixed mer_db")
            if self.num_users is not None:
                raise ValueError("num_users is the sweep axis; do not fix it")
            object.__setattr__(self, "mer_db", float(self.mer_db))
        else:
            if any(not math.isfinite(float(v)) for v in values):
                raise ValueError("axis_values must be finite")
            object.__setattr__(self, "axis_values", tuple(float(v) for v in values))
            if self.num_users is None:
                raise ValueError("a mer_db sweep requires a fixed num_users")
            if self.mer_db is not None:
                raise ValueError("mer_db is the sweep axis; do not fix it")
            if int(self.num_users) < 1:
                raise ValueError(f"num_users must be >= 1, got {self.num_users!r}")
            object.__setattr__(self, "num_users", int(self.num_users))
        if int(self.num_eves) < 1:
            raise ValueError(f"num_eves must be >= 1, got {self.num_eves!r}")
        object.__setattr__(self, "num_eves", int(self.num_eves))
        object.__setattr__(self, "rs_bits", float(self.rs_bits))
        object.__setattr__(self, "gamma_db", float(self.gamma_db))
        if self.rs_bits < 0.0 or not math.isfinite(self.rs_bits):
            raise ValueError(f"rs_bits must be finite and >= 0, got {self.rs_bits!r}")
        if not math.isfinite(self.gamma_db):
            raise ValueError(f"gamma_db must be finite, got {self.gamma_db!r}")
        if self.with_monte_carlo:
            if self.trials is None or int(self.trials) < 1:
                raise ValueError("with_monte_carlo requires trials >= 1")
            if self.seed is None:
                raise ValueError("with_monte_carlo requires a seed")
            object.__setattr__(self, "trials", int(self.trials))
            object.__setattr__(self, "seed", int(self.seed))
        elif self.trials is not None or self.seed is not None:
            raise ValueError("trials/seed are only meaningful with with_monte_carlo")


@dataclass(frozen=True)
class SweepRow:
    """One CSV record: a sweep point evaluated for one scheduling scheme."""

    scheme: str
    M: int
    N: int
    rs_bits: float
    gamma_db: float
    mer_db: float
    p_out_closed: float
    p_out_mc: float | None = None
    mc_stderr: float | None = None
    trials: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.p_out_closed <= 1.0:
            raise ValueError(f"p_out_closed must lie in [0, 1], got {self.p_out_closed!r}")
        mc_fields = (self.p_out_mc, self.mc_stderr, self.trials)
        present = [f is not None for f in mc_fields]
        if any(present) and not all(present):
            raise ValueError("p_out_mc, mc_stderr and trials must be all present or all absent")
        if self.p_out_mc is not None and not 0.0 <= self.p_out_mc <= 1.0:
            raise ValueError(f"p_out_mc must lie in [0, 1], got {self.p_out_mc!r}")


def _point_config(spec: SweepSpec, axis_value) -> tuple[SystemConfig, int, float]:
    if spec.sweep_axis is SweepAxis.MER_DB:
        num_users, mer_db = spec.num_users, float(axis_value)
    else:
        num_users, mer_db = int(axis_value), spec.mer_db
    config = SystemConfig.homogeneous(num_users, spec.num_eves, mer_db,
                                      spec.gamma_db, spec.rs_bits)
    return config, num_users, mer_db


def _closed_form(scheme: Scheme, config: SystemConfig) -> float:
    if scheme is Scheme.ROUND_ROBIN:
        return roundrobin_outage(config).probability
    return proposed_outage(config).probability


def _quadrature(scheme: Scheme, config: SystemConfig) -> float:
    if scheme is Scheme.ROUND_ROBIN:
        per_user = [quadrature_roundrobin_user(config, i).probability
                    for i in range(config.num_users)]
        return math.fsum(per_user) / config.num_users
    return quadrature_proposed(config).probability


def run_sweep(spec: SweepSpec, verify: bool = False) -> list[SweepRow]:
    """Evaluate a sweep, one row per (scheme, axis value) in that order.

    Closed forms are always computed; Monte Carlo columns are added when the
    spec requests them.  With verify=True every closed-form value is checked
    against the quadrature oracle to VERIFY_TOLERANCE.
    """
    rows = []
    for scheme in spec.schemes:
        policy = Policy.ROUND_ROBIN if scheme is Scheme.ROUND_ROBIN else Policy.MAX_GAIN
        for value in spec.axis_values:
            config, num_users, mer_db = _point_config(spec, value)
            label = (f"scheme={scheme.value} M={num_users} N={spec.num_eves} "
                     f"rs_bits={spec.rs_bits!r} gamma_db={spec.gamma_db!r} mer_db={mer_db!r}")
            try:
                closed = _closed_form(scheme, config)
            except EnumerationBudgetError as exc:
                raise EnumerationBudgetError(f"sweep point {label}: {exc}") from exc
            if verify:
                reference = _quadrature(scheme, config)
                if abs(closed - reference) > VERIFY_TOLERANCE:
                    raise VerificationError(
                        f"sweep point {label}: closed form {closed!r} vs quadrature "
                        f"{reference!r} differ by more than {VERIFY_TOLERANCE:g}"
                    )
            p_mc = stderr = trials = None
            if spec.with_monte_carlo:
                sim = simulate_outage(config, SimulationSpec(trials=spec.trials,
                                                             seed=spec.seed, policy=policy))
                p_mc, stderr, trials = sim.probability, sim.std_error, sim.trials
            rows.append(SweepRow(scheme=scheme.value, M=num_users, N=spec.num_eves,
                                 rs_bits=spec.rs_bits, gamma_db=spec.gamma_db, mer_db=mer_db,
                                 p_out_closed=closed, p_out_mc=p_mc, mc_stderr=stderr,
                                 trials=trials))
    return rows


_MER_AXIS = tuple(float(v) for v in range(0, 31, 2))
_USER_AXIS = tuple(range(1, 9))
_BOTH_SCHEMES = (Scheme.ROUND_ROBIN, Scheme.PROPOSED)


def figure_specs(figure: Figure, trials: int | None = DEFAULT_TRIALS,
                 seed: int = DEFAULT_SEED) -> tuple[SweepSpec, ...]:
    """Sweep specs behind each figure preset; trials=None drops Monte Carlo.

    Presets: figure 2 sweeps the main-to-eavesdropper ratio 0..30 dB in 2 dB
    steps for N in {2, 8} eavesdroppers (M=4, rs=0.5, gamma=10 dB); figure 3
    does the same for M in {4, 8} users (N=4); figure 4 sweeps M = 1..8 for
    rs in {1, 2} (N=4, mer=gamma=10 dB).
    """
    figure = Figure(figure)
    mc = dict(with_monte_carlo=True, trials=trials, seed=seed) if trials is not None else {}
    if figure is Figure.FIG2:
        return tuple(SweepSpec(schemes=_BOTH_SCHEMES, sweep_axis=SweepAxis.MER_DB,
                               axis_values=_MER_AXIS, num_users=4, num_eves=n,
                               rs_bits=0.5, gamma_db=10.0, **mc)
                     for n in (2, 8))
    if figure is Figure.FIG3:
        return tuple(SweepSpec(schemes=_BOTH_SCHEMES, sweep_axis=SweepAxis.MER_DB,
                               axis_values=_MER_AXIS, num_users=m, num_eves=4,
                               rs_bits=0.5, gamma_db=10.0, **mc)
                     for m in (4, 8))
    return tuple(SweepSpec(schemes=_BOTH_SCHEMES, sweep_axis=SweepAxis.NUM_USERS,
                           axis_values=_USER_AXIS, mer_db=10.0, num_eves=4,
                           rs_bits=rs, gamma_db=10.0, **mc)
                 for rs in (1.0, 2.0))


def describe_spec(spec: SweepSpec) -> str:
    """Deterministic one-line rendering of a sweep spec (used in CSV headers)."""
    parts = [
        "schemes=" + ",".join(s.value for s in spec.schemes),
        f"axis={spec.sweep_axis.value}",
        "values=" + ",".join(str(v) if isinstance(v, int) else repr(v)
                             for v in spec.axis_values),
    ]
    if spec.sweep_axis is SweepAxis.MER_DB:
        parts.append(f"num_users={spec.num_users}")
    else:
        parts.append(f"mer_db={spec.mer_db!r}")
    parts.append(f"num_eves={spec.num_eves}")
    parts.append(f"rs_bits={spec.rs_bits!r}")
    parts.append(f"gamma_db={spec.gamma_db!r}")
    if spec.with_monte_carlo:
        parts.append(f"trials={spec.trials}")
        parts.append(f"seed={spec.seed}")
    return " ".join(parts)


def reproduce_figure(figure: Figure | int, output_path, trials: int = DEFAULT_TRIALS,
                     seed: int = DEFAULT_SEED, verify: bool = False) -> Path:
    """Write one figure preset as CSV and return the output path.

    Output is deterministic for fixed (figure, trials, seed) regardless of
    worker parallelism, so repeated runs are byte-identical.
    """
    figure = Figure(figure)
    specs = figure_specs(figure, trials=trials, seed=seed)
    comments = [f"figure: fig{figure.value}"]
    comments.extend(f"sweep {idx}: {describe_spec(spec)}"
                    for idx, spec in enumerate(specs, start=1))
    rows = []
    for spec in specs:
        rows.extend(run_sweep(spec, verify=verify))
    return write_rows(output_path, rows, comments)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # shortest round-trip decimal
    return str(value)


def write_rows(path, rows, comments=()) -> Path:
    """Write sweep rows as CSV (LF endings, UTF-8, `#` comment lines first)."""
    path = Path(path)
    lines = [f"# {comment}" for comment in comments]
    lines.append(CSV_HEADER)
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in (
            row.scheme, row.M, row.N, row.rs_bits, row.gamma_db, row.mer_db,
            row.p_out_closed, row.p_out_mc, row.mc_stderr, row.trials)))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_rows(path) -> list[SweepRow]:
    """Parse a CSV written by write_rows back into SweepRow records."""
    path = Path(path)
    lines = [line for line in path.read_text(encoding="utf-8").splitlines()
             if line and not line.startswith("#")]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing or unexpected CSV header")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 10:
            raise ValueError(f"{path}: row {lineno} has {len(cells)} cells, expected 10")
        rows.append(SweepRow(
            scheme=cells[0], M=int(cells[1]), N=int(cells[2]), rs_bits=float(cells[3]),
            gamma_db=float(cells[4]), mer_db=float(cells[5]), p_out_closed=float(cells[6]),
            p_out_mc=float(cells[7]) if cells[7] else None,
            mc_stderr=float(cells[8]) if cells[8] else None,
            trials=int(cells[9]) if cells[9] else None,
        ))
    return rows


def _read_kv_lines(path: Path) -> dict:
    entries = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        if key in entries:
            raise ValueError(f"{path}:{lineno}: duplicate key '{key}'")
        entries[key] = (lineno, value)
    return entries


def _reject_unknown(path: Path, entries: dict, allowed: set):
    for key, (lineno, _) in entries.items():
        if key not in allowed:
            raise ValueError(f"{path}:{lineno}: unknown key '{key}'")


def _require(path: Path, entries: dict, key: str) -> str:
    if key not in entries:
        raise ValueError(f"{path}: missing required key '{key}'")
    return entries[key][1]


def _parse_float(path: Path, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{path}: field '{key}': expected a number, got '{raw}'") from None


def _parse_int(path: Path, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{path}: field '{key}': expected an integer, got '{raw}'") from None


def _parse_float_list(path: Path, key: str, raw: str) -> list[float]:
    return [_parse_float(path, key, item.strip()) for item in raw.split(",")]


def _parse_bool(path: Path, key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    raise ValueError(f"{path}: field '{key}': expected true or false, got '{raw}'")


_CONFIG_KEYS = {"num_users", "num_eves", "sigma2_main", "sigma2_eve", "power",
                "noise", "secrecy_rate"}


def load_config(path) -> SystemConfig:
    """Load a SystemConfig from a flat key = value file.

    Keys: num_users, num_eves, sigma2_main, sigma2_eve, power, noise,
    secrecy_rate.  Vectors are comma-separated; sigma2_eve rows are separated
    by `;`.  A single number for a vector or matrix field broadcasts to the
    full shape.
    """
    path = Path(path)
    entries = _read_kv_lines(path)
    _reject_unknown(path, entries, _CONFIG_KEYS)
    num_users = _parse_int(path, "num_users", _require(path, entries, "num_users"))
    num_eves = _parse_int(path, "num_eves", _require(path, entries, "num_eves"))
    if num_users < 1 or num_eves < 1:
        raise ValueError(f"{path}: num_users and num_eves must be >= 1")

    def vector(key: str) -> np.ndarray:
        values = _parse_float_list(path, key, _require(path, entries, key))
        if len(values) == 1:
            return np.full(num_users, values[0])
        return np.array(values)

    raw_matrix = _require(path, entries, "sigma2_eve")
    matrix_rows = [_parse_float_list(path, "sigma2_eve", chunk)
                   for chunk in raw_matrix.split(";")]
    if len(matrix_rows) == 1 and len(matrix_rows[0]) == 1:
        sigma2_eve = np.full((num_users, num_eves), matrix_rows[0][0])
    else:
        if len(matrix_rows) != num_users or any(len(row) != num_eves for row in matrix_rows):
            shape = f"{len(matrix_rows)} rows of {[len(row) for row in matrix_rows]}"
            raise ValueError(
                f"{path}: field 'sigma2_eve': expected {num_users}x{num_eves} matrix "
                f"({num_users} rows of {num_eves}), got {shape}"
            )
        sigma2_eve = np.array(matrix_rows, dtype=float)
    try:
        return SystemConfig(
            num_users=num_users,
            num_eves=num_eves,
            sigma2_main=vector("sigma2_main"),
            sigma2_eve=sigma2_eve,
            power=vector("power"),
            noise=_parse_float(path, "noise", _require(path, entries, "noise")),
            secrecy_rate=_parse_float(path, "secrecy_rate",
                                      _require(path, entries, "secrecy_rate")),
        )
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


_SWEEP_KEYS = {"schemes", "sweep_axis", "axis_values", "num_users", "mer_db",
               "num_eves", "rs_bits", "gamma_db", "with_monte_carlo", "trials", "seed"}
_SCHEME_TOKENS = {s.value: s for s in Scheme}
_AXIS_TOKENS = {a.value: a for a in SweepAxis}


def load_sweep_spec(path) -> SweepSpec:
    """Load a SweepSpec from a flat key = value file.

    Keys: schemes (comma list of round_robin/proposed), sweep_axis (mer_db or
    num_users), axis_values (comma list), the fixed block (num_users or
    mer_db, plus num_eves, rs_bits, gamma_db), and optionally
    with_monte_carlo, trials, seed.
    """
    path = Path(path)
    entries = _read_kv_lines(path)
    _reject_unknown(path, entries, _SWEEP_KEYS)
    scheme_tokens = [t.strip() for t in _require(path, entries, "schemes").split(",")]
    schemes = []
    for token in scheme_tokens:
        if token not in _SCHEME_TOKENS:
            raise ValueError(f"{path}: field 'schemes': unknown scheme '{token}' "
                             f"(expected round_robin or proposed)")
        schemes.append(_SCHEME_TOKENS[token])
    axis_token = _require(path, entries, "sweep_axis")
    if axis_token not in _AXIS_TOKENS:
        raise ValueError(f"{path}: field 'sweep_axis': expected mer_db or num_users, "
                         f"got '{axis_token}'")
    axis = _AXIS_TOKENS[axis_token]
    values = _parse_float_list(path, "axis_values", _require(path, entries, "axis_values"))
    with_mc = False
    if "with_monte_carlo" in entries:
        with_mc = _parse_bool(path, "with_monte_carlo", entries["with_monte_carlo"][1])
    try:
        return SweepSpec(
            schemes=tuple(schemes),
            sweep_axis=axis,
            axis_values=tuple(values),
            num_eves=_parse_int(path, "num_eves", _require(path, entries, "num_eves")),
            rs_bits=_parse_float(path, "rs_bits", _require(path, entries, "rs_bits")),
            gamma_db=_parse_float(path, "gamma_db", _require(path, entries, "gamma_db")),
            num_users=(_parse_int(path, "num_users", entries["num_users"][1])
                       if "num_users" in entries else None),
            mer_db=(_parse_float(path, "mer_db", entries["mer_db"][1])
                    if "mer_db" in entries else None),
            with_monte_carlo=with_mc,
            trials=(_parse_int(path, "trials", entries["trials"][1])
                    if "trials" in entries else None),
            seed=(_parse_int(path, "seed", entries["seed"][1])
                  if "seed" in entries else None),
        )
    except ValueError as exc:
        message = str(exc)
        if message.startswith(str(path)):
            raise
        raise ValueError(f"{path}: {exc}") from exc
