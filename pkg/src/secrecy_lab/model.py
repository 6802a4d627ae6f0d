"""System model: average-gain configuration, Rayleigh fading draws, link capacities."""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemConfig",
    "ChannelRealization",
    "db_to_linear",
    "sample_gains",
    "channel_capacity",
    "wiretap_capacity",
    "secrecy_capacity",
    "secrecy_threshold",
]


def db_to_linear(value_db: float) -> float:
    """Convert a dB quantity to linear scale (x_dB = 10*log10(x))."""
    return 10.0 ** (value_db / 10.0)


def _positive_vector(name: str, values, length: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (length,):
        raise ValueError(f"{name} must have shape ({length},), got {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} entries must be finite and strictly positive")
    arr.setflags(write=False)
    return arr


def _positive_matrix(name: str, values, rows: int, cols: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.shape != (rows, cols):
        raise ValueError(f"{name} must have shape ({rows}, {cols}), got {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} entries must be finite and strictly positive")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SystemConfig:
    """Static parameters of a multi-user uplink tapped by multiple eavesdroppers.

    num_users, num_eves: number of transmitting users (M) and eavesdroppers (N).
    sigma2_main: (M,) average power gains of the user->base-station channels.
    sigma2_eve:  (M, N) average power gains of the user->eavesdropper channels.
    power: (M,) per-user transmit powers; noise: AWGN variance, same unit.
    secrecy_rate: target secrecy rate in bits/s/Hz.

    Gains are dimensionless; only the ratios power/noise and main/eavesdropper
    gain enter any quantity computed from a config.
    """

    num_users: int
    num_eves: int
    sigma2_main: np.ndarray
    sigma2_eve: np.ndarray
    power: np.ndarray
    noise: float
    secrecy_rate: float

    def __post_init__(self):
        for name in ("num_users", "num_eves"):
            count = getattr(self, name)
            if not isinstance(count, (int, np.integer)) or isinstance(count, bool):
                raise ValueError(f"{name} must be an integer, got {count!r}")
            if count < 1:
                raise ValueError(f"{name} must be >= 1, got {count}")
            object.__setattr__(self, name, int(count))
        m, n = self.num_users, self.num_eves
        object.__setattr__(self, "sigma2_main", _positive_vector("sigma2_main", self.sigma2_main, m))
        object.__setattr__(self, "sigma2_eve", _positive_matrix("sigma2_eve", self.sigma2_eve, m, n))
        object.__setattr__(self, "power", _positive_vector("power", self.power, m))
        noise = float(self.noise)
        if not math.isfinite(noise) or noise <= 0.0:
            raise ValueError(f"noise must be finite and strictly positive, got {self.noise!r}")
        object.__setattr__(self, "noise", noise)
        rate = float(self.secrecy_rate)
        if not math.isfinite(rate) or rate < 0.0:
            raise ValueError(f"secrecy_rate must be finite and >= 0, got {self.secrecy_rate!r}")
        object.__setattr__(self, "secrecy_rate", rate)

    @classmethod
    def homogeneous(cls, num_users: int, num_eves: int, mer_db: float, gamma_db: float,
                    secrecy_rate: float, noise: float = 1.0) -> "SystemConfig":
        """Symmetric configuration from the (mer_db, gamma_db, secrecy_rate) triple.

        mer_db is the main-to-eavesdropper average gain ratio in dB, so
        sigma2_main / sigma2_eve = 10**(mer_db/10) with sigma2_main = 1.
        gamma_db is the transmit SNR in dB, so power / noise = 10**(gamma_db/10).
        """
        for name, value in (("mer_db", mer_db), ("gamma_db", gamma_db)):
            if not math.isfinite(float(value)):
                raise ValueError(f"{name} must be finite, got {value!r}")
        sigma2_eve = db_to_linear(-float(mer_db))
        power = float(noise) * db_to_linear(float(gamma_db))
        return cls(
            num_users=num_users,
            num_eves=num_eves,
            sigma2_main=np.ones(num_users),
            sigma2_eve=np.full((num_users, num_eves), sigma2_eve),
            power=np.full(num_users, power),
            noise=noise,
            secrecy_rate=secrecy_rate,
        )


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One draw of all instantaneous squared channel gains.

    gain_main: (M,) user->BS gains; gain_eve: (M, N) user->eavesdropper gains.
    """

    gain_main: np.ndarray
    gain_eve: np.ndarray

    def __post_init__(self):
        gm = np.array(self.gain_main, dtype=float)
        ge = np.array(self.gain_eve, dtype=float)
        if gm.ndim != 1 or ge.ndim != 2 or ge.shape[0] != gm.shape[0]:
            raise ValueError(f"inconsistent gain shapes {gm.shape} and {ge.shape}")
        for name, arr in (("gain_main", gm), ("gain_eve", ge)):
            if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
                raise ValueError(f"{name} entries must be finite and >= 0")
            arr.setflags(write=False)
        object.__setattr__(self, "gain_main", gm)
        object.__setattr__(self, "gain_eve", ge)

    @classmethod
    def sample(cls, config: SystemConfig, rng: np.random.Generator) -> "ChannelRealization":
        """Draw one Rayleigh-fading realization (exponential gains)."""
        gain_main, gain_eve = sample_gains(config, rng, 1)
        return cls(gain_main=gain_main[0], gain_eve=gain_eve[0])


def sample_gains(config: SystemConfig, rng: np.random.Generator, trials: int):
    """Draw instantaneous gains for `trials` Rayleigh-fading realizations.

    Inverse-transform sampling: gain = -sigma2 * ln(1 - u) with u uniform in
    [0, 1), so each gain is exponential with mean equal to its average gain.
    The uniform stream is consumed in a fixed order (all main gains, then all
    eavesdropper gains) to keep results reproducible for a given generator.

    Returns (gain_main, gain_eve) with shapes (trials, M) and (trials, M, N).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    u = rng.random((trials, config.num_users))
    np.negative(u, out=u)
    np.log1p(u, out=u)  # ln(1 - u), exact for u near 0
    gain_main = np.multiply(u, -config.sigma2_main, out=u)
    v = rng.random((trials, config.num_users, config.num_eves))
    np.negative(v, out=v)
    np.log1p(v, out=v)
    gain_eve = np.multiply(v, -config.sigma2_eve, out=v)
    return gain_main, gain_eve


def _check_user(config: SystemConfig, user: int) -> int:
    if not isinstance(user, (int, np.integer)) or isinstance(user, bool):
        raise IndexError(f"user index must be an integer, got {user!r}")
    if not 0 <= user < config.num_users:
        raise IndexError(f"user index {user} out of range for M={config.num_users}")
    return int(user)


def _check_realization(realization: ChannelRealization, config: SystemConfig):
    expected = (config.num_users, config.num_eves)
    if realization.gain_eve.shape != expected:
        raise ValueError(
            f"realization gains have shape {realization.gain_eve.shape}, config expects {expected}"
        )


def channel_capacity(gain: float, power: float, noise: float) -> float:
    """Capacity in bits/s/Hz of an AWGN link: log2(1 + gain*power/noise)."""
    gain, power, noise = float(gain), float(power), float(noise)
    if not math.isfinite(gain) or gain < 0.0:
        raise ValueError(f"gain must be finite and >= 0, got {gain!r}")
    if not math.isfinite(power) or power <= 0.0:
        raise ValueError(f"power must be finite and strictly positive, got {power!r}")
    if not math.isfinite(noise) or noise <= 0.0:
        raise ValueError(f"noise must be finite and strictly positive, got {noise!r}")
    return math.log2(1.0 + gain * power / noise)


def wiretap_capacity(realization: ChannelRealization, config: SystemConfig, user: int) -> float:
    """Capacity achieved by the best of the N uncoordinated eavesdroppers.

    Equals the capacity at the largest eavesdropper gain, since capacity is
    monotone in the gain.
    """
    user = _check_user(config, user)
    _check_realization(realization, config)
    best_gain = float(np.max(realization.gain_eve[user]))
    return channel_capacity(best_gain, float(config.power[user]), config.noise)


def secrecy_capacity(realization: ChannelRealization, config: SystemConfig, user: int) -> float:
    """Main-channel capacity minus wiretap capacity; negative when tapped better."""
    user = _check_user(config, user)
    _check_realization(realization, config)
    main = channel_capacity(float(realization.gain_main[user]), float(config.power[user]), config.noise)
    return main - wiretap_capacity(realization, config, user)


def secrecy_threshold(config: SystemConfig, user: int) -> float:
    """SNR-normalized secrecy-rate threshold (2**rate - 1) * noise / power.

    The user's instantaneous BS-channel gain must exceed this value for the
    secrecy capacity to possibly reach the target rate.
    """
    user = _check_user(config, user)
    return (2.0 ** config.secrecy_rate - 1.0) * config.noise / float(config.power[user])
