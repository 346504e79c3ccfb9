"""Physical parameters of the cavity + two-resonator loop and their config files.

All rates and frequencies are stored as angular frequencies in rad/s.
Configuration files quote ordinary frequencies in Hz and are converted on load.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidParameterError

# CODATA 2018 exact / recommended values
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
C_LIGHT = 299792458.0  # m / s

TWO_PI = 2.0 * math.pi

#: Loop-coupling magnitudes (in units of gamma1 + gamma2) reported for the
#: default parameter set. Used only as the initial ``mu_abs`` of
#: :func:`paper_defaults`; analyses resolve the values with ``eplocator``.
REPORTED_EP1_OVER_GAMMA_SUM = 31.06
REPORTED_EP2_OVER_GAMMA_SUM = 41.6

CARRIER_CONVENTIONS = ("cyclic", "angular")


@dataclass(frozen=True)
class PhysicalParams:
    """Immutable parameter set in coherent angular-frequency units.

    ``carrier`` selects how the pump carrier enters the photon flux
    ``eps_L**2 = 2 P_L / (hbar * w)``: ``"angular"`` uses ``w = 2 pi c / lambda``,
    ``"cyclic"`` uses ``w = c / lambda``. The cyclic form is the default: with
    it the default parameter set has its two exceptional points at
    ``|mu| = 31.06 (gamma1 + gamma2)`` and ``41.6 (gamma1 + gamma2)``.
    """

    omega_m: float
    kappa: float
    gamma1: float
    gamma2: float
    g1: complex
    g2: complex
    mu_abs: float
    phi_loop: float
    delta: float
    eta: float
    power: float
    lambda_laser: float
    n_a: float
    n_b1: float
    n_b2: float
    carrier: str = "cyclic"

    def __post_init__(self):
        for name in ("omega_m", "kappa", "gamma1", "gamma2", "mu_abs", "phi_loop",
                     "delta", "eta", "power", "lambda_laser", "n_a", "n_b1", "n_b2"):
            value = getattr(self, name)
            if isinstance(value, (complex, np.complexfloating)) or not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be a finite real number, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("g1", "g2"):
            value = complex(getattr(self, name))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

        for name in ("omega_m", "kappa", "gamma1", "gamma2", "lambda_laser"):
            if getattr(self, name) <= 0.0:
                raise InvalidParameterError(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("mu_abs", "power", "n_a", "n_b1", "n_b2"):
            if getattr(self, name) < 0.0:
                raise InvalidParameterError(f"{name} must be >= 0, got {getattr(self, name)!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise InvalidParameterError(f"eta must lie in [0, 1], got {self.eta!r}")
        if self.carrier not in CARRIER_CONVENTIONS:
            raise InvalidParameterError(
                f"carrier must be one of {CARRIER_CONVENTIONS}, got {self.carrier!r}")

        phi = math.fmod(self.phi_loop, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:  # fmod of a tiny negative number rounds up to 2 pi
            phi = 0.0
        object.__setattr__(self, "phi_loop", phi)

    @property
    def mu(self) -> complex:
        """Complex intermechanical coupling ``|mu| exp(i phi_loop)``."""
        return complex(self.mu_abs * math.cos(self.phi_loop),
                       self.mu_abs * math.sin(self.phi_loop))

    @property
    def gamma_sum(self) -> float:
        return self.gamma1 + self.gamma2

    @property
    def carrier_frequency(self) -> float:
        """Frequency entering the photon flux of the pump (see class docstring)."""
        w = C_LIGHT / self.lambda_laser
        return TWO_PI * w if self.carrier == "angular" else w

    def replace(self, **changes) -> "PhysicalParams":
        return dataclasses.replace(self, **changes)

    def swapped(self) -> "PhysicalParams":
        """Resonators 1 and 2 interchanged together with ``phi -> -phi``."""
        return self.replace(g1=self.g2, g2=self.g1, gamma1=self.gamma2, gamma2=self.gamma1,
                            n_b1=self.n_b2, n_b2=self.n_b1, phi_loop=-self.phi_loop)

    def fingerprint(self) -> str:
        """Short stable hash of every field (bit-exact floats)."""
        parts = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, complex):
                parts.append(f"{f.name}={v.real.hex()},{v.imag.hex()}")
            elif isinstance(v, float):
                parts.append(f"{f.name}={v.hex()}")
            else:
                parts.append(f"{f.name}={v}")
        return hashlib.sha256(";".join(parts).encode()).hexdigest()[:16]

    def as_dict(self) -> dict:
        """JSON-friendly snapshot in internal units (complex as ``[re, im]``)."""
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out[f.name] = [v.real, v.imag] if isinstance(v, complex) else v
        return out


def paper_defaults(mu_abs: float | None = None, phi_loop: float = 0.0) -> PhysicalParams:
    """Default parameter set: resolved-sideband, red-detuned, identical resonators.

    ``mu_abs`` defaults to the reported second exceptional-point magnitude,
    ``41.6 (gamma1 + gamma2)``; use ``eplocator.resolve_ep_magnitudes`` for the
    value computed from the model itself.
    """
    omega_m = TWO_PI * 3.75e9
    gamma = 5e-4 * omega_m
    g = TWO_PI * 800e3
    if mu_abs is None:
        mu_abs = REPORTED_EP2_OVER_GAMMA_SUM * 2.0 * gamma
    return PhysicalParams(
        omega_m=omega_m,
        kappa=TWO_PI * 900e6,
        gamma1=gamma,
        gamma2=gamma,
        g1=complex(g),
        g2=complex(g),
        mu_abs=mu_abs,
        phi_loop=phi_loop,
        delta=omega_m,
        eta=0.5,
        power=0.125e-3,
        lambda_laser=1550e-9,
        n_a=0.0,
        n_b1=100.0,
        n_b2=100.0,
        carrier="cyclic",
    )


def drive_amplitude(p: PhysicalParams) -> float:
    """Pump amplitude ``eps_L = sqrt(2 P_L / (hbar w_L))`` in s^(-1/2)."""
    if p.lambda_laser <= 0.0:
        raise InvalidParameterError("lambda_laser must be > 0")
    return math.sqrt(2.0 * p.power / (HBAR * p.carrier_frequency))


def thermal_occupancy(temperature, omega):
    """Bose-Einstein mean occupancy ``1 / (exp(hbar w / k_B T) - 1)``.

    Accepts scalars or arrays; ``temperature`` and ``omega`` must be positive.
    """
    t = np.asarray(temperature, dtype=float)
    w = np.asarray(omega, dtype=float)
    if np.any(t <= 0.0):
        raise InvalidParameterError("temperature must be > 0")
    if np.any(w <= 0.0):
        raise InvalidParameterError("omega must be > 0")
    with np.errstate(over="ignore"):
        n = 1.0 / np.expm1(HBAR * w / (K_B * t))
    return float(n) if n.ndim == 0 else n


# --------------------------------------------------------------------------
# configuration files


@dataclass(frozen=True)
class RunOptions:
    ss_tol: float = 1e-12
    ss_max_iter: int = 10_000
    quad_tol: float = 1e-8
    jobs: int | None = None


_REQUIRED = ("omega_m_hz", "kappa_hz", "g1_hz", "g2_hz", "phi_loop_rad", "eta",
             "power_watt", "lambda_m", "n_a", "n_b1", "n_b2")
_ALTERNATIVES = {
    "gamma1": ("gamma1_frac_of_omega_m", "gamma1_hz"),
    "gamma2": ("gamma2_frac_of_omega_m", "gamma2_hz"),
    "mu_abs": ("mu_abs_over_gamma_sum", "mu_abs_hz"),
}
_OPTIONAL = {"g1_phase_rad": 0.0, "g2_phase_rad": 0.0, "delta_over_omega_m": 1.0,
             "carrier": "cyclic"}
_OPTION_KEYS = {"ss_tol": float, "ss_max_iter": int, "quad_tol": float, "jobs": int}
CONFIG_KEYS = frozenset(_REQUIRED) | frozenset(_OPTIONAL) | frozenset(
    k for pair in _ALTERNATIVES.values() for k in pair) | {"options"}


def _number(raw, key):
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise ConfigError(key, "must be finite")
    return float(value)


def _pick(raw, logical):
    first, second = _ALTERNATIVES[logical]
    has = [k for k in (first, second) if k in raw]
    if not has:
        raise ConfigError(second, f"missing (give either {first!r} or {second!r})")
    if len(has) == 2:
        raise ConfigError(second, f"{first!r} and {second!r} are mutually exclusive")
    return has[0], _number(raw, has[0])


def params_from_mapping(raw: dict) -> tuple[PhysicalParams, RunOptions]:
    """Validate a decoded config object; see :func:`load_config`."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(key, "missing required key")
    v = {key: _number(raw, key) for key in _REQUIRED}
    for key in ("g1_phase_rad", "g2_phase_rad", "delta_over_omega_m"):
        v[key] = _number(raw, key) if key in raw else _OPTIONAL[key]
    carrier = raw.get("carrier", _OPTIONAL["carrier"])
    if carrier not in CARRIER_CONVENTIONS:
        raise ConfigError("carrier", f"must be one of {CARRIER_CONVENTIONS}")

    omega_m = TWO_PI * v["omega_m_hz"]
    gammas = []
    for logical in ("gamma1", "gamma2"):
        key, value = _pick(raw, logical)
        gammas.append(value * omega_m if key.endswith("frac_of_omega_m") else TWO_PI * value)
    key, value = _pick(raw, "mu_abs")
    mu_abs = value * (gammas[0] + gammas[1]) if key == "mu_abs_over_gamma_sum" else TWO_PI * value

    def g(which):
        mag = TWO_PI * v[f"{which}_hz"]
        phase = v[f"{which}_phase_rad"]
        return complex(mag) if phase == 0.0 else mag * complex(math.cos(phase), math.sin(phase))

    fields = dict(
        omega_m=omega_m, kappa=TWO_PI * v["kappa_hz"], gamma1=gammas[0], gamma2=gammas[1],
        g1=g("g1"), g2=g("g2"), mu_abs=mu_abs, phi_loop=v["phi_loop_rad"],
        delta=v["delta_over_omega_m"] * omega_m, eta=v["eta"], power=v["power_watt"],
        lambda_laser=v["lambda_m"], n_a=v["n_a"], n_b1=v["n_b1"], n_b2=v["n_b2"],
        carrier=carrier,
    )
    source_key = {"omega_m": "omega_m_hz", "kappa": "kappa_hz", "gamma1": "gamma1_hz",
                  "gamma2": "gamma2_hz", "mu_abs": "mu_abs_hz", "eta": "eta",
                  "power": "power_watt", "lambda_laser": "lambda_m", "n_a": "n_a",
                  "n_b1": "n_b1", "n_b2": "n_b2"}
    try:
        params = PhysicalParams(**fields)
    except InvalidParameterError as exc:
        name = str(exc).split(" ", 1)[0]
        raise ConfigError(source_key.get(name, name), str(exc)) from exc

    opts_raw = raw.get("options", {})
    if not isinstance(opts_raw, dict):
        raise ConfigError("options", "must be an object")
    opts = {}
    for key, value in opts_raw.items():
        if key not in _OPTION_KEYS:
            raise ConfigError(f"options.{key}", "unknown key")
        kind = _OPTION_KEYS[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)) or (
                kind is int and not float(value).is_integer()):
            raise ConfigError(f"options.{key}", f"expected {kind.__name__}")
        opts[key] = kind(value)
    return params, RunOptions(**opts)


def load_config(path) -> tuple[PhysicalParams, RunOptions]:
    """Read a JSON config file (ordinary frequencies in Hz) into validated params.

    Raises :class:`ConfigError` naming the offending key on any schema or
    invariant violation.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from exc
    return params_from_mapping(raw)


def config_mapping(p: PhysicalParams, options: RunOptions | None = None) -> dict:
    """Inverse of :func:`params_from_mapping` (Hz-valued keys)."""
    raw = {
        "omega_m_hz": p.omega_m / TWO_PI,
        "kappa_hz": p.kappa / TWO_PI,
        "gamma1_hz": p.gamma1 / TWO_PI,
        "gamma2_hz": p.gamma2 / TWO_PI,
        "g1_hz": abs(p.g1) / TWO_PI,
        "g2_hz": abs(p.g2) / TWO_PI,
        "g1_phase_rad": math.atan2(p.g1.imag, p.g1.real),
        "g2_phase_rad": math.atan2(p.g2.imag, p.g2.real),
        "mu_abs_hz": p.mu_abs / TWO_PI,
        "phi_loop_rad": p.phi_loop,
        "delta_over_omega_m": p.delta / p.omega_m,
        "eta": p.eta,
        "power_watt": p.power,
        "lambda_m": p.lambda_laser,
        "n_a": p.n_a,
        "n_b1": p.n_b1,
        "n_b2": p.n_b2,
        "carrier": p.carrier,
    }
    if options is not None:
        raw["options"] = {k: v for k, v in dataclasses.asdict(options).items() if v is not None}
    return raw


def write_config(p: PhysicalParams, path, options: RunOptions | None = None) -> Path:
    path = Path(path)
    path.write_text(json.dumps(config_mapping(p, options), indent=2) + "\n")
    return path
