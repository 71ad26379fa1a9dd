"""Configuration models using Pydantic for polyflux.

This module defines the run configuration (grid, rates, initial datum,
splitting, reconstruction, stepping, model toggles and output) and the flat
``key = value`` text format it is stored in. Every key has a default, so an
empty file is the reference parameter set: R = 5, N = 200, V0 = 98, a step
initial profile of height 2.6 on [0, 0.4], eta = 5, lambda = 0.2, t_end = 20 h.
"""

from collections.abc import Iterable
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigurationError

MIN_NODES = 16


class _Section(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid", frozen=True)


def _none_if_blank(v: Any) -> Any:
    if isinstance(v, str) and v.strip().lower() in ("", "none"):
        return None
    return v


class GridConfig(_Section):
    """Uniform grid on [0, R] with N cells.

    Attributes:
        R: Maximum polymer size
        N: Number of cells (nodes 0..N)
    """

    R: float = Field(default=5.0, description="Maximum polymer size")
    N: int = Field(default=200, description="Number of cells")

    @field_validator("R")
    @classmethod
    def r_positive(cls, v: float) -> float:
        """Validate that the domain has positive length."""
        if not v > 0:
            raise ConfigurationError(f"R must be positive, got {v}", key="R")
        return v

    @field_validator("N")
    @classmethod
    def n_minimum(cls, v: int) -> int:
        """Validate that boundary quadrature and WENO stencils fit on the grid."""
        if v < MIN_NODES:
            raise ConfigurationError(f"N must be at least {MIN_NODES}, got {v}", key="N")
        return v


class RateConfig(_Section):
    """Rate constants in s⁻¹-based units, as printed in the literature.

    Attributes:
        kon_slope: Slope a of k_on below the critical size (μM⁻¹s⁻¹ per size)
        kon_intercept: Intercept b of k_on (μM⁻¹s⁻¹)
        kon_critical: Critical size x_c
        kon_plateau: Plateau value c of k_on for x ≥ x_c (μM⁻¹s⁻¹)
        eta: Depolymerization intensity, k_off = eta·1e-6 s⁻¹
        eta_min: Lower end of the explored eta range (outside is warned)
        eta_max: Upper end of the explored eta range (outside is warned)
        kf_amplitude: Fragmentation amplitude A (s⁻¹)
        kf_half_size: Fragmentation half-saturation size B
        kc_amplitude: Coagulation amplitude C (μM⁻¹s⁻¹)
        time_unit_scale: Seconds per internal time unit (3600 → hours)
    """

    kon_slope: float = Field(default=4e-6, ge=0.0)
    kon_intercept: float = Field(default=0.2e-6, ge=0.0)
    kon_critical: float = Field(default=0.5, ge=0.0)
    kon_plateau: float = Field(default=4e-6, ge=0.0)
    eta: float = Field(default=5.0, ge=0.0)
    eta_min: float = Field(default=2.0, ge=0.0)
    eta_max: float = Field(default=8.0, ge=0.0)
    kf_amplitude: float = Field(default=80e-5, ge=0.0)
    kf_half_size: float = Field(default=10.0, gt=0.0)
    kc_amplitude: float = Field(default=4e-6, ge=0.0)
    time_unit_scale: float = Field(default=3600.0, gt=0.0)


class InitialConfig(_Section):
    """Initial monomer concentration and polymer profile.

    Attributes:
        V0: Initial monomer concentration (μM)
        u0_height: Height of the step profile (μM per unit size)
        u0_cutoff: Right end of the step support
        u0_file: Optional tabulated profile with N+1 values
    """

    V0: float = Field(default=98.0, ge=0.0)
    u0_height: float = Field(default=2.6)
    u0_cutoff: float = Field(default=0.4)
    u0_file: Path | None = Field(default=None, description="Tabulated initial profile")

    blank_to_none = field_validator("u0_file", mode="before")(_none_if_blank)

    @field_validator("u0_height")
    @classmethod
    def height_nonnegative(cls, v: float) -> float:
        """Validate that the step height is not negative."""
        if v < 0:
            raise ConfigurationError(f"step height must be non-negative, got {v}", key="u0_height")
        return v

    @model_validator(mode="after")
    def profile_exclusive(self) -> "InitialConfig":
        """A tabulated profile replaces the step profile."""
        if self.u0_file is not None:
            for key in ("u0_height", "u0_cutoff"):
                if key in self.model_fields_set:
                    raise ConfigurationError("cannot be combined with u0_file", key=key)
        return self


class SplittingConfig(_Section):
    """Transport flux decomposition.

    Attributes:
        splitting: 'lambda' (convex family) or 'lax_friedrichs'
        lam: Convex-combination parameter in [0, 1] (key 'lambda')
    """

    splitting: Literal["lambda", "lax_friedrichs"] = Field(default="lambda")
    lam: float = Field(default=0.2, alias="lambda")

    @field_validator("lam")
    @classmethod
    def lam_range(cls, v: float) -> float:
        """Validate that lambda lies in [0, 1]."""
        if not 0.0 <= v <= 1.0:
            raise ConfigurationError(f"must lie in [0,1], got {v}", key="lambda")
        return v

    @model_validator(mode="after")
    def lax_friedrichs_has_no_lambda(self) -> "SplittingConfig":
        """Lax-Friedrichs carries no parameter."""
        if self.splitting == "lax_friedrichs" and "lam" in self.model_fields_set:
            raise ConfigurationError("not allowed with splitting = lax_friedrichs", key="lambda")
        return self


class WenoConfig(_Section):
    """Spatial reconstruction settings.

    Attributes:
        scheme: 'weno5' or first-order 'upwind1'
        weno_epsilon: Weight regularization
        weno_indicator: 'standard' (1/4 on the centered gradient term) or 'printed' (1/2)
        weno_weights: 'standard' linear weights (1/10, 6/10, 3/10) or the 'printed' reversed pairing
        right_boundary: 'closed' (zero flux through R) or 'open' (reconstructed outflow)
    """

    scheme: Literal["weno5", "upwind1"] = Field(default="weno5")
    weno_epsilon: float = Field(default=1e-6, gt=0.0)
    weno_indicator: Literal["standard", "printed"] = Field(default="standard")
    weno_weights: Literal["standard", "printed"] = Field(default="standard")
    right_boundary: Literal["closed", "open"] = Field(default="closed")


class StepControl(_Section):
    """Adaptive time step control.

    Attributes:
        cfl_safety: Fraction of the CFL bound used, in (0, 1]
        cfl_literal: Use the printed bound without the Δx factors in C and F
        dt_max: Optional cap on the time step (h)
        dt_min: Steps below this are treated as divergence (h)
        blowup_bound: max|u| above this is treated as divergence
        oscillation_bound: Oscillation metric above this is treated as divergence (none disables)
        max_steps: Optional limit on accepted steps
    """

    cfl_safety: float = Field(default=0.9)
    cfl_literal: bool = Field(default=False)
    dt_max: float | None = Field(default=None)
    dt_min: float = Field(default=1e-12, gt=0.0)
    blowup_bound: float = Field(default=1e6, gt=0.0)
    oscillation_bound: float | None = Field(default=0.2, gt=0.0)
    max_steps: int | None = Field(default=None)

    blank_to_none = field_validator("dt_max", "max_steps", "oscillation_bound", mode="before")(_none_if_blank)

    @field_validator("cfl_safety")
    @classmethod
    def safety_range(cls, v: float) -> float:
        """Validate that the safety factor lies in (0, 1]."""
        if not 0.0 < v <= 1.0:
            raise ConfigurationError(f"must lie in (0,1], got {v}", key="cfl_safety")
        return v

    @field_validator("max_steps")
    @classmethod
    def steps_positive(cls, v: int | None) -> int | None:
        """Validate that the step limit is positive."""
        if v is not None and v <= 0:
            raise ConfigurationError(f"must be positive, got {v}", key="max_steps")
        return v

    @model_validator(mode="after")
    def dt_bounds(self) -> "StepControl":
        """dt_min must stay below dt_max."""
        if self.dt_max is not None and not self.dt_min < self.dt_max:
            raise ConfigurationError(
                f"dt_max ({self.dt_max}) must exceed dt_min ({self.dt_min})", key="dt_max"
            )
        return self


class ModelToggles(_Section):
    """Switches for the physical processes.

    Attributes:
        enable_coagfrag: Include the coagulation-fragmentation flux
        enable_transport: Include polymerization/depolymerization transport
        discoag_weight: 'inner' weights the flux by x_j, 'printed' by x_l
    """

    enable_coagfrag: bool = Field(default=True)
    enable_transport: bool = Field(default=True)
    discoag_weight: Literal["inner", "printed"] = Field(default="inner")


class OutputConfig(_Section):
    """Run length and recording.

    Attributes:
        t_end: Final time (h)
        snapshot_times: Times (h) at which the density is stored
        timeseries_stride: Record every k-th step
        oscillation_floor: Relative floor of the oscillation metric
        plot_script: Write a gnuplot script next to the CSV files
    """

    t_end: float = Field(default=20.0, gt=0.0)
    snapshot_times: tuple[float, ...] = Field(default=(0.0, 0.5, 6.0, 12.0, 18.0, 20.0))
    timeseries_stride: int = Field(default=1, ge=1)
    oscillation_floor: float = Field(default=1e-3, ge=0.0)
    plot_script: bool = Field(default=True)

    @field_validator("snapshot_times", mode="before")
    @classmethod
    def split_times(cls, v: Any) -> Any:
        """Accept a comma-separated list."""
        if isinstance(v, str):
            return tuple(part.strip() for part in v.split(",") if part.strip())
        return v

    @field_validator("snapshot_times")
    @classmethod
    def times_sorted(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        """Validate that snapshot times are sorted and non-negative."""
        if any(b < a for a, b in zip(v, v[1:])):
            raise ConfigurationError("must be sorted", key="snapshot_times")
        if v and v[0] < 0:
            raise ConfigurationError("must be non-negative", key="snapshot_times")
        return v


SECTIONS: dict[str, type[_Section]] = {
    "grid": GridConfig,
    "rates": RateConfig,
    "initial": InitialConfig,
    "splitting": SplittingConfig,
    "weno": WenoConfig,
    "stepping": StepControl,
    "model": ModelToggles,
    "output": OutputConfig,
}


def _key_table() -> dict[str, tuple[str, str]]:
    table: dict[str, tuple[str, str]] = {}
    for section, model in SECTIONS.items():
        for name, info in model.model_fields.items():
            table[info.alias or name] = (section, name)
    return table


KEYS = _key_table()
_FIELD_KEYS = {(section, name): key for key, (section, name) in KEYS.items()}


class SimConfig(BaseModel):
    """Root configuration of one simulation run.

    Attributes:
        grid: Grid parameters
        rates: Rate constants
        initial: Initial data
        splitting: Transport flux splitting
        weno: Reconstruction scheme
        stepping: Time step control
        model: Process toggles
        output: Run length and recording
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    grid: GridConfig = Field(default_factory=GridConfig)
    rates: RateConfig = Field(default_factory=RateConfig)
    initial: InitialConfig = Field(default_factory=InitialConfig)
    splitting: SplittingConfig = Field(default_factory=SplittingConfig)
    weno: WenoConfig = Field(default_factory=WenoConfig)
    stepping: StepControl = Field(default_factory=StepControl)
    model: ModelToggles = Field(default_factory=ModelToggles)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def cross_checks(self) -> "SimConfig":
        """Checks spanning several sections."""
        if self.initial.u0_file is None and not 0.0 < self.initial.u0_cutoff < self.grid.R:
            raise ConfigurationError(
                f"must lie in (0, R={self.grid.R}), got {self.initial.u0_cutoff}", key="u0_cutoff"
            )
        late = [t for t in self.output.snapshot_times if t > self.output.t_end]
        if late:
            raise ConfigurationError(
                f"times {late} exceed t_end={self.output.t_end}", key="snapshot_times"
            )
        return self

    @classmethod
    def from_text(cls, text: str, overrides: Iterable[str] = ()) -> "SimConfig":
        """Create a SimConfig from config-file text plus 'key=value' overrides.

        Args:
            text: Contents of a config file (may be empty)
            overrides: Extra 'key=value' assignments applied after the file

        Returns:
            Validated SimConfig instance

        Raises:
            ConfigurationError: On unknown, duplicate, misplaced or invalid keys
        """
        values: dict[str, str] = {}
        lines: dict[str, int | None] = {}
        section: str | None = None

        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in SECTIONS:
                    raise ConfigurationError(f"unknown section [{section}] on line {lineno}")
                continue
            if "=" not in line:
                raise ConfigurationError(f"expected 'key = value' on line {lineno}: {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in KEYS:
                raise ConfigurationError("unknown key", key=key, line=lineno)
            if key in values:
                raise ConfigurationError(f"duplicate key (first on line {lines[key]})", key=key, line=lineno)
            if section is not None and KEYS[key][0] != section:
                raise ConfigurationError(
                    f"belongs to [{KEYS[key][0]}], not [{section}]", key=key, line=lineno
                )
            values[key] = value
            lines[key] = lineno

        overridden: dict[str, str] = {}
        for item in overrides:
            if "=" not in item:
                raise ConfigurationError(f"override must be key=value, got {item!r}")
            key, value = (part.strip() for part in item.split("=", 1))
            if key not in KEYS:
                raise ConfigurationError("unknown key (--set)", key=key)
            overridden[key] = value
            values[key] = value
            lines[key] = None

        # an override switching to Lax-Friedrichs drops a lambda read from the file
        if overridden.get("splitting") == "lax_friedrichs" and "lambda" not in overridden:
            values.pop("lambda", None)

        nested: dict[str, dict[str, str]] = {}
        for key, value in values.items():
            nested.setdefault(KEYS[key][0], {})[key] = value

        try:
            return cls.model_validate(nested)
        except ValidationError as e:
            raise _translate(e, lines) from None

    @classmethod
    def from_file(cls, path: str | Path, overrides: Iterable[str] = ()) -> "SimConfig":
        """Create a SimConfig from a config file on disk."""
        return cls.from_text(Path(path).read_text(encoding="utf-8"), overrides)

    def to_text(self) -> str:
        """Render every resolved key, grouped by section, so that from_text round-trips."""
        out: list[str] = []
        for section in SECTIONS:
            model = getattr(self, section)
            out.append(f"[{section}]")
            for name in type(model).model_fields:
                key = _FIELD_KEYS[(section, name)]
                if key == "lambda" and self.splitting.splitting == "lax_friedrichs":
                    continue
                if key in ("u0_height", "u0_cutoff") and self.initial.u0_file is not None:
                    continue
                out.append(f"{key} = {_render(getattr(model, name))}")
            out.append("")
        return "\n".join(out)


def _render(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_render(v) for v in value)
    return str(value)


def _translate(exc: ValidationError, lines: dict[str, int | None]) -> ConfigurationError:
    err = exc.errors()[0]
    cause = (err.get("ctx") or {}).get("error")
    if isinstance(cause, ConfigurationError) and cause.key is not None:
        return ConfigurationError(cause.detail, key=cause.key, line=lines.get(cause.key))

    loc = err["loc"]
    key = _FIELD_KEYS.get((str(loc[0]), str(loc[1]))) if len(loc) >= 2 else None
    if key is None and len(loc) >= 2 and str(loc[1]) in KEYS:
        key = str(loc[1])
    message = err["msg"]
    if key is None:
        return ConfigurationError(message)
    return ConfigurationError(message, key=key, line=lines.get(key))


def parse_config(text: str, overrides: Iterable[str] = ()) -> SimConfig:
    """Parse config-file text into a resolved SimConfig (see SimConfig.from_text)."""
    return SimConfig.from_text(text, overrides)
