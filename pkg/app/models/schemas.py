import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

NORM_TOL = 1e-12


class DetectionScheme(str, Enum):
    """Output observable used to infer the phase."""
    PARITY = "parity"
    JZ = "jz"


class StateFamily(str, Enum):
    """Input state families understood by the CLI and the API."""
    YURKE = "yurke"
    DUAL_FOCK = "dual-fock"
    NOON = "noon"
    INTELLIGENT = "intelligent"
    SINGLE_PORT = "single-port"


class JState(BaseModel):
    """
    N-photon two-mode state in the |j,m> basis.

    Amplitude position p holds m = p - j, p = 0..2j.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    two_j: int = Field(ge=0)
    amps: np.ndarray

    @field_validator("amps", mode="before")
    @classmethod
    def _as_complex(cls, value) -> np.ndarray:
        arr = np.array(value, dtype=complex).reshape(-1)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_shape_and_norm(self) -> "JState":
        if self.amps.shape[0] != self.two_j + 1:
            raise ValueError(
                f"Expected {self.two_j + 1} amplitudes, got {self.amps.shape[0]}"
            )
        norm = float(np.vdot(self.amps, self.amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"State is not normalized (norm^2 = {norm:.15g})")
        return self

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def n_photons(self) -> int:
        return self.two_j

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(self.two_j + 1) - self.j

    @classmethod
    def from_unnormalized(cls, two_j: int, amps) -> "JState":
        """Normalize, fix the global phase, and wrap raw amplitudes."""
        arr = np.asarray(amps, dtype=complex).reshape(-1)
        norm = np.linalg.norm(arr)
        if norm == 0.0 or not np.isfinite(norm):
            raise ValueError("Cannot normalize a zero or non-finite amplitude vector")
        arr = arr / norm
        # first non-negligible amplitude made real positive
        scale = np.max(np.abs(arr))
        lead = np.flatnonzero(np.abs(arr) > 1e-12 * scale)[0]
        arr = arr * (abs(arr[lead]) / arr[lead])
        return cls(two_j=two_j, amps=arr)


class WignerBlock(BaseModel):
    """Matrix of d^j_{mn}(theta), entry [m + j, n + j]."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    two_j: int = Field(ge=0)
    theta: float
    d: np.ndarray


class IntelligentSpec(BaseModel):
    """Parameters of an eigenstate of J_y + i*eta*J_z."""
    model_config = ConfigDict(frozen=True)

    two_j: int = Field(ge=1)
    m0: float = 0.0
    eta: float

    @model_validator(mode="after")
    def _check(self) -> "IntelligentSpec":
        if not self.eta > 1.0:
            raise ValueError(f"eta must be strictly greater than 1, got {self.eta}")
        j = self.two_j / 2
        if abs(self.m0) > j:
            raise ValueError(f"|m0| = {abs(self.m0)} exceeds j = {j}")
        if abs(2 * self.m0 - round(2 * self.m0)) > 1e-12 or (round(2 * self.m0) - self.two_j) % 2:
            raise ValueError(f"m0 = {self.m0} is not on the lattice of j = {j}")
        return self


class LossChannel(BaseModel):
    """Amplitude transmission of the lossy arm b (arm a is lossless)."""
    model_config = ConfigDict(frozen=True)

    transmission: float = Field(ge=0.0, le=1.0)


class QMatrix(BaseModel):
    """Matrix elements <j,m|Y2|j,n> of the surviving-photon operator."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    two_j: int
    transmission: float
    q: np.ndarray
    sym: np.ndarray


class SensitivitySample(BaseModel):
    """One phase-sensitivity evaluation."""
    phi: float
    delta_phi: float
    scheme: DetectionScheme
    state_label: str
    two_j: int
    transmission: float = 1.0
    divergent: bool = False
    success_proxy: float = 1.0

    @field_serializer("phi", "delta_phi", when_used="json")
    def _finite_or_null(self, value: float) -> Optional[float]:
        return value if math.isfinite(value) else None


class RunConfig(BaseModel):
    """Validated parameters of one CLI / API computation."""
    state_label: StateFamily
    n_photons: int = Field(ge=1)
    eta: Optional[float] = None
    m0: Optional[float] = None
    scheme: DetectionScheme = DetectionScheme.PARITY
    lambda_grid: list[float] = [1.0]
    phi: Optional[float] = None
    output_path: Optional[str] = None

    @field_validator("lambda_grid")
    @classmethod
    def _check_lambdas(cls, values: list[float]) -> list[float]:
        if not values:
            raise ValueError("lambda grid is empty")
        for lam in values:
            if not 0.0 < lam <= 1.0:
                raise ValueError(f"lambda = {lam} outside (0, 1]")
        return values

    @model_validator(mode="after")
    def _check_intelligent(self) -> "RunConfig":
        is_intelligent = self.state_label == StateFamily.INTELLIGENT
        has_params = self.eta is not None or self.m0 is not None
        if has_params and not is_intelligent:
            raise ValueError("eta / m0 only apply to the intelligent state")
        return self


class VerificationRow(BaseModel):
    """One oracle-versus-closed-form comparison."""
    check: str
    n_photons: int
    transmission: float
    max_deviation: float
    passed: bool


# --- HTTP bodies ---

class SensitivityRequest(BaseModel):
    state: StateFamily
    n: int = Field(ge=1)
    scheme: DetectionScheme = DetectionScheme.PARITY
    transmission: float = Field(default=1.0, gt=0.0, le=1.0)
    phi: Optional[float] = None
    eta: Optional[float] = None
    m0: Optional[float] = None


class SweepRequest(BaseModel):
    state: StateFamily
    n: int = Field(ge=1)
    transmissions: list[float]
    eta: Optional[float] = None
    m0: Optional[float] = None


class SensitivityResponse(BaseModel):
    success: bool
    message: str
    samples: list[SensitivitySample] = []


class StateAmplitude(BaseModel):
    m: float
    re: float
    im: float


class StateResponse(BaseModel):
    state: StateFamily
    n: int
    amplitudes: list[StateAmplitude]


class VerificationResponse(BaseModel):
    passed: bool
    rows: list[VerificationRow]


class HealthResponse(BaseModel):
    """Health check response."""
    status: str
    app_name: str
    version: str
    n_max: int
