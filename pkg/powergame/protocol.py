from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, root_validator, validator

# protocol version, bumped when a serialized layout changes
VERSION = 1

CSV_HEADER = ["N", "receiver", "mode", "mean_utility", "target_sinr", "capped_fraction", "converged", "seed", "repetition", "status"]


class ReceiverKind(str, Enum):
    MF = "mf"
    DE = "de"
    MMSE = "mmse"


class Mode(str, Enum):
    NONCOOPERATIVE = "nc"
    SOCIAL_OPTIMAL = "so"


class GainModel(str, Enum):
    # amplitude h is Rayleigh with the stated mean
    AMPLITUDE = "amplitude"
    # h^2 is Rayleigh with the stated mean (sensitivity runs)
    POWER = "power"


class RunStatus(str, Enum):
    OK = "ok"
    INAPPLICABLE = "inapplicable"
    FAILED = "failed"


class NetworkConfig(BaseModel):
    node_count: int = 100
    area_side: float = 500.0  # meters
    gain_mean_coefficient: float = 0.3
    gain_exponent: float = 2.0
    noise_power: float = 5e-16  # watts
    seed: int = 0
    gain_model: GainModel = GainModel.AMPLITUDE

    @validator("node_count")
    def node_count_positive(cls, value):
        if value < 1:
            raise ValueError("node_count must be >= 1")
        return value

    @validator("area_side", "noise_power", "gain_mean_coefficient")
    def strictly_positive(cls, value, field):
        if value <= 0:
            raise ValueError(f"{field.name} must be > 0")
        return value


class GameConfig(BaseModel):
    info_bits: int = 100  # L
    packet_bits: int = 100  # M
    rate: float = 1e5  # bits/s
    max_power: float = 1.0  # watts
    receiver: ReceiverKind = ReceiverKind.MMSE
    tolerance: float = 1e-10
    max_iterations: int = 10000
    power_floor: float = 1e-18
    workers: int = 1

    @root_validator(skip_on_failure=True)
    def check_packet(cls, values):
        if not 0 < values["info_bits"] <= values["packet_bits"]:
            raise ValueError("info_bits must satisfy 0 < L <= M")
        if values["rate"] <= 0:
            raise ValueError("rate must be > 0")
        if values["max_power"] <= 0:
            raise ValueError("max_power must be > 0")
        if values["max_iterations"] < 1:
            raise ValueError("max_iterations must be >= 1")
        return values


class GameOutcome(BaseModel):
    receiver: ReceiverKind
    powers: List[float]
    sinrs: List[float]
    utilities: List[float]
    target_sinr: float
    converged: bool
    iterations: int
    capped: List[int] = Field(default_factory=list)
    monotone: bool = True

    @property
    def capped_fraction(self) -> float:
        return len(self.capped) / len(self.powers) if self.powers else 0.0


class BalancedSolution(BaseModel):
    receiver: ReceiverKind
    feasible: bool
    target_sinr: Optional[float] = None
    powers: List[float] = Field(default_factory=list)
    # SINRs at which the solution's utilities are evaluated
    sinrs: List[float] = Field(default_factory=list)
    objective: Optional[float] = None
    diagnostic: Optional[str] = None


class ExperimentSpec(BaseModel):
    network: NetworkConfig = Field(default_factory=NetworkConfig)
    game: GameConfig = Field(default_factory=GameConfig)
    receivers: List[ReceiverKind] = Field(default_factory=lambda: [ReceiverKind.MF, ReceiverKind.DE, ReceiverKind.MMSE])
    processing_gains: List[int] = Field(default_factory=lambda: [50, 100, 200, 300])
    modes: List[Mode] = Field(default_factory=lambda: [Mode.NONCOOPERATIVE, Mode.SOCIAL_OPTIMAL])
    repetitions: int = 10
    weights: Optional[List[float]] = None
    output_dir: str = "results"
    formats: List[str] = Field(default_factory=lambda: ["csv", "json"])
    plot: bool = True
    master_seed: int = 0
    workers: int = 1
    version: int = VERSION

    @validator("repetitions")
    def repetitions_positive(cls, value):
        if value < 1:
            raise ValueError("repetitions must be >= 1")
        return value

    @validator("processing_gains", each_item=True)
    def gain_positive(cls, value):
        if value < 1:
            raise ValueError("processing gains must be >= 1")
        return value

    @validator("formats", each_item=True)
    def known_format(cls, value):
        if value not in ("csv", "json"):
            raise ValueError(f"Unsupported format: {value}")
        return value

    @root_validator(skip_on_failure=True)
    def check_cells(cls, values):
        if not values["receivers"] or not values["modes"]:
            raise ValueError("at least one receiver x mode pair is required")
        weights = values.get("weights")
        if weights is not None:
            if len(weights) != values["network"].node_count:
                raise ValueError("weights must have one entry per node")
            if min(weights) < 0 or max(weights) == 0:
                raise ValueError("weights must be nonnegative and not all zero")
        return values


class ResultRow(BaseModel):
    N: int
    receiver: ReceiverKind
    mode: Mode
    mean_utility: Optional[float] = None  # bits/joule
    target_sinr: Optional[float] = None
    capped_fraction: Optional[float] = None
    converged: Optional[bool] = None
    seed: int
    repetition: int = 0
    status: RunStatus = RunStatus.OK
    achieved_sinr: Optional[float] = None
    iterations: Optional[int] = None
    detail: Optional[str] = None

    @validator("mean_utility")
    def utility_nonnegative(cls, value):
        if value is not None and value < 0:
            raise ValueError("mean_utility must be >= 0")
        return value

    def cell(self):
        return self.receiver, self.N, self.mode


class ResultSet(BaseModel):
    spec: ExperimentSpec
    rows: List[ResultRow] = Field(default_factory=list)
