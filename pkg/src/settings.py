"""Laboratory settings loaded from environment variables."""
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical defaults for meshing, quadrature, solvers and reports."""

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    LAB_LOG_LEVEL: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    LAB_OUTPUT_DIR: str = "out"

    # Meshing: max edge h, graded as h*(r/diam)**exponent down to h/ratio at the origin.
    LAB_DEFAULT_H: float = 0.1
    LAB_GRADING_EXPONENT: float = 0.5
    LAB_H_MIN_RATIO: float = 32.0
    LAB_MIN_ANGLE: float = 30.0
    LAB_MESH_MAX_PASSES: int = 40

    # Quadrature
    LAB_ANGULAR_GAUSS_POINTS: int = 16
    LAB_EDGE_GAUSS_POINTS: int = 7
    LAB_ELEMENT_PANELS: int = 2
    LAB_ADAPTIVE_TOL: float = 1e-10
    LAB_ADAPTIVE_MAX_DEPTH: int = 40
    LAB_CHUNK_SIZE: int = 8192

    # Linear and eigen solvers
    LAB_CG_RTOL: float = 1e-11
    LAB_CG_MAXITER_FACTOR: int = 20
    LAB_EIGEN_TOL: float = 1e-8
    LAB_EIGEN_MAXITER: int = 500
    # Inverse iteration gives up after this many steps without a new best residual.
    LAB_EIGEN_STAGNATION: int = 25

    # Rearrangement and radial solver
    LAB_N_LEVELS: int = 512
    LAB_RADIAL_GRID: int = 2048
    LAB_EIGEN_GRID: int = 4096
    LAB_SOURCE_H: float = 0.05

    # Comparison suite
    LAB_N_RADII: int = 256
    LAB_HL_SUBSETS: int = 100
    LAB_SEED: int = 42
    LAB_RICHARDSON_ORDER: int = 2
    LAB_MARGIN_SAFETY: float = 2.0

    # Gallery and convergence study
    LAB_DISK_SIDES: int = 256
    LAB_CONVERGENCE_SIDES: int = 1024
    LAB_CONVERGENCE_LEVELS: int = 3


settings = Settings()
