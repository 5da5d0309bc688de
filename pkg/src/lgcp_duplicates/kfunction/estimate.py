"""The KEstimate container and its CSV format."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Literal, Union

import numpy as np

from lgcp_duplicates.errors import ConfigError, DataIOError

logger = logging.getLogger(__name__)

DEFAULT_R_POINTS = 513

Variant = Literal["hom", "inhom", "theoretical"]


def default_r_grid(r_max: float, n: int = DEFAULT_R_POINTS) -> np.ndarray:
    """``n`` equally spaced distances on [0, r_max]."""
    if not r_max > 0:
        raise ConfigError(f"r_max must be positive, got {r_max}")
    if n < 2:
        raise ConfigError(f"Distance grid needs at least 2 points, got {n}")
    return np.linspace(0.0, float(r_max), int(n))


def validate_r_grid(r: np.ndarray) -> np.ndarray:
    r = np.array(r, dtype=float, copy=True).reshape(-1)
    if r.size < 2 or r[0] != 0.0 or np.any(np.diff(r) <= 0):
        raise ConfigError("Distance grid must start at 0 and be strictly increasing")
    return r


@dataclass(frozen=True, eq=False)
class KEstimate:
    """K-function values on a distance grid with a description of how they were obtained."""

    r: np.ndarray
    khat: np.ndarray
    variant: Variant
    n_points: int
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        r = validate_r_grid(self.r)
        khat = np.asarray(self.khat, dtype=float).reshape(-1)
        if khat.shape != r.shape:
            raise ConfigError(f"khat has {khat.size} values for {r.size} distances")
        r.setflags(write=False)
        khat = khat.copy()
        khat.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "khat", khat)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def at(self, r: float) -> float:
        """K value at the largest grid distance not exceeding ``r``."""
        idx = int(np.searchsorted(self.r, r, side="right")) - 1
        return float(self.khat[max(idx, 0)])

    def to_csv(self, path: Union[str, Path]) -> None:
        """Write ``r,khat`` rows preceded by ``# key: value`` comment lines."""
        header = [f"variant: {self.variant}", f"n_points: {self.n_points}"]
        header += [f"{key}: {value}" for key, value in self.meta.items()]
        header.append("r,khat")
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            np.savetxt(
                path,
                np.column_stack([self.r, self.khat]),
                delimiter=",",
                header="\n".join(f"# {line}" for line in header[:-1]) + "\n" + header[-1],
                comments="",
                fmt="%.17g",
            )
        except OSError as e:
            raise DataIOError(f"Cannot write K estimate {path}: {e}")

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "KEstimate":
        meta: Dict[str, Any] = {}
        try:
            with Path(path).open("r", encoding="utf-8") as fh:
                line = fh.readline()
                while line.startswith("#"):
                    key, _, value = line[1:].strip().partition(":")
                    meta[key.strip()] = value.strip()
                    line = fh.readline()
                if line.strip() != "r,khat":
                    raise DataIOError(f"{path}: expected 'r,khat' header, got {line.strip()!r}")
                data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except OSError as e:
            raise DataIOError(f"Cannot read K estimate {path}: {e}")
        except ValueError as e:
            raise DataIOError(f"Malformed K estimate {path}: {e}")
        variant = meta.pop("variant", "hom")
        n_points = int(meta.pop("n_points", 0))
        return cls(r=data[:, 0], khat=data[:, 1], variant=variant, n_points=n_points, meta=meta)
