from typing import Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class Dataset(BaseModel):
    """Paired observations `(y1_i, y2_i)`, kept in input order."""

    y1: np.ndarray
    y2: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, extra="forbid")

    @field_validator("y1", "y2", mode="before")
    @classmethod
    def as_float_array(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float)
        if array.ndim != 1:
            raise ValueError(f"Expected a one-dimensional column, got shape {array.shape}.")
        if not np.all(np.isfinite(array)):
            raise ValueError("All observations must be finite numbers.")
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_lengths(self) -> "Dataset":
        if self.y1.size != self.y2.size:
            raise ValueError(
                f"Columns have different lengths: {self.y1.size} != {self.y2.size}."
            )
        return self

    @property
    def n(self) -> int:
        return int(self.y1.size)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "Dataset":
        array = np.array(list(pairs), dtype=float).reshape(-1, 2)
        return cls(y1=array[:, 0], y2=array[:, 1])

    def swapped(self) -> "Dataset":
        """Return the dataset with the two columns exchanged."""
        return Dataset(y1=self.y2, y2=self.y1)
