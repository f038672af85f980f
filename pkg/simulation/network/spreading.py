import numpy as np
from pydantic import BaseModel


class SpreadingSet(BaseModel):
    """K binary spreading sequences of length N stored as the columns of `sequences`."""

    signs: np.ndarray
    sequences: np.ndarray
    rho: np.ndarray

    class Config:
        arbitrary_types_allowed = True

    @property
    def processing_gain(self) -> int:
        return int(self.sequences.shape[0])

    @property
    def size(self) -> int:
        return int(self.sequences.shape[1])

    @classmethod
    def from_signs(cls, signs) -> "SpreadingSet":
        signs = np.asarray(signs, dtype=np.int8)
        sequences = signs.astype(float) / np.sqrt(signs.shape[0])
        rho = sequences.T @ sequences
        np.fill_diagonal(rho, 1.0)
        return cls(signs=signs, sequences=sequences, rho=rho)

    @classmethod
    def from_sequences(cls, sequences) -> "SpreadingSet":
        """Build a set from arbitrary unit-norm columns (used for hand-built oracles)."""
        sequences = np.asarray(sequences, dtype=float)
        rho = sequences.T @ sequences
        np.fill_diagonal(rho, 1.0)
        return cls(signs=np.sign(sequences).astype(np.int8), sequences=sequences, rho=rho)


def generate_spreading(k_nodes: int, processing_gain: int, rng: np.random.Generator) -> SpreadingSet:
    if k_nodes < 1 or processing_gain < 1:
        raise ValueError("spreading needs K >= 1 and N >= 1")
    signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=(processing_gain, k_nodes))
    return SpreadingSet.from_signs(signs)
