"""Word-vector tables serving cluster scoring, term similarity, and matching.

Two tables are kept because the cluster score distinguishes the input vector
of a context word from the output vector of a cluster member. Vocabulary keys
are lowercased; Chinese terms are unaffected by lowercasing.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DataFormatError, DimensionError


class EmbeddingStore:
    def __init__(self, dim: int, input_vectors: dict[str, np.ndarray],
                 output_vectors: dict[str, np.ndarray]):
        self.dim = dim
        self.input_vectors = input_vectors
        self.output_vectors = output_vectors

    def vector(self, term: str, table: str = "input") -> np.ndarray | None:
        """Exact-vocabulary vector, or the mean of the in-vocabulary words of
        a multiword term; None when nothing is known."""
        vocab = self._table(table)
        key = term.strip().lower()
        if not key:
            return None
        hit = vocab.get(key)
        if hit is not None:
            return hit
        parts = key.split()
        if len(parts) < 2:
            return None
        known = [vocab[p] for p in parts if p in vocab]
        if not known:
            return None
        return np.mean(known, axis=0)

    def _table(self, table: str) -> dict[str, np.ndarray]:
        if table == "input":
            return self.input_vectors
        if table == "output":
            return self.output_vectors
        raise ValueError(f"unknown table {table!r} (expected 'input' or 'output')")


def _load_table(path: Path) -> tuple[int, dict[str, np.ndarray]]:
    vectors: dict[str, np.ndarray] = {}
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataFormatError("expected header 'vocab_size dim'", path=path, line=1)
        try:
            vocab_size, dim = int(header[0]), int(header[1])
        except ValueError:
            raise DataFormatError("non-integer header fields", path=path, line=1)
        if dim < 1:
            raise DataFormatError("dimension must be positive", path=path, line=1)
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) < dim + 1:
                raise DataFormatError(
                    f"expected a term plus {dim} floats", path=path, line=lineno
                )
            term = " ".join(parts[: len(parts) - dim]).lower()
            try:
                vec = np.array([float(x) for x in parts[len(parts) - dim:]], dtype=np.float64)
            except ValueError:
                raise DataFormatError("non-numeric vector entry", path=path, line=lineno)
            vectors[term] = vec
    if len(vectors) != vocab_size:
        raise DataFormatError(
            f"header declares {vocab_size} rows but {len(vectors)} present", path=path
        )
    return dim, vectors


def load_embeddings(input_path: str | Path, output_path: str | Path | None = None) -> EmbeddingStore:
    """Load input and output tables; with one file, it serves as both."""
    in_dim, input_vectors = _load_table(Path(input_path))
    if output_path is None:
        return EmbeddingStore(in_dim, input_vectors, input_vectors)
    out_dim, output_vectors = _load_table(Path(output_path))
    if in_dim != out_dim:
        raise DataFormatError(
            f"input dim {in_dim} does not match output dim {out_dim}", path=output_path
        )
    return EmbeddingStore(in_dim, input_vectors, output_vectors)


def cosine(a, b) -> float:
    """Cosine similarity in [-1, 1]; zero vectors yield 0.0 by definition."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise DimensionError(f"vector lengths differ: {va.shape} vs {vb.shape}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(va, vb) / (na * nb))
