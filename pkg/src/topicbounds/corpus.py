"""Sparse bag-of-words corpus container."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DataError, ParameterError


@dataclass(frozen=True, eq=False)
class Corpus:
    """Documents as word-count vectors in compressed sparse row layout.

    Document ``d`` holds the words ``word_ids[indptr[d]:indptr[d+1]]`` with
    the matching ``counts``.  Word ids are 0-based and sorted within a
    document.
    """

    indptr: np.ndarray
    word_ids: np.ndarray
    counts: np.ndarray
    V: int

    def __post_init__(self):
        indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        word_ids = np.ascontiguousarray(self.word_ids, dtype=np.int64)
        counts = np.ascontiguousarray(self.counts, dtype=np.int64)
        if int(self.V) < 1:
            raise ParameterError("dictionary size V must be >= 1")
        if indptr.ndim != 1 or indptr.size < 1 or indptr[0] != 0:
            raise DataError("indptr must be 1-d and start at 0")
        if np.any(np.diff(indptr) < 0) or indptr[-1] != word_ids.size:
            raise DataError("indptr must be non-decreasing and end at nnz")
        if word_ids.shape != counts.shape:
            raise DataError("word_ids and counts differ in length")
        if word_ids.size and (word_ids.min() < 0 or word_ids.max() >= self.V):
            raise DataError(f"word ids must lie in [0, {self.V})")
        if np.any(counts < 1):
            raise DataError("stored counts must be >= 1")
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "word_ids", word_ids)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "V", int(self.V))

    @property
    def D(self) -> int:
        return self.indptr.size - 1

    @property
    def nnz(self) -> int:
        return self.word_ids.size

    @property
    def lengths(self) -> np.ndarray:
        """Total word count L_d of every document."""
        out = np.zeros(self.D, dtype=np.int64)
        np.add.at(out, self.doc_index(), self.counts)
        return out

    def doc_index(self) -> np.ndarray:
        """Document id of every stored (word, count) entry."""
        return np.repeat(np.arange(self.D, dtype=np.int64), np.diff(self.indptr))

    def document(self, d: int) -> dict[int, int]:
        lo, hi = self.indptr[d], self.indptr[d + 1]
        return dict(zip(self.word_ids[lo:hi].tolist(), self.counts[lo:hi].tolist()))

    def __iter__(self) -> Iterator[dict[int, int]]:
        for d in range(self.D):
            yield self.document(d)

    def __len__(self) -> int:
        return self.D

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.V == other.V
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.word_ids, other.word_ids)
            and np.array_equal(self.counts, other.counts)
        )

    def to_dense(self, start: int = 0, stop: int | None = None, dtype=np.float64) -> np.ndarray:
        """Dense ``(stop - start, V)`` count block for documents ``start:stop``."""
        stop = self.D if stop is None else stop
        lo, hi = self.indptr[start], self.indptr[stop]
        out = np.zeros((stop - start, self.V), dtype=dtype)
        rows = np.repeat(np.arange(stop - start), np.diff(self.indptr[start : stop + 1]))
        out[rows, self.word_ids[lo:hi]] = self.counts[lo:hi]
        return out

    @classmethod
    def from_dense(cls, counts) -> "Corpus":
        counts = np.asarray(counts)
        if counts.ndim != 2:
            raise DataError("dense counts must be a (D, V) array")
        if np.any(counts < 0) or not np.all(np.equal(np.mod(counts, 1), 0)):
            raise DataError("dense counts must be non-negative integers")
        rows, cols = np.nonzero(counts)
        indptr = np.concatenate([[0], np.cumsum(np.bincount(rows, minlength=counts.shape[0]))])
        return cls(indptr, cols, counts[rows, cols].astype(np.int64), counts.shape[1])

    @classmethod
    def from_documents(cls, documents: Iterable[Mapping[int, int]], V: int) -> "Corpus":
        """Build from an iterable of ``{word_id: count}`` mappings."""
        indptr = [0]
        ids: list[int] = []
        cnts: list[int] = []
        for doc in documents:
            for w in sorted(doc):
                c = int(doc[w])
                if c == 0:
                    continue
                ids.append(int(w))
                cnts.append(c)
            indptr.append(len(ids))
        return cls(np.array(indptr), np.array(ids, dtype=np.int64), np.array(cnts, dtype=np.int64), V)
