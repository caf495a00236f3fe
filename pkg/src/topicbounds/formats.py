"""On-disk formats.

* UCI bag-of-words: three header lines ``D``, ``V``, ``NNZ`` followed by one
  ``doc_id word_id count`` triple per line, ids 1-based.
* Plain-text matrices: one row per line, space separated, ``%.17g``.
* Binary matrices: little-endian uint64 dimension ``n`` followed by ``n*n``
  little-endian float64 entries in row-major order.
"""

from __future__ import annotations

import gzip
import io
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .errors import FormatError

_BIN_HEADER = np.dtype("<u8")
_BIN_VALUES = np.dtype("<f8")


def _open_text(path, mode):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8", newline="\n")
    return open(path, mode, encoding="utf-8", newline="\n")


def write_uci(corpus: Corpus, path) -> None:
    """Write ``corpus`` in UCI bag-of-words format."""
    docs = corpus.doc_index() + 1
    triples = np.column_stack([docs, corpus.word_ids + 1, corpus.counts])
    with _open_text(path, "w") as fh:
        fh.write(f"{corpus.D}\n{corpus.V}\n{corpus.nnz}\n")
        buf = io.StringIO()
        np.savetxt(buf, triples, fmt="%d", delimiter=" ", newline="\n")
        fh.write(buf.getvalue())


def _header_int(lines, i, name, path):
    if i >= len(lines):
        raise FormatError(f"missing header line {name}", line=i + 1, path=path)
    try:
        value = int(lines[i].strip())
    except ValueError:
        raise FormatError(f"header {name} is not an integer: {lines[i].strip()!r}", line=i + 1, path=path) from None
    if value < 0:
        raise FormatError(f"header {name} is negative", line=i + 1, path=path)
    return value


def read_uci(path) -> Corpus:
    """Read a UCI bag-of-words file (optionally ``.gz``) into a Corpus."""
    with _open_text(path, "r") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    D = _header_int(lines, 0, "D", path)
    V = _header_int(lines, 1, "V", path)
    nnz = _header_int(lines, 2, "NNZ", path)
    if V < 1:
        raise FormatError("V must be >= 1", line=2, path=path)
    body = lines[3:]
    if len(body) != nnz:
        raise FormatError(f"header declares {nnz} entries but {len(body)} follow", line=3, path=path)

    triples = np.empty((nnz, 3), dtype=np.int64)
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"expected 'doc word count', got {line!r}", line=i + 4, path=path)
        try:
            triples[i] = [int(p) for p in parts]
        except ValueError:
            raise FormatError(f"non-integer field in {line!r}", line=i + 4, path=path) from None

    doc, word, cnt = triples.T
    for col, hi, name in ((doc, D, "doc id"), (word, V, "word id")):
        bad = np.flatnonzero((col < 1) | (col > hi))
        if bad.size:
            raise FormatError(f"{name} {col[bad[0]]} outside [1, {hi}]", line=int(bad[0]) + 4, path=path)
    bad = np.flatnonzero(cnt < 1)
    if bad.size:
        raise FormatError(f"count must be >= 1, got {cnt[bad[0]]}", line=int(bad[0]) + 4, path=path)

    order = np.lexsort((word, doc))
    doc, word, cnt = doc[order] - 1, word[order] - 1, cnt[order]
    dup = np.flatnonzero((np.diff(doc) == 0) & (np.diff(word) == 0))
    if dup.size:
        raise FormatError("duplicate (doc, word) entry", line=int(order[dup[0] + 1]) + 4, path=path)
    indptr = np.concatenate([[0], np.cumsum(np.bincount(doc, minlength=D))])
    return Corpus(indptr, word, cnt, V)


def write_matrix_text(matrix, path) -> None:
    """Write to a path or an open text stream."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if hasattr(path, "write"):
        np.savetxt(path, matrix, fmt="%.17g", delimiter=" ", newline="\n")
        return
    with _open_text(path, "w") as fh:
        np.savetxt(fh, matrix, fmt="%.17g", delimiter=" ", newline="\n")


def read_matrix_text(path) -> np.ndarray:
    rows = []
    with _open_text(path, "r") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rows.append([float(x) for x in line.split()])
            except ValueError:
                raise FormatError(f"non-numeric entry in {line.strip()!r}", line=i, path=path) from None
            if len(rows[-1]) != len(rows[0]):
                raise FormatError("ragged matrix row", line=i, path=path)
    return np.array(rows, dtype=np.float64).reshape(len(rows), -1)


def write_matrix_binary(matrix, path) -> None:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise FormatError("binary dump requires a square matrix")
    with open(path, "wb") as fh:
        fh.write(np.array([matrix.shape[0]], dtype=_BIN_HEADER).tobytes())
        fh.write(np.ascontiguousarray(matrix, dtype=_BIN_VALUES).tobytes())


def read_matrix_binary(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise FormatError("file shorter than the 8-byte header", path=path)
    n = int(np.frombuffer(raw[:8], dtype=_BIN_HEADER)[0])
    expected = 8 + 8 * n * n
    if len(raw) != expected:
        raise FormatError(f"expected {expected} bytes for n={n}, found {len(raw)}", path=path)
    return np.frombuffer(raw[8:], dtype=_BIN_VALUES).reshape(n, n).astype(np.float64)
