"""Dataset ingestion (sparse ``label idx:val ...`` text) and synthetic streams."""

import io
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

__all__ = [
    "SparseExample",
    "LibsvmParseError",
    "parse_libsvm",
    "load_libsvm",
    "normalize_l2",
    "normalize_all",
    "densify",
    "to_dense",
    "synthetic_regression",
]

log = logging.getLogger(__name__)


class LibsvmParseError(ValueError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class SparseExample:
    label: float
    features: Tuple[Tuple[int, float], ...]

    @property
    def max_index(self):
        return self.features[-1][0] if self.features else 0

    def norm(self):
        return math.sqrt(math.fsum(v * v for _, v in self.features))


def _parse_line(line, lineno):
    tokens = line.split()
    try:
        label = float(tokens[0])
    except ValueError:
        raise LibsvmParseError(lineno, f"bad label {tokens[0]!r}") from None
    if not math.isfinite(label):
        raise LibsvmParseError(lineno, f"non-finite label {tokens[0]!r}")
    feats = []
    prev = 0
    for tok in tokens[1:]:
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise LibsvmParseError(lineno, f"malformed token {tok!r}")
        try:
            idx = int(idx_s)
        except ValueError:
            raise LibsvmParseError(lineno, f"bad feature index in {tok!r}") from None
        try:
            val = float(val_s)
        except ValueError:
            raise LibsvmParseError(lineno, f"non-numeric value in {tok!r}") from None
        if not math.isfinite(val):
            raise LibsvmParseError(lineno, f"non-finite value in {tok!r}")
        if idx < 1:
            raise LibsvmParseError(lineno, f"feature index must be >= 1, got {idx}")
        if idx <= prev:
            raise LibsvmParseError(lineno, f"feature indices must increase strictly ({prev} then {idx})")
        prev = idx
        feats.append((idx, val))
    return SparseExample(label, tuple(feats))


def parse_libsvm(source):
    """Parse sparse text examples from a string or a text stream.

    Blank lines are skipped; LF and CRLF endings are both accepted.
    Raises :class:`LibsvmParseError` carrying the 1-based line number.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    out = []
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if line:
            out.append(_parse_line(line, lineno))
    return out


def load_libsvm(path):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return parse_libsvm(fh)
    except LibsvmParseError as exc:
        raise LibsvmParseError(exc.lineno, f"{path}: {exc}") from None
    except OSError as exc:
        raise OSError(f"cannot read dataset {path}: {exc.strerror or exc}") from exc


def normalize_l2(example):
    """Scale the features to unit L2 norm; returns ``None`` for an all-zero example."""
    norm = example.norm()
    if norm == 0.0:
        return None
    return SparseExample(example.label, tuple((i, v / norm) for i, v in example.features))


def normalize_all(examples):
    """Normalise every example, dropping (and counting) all-zero ones."""
    kept = []
    dropped = 0
    for ex in examples:
        n = normalize_l2(ex)
        if n is None:
            dropped += 1
        else:
            kept.append(n)
    if dropped:
        log.warning("dropped %d example(s) with all-zero features", dropped)
    return kept, dropped


def densify(example, dim):
    x = np.zeros(dim)
    for i, v in example.features:
        if i > dim:
            raise ValueError(f"feature index {i} exceeds dimension {dim}")
        x[i - 1] = v
    return x


def to_dense(examples, dim=None):
    """Stack examples into ``(X, y)``; ``dim`` defaults to the largest index seen."""
    if dim is None:
        dim = max((ex.max_index for ex in examples), default=0)
    X = np.zeros((len(examples), dim))
    y = np.zeros(len(examples))
    for r, ex in enumerate(examples):
        X[r] = densify(ex, dim)
        y[r] = ex.label
    return X, y


def synthetic_regression(T, dim=10, seed=0, u_norm=3.0, noise=0.1):
    """Unit-norm Gaussian inputs, ``y = <u*, x> + noise * N(0, 1)``.

    Returns ``(X, y, u_star)``; ``u_star`` has norm ``u_norm`` and a random
    direction.
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((T, dim))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    u = rng.standard_normal(dim)
    u *= u_norm / np.linalg.norm(u)
    y = X @ u + noise * rng.standard_normal(T)
    return X, y, u
