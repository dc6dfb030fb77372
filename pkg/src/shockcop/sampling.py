"""Seeded shock-model sampling, empirical copulas, and sup-distance verification.

Sampling draws three uniform streams per run (one each for the X, Y, and
systemic-shock coordinates) from counter-based Philox generators spawned off a
single seed, so identical (model, n, seed) triples yield bit-identical output.
The coupling is applied on the uniform scale: the comonotonic pair shares the
systemic uniform Z, the countermonotonic pair uses Z and 1-Z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .copulas import Copula
from .errors import TableFormatError
from .shock_models import Combiner, Comonotonic, Countermonotonic, ShockModel

_TINY = np.nextafter(0.0, 1.0)


@dataclass(frozen=True)
class SamplePairs:
    pairs: np.ndarray  # shape (n, 2)
    seed: int
    descriptor: str

    @property
    def n(self) -> int:
        return int(self.pairs.shape[0])


def sample_model(m: ShockModel, n: int, seed: int) -> SamplePairs:
    """Draw n coupled pairs (U, V) from the model, deterministically in the seed."""
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    stream_x, stream_y, stream_z = np.random.SeedSequence(seed).spawn(3)
    ux = _open_uniforms(np.random.Generator(np.random.Philox(stream_x)), n)
    uy = _open_uniforms(np.random.Generator(np.random.Philox(stream_y)), n)
    uz = _open_uniforms(np.random.Generator(np.random.Philox(stream_z)), n)

    x = m.f_x.quantile_array(ux)
    y = m.f_y.quantile_array(uy)
    if isinstance(m.coupling, Comonotonic):
        z1 = m.coupling.g1.quantile_array(uz)
        z2 = m.coupling.g2.quantile_array(uz)
    elif isinstance(m.coupling, Countermonotonic):
        z1 = m.coupling.g1.quantile_array(uz)
        z2 = m.coupling.g2.quantile_array(1.0 - uz)
    else:
        z1 = z2 = m.coupling.g.quantile_array(uz)

    if m.combiner is Combiner.MAX_MAX:
        u, v = np.maximum(x, z1), np.maximum(y, z2)
    elif m.combiner is Combiner.MIN_MIN:
        u, v = np.minimum(x, z1), np.minimum(y, z2)
    else:
        u, v = np.maximum(x, z1), np.minimum(y, z2)
    return SamplePairs(np.column_stack((u, v)), seed=seed, descriptor=m.describe())


def _open_uniforms(rng: np.random.Generator, n: int) -> np.ndarray:
    us = rng.random(n)
    us[us == 0.0] = _TINY  # keep quantile transforms off the -oo convention
    return us


def average_ranks(x: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties assigned the average of their positions."""
    x = np.asarray(x)
    uniq, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts
    avg = (starts + 1 + ends) / 2.0
    return avg[inverse]


class EmpiricalCopula(Copula):
    """Rank-based copula estimate of a paired sample."""

    def __init__(self, pairs: np.ndarray):
        pairs = np.asarray(pairs, dtype=float)
        if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] < 2:
            raise ValueError("empirical copula needs at least two (u, v) pairs")
        n = pairs.shape[0]
        self.ru = average_ranks(pairs[:, 0]) / n
        self.rv = average_ranks(pairs[:, 1]) / n
        self.n = n

    def _eval(self, u, v):
        if np.ndim(u) == 0 and np.ndim(v) == 0:
            return np.mean((self.ru <= u) & (self.rv <= v))
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        out = np.empty(u.shape)
        flat_u, flat_v, flat_out = u.ravel(), v.ravel(), out.ravel()
        for i in range(flat_u.size):
            flat_out[i] = np.mean((self.ru <= flat_u[i]) & (self.rv <= flat_v[i]))
        return out

    def describe(self) -> str:
        return f"empirical:n={self.n}"


def empirical_copula(s: SamplePairs) -> EmpiricalCopula:
    return EmpiricalCopula(s.pairs)


def sup_distance(a: Copula, b: Copula, grid: int = 21) -> float:
    """max |A - B| over the uniform grid x grid lattice on the unit square."""
    if grid < 2:
        raise ValueError("grid must be at least 2")
    us = np.linspace(0.0, 1.0, grid)
    uu, vv = np.meshgrid(us, us, indexing="ij")
    return float(np.max(np.abs(a.value_array(uu, vv) - b.value_array(uu, vv))))


# ---------------------------------------------------------------------------
# CSV round-trip
# ---------------------------------------------------------------------------


def write_pairs_csv(target, s: SamplePairs, kind: str = "raw", version: str = "") -> None:
    """Write pairs as CSV with a header comment recording seed and descriptor.

    ``kind="raw"`` emits the simulated variates as ``u,v``; ``kind="ranks"``
    emits normalized average ranks as ``ru,rv``.
    """
    if kind not in ("raw", "ranks"):
        raise ValueError(f"kind must be 'raw' or 'ranks', got {kind!r}")
    close = False
    if isinstance(target, (str, bytes)):
        fh = open(target, "w", newline="")
        close = True
    else:
        fh = target
    try:
        fh.write(
            f"# shockcop={version} descriptor={s.descriptor} seed={s.seed} n={s.n} kind={kind}\n"
        )
        if kind == "raw":
            fh.write("u,v\n")
            data = s.pairs
        else:
            fh.write("ru,rv\n")
            n = s.n
            data = np.column_stack(
                (average_ranks(s.pairs[:, 0]) / n, average_ranks(s.pairs[:, 1]) / n)
            )
        for row in data:
            fh.write(f"{float(row[0])!r},{float(row[1])!r}\n")
    finally:
        if close:
            fh.close()


def read_pairs_csv(source) -> SamplePairs:
    """Read pairs written by :func:`write_pairs_csv`; header comment is optional."""
    close = False
    if isinstance(source, (str, bytes)):
        fh = open(source, newline="")
        close = True
    else:
        fh = source
    try:
        seed = -1
        descriptor = "unknown"
        rows = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    if token.startswith("seed="):
                        seed = int(token[5:])
                    elif token.startswith("descriptor="):
                        descriptor = token[11:]
                continue
            if line[0].isalpha():  # header row
                continue
            parts = line.split(",")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except (IndexError, ValueError) as exc:
                raise TableFormatError(f"bad sample row {line!r}") from exc
        if not rows:
            raise TableFormatError("sample file contains no data rows")
        return SamplePairs(np.asarray(rows, dtype=float), seed=seed, descriptor=descriptor)
    finally:
        if close:
            fh.close()
