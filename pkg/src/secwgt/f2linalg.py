"""Dense linear algebra over GF(2).

Vectors are Python ints used as bitsets: bit ``i`` is coordinate ``i``.
Matrices store one int per row, so ``row >> j & 1`` is the entry in column ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def parity(v: int) -> int:
    return v.bit_count() & 1


def vec_from_bits(bits: Sequence[int]) -> int:
    v = 0
    for i, b in enumerate(bits):
        if b & 1:
            v |= 1 << i
    return v


def bits_of(v: int, n: int) -> list[int]:
    return [(v >> i) & 1 for i in range(n)]


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    data: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.data) != self.nrows:
            raise ValueError(f"expected {self.nrows} rows, got {len(self.data)}")
        mask = (1 << self.ncols) - 1
        if any(r & ~mask for r in self.data):
            raise ValueError("row has bits beyond the column count")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> BitMatrix:
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        return cls(len(rows), ncols, tuple(vec_from_bits(r) for r in rows))

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> BitMatrix:
        data = []
        for i in range(nrows):
            row = 0
            for j, c in enumerate(columns):
                if (c >> i) & 1:
                    row |= 1 << j
            data.append(row)
        return cls(nrows, len(columns), tuple(data))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.data[i] >> j) & 1

    def column(self, j: int) -> int:
        v = 0
        for i, r in enumerate(self.data):
            if (r >> j) & 1:
                v |= 1 << i
        return v

    def columns(self) -> list[int]:
        return [self.column(j) for j in range(self.ncols)]

    def apply(self, v: int) -> int:
        out = 0
        for i, r in enumerate(self.data):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        data = []
        for r in self.data:
            acc = 0
            j = 0
            while r:
                if r & 1:
                    acc ^= other.data[j]
                r >>= 1
                j += 1
            data.append(acc)
        return BitMatrix(self.nrows, other.ncols, tuple(data))

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return BitMatrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.data, other.data)))

    def transpose(self) -> BitMatrix:
        return BitMatrix.from_columns(list(self.data), self.ncols)

    def is_zero(self) -> bool:
        return not any(self.data)

    def to_lists(self) -> list[list[int]]:
        return [bits_of(r, self.ncols) for r in self.data]

    def with_column(self, j: int, v: int) -> BitMatrix:
        data = []
        for i, r in enumerate(self.data):
            r &= ~(1 << j)
            if (v >> i) & 1:
                r |= 1 << j
            data.append(r)
        return BitMatrix(self.nrows, self.ncols, tuple(data))

    def __str__(self) -> str:
        if not self.nrows or not self.ncols:
            return f"<{self.nrows}x{self.ncols}>"
        return "\n".join("".join(".1"[b] for b in row) for row in self.to_lists())


def hstack(blocks: Sequence[BitMatrix], nrows: int) -> BitMatrix:
    """Concatenate blocks side by side; ``nrows`` fixes the shape when empty."""
    data = [0] * nrows
    offset = 0
    for b in blocks:
        if b.nrows != nrows:
            raise ValueError("row count mismatch in hstack")
        for i, r in enumerate(b.data):
            data[i] |= r << offset
        offset += b.ncols
    return BitMatrix(nrows, offset, tuple(data))


def _echelon(vectors: Iterable[int]) -> list[int]:
    """Fully reduced echelon basis, pivots (lowest set bit) ascending."""
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            if v & (b & -b):
                v ^= b
        if v:
            p = v & -v
            basis = [b ^ v if b & p else b for b in basis]
            basis.append(v)
    basis.sort(key=lambda b: (b & -b))
    return basis


def rank(m: BitMatrix) -> int:
    return len(_echelon(m.data))


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: tuple[int, ...]

    @classmethod
    def span(cls, vectors: Iterable[int], ambient_dim: int) -> Subspace:
        vs = list(vectors)
        if any(v >> ambient_dim for v in vs):
            raise ValueError("vector longer than ambient dimension")
        return cls(ambient_dim, tuple(_echelon(vs)))

    @classmethod
    def zero(cls, ambient_dim: int) -> Subspace:
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> Subspace:
        return cls(ambient_dim, tuple(1 << i for i in range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, v: int) -> bool:
        return coset_reduce(self, v) == 0

    def __add__(self, other: Subspace) -> Subspace:
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def __le__(self, other: Subspace) -> bool:
        return all(v in other for v in self.basis)

    def elements(self) -> Iterator[int]:
        for mask in range(1 << self.dim):
            v = 0
            for i, b in enumerate(self.basis):
                if (mask >> i) & 1:
                    v ^= b
            yield v


def kernel_basis(m: BitMatrix) -> Subspace:
    n = m.ncols
    pivots: dict[int, int] = {}  # pivot column -> reduced row
    for r in _echelon(m.data):
        pivots[(r & -r).bit_length() - 1] = r
    free = [j for j in range(n) if j not in pivots]
    vecs = []
    for f in free:
        v = 1 << f
        for p, r in pivots.items():
            if (r >> f) & 1:
                v |= 1 << p
        vecs.append(v)
    return Subspace.span(vecs, n)


def image_basis(m: BitMatrix) -> Subspace:
    return Subspace.span(m.columns(), m.nrows)


@dataclass(frozen=True)
class Unsat:
    """No solution; ``rank < augmented_rank`` witnesses the inconsistency."""

    rank: int
    augmented_rank: int

    def __bool__(self) -> bool:
        return False


def solve(m: BitMatrix, target: int) -> int | Unsat:
    """Some ``v`` with ``m @ v == target``, or an :class:`Unsat` witness."""
    if target >> m.nrows:
        raise ValueError("target longer than row count")
    n = m.ncols
    # Augment each row with its target bit in column n and eliminate.
    rows = [r | (((target >> i) & 1) << n) for i, r in enumerate(m.data)]
    red = _echelon(rows)
    for r in red:
        if r == 1 << n:
            return Unsat(len(red) - 1, len(red))
    v = 0
    for r in red:
        if (r >> n) & 1:
            v |= r & -r
    return v


def coset_reduce(s: Subspace, v: int) -> int:
    """Canonical representative of ``v + s``: no pivot bit of ``s`` is set."""
    if v >> s.ambient_dim:
        raise ValueError(f"vector exceeds ambient dimension {s.ambient_dim}")
    for b in s.basis:
        if v & (b & -b):
            v ^= b
    return v


def is_injective(m: BitMatrix) -> bool:
    return rank(m) == m.ncols


def all_vectors(n: int) -> range:
    return range(1 << n)


def minimal_inconsistent_subset(rows: Sequence[int], rhs: Sequence[int], ncols: int,
                                order: Sequence[int] | None = None) -> list[int]:
    """Deletion filter: indices of an inclusion-minimal inconsistent subsystem.

    ``order`` lists indices in the order they are tried for removal; those tried
    first are the most likely to be dropped.
    """

    def consistent(idx: list[int]) -> bool:
        m = BitMatrix(len(idx), ncols, tuple(rows[i] for i in idx))
        t = vec_from_bits([rhs[i] for i in idx])
        return not isinstance(solve(m, t), Unsat)

    keep = list(range(len(rows)))
    if consistent(keep):
        raise ValueError("system is consistent")
    for i in (order if order is not None else range(len(rows))):
        trial = [j for j in keep if j != i]
        if not consistent(trial):
            keep = trial
    return keep


__all__ = [
    "BitMatrix", "Subspace", "Unsat", "rank", "kernel_basis", "image_basis", "solve",
    "coset_reduce", "hstack", "parity", "vec_from_bits", "bits_of", "is_injective",
    "all_vectors", "minimal_inconsistent_subset",
]
