"""Parameter spaces, points, and dual pairings.

Three space kinds are supported:

* ``euclidean(dim)`` -- R^dim with the l2 norm (self-dual);
* ``product_space(block_dims)`` -- a tuple of euclidean blocks, normed by the
  l2 norm of the per-block norms (numerically the plain l2 norm of the
  concatenated coordinates, but the block structure is kept for models and
  diagnostics);
* ``sym_matrix(side)`` -- symmetric side x side matrices with the operator
  norm; the dual norm is the nuclear norm.

Symmetric matrices are stored packed: the upper triangle row-major, with
off-diagonal entries scaled by sqrt(2) so that the coordinate dot product of
two packed matrices equals the trace pairing <A, B> = tr(AB).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

_SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class SpaceDescriptor:
    kind: str
    dim: int = 0
    block_dims: tuple[int, ...] = ()
    side: int = 0

    def __post_init__(self):
        if self.kind == "euclidean":
            if self.dim < 1:
                raise ValueError("euclidean space needs dim >= 1")
        elif self.kind == "product":
            if not self.block_dims or any(b < 1 for b in self.block_dims):
                raise ValueError("product space needs positive block dims")
        elif self.kind == "sym_matrix":
            if self.side < 1:
                raise ValueError("sym_matrix space needs side >= 1")
        else:
            raise ValueError(f"unknown space kind {self.kind!r}")

    @property
    def ncoords(self) -> int:
        if self.kind == "euclidean":
            return self.dim
        if self.kind == "product":
            return int(sum(self.block_dims))
        return self.side * (self.side + 1) // 2


def euclidean(dim: int) -> SpaceDescriptor:
    return SpaceDescriptor("euclidean", dim=int(dim))


def product_space(block_dims) -> SpaceDescriptor:
    return SpaceDescriptor("product", block_dims=tuple(int(b) for b in block_dims))


def sym_matrix(side: int) -> SpaceDescriptor:
    return SpaceDescriptor("sym_matrix", side=int(side))


def _checked_coords(space: SpaceDescriptor, coords) -> np.ndarray:
    arr = np.array(coords, dtype=np.float64).reshape(-1)
    if arr.size != space.ncoords:
        raise ValueError(
            f"expected {space.ncoords} coordinates for {space.kind} space, got {arr.size}"
        )
    if not np.all(np.isfinite(arr)):
        raise DomainError("coordinates must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Point:
    """An element of a parameter space (primal side)."""

    space: SpaceDescriptor
    coords: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", _checked_coords(self.space, self.coords))

    def __add__(self, other: "Point") -> "Point":
        check_same_space(self.space, other.space)
        return Point(self.space, self.coords + other.coords)

    def __sub__(self, other: "Point") -> "Point":
        check_same_space(self.space, other.space)
        return Point(self.space, self.coords - other.coords)

    def __mul__(self, scalar: float) -> "Point":
        return Point(self.space, self.coords * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True)
class DualElement:
    """A continuous linear functional, stored by its coordinate vector."""

    space: SpaceDescriptor
    coords: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", _checked_coords(self.space, self.coords))


def check_same_space(a: SpaceDescriptor, b: SpaceDescriptor) -> None:
    if a != b:
        raise ValueError(f"space mismatch: {a} vs {b}")


# -- packed symmetric storage -------------------------------------------------

def pack_sym(mat) -> np.ndarray:
    """Pack a symmetric matrix into coordinates (off-diagonals x sqrt(2))."""
    m = np.asarray(mat, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("pack_sym expects a square matrix")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-10 * (1.0 + np.abs(m).max(initial=0.0))):
        raise ValueError("pack_sym expects a symmetric matrix")
    iu = np.triu_indices(m.shape[0])
    scale = np.where(iu[0] == iu[1], 1.0, _SQRT2)
    return m[iu] * scale


def unpack_sym(coords, side: int) -> np.ndarray:
    """Inverse of :func:`pack_sym`."""
    c = np.asarray(coords, dtype=np.float64)
    if c.size != side * (side + 1) // 2:
        raise ValueError("packed length does not match side")
    iu = np.triu_indices(side)
    scale = np.where(iu[0] == iu[1], 1.0, 1.0 / _SQRT2)
    m = np.zeros((side, side))
    m[iu] = c * scale
    return m + m.T - np.diag(np.diag(m))


def sym_point(mat) -> Point:
    """Wrap a dense symmetric matrix as a Point of the matching space."""
    m = np.asarray(mat, dtype=np.float64)
    return Point(sym_matrix(m.shape[0]), pack_sym(m))


def sym_dual(mat) -> DualElement:
    m = np.asarray(mat, dtype=np.float64)
    return DualElement(sym_matrix(m.shape[0]), pack_sym(m))


def as_matrix(p: Point | DualElement) -> np.ndarray:
    if p.space.kind != "sym_matrix":
        raise ValueError("as_matrix needs a sym_matrix-space element")
    return unpack_sym(p.coords, p.space.side)


# -- norms and pairing --------------------------------------------------------

def _sym_eigvals(space: SpaceDescriptor, coords: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(unpack_sym(coords, space.side))


def norm(p: Point) -> float:
    """Space norm: l2 / l2-of-block-norms / operator norm."""
    if p.space.kind == "sym_matrix":
        ev = _sym_eigvals(p.space, p.coords)
        return float(np.abs(ev).max())
    return float(np.linalg.norm(p.coords))


def dual_norm(u: DualElement) -> float:
    """Dual norm: l2 for (self-dual) euclidean/product, nuclear for matrices."""
    if u.space.kind == "sym_matrix":
        ev = _sym_eigvals(u.space, u.coords)
        return float(np.abs(ev).sum())
    return float(np.linalg.norm(u.coords))


def pairing(p: Point, u: DualElement) -> float:
    """<p, u>: the coordinate dot product (= tr(PU) for matrix spaces)."""
    check_same_space(p.space, u.space)
    return float(np.dot(p.coords, u.coords))
