"""Discrete momentum basis with exact energy shells.

Points live on the cubic integer lattice k = n * delta_k with
n in {-M..M}^3 and carry free-particle energies E_k = |k|^2
(units where 2m = 1).  Points sharing the integer squared norm |n|^2
form an energy shell, so the shell partition is exact bookkeeping;
the floating-point tolerance below only guards energy comparisons
made by callers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionCapError

MAX_POINTS = 4096


def energy_tolerance(delta_k: float) -> float:
    """Guard band for comparing floating-point shell energies."""
    return 1e-9 * delta_k**2


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ShellTable:
    """Distinct energies in ascending order with their member point indices."""

    energies: np.ndarray            # (n_shells,) strictly increasing
    members: tuple[np.ndarray, ...] # per-shell point indices
    norms2: np.ndarray              # (n_shells,) integer squared norm of each shell

    @property
    def degeneracies(self) -> np.ndarray:
        return np.array([len(m) for m in self.members])

    def __len__(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class MomentumBasis:
    """Ordered momentum lattice with per-point energies and shell assignment.

    Immutable after construction; all arrays are read-only.
    """

    points: np.ndarray       # (n, 3) integer lattice coordinates, lexicographic
    delta_k: float
    energies: np.ndarray     # (n,) E = |n|^2 * delta_k^2
    norms2: np.ndarray       # (n,) integer squared norms
    shell_index: np.ndarray  # (n,) shell id per point
    shells: ShellTable
    extent: int              # construction parameter: M (cubic) or N (1D line)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def n_shells(self) -> int:
        return len(self.shells)

    def index_of(self, n) -> int:
        """Index of the lattice point with integer coordinates ``n``."""
        hits = np.flatnonzero((self.points == np.asarray(n, dtype=int)).all(axis=1))
        if len(hits) != 1:
            raise KeyError(f"lattice point {tuple(n)} not in basis")
        return int(hits[0])


def _basis_from_points(points: np.ndarray, delta_k: float, extent: int) -> MomentumBasis:
    norms2 = (points * points).sum(axis=1)
    distinct = np.unique(norms2)                      # ascending
    members = tuple(_frozen(np.flatnonzero(norms2 == m)) for m in distinct)
    shell_index = np.searchsorted(distinct, norms2)
    dk2 = delta_k * delta_k
    shells = ShellTable(
        energies=_frozen(distinct * dk2),
        members=members,
        norms2=_frozen(distinct.copy()),
    )
    return MomentumBasis(
        points=_frozen(points),
        delta_k=float(delta_k),
        energies=_frozen(norms2 * dk2),
        norms2=_frozen(norms2),
        shell_index=_frozen(shell_index),
        shells=shells,
        extent=int(extent),
    )


def _check_spacing(delta_k: float) -> None:
    if not (np.isfinite(delta_k) and delta_k > 0):
        raise ValueError(f"delta_k must be positive and finite, got {delta_k}")


def build_basis(M: int, delta_k: float, max_points: int = MAX_POINTS) -> MomentumBasis:
    """Cubic lattice {-M..M}^3 in deterministic lexicographic order.

    Raises DimensionCapError when (2M+1)^3 exceeds ``max_points``.
    """
    if M != int(M) or M < 0:
        raise ValueError(f"M must be a nonnegative integer, got {M}")
    M = int(M)
    _check_spacing(delta_k)
    side = 2 * M + 1
    if side**3 > max_points:
        raise DimensionCapError(f"(2M+1)^3 = {side**3} exceeds cap of {max_points} points")
    r = np.arange(-M, M + 1)
    points = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)
    return _basis_from_points(points, delta_k, extent=M)


def build_basis_1d(N: int, delta_k: float, max_points: int = MAX_POINTS) -> MomentumBasis:
    """Line lattice k = n * delta_k, n in {1..N}, embedded on the x axis.

    All energies n^2 * delta_k^2 are distinct, so every shell has
    degeneracy one.
    """
    if N != int(N) or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    N = int(N)
    _check_spacing(delta_k)
    if N > max_points:
        raise DimensionCapError(f"N = {N} exceeds cap of {max_points} points")
    points = np.zeros((N, 3), dtype=int)
    points[:, 0] = np.arange(1, N + 1)
    return _basis_from_points(points, delta_k, extent=N)


def shell_of(basis: MomentumBasis, index: int) -> int:
    """Shell id of the point at ``index``."""
    if not 0 <= index < basis.size:
        raise IndexError(f"point index {index} out of range for basis of size {basis.size}")
    return int(basis.shell_index[index])


def basis_to_json(basis: MomentumBasis) -> str:
    """Serialize to the documented JSON schema."""
    doc = {
        "M": basis.extent,
        "delta_k": basis.delta_k,
        "points": basis.points.tolist(),
        "shell_energies": basis.shells.energies.tolist(),
        "shell_members": [m.tolist() for m in basis.shells.members],
    }
    return json.dumps(doc)


def basis_from_json(text: str) -> MomentumBasis:
    """Rebuild a basis from its JSON document and cross-check the shell data."""
    doc = json.loads(text)
    points = np.asarray(doc["points"], dtype=int)
    if points.ndim != 2 or points.shape[1] != 3:
        raise ValueError("points must be a list of integer 3-vectors")
    basis = _basis_from_points(points, float(doc["delta_k"]), extent=int(doc["M"]))
    stored_e = np.asarray(doc["shell_energies"], dtype=float)
    stored_m = [list(map(int, m)) for m in doc["shell_members"]]
    tol = energy_tolerance(basis.delta_k)
    if len(stored_e) != basis.n_shells or np.abs(stored_e - basis.shells.energies).max() > tol:
        raise ValueError("stored shell energies disagree with the point set")
    if any(sorted(sm) != m.tolist() for sm, m in zip(stored_m, basis.shells.members)):
        raise ValueError("stored shell members disagree with the point set")
    return basis
