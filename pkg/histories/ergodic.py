"""
Created on 2026-10-07

@author: wf
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Sequence

import numpy as np

from histories.errors import ValidationError

# φ = (√5 - 1)/2 - the golden ratio mod 1
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class DiscreteMap:
    """
    a discrete time dynamical map x ↦ U(x) on the unit d-torus [0,1)^d
    with an initial point x₀
    """

    def __init__(self, x0: Optional[Sequence[float]] = None, dims: int = 1):
        if x0 is None:
            x0 = [0.0] * dims
        self.x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        if self.x0.ndim != 1 or len(self.x0) != dims:
            raise ValidationError(f"x₀ must have {dims} coordinates but is {x0}")
        check_in_space(self.x0[None, :], "x₀")

    @property
    def dims(self) -> int:
        return len(self.x0)

    def step(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no step function")

    def with_x0(self, x0: Sequence[float]) -> "DiscreteMap":
        """
        the same map started at another initial point
        """
        raise NotImplementedError

    def points(self, T: int, chunk_size: int = 2**16) -> Iterator[np.ndarray]:
        """
        the trajectory U^t(x₀) for t = 0..T-1 in chunks of shape (n, dims)
        """
        x = self.x0.copy()
        for start in range(0, T, chunk_size):
            n = min(chunk_size, T - start)
            chunk = np.empty((n, self.dims))
            for i in range(n):
                chunk[i] = x
                x = np.asarray(self.step(x), dtype=float)
            check_in_space(chunk, f"trajectory of {self}")
            yield chunk

    def trajectory(self, T: int) -> np.ndarray:
        """
        the first T points of the orbit as one (T, dims) array
        """
        return np.concatenate(list(self.points(T)))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(x0={self.x0.tolist()})"


def check_in_space(points: np.ndarray, what: str):
    """
    make sure all points lie in the unit torus
    """
    if np.any(points < 0.0) or np.any(points >= 1.0):
        raise ValidationError(f"{what} leaves the unit torus [0,1)")


class Rotation(DiscreteMap):
    """
    the rotation x ↦ x + α mod 1 - ergodic for rationally independent irrational α
    """

    def __init__(
        self, alpha: Sequence[float] = (GOLDEN,), x0: Optional[Sequence[float]] = None
    ):
        self.alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        super().__init__(x0, dims=len(self.alpha))

    def step(self, x: np.ndarray) -> np.ndarray:
        return np.mod(x + self.alpha, 1.0)

    def with_x0(self, x0: Sequence[float]) -> "Rotation":
        return Rotation(self.alpha, x0)

    def points(self, T: int, chunk_size: int = 2**16) -> Iterator[np.ndarray]:
        """
        the orbit x₀ + tα mod 1 in chunks
        """
        for start in range(0, T, chunk_size):
            t = np.arange(start, min(T, start + chunk_size), dtype=float)
            chunk = np.mod(self.x0 + np.outer(t, self.alpha), 1.0)
            # mod may round up to exactly 1.0
            chunk[chunk >= 1.0] = 0.0
            yield chunk

    def __repr__(self) -> str:
        return f"Rotation(alpha={self.alpha.tolist()}, x0={self.x0.tolist()})"


class IdentityMap(DiscreteMap):
    """
    x ↦ x - every set is invariant so time averages depend on x₀
    """

    def step(self, x: np.ndarray) -> np.ndarray:
        return x

    def with_x0(self, x0: Sequence[float]) -> "IdentityMap":
        return IdentityMap(x0, dims=self.dims)

    def points(self, T: int, chunk_size: int = 2**16) -> Iterator[np.ndarray]:
        """
        the constant orbit of the fixed point
        """
        for start in range(0, T, chunk_size):
            yield np.tile(self.x0, (min(chunk_size, T - start), 1))


class StepMap(DiscreteMap):
    """
    a map given by an arbitrary step function on the unit torus
    """

    def __init__(
        self,
        step_function: Callable[[np.ndarray], np.ndarray],
        x0: Optional[Sequence[float]] = None,
        dims: int = 1,
    ):
        self.step_function = step_function
        super().__init__(x0, dims)

    def step(self, x: np.ndarray) -> np.ndarray:
        return self.step_function(x)

    def with_x0(self, x0: Sequence[float]) -> "StepMap":
        return StepMap(self.step_function, x0, self.dims)


class Region:
    """
    a measurable subset A of the unit torus with characteristic function χ_A
    """

    dims: int = 1

    def contains(self, points: np.ndarray) -> np.ndarray:
        """
        χ_A for each row of the (n, dims) points array
        """
        raise NotImplementedError

    @property
    def volume(self) -> float:
        """
        total volume of the disjoint parts
        """
        raise NotImplementedError


class Box(Region):
    """
    the half open axis aligned box [lo, hi) of the unit torus
    """

    def __init__(self, lo: Sequence[float], hi: Sequence[float]):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValidationError(f"box bounds {lo} and {hi} do not match")
        if np.any(self.lo < 0.0) or np.any(self.hi > 1.0) or np.any(self.lo > self.hi):
            raise ValidationError(
                f"box [{lo}, {hi}) is not an ordered part of the unit torus"
            )
        self.dims = len(self.lo)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if points.shape[1] != self.dims:
            raise ValidationError(
                f"{points.shape[1]}-dimensional points for a {self.dims}-dimensional box"
            )
        return np.all((points >= self.lo) & (points < self.hi), axis=1)

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def overlaps(self, other: "Box") -> bool:
        """
        check whether the interiors of this box and the other box intersect
        """
        return bool(np.all(self.lo < other.hi) and np.all(other.lo < self.hi))

    def __repr__(self) -> str:
        return f"Box({self.lo.tolist()}, {self.hi.tolist()})"


class Interval(Box):
    """
    the half open interval [lo, hi) of the unit circle
    """

    def __init__(self, lo: float, hi: float):
        super().__init__([lo], [hi])

    def __repr__(self) -> str:
        return f"[{self.lo[0]}, {self.hi[0]})"


class RegionUnion(Region):
    """
    the union of pairwise disjoint boxes
    """

    def __init__(self, parts: Sequence[Box]):
        if len(parts) == 0:
            raise ValidationError("a region union needs at least one part")
        self.parts = list(parts)
        dims = {part.dims for part in self.parts}
        if len(dims) != 1:
            raise ValidationError(f"parts of different dimensions {sorted(dims)}")
        self.dims = dims.pop()
        for i, part in enumerate(self.parts):
            for other in self.parts[i + 1 :]:
                if part.overlaps(other):
                    raise ValidationError(f"{part} and {other} overlap")

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.any([part.contains(points) for part in self.parts], axis=0)

    @property
    def volume(self) -> float:
        return math.fsum(part.volume for part in self.parts)


def _check_steps(T: int):
    if T < 1:
        raise ValidationError(f"the number of steps T must be at least 1 but is {T}")


def _check_dims(dmap: DiscreteMap, region: Region):
    if dmap.dims != region.dims:
        raise ValidationError(
            f"{dmap.dims}-dimensional map with a {region.dims}-dimensional region"
        )


def time_average_fraction(dmap: DiscreteMap, region: Region, T: int) -> Fraction:
    """
    the exact fraction of the steps t = 0..T-1 with U^t(x₀) in A
    """
    _check_steps(T)
    _check_dims(dmap, region)
    count = sum(
        int(np.count_nonzero(region.contains(chunk))) for chunk in dmap.points(T)
    )
    return Fraction(count, T)


def time_average_measure(dmap: DiscreteMap, region: Region, T: int) -> float:
    """
    μ(A) = (1/T) Σ_{t<T} χ_A(U^t(x₀)) - the average time the trajectory spends in A
    """
    return float(time_average_fraction(dmap, region, T))


@dataclass
class DensityEstimate:
    """
    histogram estimate of the invariant density on B equal cells per axis
    """

    bins: int
    T: int
    masses: np.ndarray
    densities: np.ndarray

    def to_lod(self) -> List[dict]:
        """
        one row per cell with its lower corner, mass and density
        """
        lod = []
        width = 1.0 / self.bins
        for cell, (mass, density) in enumerate(
            zip(self.masses.reshape(-1), self.densities.reshape(-1))
        ):
            record = {"cell": cell, "mass": float(mass), "density": float(density)}
            if self.masses.ndim == 1:
                record["lo"] = cell * width
                record["hi"] = (cell + 1) * width
            lod.append(record)
        return lod


def empirical_density(dmap: DiscreteMap, bins: int, T: int) -> DensityEstimate:
    """
    estimate the density ρ of the time average measure on B equal cells per axis

    Args:
        dmap: the map
        bins(int): the number B of cells per axis
        T(int): the number of steps

    Returns:
        DensityEstimate: the cell masses and mass / cell volume
    """
    _check_steps(T)
    if bins < 1:
        raise ValidationError(f"the number of bins must be at least 1 but is {bins}")
    counts = np.zeros([bins] * dmap.dims, dtype=np.int64)
    edges = [np.linspace(0.0, 1.0, bins + 1)] * dmap.dims
    for chunk in dmap.points(T):
        chunk_counts, _edges = np.histogramdd(chunk, bins=edges)
        counts += chunk_counts.astype(np.int64)
    masses = counts / T
    densities = masses * float(bins**dmap.dims)
    return DensityEstimate(bins=bins, T=T, masses=masses, densities=densities)


@dataclass
class SensitivityReport:
    """
    spread of the time average across initial points
    """

    T: int
    x0s: List[List[float]]
    estimates: List[float]

    @property
    def spread(self) -> float:
        return max(self.estimates) - min(self.estimates)

    def to_lod(self) -> List[dict]:
        return [
            {"x0": " ".join(repr(c) for c in x0), "T": self.T, "estimate": estimate}
            for x0, estimate in zip(self.x0s, self.estimates)
        ]


def x0_sensitivity(
    dmap: DiscreteMap, region: Region, T: int, x0s: Sequence[Sequence[float]]
) -> SensitivityReport:
    """
    the time average of A from each of the given initial points

    a small spread is evidence for - not a proof of - metric indecomposability
    """
    if len(x0s) == 0:
        raise ValidationError("x0_sensitivity needs at least one initial point")
    estimates = [time_average_measure(dmap.with_x0(x0), region, T) for x0 in x0s]
    return SensitivityReport(
        T=T,
        x0s=[list(np.atleast_1d(x0).astype(float)) for x0 in x0s],
        estimates=estimates,
    )


def convergence_series(
    dmap: DiscreteMap, region: Region, Ts: Sequence[int]
) -> List[dict]:
    """
    the (T, estimate) series of the time average along one trajectory
    """
    checkpoints = sorted(set(int(T) for T in Ts))
    if not checkpoints:
        raise ValidationError("no step counts given")
    _check_steps(checkpoints[0])
    _check_dims(dmap, region)
    lod = []
    index = 0
    count = 0
    done = 0
    for chunk in dmap.points(checkpoints[-1]):
        cumulative = count + np.cumsum(region.contains(chunk), dtype=np.int64)
        while index < len(checkpoints) and checkpoints[index] <= done + len(chunk):
            T = checkpoints[index]
            hits = int(cumulative[T - done - 1])
            lod.append({"T": T, "estimate": hits / T, "volume": region.volume})
            index += 1
        count = int(cumulative[-1])
        done += len(chunk)
    return lod
