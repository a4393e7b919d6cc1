"""
Created on 2026-10-04

@author: wf
"""
import logging
from dataclasses import dataclass, field
from itertools import product
from math import prod
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from histories.errors import (
    ContractError,
    DimensionError,
    ResourceBudgetError,
    ValidationError,
)
from histories.operators import (
    EPS_DEC,
    TAU_ALG,
    Operator,
    ProjectiveDecomposition,
    as_operator,
    require,
    validate_density,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HistoryBudget:
    """
    resource limits for history enumerations

    Attributes:
        warn_histories(int): log a warning when an enumeration is larger than this
        max_histories(int): refuse enumerations larger than this
        max_bytes(int): refuse to materialize branch vectors larger than this
    """

    warn_histories: int = 10**6
    max_histories: int = 10**7
    max_bytes: int = 2**30

    def check_count(self, n: int, what: str = "histories"):
        """
        warn or raise for the given enumeration size
        """
        if n > self.max_histories:
            raise ResourceBudgetError(
                f"{n} {what} exceed the budget of {self.max_histories}"
            )
        if n > self.warn_histories:
            logger.warning(f"enumerating {n} {what} - more than {self.warn_histories}")

    def check_bytes(self, n_bytes: int, what: str):
        """
        raise a ResourceBudgetError if n_bytes exceed the memory budget
        """
        if n_bytes > self.max_bytes:
            raise ResourceBudgetError(
                f"{what} would need {n_bytes} bytes - budget is {self.max_bytes} bytes"
            )


@dataclass(frozen=True)
class TimeRange:
    """
    a contiguous range of grid positions [start, stop)
    """

    start: int
    stop: int

    def __post_init__(self):
        if self.start < 0 or self.stop < self.start:
            raise ContractError(f"invalid time range [{self.start},{self.stop})")

    def __len__(self) -> int:
        return self.stop - self.start

    @property
    def positions(self) -> range:
        return range(self.start, self.stop)

    def is_adjacent_or_overlapping(self, other: "TimeRange") -> bool:
        """
        True if the union of both ranges is contiguous
        """
        if len(self) == 0 or len(other) == 0:
            return True
        return self.start <= other.stop and other.start <= self.stop

    def union(self, other: "TimeRange") -> "TimeRange":
        """
        the sorted union of two time ranges of the same space
        """
        if len(self) == 0:
            return other
        if len(other) == 0:
            return self
        if not self.is_adjacent_or_overlapping(other):
            raise ContractError(f"ranges {self} and {other} leave a gap")
        return TimeRange(min(self.start, other.start), max(self.stop, other.stop))


class HistorySpace:
    """
    an ordered time grid with one projective decomposition per time
    and the universal state ρ

    the projectors are taken to be in the Heisenberg picture already -
    use from_dynamics to derive them from a single step unitary
    """

    def __init__(
        self,
        rho,
        decompositions: Sequence[ProjectiveDecomposition],
        times: Optional[Sequence[int]] = None,
        present: Optional[int] = None,
        tol: float = TAU_ALG,
        name: str = "custom",
    ):
        """
        construct and validate the history space

        Args:
            rho: the universal state - a density matrix
            decompositions: one ProjectiveDecomposition per time
            times: strictly increasing integer times - defaults to 0..n-1
            present: the time value t₀ of the present - defaults to the last time
            tol(float): τ_alg for the density check
            name(str): a name for reports
        """
        self.rho = as_operator(rho)
        require(validate_density(self.rho, tol), "ρ")
        if len(decompositions) == 0:
            raise ValidationError("a history space needs at least one time")
        for decomposition in decompositions:
            if not isinstance(decomposition, ProjectiveDecomposition):
                raise ValidationError(
                    f"expected a ProjectiveDecomposition but got {type(decomposition).__name__}"
                )
            if decomposition.dim != self.rho.dim:
                raise DimensionError(
                    f"decomposition of dim {decomposition.dim} does not match ρ of dim {self.rho.dim}"
                )
        self.decompositions: Tuple[ProjectiveDecomposition, ...] = tuple(decompositions)
        if times is None:
            times = range(len(self.decompositions))
        self.times: Tuple[int, ...] = tuple(int(t) for t in times)
        if len(self.times) != len(self.decompositions):
            raise ValidationError(
                f"{len(self.times)} times for {len(self.decompositions)} decompositions"
            )
        if any(t1 <= t0 for t0, t1 in zip(self.times, self.times[1:])):
            raise ValidationError(f"times must be strictly increasing: {self.times}")
        if present is None:
            present = self.times[-1]
        if present not in self.times:
            raise ValidationError(
                f"present {present} is not one of the times {self.times}"
            )
        self.present = int(present)
        self.present_position = self.times.index(self.present)
        self.tol = tol
        self.name = name
        self._state_factor = None

    def __repr__(self) -> str:
        return f"HistorySpace({self.name}, dim={self.dim}, times={self.times}, present={self.present})"

    @property
    def dim(self) -> int:
        return self.rho.dim

    @property
    def n_times(self) -> int:
        return len(self.times)

    @property
    def state_factor(self) -> np.ndarray:
        """
        a dim × r matrix W with ρ = W W†, r the rank of ρ
        """
        if self._state_factor is None:
            matrix = self.rho.matrix
            eigenvalues, eigenvectors = np.linalg.eigh((matrix + matrix.conj().T) / 2)
            keep = eigenvalues > 0
            factor = eigenvectors[:, keep] * np.sqrt(eigenvalues[keep])
            factor.setflags(write=False)
            self._state_factor = factor
        return self._state_factor

    def position_of(self, t: int) -> int:
        """
        the grid position of the time value t
        """
        if t not in self.times:
            raise ContractError(f"time {t} is not on the grid {self.times}")
        return self.times.index(t)

    def full_range(self) -> TimeRange:
        return TimeRange(0, self.n_times)

    def past_range(self) -> TimeRange:
        return TimeRange(0, self.present_position)

    def present_range(self) -> TimeRange:
        return TimeRange(self.present_position, self.present_position + 1)

    def future_range(self) -> TimeRange:
        return TimeRange(self.present_position + 1, self.n_times)

    def range_of(self, first: int, last: int) -> TimeRange:
        """
        the range of time values first..last inclusive
        """
        return TimeRange(self.position_of(first), self.position_of(last) + 1)

    def check_range(self, time_range: TimeRange):
        if time_range.stop > self.n_times:
            raise ContractError(
                f"range {time_range} is outside the grid of {self.n_times} times"
            )

    def n_histories(self, time_range: Optional[TimeRange] = None) -> int:
        """
        the number of histories over the given range
        """
        time_range = self.full_range() if time_range is None else time_range
        self.check_range(time_range)
        return prod(len(self.decompositions[pos]) for pos in time_range.positions)

    def history(
        self, outcomes: Sequence[Union[int, str]], start: Optional[int] = None
    ) -> "History":
        """
        a history or segment starting at time value start

        Args:
            outcomes: outcome indices or labels one per time
            start: the first time value - defaults to the first time of the grid
        """
        start_position = 0 if start is None else self.position_of(start)
        indices = []
        for offset, outcome in enumerate(outcomes):
            position = start_position + offset
            if position >= self.n_times:
                raise ContractError(
                    f"{len(outcomes)} outcomes starting at {start} run past the grid"
                )
            indices.append(self.decompositions[position].index_of(outcome))
        return History(self, start_position, tuple(indices))

    def past(self, outcomes: Sequence[Union[int, str]] = ()) -> "History":
        """
        a past segment ending just before the present
        """
        n = len(outcomes)
        if n > self.present_position:
            raise ContractError(
                f"{n} past outcomes but only {self.present_position} past times"
            )
        if n == 0:
            return History(self, self.present_position, ())
        return self.history(outcomes, self.times[self.present_position - n])

    def present_event(self, outcome: Union[int, str]) -> "History":
        """
        the single-time segment with the given outcome at the present
        """
        return self.history([outcome], self.present)

    def future(self, outcomes: Sequence[Union[int, str]] = ()) -> "History":
        """
        a future segment starting just after the present
        """
        n = len(outcomes)
        future_times = self.n_times - self.present_position - 1
        if n > future_times:
            raise ContractError(
                f"{n} future outcomes but only {future_times} future times"
            )
        if n == 0:
            return History(self, self.present_position + 1, ())
        return self.history(outcomes, self.times[self.present_position + 1])

    @classmethod
    def from_dynamics(
        cls,
        rho,
        step_unitary,
        decompositions: Sequence[ProjectiveDecomposition],
        times: Sequence[int],
        present: Optional[int] = None,
        tol: float = TAU_ALG,
        name: str = "dynamics",
    ) -> "HistorySpace":
        """
        derive Heisenberg-picture decompositions P(t) = U^t† P U^t
        from Schrödinger-picture ones and a single step unitary U

        Args:
            rho: the state at time 0
            step_unitary: U for one time step
            decompositions: the Schrödinger-picture decomposition per time
            times: the integer times
            present: the present time value
        """
        u = as_operator(step_unitary)
        evolved = []
        for decomposition, t in zip(decompositions, times):
            base = u.matrix if t >= 0 else u.matrix.conj().T
            u_t = np.linalg.matrix_power(base, abs(int(t)))
            evolved.append(decomposition.conjugated(u_t, tol))
        return cls(rho, evolved, times, present, tol, name)


@dataclass(frozen=True)
class History:
    """
    an index vector into a HistorySpace: a full history
    or a segment over a contiguous range of times
    """

    space: HistorySpace
    start: int
    indices: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", indices)
        self.space.check_range(self.time_range)
        for position, index in zip(self.time_range.positions, indices):
            size = len(self.space.decompositions[position])
            if not 0 <= index < size:
                raise ValidationError(
                    f"outcome index {index} out of range 0..{size - 1} at time {self.space.times[position]}"
                )

    @property
    def stop(self) -> int:
        return self.start + len(self.indices)

    @property
    def time_range(self) -> TimeRange:
        return TimeRange(self.start, self.start + len(self.indices))

    @property
    def times(self) -> Tuple[int, ...]:
        return self.space.times[self.start : self.stop]

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(
            self.space.decompositions[position].labels[index]
            for position, index in zip(self.time_range.positions, self.indices)
        )

    @property
    def is_full(self) -> bool:
        return self.start == 0 and self.stop == self.space.n_times

    @property
    def is_empty(self) -> bool:
        """
        true for the history over no times
        """
        return len(self.indices) == 0

    def __len__(self) -> int:
        return len(self.indices)

    def __str__(self) -> str:
        events = [f"{label}@{t}" for label, t in zip(self.labels, self.times)]
        return f"({', '.join(events)})"

    def outcome_at(self, position: int) -> Optional[int]:
        if self.start <= position < self.stop:
            return self.indices[position - self.start]
        return None

    def union(self, other: "History") -> Optional["History"]:
        """
        the segment α∧β over the combined range

        Returns:
            History: the joined segment or None if both segments
            disagree at a shared time (the joint event is empty)

        Raises:
            ContractError: for different spaces or a gap between the segments
        """
        if other.space is not self.space:
            raise ContractError("segments belong to different history spaces")
        combined = self.time_range.union(other.time_range)
        indices = []
        for position in combined.positions:
            mine = self.outcome_at(position)
            theirs = other.outcome_at(position)
            if mine is not None and theirs is not None and mine != theirs:
                return None
            indices.append(mine if mine is not None else theirs)
        return History(self.space, combined.start, tuple(indices))

    def to_dict(self) -> dict:
        return {
            "times": " ".join(str(t) for t in self.times),
            "outcomes": " ".join(self.labels),
        }


def class_operator(h: History) -> Operator:
    """
    C_α = P_{α_f} … P_{α_0} … P_{α_-p} - the ordered product of the projectors
    of the history with the LATEST time leftmost

    an empty segment gives the identity
    """
    matrix = np.eye(h.space.dim, dtype=complex)
    for position, index in zip(h.time_range.positions, h.indices):
        matrix = h.space.decompositions[position][index].matrix @ matrix
    return Operator(matrix)


def branch_matrix(h: History, base: Optional[np.ndarray] = None) -> np.ndarray:
    """
    C_α W for the state factor W (or the given base)
    """
    vector = h.space.state_factor if base is None else base
    for position, index in zip(h.time_range.positions, h.indices):
        vector = h.space.decompositions[position][index].matrix @ vector
    return vector


def iter_histories(
    space: HistorySpace, time_range: Optional[TimeRange] = None
) -> Iterator[History]:
    """
    lazily enumerate the histories over the range in lexicographic order,
    earliest time varying slowest
    """
    time_range = space.full_range() if time_range is None else time_range
    space.check_range(time_range)
    sizes = [range(len(space.decompositions[pos])) for pos in time_range.positions]
    for indices in product(*sizes):
        yield History(space, time_range.start, indices)


def enumerate_histories(
    space: HistorySpace,
    time_range: Optional[TimeRange] = None,
    budget: Optional[HistoryBudget] = None,
) -> List[History]:
    """
    all histories over the given range - the full range by default

    an empty range gives the single empty history
    """
    budget = HistoryBudget() if budget is None else budget
    budget.check_count(space.n_histories(time_range))
    return list(iter_histories(space, time_range))


def iter_branches(
    space: HistorySpace,
    time_range: TimeRange,
    base: Optional[np.ndarray] = None,
    budget: Optional[HistoryBudget] = None,
) -> Iterator[Tuple[Tuple[int, ...], np.ndarray]]:
    """
    stream (indices, C_α base) over the range in enumeration order
    sharing the products of common prefixes
    """
    budget = HistoryBudget() if budget is None else budget
    budget.check_count(space.n_histories(time_range))
    base = space.state_factor if base is None else base
    positions = list(time_range.positions)

    def descend(level: int, indices: Tuple[int, ...], vector: np.ndarray):
        if level == len(positions):
            yield indices, vector
            return
        for index, projector in enumerate(
            space.decompositions[positions[level]].projectors
        ):
            yield from descend(level + 1, indices + (index,), projector.matrix @ vector)

    yield from descend(0, (), base)


def check_same_range(a: History, b: History, space: Optional[HistorySpace] = None):
    """
    raise a ContractError unless both histories share space and time range
    """
    if a.space is not b.space or (space is not None and a.space is not space):
        raise ContractError("histories belong to different spaces")
    if a.time_range != b.time_range:
        raise ContractError(
            f"histories cover different ranges {a.time_range} and {b.time_range}"
        )


def decoherence_functional(
    a: History, b: History, space: Optional[HistorySpace] = None
) -> complex:
    """
    D(a,b) = Tr(C_a ρ C_b†)

    Args:
        a: the first history
        b: the second history over the same range
        space: optionally the space both must belong to
    """
    check_same_range(a, b, space)
    return complex(np.vdot(branch_matrix(b), branch_matrix(a)))


def branch_vectors(
    space: HistorySpace,
    time_range: Optional[TimeRange] = None,
    budget: Optional[HistoryBudget] = None,
) -> Tuple[List[History], np.ndarray]:
    """
    materialize the flattened C_α W for all histories of the range as rows of a matrix
    """
    budget = HistoryBudget() if budget is None else budget
    time_range = space.full_range() if time_range is None else time_range
    n = space.n_histories(time_range)
    budget.check_count(n)
    rank = space.state_factor.shape[1]
    budget.check_bytes(n * space.dim * rank * 16, f"{n} branch vectors")
    histories = []
    rows = []
    for indices, vector in iter_branches(space, time_range, budget=budget):
        histories.append(History(space, time_range.start, indices))
        rows.append(vector.reshape(-1))
    return histories, np.array(rows, dtype=complex)


def decoherence_matrix(
    space: HistorySpace,
    time_range: Optional[TimeRange] = None,
    budget: Optional[HistoryBudget] = None,
) -> Tuple[List[History], np.ndarray]:
    """
    the full decoherence functional D(α,α′) over the range

    Returns:
        the histories in enumeration order and the n × n complex matrix
    """
    budget = HistoryBudget() if budget is None else budget
    histories, vectors = branch_vectors(space, time_range, budget)
    budget.check_bytes(len(histories) ** 2 * 16, "the decoherence matrix")
    return histories, vectors @ vectors.conj().T


@dataclass
class DecoherenceReport:
    """
    outcome of the medium decoherence check over all full histories
    """

    n_histories: int
    max_offdiag: float
    max_normalized_offdiag: float
    passes: bool
    eps_dec: float
    tol: float
    offender: Optional[Tuple[History, History]] = None

    def to_dict(self) -> dict:
        record = {
            "n_histories": self.n_histories,
            "max_offdiag": self.max_offdiag,
            "max_normalized_offdiag": self.max_normalized_offdiag,
            "passes": self.passes,
            "eps_dec": self.eps_dec,
        }
        a, b = self.offender if self.offender else ("", "")
        record["offender_a"] = str(a)
        record["offender_b"] = str(b)
        return record


def decoherence_report(
    space: HistorySpace,
    eps_dec: float = EPS_DEC,
    tol: float = TAU_ALG,
    budget: Optional[HistoryBudget] = None,
    progress_bar=None,
    block_entries: int = 2**22,
) -> DecoherenceReport:
    """
    scan every unordered pair of distinct full histories once
    for the largest raw and normalized off-diagonal |D(α,α′)|

    Args:
        space: the history space
        eps_dec(float): the gate for the normalized off-diagonal
        tol(float): pairs with a diagonal ≤ tol are left out of the normalized metric
        budget: the resource budget
        progress_bar: an optional ngwidgets Progressbar advanced by one per history
        block_entries(int): the number of matrix entries evaluated per block

    Returns:
        DecoherenceReport: the report
    """
    histories, vectors = branch_vectors(space, budget=budget)
    n = len(histories)
    diagonal = np.real(np.einsum("ij,ij->i", vectors, vectors.conj()))
    rows_per_block = max(1, min(n, block_entries // max(1, n)))
    max_offdiag = 0.0
    max_normalized = 0.0
    offender = None
    for start in range(0, n, rows_per_block):
        stop = min(n, start + rows_per_block)
        gram = np.abs(vectors[start:stop] @ vectors[start:].conj().T)
        rows = np.arange(start, stop)[:, None]
        cols = np.arange(start, n)[None, :]
        upper = cols > rows
        if upper.any():
            max_offdiag = max(max_offdiag, float(np.max(np.where(upper, gram, 0.0))))
            eligible = upper & (diagonal[rows] > tol) & (diagonal[cols] > tol)
            if eligible.any():
                denominator = np.sqrt(
                    np.abs(np.outer(diagonal[start:stop], diagonal[start:]))
                )
                normalized = np.zeros_like(gram)
                np.divide(gram, denominator, out=normalized, where=eligible)
                i, j = np.unravel_index(np.argmax(normalized), normalized.shape)
                if offender is None or normalized[i, j] > max_normalized:
                    max_normalized = float(normalized[i, j])
                    offender = (histories[start + i], histories[start + j])
        if progress_bar is not None:
            progress_bar.update(stop - start)
    report = DecoherenceReport(
        n_histories=n,
        max_offdiag=max_offdiag,
        max_normalized_offdiag=max_normalized,
        passes=max_normalized <= eps_dec,
        eps_dec=eps_dec,
        tol=tol,
        offender=offender,
    )
    logger.debug(f"decoherence of {space}: {report.to_dict()}")
    return report
