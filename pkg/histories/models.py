"""
Created on 2026-10-06

@author: wf
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from histories.errors import (
    ResourceBudgetError,
    UnsupportedConfigurationError,
    ValidationError,
)
from histories.history import History, HistorySpace
from histories.operators import TAU_ALG, Operator, ProjectiveDecomposition

# Hilbert realizations are cross-checks only
MAX_HILBERT_DIM = 1024


@dataclass
class BranchTree:
    """
    an analytic M-ary weighted tree of depth N:
    each vertex has one incoming and M outgoing lines

    Attributes:
        weights: per level the transition probabilities of the M outcomes
        labels: the outcome names - defaults to "0".."M-1"
    """

    weights: List[List[float]]
    labels: Optional[List[str]] = None
    tol: float = field(default=TAU_ALG, repr=False)

    def __post_init__(self):
        if len(self.weights) < 1:
            raise ValidationError("a branch tree needs at least one level")
        self.weights = [[float(w) for w in level] for level in self.weights]
        branching = {len(level) for level in self.weights}
        if len(branching) != 1:
            raise ValidationError(
                f"all levels need the same number of outcomes but have {sorted(branching)}"
            )
        for depth, level in enumerate(self.weights):
            if min(level) < 0:
                raise ValidationError(f"negative weight at level {depth}: {level}")
            if abs(math.fsum(level) - 1.0) > self.tol:
                raise ValidationError(
                    f"weights at level {depth} sum to {math.fsum(level)} instead of 1"
                )
        if self.labels is None:
            self.labels = [str(m) for m in range(self.M)]
        if len(self.labels) != self.M:
            raise ValidationError(f"{len(self.labels)} labels for {self.M} outcomes")

    @property
    def N(self) -> int:
        """
        the depth - the number of trials
        """
        return len(self.weights)

    @property
    def M(self) -> int:
        """
        the branching - the number of outcomes per vertex
        """
        return len(self.weights[0])

    @property
    def is_uniform(self) -> bool:
        return all(level == self.weights[0] for level in self.weights)

    def paths(self) -> Iterator[Tuple[int, ...]]:
        """
        all root to leaf paths, first level varying slowest
        """
        return product(range(self.M), repeat=self.N)

    @classmethod
    def uniform(
        cls, N: int, p: Sequence[float], labels: Optional[List[str]] = None
    ) -> "BranchTree":
        """
        a tree with the same weights p₁…p_M on each of the N levels
        """
        if N < 1:
            raise ValidationError(f"depth N must be positive but is {N}")
        return cls([list(p) for _ in range(N)], labels)

    @classmethod
    def bernoulli(cls, N: int, p: float) -> "BranchTree":
        """
        N yes-no trials with probability p for outcome 0
        """
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"p must be in [0,1] but is {p}")
        return cls.uniform(N, [p, 1.0 - p])


@dataclass(frozen=True)
class FrequencyQuery:
    """
    relative frequency window [lo, hi] for K/N of the target outcome
    """

    target: int = 0
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValidationError(
                f"window [{self.lo}, {self.hi}] is not an ordered subrange of [0,1]"
            )
        if self.target < 0:
            raise ValidationError(f"target outcome {self.target} must be nonnegative")

    @classmethod
    def around(
        cls, center: float, half_width: float, target: int = 0
    ) -> "FrequencyQuery":
        """
        the window [center - half_width, center + half_width] cut to [0,1]
        """
        lo = Fraction(str(center)) - Fraction(str(half_width))
        hi = Fraction(str(center)) + Fraction(str(half_width))
        return cls(target, float(max(lo, Fraction(0))), float(min(hi, Fraction(1))))

    def counts(self, N: int) -> List[int]:
        """
        the K in 0..N with K/N inside the window (inclusive bounds)
        """
        lo = Fraction(str(self.lo))
        hi = Fraction(str(self.hi))
        return [K for K in range(N + 1) if lo <= Fraction(K, N) <= hi]


def tree_history_measure(tree: BranchTree, path: Sequence[int]) -> float:
    """
    the product of the edge weights along a root to leaf path
    """
    if len(path) != tree.N:
        raise ValidationError(f"path of length {len(path)} in a tree of depth {tree.N}")
    for index in path:
        if not 0 <= index < tree.M:
            raise ValidationError(f"outcome {index} out of range 0..{tree.M - 1}")
    return math.prod(level[index] for level, index in zip(tree.weights, path))


def branch_count(N: int, K: int) -> int:
    """
    the number N!/(N-K)!K! of branches with K positive outcomes in N trials
    """
    if N < 0 or not 0 <= K <= N:
        raise ValidationError(f"K={K} out of range 0..{N}")
    return math.comb(N, K)


def count_fraction(N: int, query: FrequencyQuery, M: int = 2) -> Fraction:
    """
    the fraction of branches whose relative frequency of the target
    is in the window - a plain count of worlds that does not depend on any weight

    for M > 2 the K positive outcomes combine with (M-1)^(N-K) choices for the others
    """
    if M < 2:
        raise ValidationError(f"branching M must be at least 2 but is {M}")
    if query.target >= M:
        raise ValidationError(f"target outcome {query.target} out of range 0..{M - 1}")
    favourable = sum(branch_count(N, K) * (M - 1) ** (N - K) for K in query.counts(N))
    return Fraction(favourable, M**N)


def measure_fraction_exact(tree: BranchTree, query: FrequencyQuery) -> Fraction:
    """
    Σ_K C(N,K) p^K (1-p)^(N-K) over the window as an exact rational
    with p the decimal value of the target weight
    """
    if not tree.is_uniform:
        raise UnsupportedConfigurationError(
            "measure_fraction needs the same weights on every level"
        )
    if query.target >= tree.M:
        raise ValidationError(
            f"target outcome {query.target} out of range 0..{tree.M - 1}"
        )
    p = Fraction(str(tree.weights[0][query.target]))
    q = 1 - p
    N = tree.N
    return sum(
        (branch_count(N, K) * p**K * q ** (N - K) for K in query.counts(N)), Fraction(0)
    )


def measure_fraction(tree: BranchTree, query: FrequencyQuery) -> float:
    """
    the Born measure of the branches with relative frequency in the window
    """
    return float(measure_fraction_exact(tree, query))


def bernoulli_series(
    p: float, Ns: Sequence[int], half_width: float = 0.05, target: int = 0
) -> List[dict]:
    """
    measure inside and outside the window p ± half_width along the given N
    """
    query = FrequencyQuery.around(p, half_width, target)
    lod = []
    for N in Ns:
        inside = measure_fraction_exact(BranchTree.bernoulli(N, p), query)
        lod.append(
            {
                "N": N,
                "p": p,
                "lo": query.lo,
                "hi": query.hi,
                "measure_inside": float(inside),
                "measure_outside": float(1 - inside),
                "count_inside": float(count_fraction(N, query)),
            }
        )
    return lod


def _qudit_ket(weights: Sequence[float]) -> np.ndarray:
    return np.sqrt(np.asarray(weights, dtype=float)).astype(complex)


def hilbert_tree_model(
    tree: BranchTree,
    present: Optional[int] = 0,
    name: str = "tree",
    tol: float = TAU_ALG,
) -> HistorySpace:
    """
    realize a branch tree as a product of N qudits of dimension M

    Args:
        tree: the branch tree
        present: the trial that is the present - its time is 0 and trial k has time k - present;
            None adds a root time 0 with the trivial decomposition {1} labelled "A"
            before the trials at times 1..N
        name(str): the name of the space
        tol(float): τ_alg for the validation of ρ and the projectors

    Returns:
        HistorySpace: an exactly decoherent space whose full history measures are the path measures
    """
    N, M = tree.N, tree.M
    dim = M**N
    if dim > MAX_HILBERT_DIM:
        raise ResourceBudgetError(
            f"a Hilbert realization of {M}^{N}={dim} dimensions exceeds {MAX_HILBERT_DIM}"
        )
    ket = reduce(np.kron, [_qudit_ket(level) for level in tree.weights])
    rho = Operator.from_ket(ket, normalize=False)
    single = ProjectiveDecomposition.from_basis(
        np.eye(M, dtype=complex), tree.labels, tol
    )
    decompositions = [single.embedded(k, N, M) for k in range(N)]
    if present is None:
        decompositions.insert(0, ProjectiveDecomposition.trivial(dim, "A", tol))
        times = list(range(N + 1))
        present_time = 0
    else:
        if not 0 <= present < N:
            raise ValidationError(f"present trial {present} out of range 0..{N - 1}")
        times = [k - present for k in range(N)]
        present_time = 0
    return HistorySpace(rho, decompositions, times, present_time, tol=tol, name=name)


def hilbert_bernoulli_model(
    N: int, p: float, present: Optional[int] = 0, tol: float = TAU_ALG
) -> HistorySpace:
    """
    ρ = (√p|0⟩ + √(1-p)|1⟩)^⊗N with the z projectors of qubit k at trial k
    """
    return hilbert_tree_model(
        BranchTree.bernoulli(N, p), present, name=f"bernoulli N={N} p={p}", tol=tol
    )


def division_tree() -> BranchTree:
    """
    the two-stage equiprobable division: A splits in two, each part splits again,
    the path (0, 0) leads to E
    """
    return BranchTree.uniform(2, [0.5, 0.5])


def division_model(tol: float = TAU_ALG) -> HistorySpace:
    """
    the division tree with the undivided A as the present
    """
    return hilbert_tree_model(division_tree(), present=None, name="division", tol=tol)


# the future outcome and the present outcome of the shipped reference query
PARTIAL_DECOHERENCE_FUTURE = (0,)
PARTIAL_DECOHERENCE_PRESENT = 0


def partial_decoherence_model(delta: float, tol: float = TAU_ALG) -> HistorySpace:
    """
    a system qubit A entangled with an environment qubit B that is never measured:
    ψ = √(3/4)|00⟩ + √(1/4)|11⟩

    at times -2 and -1 A is measured in the z basis rotated by θ = δπ/4,
    at times 0 (present) and 1 A is measured in the z basis.
    δ = 0 is exactly decoherent, the interference of the rotated pasts grows with δ.

    Both past times use the same rotated basis, so the outcome at -1 repeats the
    one at -2: pasts with differing outcomes have measure 0 and the past at -1
    is a persistent record of the first observation. The same holds for the
    present record at 0 and 1.

    Args:
        delta(float): the rotation in [0,1]
        tol(float): τ_alg for the validation of ρ and the projectors
    """
    if not 0.0 <= delta <= 1.0:
        raise ValidationError(f"δ must be in [0,1] but is {delta}")
    theta = delta * math.pi / 4
    c, s = math.cos(theta), math.sin(theta)
    rotation = np.array([[c, -s], [s, c]], dtype=complex)
    z = ProjectiveDecomposition.qubit("z", tol=tol)
    rotated = z.conjugated(rotation.conj().T).embedded(0, 2)
    record = z.embedded(0, 2)
    ket = np.array([math.sqrt(0.75), 0, 0, math.sqrt(0.25)], dtype=complex)
    rho = Operator.from_ket(ket, normalize=False)
    return HistorySpace(
        rho,
        [rotated, rotated, record, record],
        times=[-2, -1, 0, 1],
        present=0,
        tol=tol,
        name=f"partial-decoherence δ={delta}",
    )


def reference_query(space: HistorySpace) -> Tuple[History, History]:
    """
    the (future, present) pair the views are compared on
    """
    alpha_f = space.future(PARTIAL_DECOHERENCE_FUTURE)
    return alpha_f, space.present_event(PARTIAL_DECOHERENCE_PRESENT)
