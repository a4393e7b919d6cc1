"""
Created on 2026-10-05

@author: wf
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Tuple

import numpy as np

from histories.errors import ContractError, NumericalIntegrityError, ZeroMeasureError
from histories.history import (
    History,
    HistoryBudget,
    HistorySpace,
    branch_matrix,
    decoherence_report,
    iter_branches,
)
from histories.operators import EPS_DEC, TAU_ALG, Operator, clamp_probability

logger = logging.getLogger(__name__)


def _norm2(matrix: np.ndarray) -> float:
    """
    ‖M‖² = Tr(M M†) for a branch matrix M = C W
    """
    return float(np.real(np.vdot(matrix, matrix)))


def _space_of(space: Optional[HistorySpace], *histories: History) -> HistorySpace:
    spaces = {id(h.space) for h in histories}
    if len(spaces) > 1:
        raise ContractError("histories belong to different spaces")
    if space is None:
        return histories[0].space
    if histories[0].space is not space:
        raise ContractError("history does not belong to the given space")
    return space


def _check_present(alpha_0: History, space: HistorySpace):
    if len(alpha_0) != 1 or alpha_0.start != space.present_position:
        raise ContractError(f"{alpha_0} is not a present event at t₀={space.present}")


def _check_future(alpha_f: History, space: HistorySpace):
    if not alpha_f.is_empty and alpha_f.start != space.present_position + 1:
        raise ContractError(
            f"{alpha_f} is not a future segment starting right after t₀={space.present}"
        )


def _check_past(alpha_p: History, space: HistorySpace):
    if alpha_p.time_range != space.past_range() and not (
        alpha_p.is_empty and space.present_position == 0
    ):
        raise ContractError(f"{alpha_p} does not cover the full past of {space}")


def segment_measure(h: History) -> float:
    """
    Tr(C_α ρ C_α†) for a full history or a segment
    """
    return _norm2(branch_matrix(h))


def absolute_measure(h: History, tol: float = TAU_ALG) -> float:
    """
    the absolute measure D(α,α) of a full history in the universal state

    Raises:
        ContractError: for a segment
    """
    if not h.is_full:
        raise ContractError(
            f"{h} is a segment - the absolute measure needs a full history"
        )
    return clamp_probability(segment_measure(h), tol, f"measure of {h}")


def conditional_probability(
    target: History,
    given: History,
    space: Optional[HistorySpace] = None,
    tol: float = TAU_ALG,
) -> float:
    """
    Prob(target/given) = Tr(C_u ρ C_u†) / Tr(C_g ρ C_g†)
    with u the union segment target∧given and g the given segment

    segments that disagree at a shared time have probability 0

    Raises:
        ZeroMeasureError: if the given segment has measure ≤ tol
        ContractError: if the union of both segments is not contiguous
    """
    _space_of(space, target, given)
    union = target.union(given)
    denominator = segment_measure(given)
    if denominator <= tol:
        raise ZeroMeasureError(
            f"condition {given} has measure {denominator!r} ≤ {tol:g}"
        )
    if union is None:
        return 0.0
    return clamp_probability(
        segment_measure(union) / denominator, tol, f"Prob({target}/{given})"
    )


def present_measure(
    alpha_0: History, space: Optional[HistorySpace] = None, tol: float = TAU_ALG
) -> float:
    """
    Tr(P_α₀ ρ P_α₀) checked to be above tol
    """
    space = _space_of(space, alpha_0)
    _check_present(alpha_0, space)
    measure = segment_measure(alpha_0)
    if measure <= tol:
        raise ZeroMeasureError(f"present {alpha_0} has measure {measure!r} ≤ {tol:g}")
    return measure


def minimalist_future(
    alpha_f: History,
    alpha_0: History,
    space: Optional[HistorySpace] = None,
    tol: float = TAU_ALG,
) -> float:
    """
    the minimalist probability of a future segment given the present

    Tr(C_f P_α₀ ρ P_α₀ C_f†) / Tr(P_α₀ ρ P_α₀)
    """
    space = _space_of(space, alpha_f, alpha_0)
    _check_future(alpha_f, space)
    denominator = present_measure(alpha_0, space, tol)
    joint = segment_measure(alpha_f.union(alpha_0))
    return clamp_probability(
        joint / denominator, tol, f"minimalist Prob({alpha_f}/{alpha_0})"
    )


def _future_operator(alpha_f: History, alpha_0: History) -> np.ndarray:
    """
    C_f P_α₀ as a matrix
    """
    return branch_matrix(
        alpha_f.union(alpha_0), np.eye(alpha_0.space.dim, dtype=complex)
    )


def _fatalist_sum(
    alpha_f: History,
    alpha_0: History,
    space: HistorySpace,
    tol: float,
    budget: Optional[HistoryBudget],
) -> float:
    """
    the unclamped sum Σ_p Prob(α_f/α₀ α_p) Prob(α_p/α₀)

    pasts whose joint measure with the present is ≤ tol are skipped
    """
    _check_future(alpha_f, space)
    present = present_measure(alpha_0, space, tol)
    p0 = space.decompositions[space.present_position][alpha_0.indices[0]].matrix
    future = _future_operator(alpha_f, alpha_0)
    terms = []
    for _indices, past_branch in iter_branches(
        space, space.past_range(), budget=budget
    ):
        present_branch = p0 @ past_branch
        joint = _norm2(present_branch)
        if joint <= tol:
            continue
        forecast = _norm2(future @ past_branch) / joint
        weight = joint / present
        terms.append(forecast * weight)
    total = math.fsum(terms)
    logger.debug(
        f"fatalist sum {total!r} for {alpha_f} given {alpha_0} over {len(terms)} pasts"
    )
    return total


def fatalist_future(
    alpha_f: History,
    alpha_0: History,
    space: Optional[HistorySpace] = None,
    tol: float = TAU_ALG,
    budget: Optional[HistoryBudget] = None,
) -> float:
    """
    the fatalist probability Σ_p Prob(α_f/α₀ α_p) Prob(α_p/α₀)
    evaluated term by term over all pasts

    Args:
        alpha_f: the future segment
        alpha_0: the present event
        space: the history space - defaults to the space of the histories
        tol(float): τ_alg for skipping zero weight pasts and for clamping
        budget: the resource budget for the past enumeration

    Returns:
        float: the fatalist probability in [0,1]

    Raises:
        NumericalIntegrityError: if the sum leaves [0,1] by more than tol,
            which happens when the space does not decohere and the weights
            Prob(α_p/α₀) do not add up to one
    """
    space = _space_of(space, alpha_f, alpha_0)
    total = _fatalist_sum(alpha_f, alpha_0, space, tol, budget)
    return clamp_probability(total, tol, f"fatalist Prob({alpha_f}/{alpha_0})")


def fatalist_chance_future(
    alpha_f: History,
    alpha_0: History,
    space: Optional[HistorySpace] = None,
    tol: float = TAU_ALG,
    budget: Optional[HistoryBudget] = None,
) -> float:
    """
    the fatalist forecast weighted by the retrodictive chance:
    Σ_p Prob(α_f/α₀ α_p) Chance(α_p/α₀)
    """
    space = _space_of(space, alpha_f, alpha_0)
    _check_future(alpha_f, space)
    _check_present(alpha_0, space)
    chance = chance_of_present(alpha_0, space, budget)
    if chance <= tol:
        raise ZeroMeasureError(f"present {alpha_0} has chance {chance!r} ≤ {tol:g}")
    p0 = space.decompositions[space.present_position][alpha_0.indices[0]].matrix
    future = _future_operator(alpha_f, alpha_0)
    terms = []
    for _indices, past_branch in iter_branches(
        space, space.past_range(), budget=budget
    ):
        joint = _norm2(p0 @ past_branch)
        if joint <= tol:
            continue
        terms.append(_norm2(future @ past_branch) / joint * (joint / chance))
    return clamp_probability(math.fsum(terms), tol, f"fatalist chance of {alpha_f}")


def _present_branches(
    alpha_0: History, space: HistorySpace, budget: Optional[HistoryBudget]
) -> List[Tuple[Tuple[int, ...], float]]:
    """
    (past indices, Tr(P_α₀ C_p ρ C_p† P_α₀)) for every past
    """
    _check_present(alpha_0, space)
    p0 = space.decompositions[space.present_position][alpha_0.indices[0]].matrix
    return [
        (indices, _norm2(p0 @ branch))
        for indices, branch in iter_branches(space, space.past_range(), budget=budget)
    ]


def chance_of_present(
    alpha_0: History,
    space: Optional[HistorySpace] = None,
    budget: Optional[HistoryBudget] = None,
) -> float:
    """
    Chance(α₀) = Σ_p Tr(P_α₀ C_p ρ C_p† P_α₀) summed over all
    histories terminating in α₀ - this is Tr(P_α₀ ρ_mix P_α₀) and stays in [0,1]
    """
    space = _space_of(space, alpha_0)
    chance = math.fsum(
        weight for _indices, weight in _present_branches(alpha_0, space, budget)
    )
    return clamp_probability(chance, space.tol, f"Chance({alpha_0})")


def retrodictive_chances(
    alpha_0: History,
    space: Optional[HistorySpace] = None,
    tol: float = TAU_ALG,
    budget: Optional[HistoryBudget] = None,
) -> List[Tuple[History, float]]:
    """
    Chance(α_p/α₀) for every past α_p in enumeration order
    """
    space = _space_of(space, alpha_0)
    branches = _present_branches(alpha_0, space, budget)
    chance = math.fsum(weight for _indices, weight in branches)
    if chance <= tol:
        raise ZeroMeasureError(f"present {alpha_0} has chance {chance!r} ≤ {tol:g}")
    past = space.past_range()
    return [
        (
            History(space, past.start, indices),
            clamp_probability(weight / chance, tol, "retrodictive chance"),
        )
        for indices, weight in branches
    ]


def retrodictive_chance(
    alpha_p: History,
    alpha_0: History,
    space: Optional[HistorySpace] = None,
    tol: float = TAU_ALG,
    budget: Optional[HistoryBudget] = None,
) -> float:
    """
    Chance(α_p/α₀) = Tr(P_α₀ C_p ρ C_p† P_α₀) / Chance(α₀)

    sums to one over all pasts whether or not the space decoheres
    """
    space = _space_of(space, alpha_p, alpha_0)
    _check_past(alpha_p, space)
    _check_present(alpha_0, space)
    chance = chance_of_present(alpha_0, space, budget)
    if chance <= tol:
        raise ZeroMeasureError(f"present {alpha_0} has chance {chance!r} ≤ {tol:g}")
    p0 = space.decompositions[space.present_position][alpha_0.indices[0]].matrix
    weight = _norm2(p0 @ branch_matrix(alpha_p))
    return clamp_probability(weight / chance, tol, f"Chance({alpha_p}/{alpha_0})")


def rho_mix(space: HistorySpace, budget: Optional[HistoryBudget] = None) -> Operator:
    """
    the impure mixture ρ_mix = Σ_p C_p ρ C_p† over all pasts
    """
    mixture = np.zeros((space.dim, space.dim), dtype=complex)
    for _indices, branch in iter_branches(space, space.past_range(), budget=budget):
        mixture += branch @ branch.conj().T
    return Operator(mixture)


@dataclass
class MixtureComparison:
    """
    expectations of α_f∧α₀ under the pure state and under ρ_mix
    """

    joint_pure: float
    joint_mix: float
    conditional_pure: float
    conditional_mix: float

    @property
    def joint_gap(self) -> float:
        return abs(self.joint_pure - self.joint_mix)

    @property
    def conditional_gap(self) -> float:
        return abs(self.conditional_pure - self.conditional_mix)

    def to_dict(self) -> dict:
        record = asdict(self)
        record["joint_gap"] = self.joint_gap
        record["conditional_gap"] = self.conditional_gap
        return record


def mixture_comparison(
    alpha_f: History,
    alpha_0: History,
    space: Optional[HistorySpace] = None,
    tol: float = TAU_ALG,
    budget: Optional[HistoryBudget] = None,
) -> MixtureComparison:
    """
    compare Tr(C_f P_α₀ σ P_α₀ C_f†) and its conditional for σ = ρ and σ = ρ_mix
    """
    space = _space_of(space, alpha_f, alpha_0)
    _check_future(alpha_f, space)
    _check_present(alpha_0, space)
    future = _future_operator(alpha_f, alpha_0)
    p0 = space.decompositions[space.present_position][alpha_0.indices[0]].matrix
    mixture = rho_mix(space, budget).matrix

    def expectation(operator: np.ndarray, state: np.ndarray) -> float:
        return float(np.real(np.trace(operator @ state @ operator.conj().T)))

    values = {}
    for kind, state in [("pure", space.rho.matrix), ("mix", mixture)]:
        joint = expectation(future, state)
        present = expectation(p0, state)
        if present <= tol:
            raise ZeroMeasureError(
                f"present {alpha_0} has {kind} measure {present!r} ≤ {tol:g}"
            )
        values[f"joint_{kind}"] = joint
        values[f"conditional_{kind}"] = clamp_probability(
            joint / present, tol, f"{kind} conditional"
        )
    return MixtureComparison(**values)


@dataclass
class ViewComparison:
    """
    minimalist versus fatalist forecast with the decoherence of the space

    fatalist and gap are None when the fatalist sum leaves [0,1],
    fatalist_sum keeps the unclamped value for the report
    """

    future: str
    present: str
    minimalist: float
    fatalist: Optional[float]
    fatalist_sum: float
    gap: Optional[float]
    max_offdiag: float
    max_normalized_offdiag: float
    passes: bool

    def to_dict(self) -> dict:
        return asdict(self)


def compare_views(
    alpha_f: History,
    alpha_0: History,
    space: Optional[HistorySpace] = None,
    eps_dec: float = EPS_DEC,
    tol: float = TAU_ALG,
    budget: Optional[HistoryBudget] = None,
) -> ViewComparison:
    """
    compare the minimalist and the fatalist forecast of α_f given α₀

    the gap |minimalist - fatalist| is reported unrounded together with
    the decoherence report summary of the space
    """
    space = _space_of(space, alpha_f, alpha_0)
    minimalist = minimalist_future(alpha_f, alpha_0, space, tol)
    fatalist_sum = _fatalist_sum(alpha_f, alpha_0, space, tol, budget)
    try:
        fatalist = clamp_probability(
            fatalist_sum, tol, f"fatalist Prob({alpha_f}/{alpha_0})"
        )
        gap = abs(minimalist - fatalist)
    except NumericalIntegrityError as ex:
        logger.warning(f"no fatalist probability in {space}: {ex}")
        fatalist = None
        gap = None
    report = decoherence_report(space, eps_dec=eps_dec, tol=tol, budget=budget)
    return ViewComparison(
        future=str(alpha_f),
        present=str(alpha_0),
        minimalist=minimalist,
        fatalist=fatalist,
        fatalist_sum=fatalist_sum,
        gap=gap,
        max_offdiag=report.max_offdiag,
        max_normalized_offdiag=report.max_normalized_offdiag,
        passes=report.passes,
    )
