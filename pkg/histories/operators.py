"""
Created on 2026-10-03

@author: wf
"""
from dataclasses import dataclass
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from histories.errors import DimensionError, NumericalIntegrityError, ValidationError

# default algebraic tolerance τ_alg
TAU_ALG = 1e-10
# default decoherence tolerance ε_dec on the normalized off-diagonal
EPS_DEC = 1e-8


@dataclass(frozen=True)
class Tolerance:
    """
    the two tolerances used throughout

    Attributes:
        alg(float): algebraic tolerance τ_alg for validations, clamping and zero-measure tests
        dec(float): decoherence tolerance ε_dec for the normalized off-diagonal
    """

    alg: float = TAU_ALG
    dec: float = EPS_DEC

    def __post_init__(self):
        if self.alg < 0 or self.dec < 0:
            raise ValidationError(f"tolerances must be nonnegative: {self}")

    @classmethod
    def uniform(cls, tol: float) -> "Tolerance":
        """
        a tolerance that overrides both τ_alg and ε_dec (the --tol flag)
        """
        return cls(alg=tol, dec=tol)


class Operator:
    """
    dense complex square matrix

    instances are immutable: the underlying array is a read-only copy
    """

    def __init__(self, matrix):
        """
        construct me from the given array-like

        Args:
            matrix: a square array-like of complex entries

        Raises:
            DimensionError: if the matrix is not square
            ValidationError: if any entry is NaN or infinite
        """
        arr = np.array(matrix, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimensionError(
                f"operator must be a non-empty square matrix but has shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("operator has non-finite entries")
        arr.setflags(write=False)
        self._matrix = arr
        # memoized validation reports keyed by (kind, tolerance)
        self._reports: Dict[Tuple[str, float], "ValidationReport"] = {}

    @property
    def matrix(self) -> np.ndarray:
        """
        the read-only complex array
        """
        return self._matrix

    @property
    def dim(self) -> int:
        """
        number of rows of the square matrix
        """
        return self._matrix.shape[0]

    def dagger(self) -> "Operator":
        """
        the Hermitian adjoint M†
        """
        return Operator(self._matrix.conj().T)

    def trace(self) -> complex:
        """
        Tr M
        """
        return complex(np.trace(self._matrix))

    def max_norm(self) -> float:
        """
        largest absolute entry
        """
        return float(np.max(np.abs(self._matrix)))

    def eigenvalues(self) -> np.ndarray:
        """
        ascending eigenvalues of my Hermitian part
        """
        hermitian_part = (self._matrix + self._matrix.conj().T) / 2
        return np.linalg.eigvalsh(hermitian_part)

    def is_close(self, other: "Operator", tol: float = TAU_ALG) -> bool:
        """
        entrywise comparison within tol
        """
        check_same_dim(self, other)
        return (self - other).max_norm() <= tol

    def _check_other(self, other) -> np.ndarray:
        if not isinstance(other, Operator):
            return NotImplemented
        check_same_dim(self, other)
        return other.matrix

    def __matmul__(self, other: "Operator") -> "Operator":
        other_matrix = self._check_other(other)
        if other_matrix is NotImplemented:
            return NotImplemented
        return Operator(self._matrix @ other_matrix)

    def __add__(self, other: "Operator") -> "Operator":
        other_matrix = self._check_other(other)
        if other_matrix is NotImplemented:
            return NotImplemented
        return Operator(self._matrix + other_matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        other_matrix = self._check_other(other)
        if other_matrix is NotImplemented:
            return NotImplemented
        return Operator(self._matrix - other_matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        if not np.isscalar(scalar):
            return NotImplemented
        return Operator(self._matrix * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim})"

    @classmethod
    def identity(cls, dim: int) -> "Operator":
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def zeros(cls, dim: int) -> "Operator":
        return cls(np.zeros((dim, dim), dtype=complex))

    @classmethod
    def from_ket(cls, ket: Sequence[complex], normalize: bool = True) -> "Operator":
        """
        the pure state |ψ⟩⟨ψ| for the given ket

        Args:
            ket: the state vector
            normalize(bool): if True rescale the ket to unit norm
        """
        vector = np.asarray(ket, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise ValidationError("the zero vector is not a state")
        if normalize:
            vector = vector / norm
        return cls(np.outer(vector, vector.conj()))

    @classmethod
    def from_entries(
        cls, entries: Sequence[Sequence[float]], dim: Optional[int] = None
    ) -> "Operator":
        """
        construct an operator from its serialized form: a row-major list of (re, im) pairs

        Args:
            entries: dim² pairs [re, im]
            dim(int): the expected dimension - derived from the entry count if None
        """
        values = complex_values(entries)
        if dim is None:
            dim = int(round(np.sqrt(len(values))))
        if len(values) != dim * dim:
            raise DimensionError(
                f"{len(values)} entries can not form a {dim}x{dim} matrix"
            )
        return cls(np.array(values, dtype=complex).reshape(dim, dim))

    def to_entries(self) -> List[List[float]]:
        """
        serialize me as a row-major list of [re, im] pairs
        """
        return [[float(z.real), float(z.imag)] for z in self._matrix.reshape(-1)]

    @classmethod
    def kron(cls, *operators: "Operator") -> "Operator":
        """
        tensor product of the given operators, first factor most significant
        """
        return cls(reduce(np.kron, [op.matrix for op in operators]))


@dataclass
class ValidationReport:
    """
    outcome of a well-formedness check with its max-norm violations
    """

    kind: str
    valid: bool
    tol: float
    hermiticity: float
    idempotency: Optional[float] = None
    unitarity: Optional[float] = None
    trace_deviation: Optional[float] = None
    min_eigenvalue: Optional[float] = None

    def __bool__(self) -> bool:
        return self.valid

    @property
    def msg(self) -> str:
        marker = "✅" if self.valid else "❌"
        details = [f"hermiticity={self.hermiticity:.3e}"]
        for name in ["idempotency", "unitarity", "trace_deviation", "min_eigenvalue"]:
            value = getattr(self, name)
            if value is not None:
                details.append(f"{name}={value:.3e}")
        return f"{marker} {self.kind} (τ={self.tol:g}): {', '.join(details)}"


def as_operator(m: Union[Operator, np.ndarray, Sequence]) -> Operator:
    """
    coerce the given matrix to an Operator
    """
    if isinstance(m, Operator):
        return m
    return Operator(m)


def check_same_dim(*operators: Operator):
    """
    make sure all given operators act on the same Hilbert space
    """
    dims = {op.dim for op in operators}
    if len(dims) > 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")


def complex_values(entries: Sequence[Sequence[float]]) -> List[complex]:
    """
    convert serialized [re, im] pairs (or plain reals) to complex numbers
    """
    if not isinstance(entries, (list, tuple, np.ndarray)):
        raise ValidationError(f"expected a list of entries but got {entries!r}")
    values = []
    for entry in entries:
        pair = isinstance(entry, (list, tuple))
        if pair and len(entry) != 2:
            raise ValidationError(
                f"complex entry must be a [re, im] pair but is {entry}"
            )
        try:
            if pair:
                values.append(complex(float(entry[0]), float(entry[1])))
            else:
                values.append(complex(float(entry), 0.0))
        except (TypeError, ValueError) as ex:
            raise ValidationError(f"invalid complex entry {entry!r}: {ex}") from ex
    return values


def _hermiticity(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def validate_projector(m, tol: float = TAU_ALG) -> ValidationReport:
    """
    check P = P† and P² = P

    Args:
        m: the candidate projector
        tol(float): τ_alg for both max-norm violations

    Returns:
        ValidationReport: truthy iff m is a projector within tol
    """
    op = as_operator(m)
    key = ("projector", tol)
    if key not in op._reports:
        matrix = op.matrix
        hermiticity = _hermiticity(matrix)
        idempotency = float(np.max(np.abs(matrix @ matrix - matrix)))
        valid = hermiticity <= tol and idempotency <= tol
        op._reports[key] = ValidationReport(
            kind="projector",
            valid=valid,
            tol=tol,
            hermiticity=hermiticity,
            idempotency=idempotency,
        )
    return op._reports[key]


def validate_density(m, tol: float = TAU_ALG) -> ValidationReport:
    """
    check that m is Hermitian, has unit trace and no eigenvalue below -tol
    """
    op = as_operator(m)
    key = ("density", tol)
    if key not in op._reports:
        hermiticity = _hermiticity(op.matrix)
        trace_deviation = abs(op.trace() - 1.0)
        min_eigenvalue = float(op.eigenvalues()[0])
        valid = hermiticity <= tol and trace_deviation <= tol and min_eigenvalue >= -tol
        op._reports[key] = ValidationReport(
            kind="density",
            valid=valid,
            tol=tol,
            hermiticity=hermiticity,
            trace_deviation=trace_deviation,
            min_eigenvalue=min_eigenvalue,
        )
    return op._reports[key]


def validate_unitary(m, tol: float = TAU_ALG) -> ValidationReport:
    """
    check U†U = 1
    """
    op = as_operator(m)
    key = ("unitary", tol)
    if key not in op._reports:
        matrix = op.matrix
        unitarity = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(op.dim))))
        op._reports[key] = ValidationReport(
            kind="unitary",
            valid=unitarity <= tol,
            tol=tol,
            hermiticity=_hermiticity(matrix),
            unitarity=unitarity,
        )
    return op._reports[key]


def require(report: ValidationReport, what: str):
    """
    raise a ValidationError for an invalid report
    """
    if not report.valid:
        raise ValidationError(f"{what} is not a valid {report.kind}: {report.msg}")


def clamp_probability(
    value: float, tol: float = TAU_ALG, what: str = "probability"
) -> float:
    """
    clamp a computed probability to [0,1] if it is within tol of the boundary

    Raises:
        NumericalIntegrityError: for larger excursions
    """
    if value < -tol or value > 1.0 + tol:
        raise NumericalIntegrityError(
            f"{what} {value!r} is outside [0,1] by more than {tol:g}"
        )
    return min(max(value, 0.0), 1.0)


def heisenberg_projector(p, u, tol: float = TAU_ALG) -> Operator:
    """
    the time-evolved projector U†PU

    Args:
        p: the projector P
        u: the single-step unitary U
        tol(float): τ_alg

    Returns:
        Operator: U†PU

    Raises:
        ValidationError: if U is not unitary
        DimensionError: if the dimensions differ
    """
    p_op = as_operator(p)
    u_op = as_operator(u)
    check_same_dim(p_op, u_op)
    require(validate_unitary(u_op, tol), "U")
    result = Operator(u_op.matrix.conj().T @ p_op.matrix @ u_op.matrix)
    if validate_projector(p_op, tol) and not validate_projector(result, tol):
        raise NumericalIntegrityError(
            f"conjugation lost projector validity: {validate_projector(result, tol).msg}"
        )
    return result


def born_probability(p, rho, tol: float = TAU_ALG) -> float:
    """
    the Born rule Tr(Pρ)

    Args:
        p: a projector
        rho: a density matrix of the same dimension
        tol(float): τ_alg

    Returns:
        float: Re Tr(Pρ) clamped to [0,1] within tol
    """
    p_op = as_operator(p)
    rho_op = as_operator(rho)
    check_same_dim(p_op, rho_op)
    require(validate_projector(p_op, tol), "P")
    require(validate_density(rho_op, tol), "ρ")
    value = float(np.real(np.trace(p_op.matrix @ rho_op.matrix)))
    return clamp_probability(value, tol, "Born probability")


class ProjectiveDecomposition:
    """
    a complete set of mutually orthogonal projectors with outcome labels
    """

    def __init__(
        self,
        projectors: Sequence,
        labels: Optional[Sequence[str]] = None,
        tol: float = TAU_ALG,
    ):
        """
        construct and validate the decomposition

        Args:
            projectors: the ordered projectors
            labels: the outcome names - defaults to "0", "1", ...
            tol(float): τ_alg for projector, orthogonality and completeness checks

        Raises:
            ValidationError: if any of the checks fails
        """
        if len(projectors) == 0:
            raise ValidationError(
                "a projective decomposition needs at least one projector"
            )
        self.projectors: Tuple[Operator, ...] = tuple(
            as_operator(p) for p in projectors
        )
        check_same_dim(*self.projectors)
        if labels is None:
            labels = [str(i) for i in range(len(self.projectors))]
        if len(labels) != len(self.projectors):
            raise ValidationError(
                f"{len(labels)} labels for {len(self.projectors)} projectors"
            )
        if len(set(labels)) != len(labels):
            raise ValidationError(f"outcome labels must be unique: {labels}")
        self.labels: Tuple[str, ...] = tuple(str(label) for label in labels)
        self.tol = tol
        for label, projector in zip(self.labels, self.projectors):
            require(validate_projector(projector, tol), f"projector '{label}'")
        for i, pi in enumerate(self.projectors):
            for j in range(i + 1, len(self.projectors)):
                overlap = float(np.max(np.abs(pi.matrix @ self.projectors[j].matrix)))
                if overlap > tol:
                    raise ValidationError(
                        f"projectors '{self.labels[i]}' and '{self.labels[j]}' are not orthogonal: {overlap:.3e}"
                    )
        total = sum(p.matrix for p in self.projectors)
        completeness = float(np.max(np.abs(total - np.eye(self.dim))))
        if completeness > tol:
            raise ValidationError(
                f"projectors do not sum to the identity: {completeness:.3e}"
            )

    @property
    def dim(self) -> int:
        """
        dimension of the Hilbert space the projectors act on
        """
        return self.projectors[0].dim

    def __len__(self) -> int:
        return len(self.projectors)

    def __getitem__(self, index: int) -> Operator:
        return self.projectors[index]

    def index_of(self, outcome: Union[int, str]) -> int:
        """
        the index of the given outcome label (or index)
        """
        if isinstance(outcome, str):
            if outcome not in self.labels:
                raise ValidationError(
                    f"unknown outcome '{outcome}' - expected one of {self.labels}"
                )
            return self.labels.index(outcome)
        return int(outcome)

    def conjugated(self, u, tol: Optional[float] = None) -> "ProjectiveDecomposition":
        """
        the decomposition {U†PU} with the same labels
        """
        tol = self.tol if tol is None else tol
        projectors = [heisenberg_projector(p, u, tol) for p in self.projectors]
        return ProjectiveDecomposition(projectors, self.labels, tol)

    def embedded(
        self, position: int, n_factors: int, factor_dim: int = 2
    ) -> "ProjectiveDecomposition":
        """
        tensor each projector into factor position of an n_factors-fold product space
        """
        projectors = [
            embed(p, position, n_factors, factor_dim) for p in self.projectors
        ]
        return ProjectiveDecomposition(projectors, self.labels, self.tol)

    @classmethod
    def from_basis(
        cls,
        vectors: Sequence[Sequence[complex]],
        labels: Optional[Sequence[str]] = None,
        tol: float = TAU_ALG,
    ) -> "ProjectiveDecomposition":
        """
        the rank-one projectors onto the given orthonormal vectors
        """
        projectors = [Operator.from_ket(v, normalize=False) for v in vectors]
        return cls(projectors, labels, tol)

    @classmethod
    def trivial(
        cls, dim: int, label: str = "1", tol: float = TAU_ALG
    ) -> "ProjectiveDecomposition":
        """
        the single-outcome decomposition {1}
        """
        return cls([Operator.identity(dim)], [label], tol)

    @classmethod
    def qubit(
        cls,
        basis: str = "z",
        position: int = 0,
        n_qubits: int = 1,
        tol: float = TAU_ALG,
    ) -> "ProjectiveDecomposition":
        """
        a named single-qubit basis acting on the given qubit of an n_qubits register

        Args:
            basis(str): one of z, x or y
            position(int): the qubit the basis acts on
            n_qubits(int): the size of the register
            tol(float): τ_alg for the validation of the projectors
        """
        if basis not in QUBIT_BASES:
            raise ValidationError(
                f"unknown qubit basis '{basis}' - expected one of {sorted(QUBIT_BASES)}"
            )
        labels = QUBIT_BASES[basis]
        single = cls.from_basis([QUBIT_KETS[label] for label in labels], labels, tol)
        if n_qubits == 1:
            return single
        return single.embedded(position, n_qubits)


_SQRT_HALF = np.sqrt(0.5)
QUBIT_KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex),
    "-": np.array([_SQRT_HALF, -_SQRT_HALF], dtype=complex),
    "r": np.array([_SQRT_HALF, 1j * _SQRT_HALF], dtype=complex),
    "l": np.array([_SQRT_HALF, -1j * _SQRT_HALF], dtype=complex),
}
QUBIT_BASES = {"z": ("0", "1"), "x": ("+", "-"), "y": ("r", "l")}


def qubit_ket(name: str) -> np.ndarray:
    """
    the product ket for a string of single-qubit state names e.g. "0+-"
    """
    if not name:
        raise ValidationError("empty state name")
    unknown = [c for c in name if c not in QUBIT_KETS]
    if unknown:
        raise ValidationError(
            f"unknown qubit state(s) {unknown} - expected chars from {''.join(QUBIT_KETS)}"
        )
    return reduce(np.kron, [QUBIT_KETS[c] for c in name])


def embed(op, position: int, n_factors: int, factor_dim: int = 2) -> Operator:
    """
    1 ⊗ … ⊗ op ⊗ … ⊗ 1 with op in the given factor position
    """
    op = as_operator(op)
    if op.dim != factor_dim:
        raise DimensionError(
            f"operator of dim {op.dim} can not act on a factor of dim {factor_dim}"
        )
    if not 0 <= position < n_factors:
        raise DimensionError(
            f"factor position {position} out of range 0..{n_factors - 1}"
        )
    eye = np.eye(factor_dim, dtype=complex)
    factors = [op.matrix if k == position else eye for k in range(n_factors)]
    return Operator(reduce(np.kron, factors))


def qubit_basis(
    basis: str = "z", position: int = 0, n_qubits: int = 1
) -> ProjectiveDecomposition:
    """
    the z, x or y basis decomposition of one qubit in an n_qubits register
    """
    return ProjectiveDecomposition.qubit(basis, position, n_qubits)
