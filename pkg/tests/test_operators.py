"""
Created on 2026-10-10

@author: wf
"""
import numpy as np

from histories.errors import DimensionError, NumericalIntegrityError, ValidationError
from histories.operators import (
    Operator,
    ProjectiveDecomposition,
    Tolerance,
    born_probability,
    clamp_probability,
    embed,
    heisenberg_projector,
    qubit_basis,
    qubit_ket,
    validate_density,
    validate_projector,
    validate_unitary,
)
from tests.base_histories import BaseHistoriesTest, random_density, random_unitary

HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]])


class TestOperators(BaseHistoriesTest):
    """
    test the validated operator core
    """

    def test_operator_construction(self):
        """
        operators must be square, finite and immutable
        """
        op = Operator([[1, 2j], [3, 4]])
        self.assertEqual(2, op.dim)
        with self.assertRaises(ValueError):
            op.matrix[0, 0] = 5
        with self.assertRaises(DimensionError):
            Operator([[1, 2, 3], [4, 5, 6]])
        with self.assertRaises(ValidationError):
            Operator([[np.nan, 0], [0, 1]])
        with self.assertRaises(DimensionError):
            Operator.identity(2) @ Operator.identity(3)

    def test_entries(self):
        """
        the serialized form is a row-major list of [re, im] pairs
        """
        op = Operator([[1, 2j], [3, 4 - 1j]])
        entries = op.to_entries()
        self.assertEqual([[1.0, 0.0], [0.0, 2.0], [3.0, 0.0], [4.0, -1.0]], entries)
        self.assertTrue(Operator.from_entries(entries).is_close(op, 0.0))
        with self.assertRaises(DimensionError):
            Operator.from_entries(entries, dim=3)

    def test_validate_projector(self):
        """
        identity and |0⟩⟨0| are projectors, a nilpotent matrix is not
        """
        self.assertTrue(validate_projector(Operator.identity(2)))
        self.assertTrue(validate_projector(Operator.from_ket(qubit_ket("0"))))
        report = validate_projector(Operator([[0, 1], [0, 0]]))
        self.assertFalse(report)
        self.assertEqual(1.0, report.hermiticity)
        if self.debug:
            print(report.msg)
        with self.assertRaises(DimensionError):
            validate_projector([[1, 0, 0]])

    def test_validate_density(self):
        """
        maximally mixed and pure states are densities, 2|0⟩⟨0| is not
        """
        self.assertTrue(validate_density(Operator.identity(2) * 0.5))
        self.assertTrue(validate_density(Operator.from_ket(qubit_ket("+"))))
        report = validate_density(Operator.from_ket(qubit_ket("0")) * 2)
        self.assertFalse(report)
        self.assertAlmostEqual(1.0, report.trace_deviation)
        negative = validate_density(Operator(np.diag([1.5, -0.5])))
        self.assertFalse(negative)
        self.assertAlmostEqual(-0.5, negative.min_eigenvalue)

    def test_validation_memoized(self):
        """
        the report is computed once per tolerance
        """
        op = Operator.identity(2)
        self.assertIs(validate_projector(op), validate_projector(op))
        self.assertIsNot(validate_projector(op, 1e-3), validate_projector(op))

    def test_heisenberg_projector(self):
        """
        U†PU for the identity, Hadamard and Pauli-X
        """
        p0 = Operator.from_ket(qubit_ket("0"))
        self.assertTrue(heisenberg_projector(p0, Operator.identity(2)).is_close(p0))
        plus = Operator.from_ket(qubit_ket("+"))
        self.assertTrue(heisenberg_projector(p0, HADAMARD).is_close(plus))
        one = Operator.from_ket(qubit_ket("1"))
        self.assertTrue(heisenberg_projector(p0, PAULI_X).is_close(one))
        with self.assertRaises(ValidationError):
            heisenberg_projector(p0, [[1, 1], [0, 1]])

    def test_heisenberg_spectrum(self):
        """
        conjugation keeps the spectrum {0,1} of a projector
        """
        rng = np.random.default_rng(42)
        for dim in [2, 3, 5, 8]:
            u = random_unitary(rng, dim)
            self.assertTrue(validate_unitary(u))
            p = Operator(np.diag([1.0] * (dim // 2) + [0.0] * (dim - dim // 2)))
            result = heisenberg_projector(p, u)
            self.assertTrue(validate_projector(result))
            eigenvalues = result.eigenvalues()
            self.assertTrue(
                np.allclose(np.sort(np.diag(p.matrix).real), eigenvalues, atol=1e-10)
            )

    def test_born_probability(self):
        """
        the Born rule Tr(Pρ)
        """
        p0 = Operator.from_ket(qubit_ket("0"))
        p1 = Operator.from_ket(qubit_ket("1"))
        self.assertEqual(1.0, born_probability(p0, p0))
        self.assertEqual(0.0, born_probability(p1, p0))
        self.assertClose(0.5, born_probability(p0, Operator.from_ket(qubit_ket("+"))))
        with self.assertRaises(DimensionError):
            born_probability(p0, Operator.identity(4) * 0.25)
        with self.assertRaises(ValidationError):
            born_probability(Operator([[0, 1], [0, 0]]), p0)

    def test_born_sums_to_one(self):
        """
        Σ_k Tr(P_k ρ) = 1 for complete decompositions
        """
        rng = np.random.default_rng(7)
        for n_qubits in [1, 2, 3]:
            rho = random_density(rng, 2**n_qubits)
            for basis in ["x", "y", "z"]:
                decomposition = qubit_basis(basis, n_qubits - 1, n_qubits)
                total = sum(born_probability(p, rho) for p in decomposition)
                self.assertClose(1.0, total)

    def test_clamp_probability(self):
        self.assertEqual(1.0, clamp_probability(1.0 + 1e-12))
        self.assertEqual(0.0, clamp_probability(-1e-12))
        self.assertEqual(0.25, clamp_probability(0.25))
        with self.assertRaises(NumericalIntegrityError):
            clamp_probability(1.001)
        with self.assertRaises(NumericalIntegrityError):
            clamp_probability(-0.001)

    def test_projective_decomposition(self):
        """
        orthogonality and completeness are checked at construction
        """
        z = qubit_basis("z")
        self.assertEqual(("0", "1"), z.labels)
        self.assertEqual(1, z.index_of("1"))
        with self.assertRaises(ValidationError):
            z.index_of("+")
        p0 = Operator.from_ket(qubit_ket("0"))
        plus = Operator.from_ket(qubit_ket("+"))
        with self.assertRaises(ValidationError):
            ProjectiveDecomposition([p0])
        with self.assertRaises(ValidationError):
            ProjectiveDecomposition([p0, plus])
        with self.assertRaises(ValidationError):
            ProjectiveDecomposition([p0, Operator.from_ket(qubit_ket("1"))], ["a", "a"])
        trivial = ProjectiveDecomposition.trivial(4, "A")
        self.assertEqual(1, len(trivial))

    def test_embed(self):
        """
        1 ⊗ |1⟩⟨1| ⊗ 1 projects onto the states with the middle qubit 1
        """
        one = Operator.from_ket(qubit_ket("1"))
        embedded = embed(one, 1, 3)
        self.assertEqual(8, embedded.dim)
        self.assertEqual(
            [0, 0, 1, 1, 0, 0, 1, 1], list(np.diag(embedded.matrix).real.astype(int))
        )
        with self.assertRaises(DimensionError):
            embed(one, 3, 3)

    def test_qubit_ket(self):
        ket = qubit_ket("0+")
        self.assertTrue(np.allclose([1 / np.sqrt(2), 1 / np.sqrt(2), 0, 0], ket))
        with self.assertRaises(ValidationError):
            qubit_ket("2")

    def test_trace_cyclicity(self):
        """
        Tr(AB) = Tr(BA) on random small matrices
        """
        rng = np.random.default_rng(3)
        for _ in range(20):
            dim = int(rng.integers(1, 9))
            a = Operator(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
            b = Operator(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
            self.assertTrue(abs((a @ b).trace() - (b @ a).trace()) <= 1e-12)

    def test_tolerance(self):
        self.assertEqual(Tolerance(1e-10, 1e-8), Tolerance())
        self.assertEqual(Tolerance(1e-6, 1e-6), Tolerance.uniform(1e-6))
        with self.assertRaises(ValidationError):
            Tolerance(-1.0)
