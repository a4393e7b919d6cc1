"""
Created on 2026-10-11

@author: wf
"""
import numpy as np

from histories.errors import (
    ContractError,
    DimensionError,
    ResourceBudgetError,
    ValidationError,
)
from histories.history import (
    History,
    HistoryBudget,
    HistorySpace,
    TimeRange,
    class_operator,
    decoherence_functional,
    decoherence_matrix,
    decoherence_report,
    enumerate_histories,
)
from histories.models import hilbert_bernoulli_model
from histories.operators import (
    Operator,
    ProjectiveDecomposition,
    qubit_basis,
    qubit_ket,
)
from tests.base_histories import BaseHistoriesTest, random_decomposition, random_density


class TestHistory(BaseHistoriesTest):
    """
    test history spaces, class operators and the decoherence functional
    """

    def test_space_validation(self):
        rho = Operator.from_ket(qubit_ket("0"))
        z = qubit_basis("z")
        with self.assertRaises(ValidationError):
            HistorySpace(rho, [z, z], times=[2, 1])
        with self.assertRaises(ValidationError):
            HistorySpace(rho, [z], present=5)
        with self.assertRaises(DimensionError):
            HistorySpace(rho, [qubit_basis("z", 0, 2)])
        with self.assertRaises(ValidationError):
            HistorySpace(Operator.from_ket(qubit_ket("0")) * 2, [z])
        space = HistorySpace(rho, [z, z, z], times=[-1, 0, 1], present=0)
        self.assertEqual(TimeRange(0, 1), space.past_range())
        self.assertEqual(TimeRange(1, 2), space.present_range())
        self.assertEqual(TimeRange(2, 3), space.future_range())
        self.assertEqual(TimeRange(0, 2), space.range_of(-1, 0))

    def test_history_segments(self):
        space = self.x_then_z_space()
        h = space.history(["+", "0"])
        self.assertTrue(h.is_full)
        self.assertEqual((0, 0), h.indices)
        self.assertEqual("(+@1, 0@2)", str(h))
        past = space.past(["-"])
        self.assertEqual((1,), past.indices)
        self.assertFalse(past.is_full)
        self.assertTrue(space.future().is_empty)
        with self.assertRaises(ValidationError):
            History(space, 0, (2,))
        with self.assertRaises(ContractError):
            space.history(["+", "0", "1"])
        joined = past.union(space.present_event("1"))
        self.assertEqual(space.history(["-", "1"]), joined)
        self.assertIsNone(joined.union(space.history(["+"])))

    def test_class_operator(self):
        """
        the latest projector stands leftmost
        """
        space = self.x_then_z_space()
        p0 = Operator.from_ket(qubit_ket("0"))
        self.assertTrue(class_operator(space.present_event("0")).is_close(p0))
        self.assertTrue(class_operator(space.future()).is_close(Operator.identity(2)))
        c = class_operator(space.history(["+", "0"]))
        # |0⟩⟨0|·|+⟩⟨+| = (1/√2)|0⟩⟨+|
        expected = np.array([[0.5, 0.5], [0, 0]])
        self.assertTrue(np.allclose(expected, c.matrix, atol=1e-12))

    def test_enumerate_histories(self):
        space = self.x_then_z_space()
        self.assertEqual(4, len(enumerate_histories(space)))
        rho = Operator.identity(2) * 0.5
        z = qubit_basis("z")
        space3 = HistorySpace(rho, [z, z, z])
        self.assertEqual(8, len(enumerate_histories(space3)))
        empty = enumerate_histories(space3, TimeRange(1, 1))
        self.assertEqual(1, len(empty))
        self.assertTrue(empty[0].is_empty)
        rng = np.random.default_rng(5)
        three = random_decomposition(rng, 3, 3)
        mixed = HistorySpace(
            random_density(rng, 3), [random_decomposition(rng, 3, 2), three]
        )
        histories = enumerate_histories(mixed)
        self.assertEqual(
            [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)],
            [h.indices for h in histories],
        )
        with self.assertRaises(ContractError):
            enumerate_histories(mixed, TimeRange(0, 3))
        with self.assertRaises(ResourceBudgetError):
            enumerate_histories(space3, budget=HistoryBudget(max_histories=4))

    def test_decoherence_functional(self):
        """
        D((+,0),(-,0)) = 1/4 for the x-then-z space
        """
        space = self.x_then_z_space()
        a = space.history(["+", "0"])
        b = space.history(["-", "0"])
        self.assertClose(0.25, decoherence_functional(a, b, space).real)
        self.assertClose(0.0, decoherence_functional(a, b).imag)
        self.assertClose(0.25, decoherence_functional(a, a).real)
        single = self.single_time_space()
        z = single.history([0])
        if len(single.decompositions[0]) > 1:
            self.assertTrue(abs(decoherence_functional(z, single.history([1]))) < 1e-14)
        with self.assertRaises(ContractError):
            decoherence_functional(a, space.history(["+"]))

    def test_decoherence_matrix(self):
        space = self.x_then_z_space()
        histories, matrix = decoherence_matrix(space)
        self.assertEqual(4, len(histories))
        self.assertTrue(np.allclose(matrix, matrix.conj().T, atol=1e-12))
        self.assertClose(1.0, np.trace(matrix).real)

    def test_decoherence_report(self):
        """
        the x-then-z space fails, the Bernoulli model and single time spaces pass
        """
        report = decoherence_report(self.x_then_z_space())
        self.assertFalse(report.passes)
        self.assertClose(0.25, report.max_offdiag)
        self.assertIsNotNone(report.offender)
        if self.debug:
            print(report.to_dict())
        for N in range(1, 9):
            report = decoherence_report(hilbert_bernoulli_model(N, 0.3))
            self.assertTrue(report.passes)
            self.assertTrue(report.max_offdiag < 1e-14)
            self.assertEqual(2**N, report.n_histories)
        single = decoherence_report(self.single_time_space())
        self.assertTrue(single.passes)
        self.assertTrue(single.max_offdiag <= 1e-14)

    def test_report_blocks(self):
        """
        the blockwise scan gives the same report for any block size
        """
        space = self.x_then_z_space()
        whole = decoherence_report(space)
        interfering = {"(+@1, 0@2) (-@1, 0@2)", "(+@1, 1@2) (-@1, 1@2)"}
        for block_entries in [1, 8, 12]:
            report = decoherence_report(space, block_entries=block_entries)
            self.assertClose(whole.max_offdiag, report.max_offdiag, 1e-15)
            self.assertClose(
                whole.max_normalized_offdiag, report.max_normalized_offdiag, 1e-15
            )
            a, b = report.offender
            self.assertIn(f"{a} {b}", interfering)

    def test_report_budget(self):
        space = hilbert_bernoulli_model(4, 0.5)
        with self.assertRaises(ResourceBudgetError):
            decoherence_report(space, budget=HistoryBudget(max_bytes=1024))

    def test_from_dynamics(self):
        """
        a z measurement after one Hadamard step equals an x measurement
        """
        hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        rho = Operator.from_ket(qubit_ket("0"))
        z = qubit_basis("z")
        space = HistorySpace.from_dynamics(rho, hadamard, [z, z], times=[0, 1])
        x = qubit_basis("x")
        for p_evolved, p_x in zip(space.decompositions[1], x):
            self.assertTrue(p_evolved.is_close(p_x))
        self.assertTrue(space.decompositions[0][0].is_close(z[0]))

    def test_completeness(self):
        """
        the class operators of all full histories sum to the identity
        """
        rng = np.random.default_rng(11)
        for _ in range(10):
            dim = int(rng.integers(2, 6))
            decompositions = [random_decomposition(rng, dim) for _ in range(3)]
            space = HistorySpace(random_density(rng, dim), decompositions)
            total = sum(class_operator(h).matrix for h in enumerate_histories(space))
            self.assertTrue(np.max(np.abs(total - np.eye(dim))) <= 1e-10)

    def test_trivial_present(self):
        rho = Operator.identity(2) * 0.5
        space = HistorySpace(
            rho, [ProjectiveDecomposition.trivial(2, "A"), qubit_basis("z")], present=0
        )
        self.assertEqual(2, space.n_histories())
        self.assertEqual(("A",), space.present_event("A").labels)
