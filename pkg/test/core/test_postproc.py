import math
import unittest

import numpy as np

from cutfsci.core.generator import RectangleMeshGenerator, parse_edge_tags
from cutfsci.core.mesh import extract_interface
from cutfsci.core.postproc import (TimeSeriesRecord, boundary_flow_rate, flow_rate, flow_rate_errors, make_record,
                                   nearest_node, probe_displacement, reconstruct_traction, tributary_lengths)
from cutfsci.core.scenario import build_problem, parse_config, shipped_scenarios
from cutfsci.core.solver import solve_steady
from cutfsci.core.state import FluidState, SolidState, SystemState
from cutfsci.core.system import update_geometry
from cutfsci.exception import ConfigurationError

from .test_fluid import box_problem


class TestRecords(unittest.TestCase):

    def test_flow_rate_errors(self):
        record = TimeSeriesRecord(t=1.0, phi=2.0, phi_f=1.5, phi_s=1.25)
        self.assertEqual(flow_rate_errors(record), (0.75, 0.25))

    def test_row_order(self):
        record = TimeSeriesRecord(t=1.0, newton_iters=3, ndof=9, cases={'II': 4})
        self.assertEqual(record.row(), (1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3, 9, 0, 4, 0, 0))


class TestSolidProbes(unittest.TestCase):

    def setUp(self):
        self.mesh = RectangleMeshGenerator(x_range=(0.0, 2.0), y_range=(0.0, 1.0), nx=2, ny=1,
                                           edge_tags=parse_edge_tags('top=coupling')).generate(1)
        self.interface = extract_interface(self.mesh, np.zeros((6, 2)))

    def test_nearest_node(self):
        self.assertEqual(nearest_node(self.mesh, (1.9, 1.2)), 5)
        u = np.arange(12.0).reshape(6, 2)
        np.testing.assert_array_equal(probe_displacement(self.mesh, u, (0.1, -0.3)), [0.0, 1.0])

    def test_tributary_lengths(self):
        lengths = tributary_lengths(self.mesh, self.interface)
        np.testing.assert_allclose(lengths, [0.0, 0.0, 0.0, 0.5, 1.0, 0.5])

    def test_uniform_traction(self):
        # residual of a uniform traction t: -int N_a t ds
        residual = np.zeros(12)
        residual[2 * np.arange(3, 6) + 1] = 0.3 * np.array([0.5, 1.0, 0.5])
        traction = reconstruct_traction(self.mesh, self.interface, {'interface_contact': residual})
        np.testing.assert_array_equal(traction.nodes, [3, 4, 5])
        np.testing.assert_allclose(traction.overall, [[0.0, -0.3]] * 3)
        np.testing.assert_allclose(traction.fsi, 0.0)


class TestFlowRates(unittest.TestCase):

    def setUp(self):
        self.problem = box_problem(4)
        self.snapshot = update_geometry(self.problem, np.zeros((4, 2)), FluidState.zeros(25), None)
        fluid = FluidState.zeros(25)
        fluid.v[:, 0] = 2.0
        self.state = SystemState(0.0, SolidState.zeros(4), fluid)

    def test_uniform_flow(self):
        cut_state = self.snapshot.cut_state
        self.assertAlmostEqual(boundary_flow_rate(cut_state, self.state.fluid.v, ['left']), 2.0)
        self.assertAlmostEqual(flow_rate(self.snapshot, self.state, 'right'), 2.0)
        self.assertAlmostEqual(flow_rate(self.snapshot, self.state, ['left', 'right']), 0.0)
        self.assertAlmostEqual(flow_rate(self.snapshot, self.state, 'top'), 0.0)
        self.assertEqual(flow_rate(self.snapshot, self.state, 'interface'), 0.0)

    def test_invalid(self):
        with self.assertRaises(ConfigurationError):
            flow_rate(self.snapshot, self.state, 'front')
        with self.assertRaises(ConfigurationError):
            flow_rate(self.snapshot, self.state, 'left', source='solid')
        with self.assertRaises(ConfigurationError):
            flow_rate(self.snapshot, self.state, 'interface', source='pressure')


class TestDryContactPatch(unittest.TestCase):
    """Two stacked blocks under a uniform pressure: the contact traction equals the load."""

    @classmethod
    def setUpClass(cls):
        config = parse_config(shipped_scenarios()['dry_contact'])
        cls.problem = build_problem(config)
        n = cls.problem.mesh.n_nodes
        initial = SystemState(0.0, SolidState.zeros(n), FluidState.zeros(0))
        cls.result = solve_steady(cls.problem, initial, config.newton)
        cls.probe = nearest_node(cls.problem.mesh, config.output.probe)

    def test_contact_traction(self):
        snapshot = self.result.snapshot
        traction = reconstruct_traction(self.problem.mesh, snapshot.interface, self.result.accumulator.groups)
        lower = np.isin(traction.nodes, self.problem.mesh.nodes_of_body(1))
        self.assertTrue(np.any(lower))
        np.testing.assert_allclose(np.abs(traction.contact[lower, 1]), 0.1, rtol=1e-2)
        np.testing.assert_allclose(traction.fsi, 0.0, atol=1e-12)
        self.assertEqual(set(self.result.evaluation.cases), {'II'})

    def test_contact_forces_balance(self):
        mesh = self.problem.mesh
        force = -self.result.accumulator.groups['interface_contact'][:2 * mesh.n_nodes].reshape(-1, 2)
        lower = force[mesh.nodes_of_body(1)].sum(axis=0)
        upper = force[mesh.nodes_of_body(2)].sum(axis=0)
        self.assertAlmostEqual(abs(upper[1]), 0.1, delta=1e-3)
        self.assertAlmostEqual(abs(lower[1]), 0.1, delta=1e-3)
        np.testing.assert_allclose(lower + upper, 0.0, atol=2e-3)

    def test_compression(self):
        stretch = (-0.002 + math.sqrt(4.0 + 4e-6)) / 2.0
        u = self.result.state.solid.u[self.probe]
        self.assertAlmostEqual(u[1], 2.0 * (stretch - 1.0), delta=0.02 * 2.0 * (1.0 - stretch))
        self.assertAlmostEqual(u[0], 0.0, delta=1e-6)

    def test_record(self):
        record = make_record(self.result, (), self.probe)
        self.assertEqual(record.phi, 0.0)
        self.assertEqual(record.probe_uy, self.result.state.solid.u[self.probe, 1])
        self.assertEqual(record.cases.get('II', 0), len(self.result.snapshot.samples))
        self.assertEqual(record.ndof, 2 * self.problem.mesh.n_nodes)


if __name__ == '__main__':
    unittest.main()
