import unittest

import numpy as np

from cutfsci.core.assembly import SystemAccumulator
from cutfsci.core.coupling import CASES, FREE, InterfaceParams, assemble_tangential_coupling
from cutfsci.core.cutcell import SIDE_DRY, SIDE_FS
from cutfsci.core.fluid import FluidParams
from cutfsci.core.generator import RectangleMeshGenerator, parse_edge_tags
from cutfsci.core.material import NeoHookeMaterial
from cutfsci.core.mesh import build_structured_grid, merge_solid_meshes
from cutfsci.core.postproc import nearest_node
from cutfsci.core.scenario import build_problem, parse_config, shipped_scenarios
from cutfsci.core.solver import TimeScheme, advance_time_step
from cutfsci.core.state import FluidState, SolidState, StepContext, SystemState
from cutfsci.core.system import (CoupledProblem, apply_dirichlet, assemble_system, residual_norms,
                                 transfer_to_snapshot, update_geometry)
from cutfsci.core.timefunction import ConstantFunction
from cutfsci.exception import ConfigurationError

ALL_COUPLING = parse_edge_tags('bottom=coupling, right=coupling, top=coupling, left=coupling')


def block(body, x_range, y_range, nx=2, ny=2, tags=ALL_COUPLING):
    return RectangleMeshGenerator(x_range=x_range, y_range=y_range, nx=nx, ny=ny, edge_tags=tags).generate(body)


def zero_state(problem):
    return SystemState(0.0, SolidState.zeros(problem.mesh.n_nodes), FluidState.zeros(problem.n_grid_nodes))


def fd_jacobian(problem, snapshot, x, previous, context, forced_cases=None, step=1e-6):
    columns = []
    for j in range(len(x)):
        shift = np.zeros_like(x)
        shift[j] = step
        plus, _ = assemble_system(problem, snapshot, x + shift, previous, context, forced_cases=forced_cases)
        minus, _ = assemble_system(problem, snapshot, x - shift, previous, context, forced_cases=forced_cases)
        columns.append((plus.residual - minus.residual) / (2.0 * step))
    return np.column_stack(columns)


class TestCoupledProblem(unittest.TestCase):

    def test_grid_and_fluid_go_together(self):
        mesh = block(1, (0.0, 1.0), (0.0, 1.0))
        with self.assertRaises(ConfigurationError):
            CoupledProblem(mesh=mesh, materials={1: NeoHookeMaterial(10.0, 0.3)},
                           grid=build_structured_grid((0.0, 0.0), (1.0, 1.0), 2, 2))

    def test_missing_material(self):
        with self.assertRaises(ConfigurationError):
            CoupledProblem(mesh=block(1, (0.0, 1.0), (0.0, 1.0)), materials={})

    def test_unknown_cutting_body(self):
        with self.assertRaises(ConfigurationError):
            CoupledProblem(mesh=block(1, (0.0, 1.0), (0.0, 1.0)), materials={1: NeoHookeMaterial(10.0, 0.3)},
                           cutting_bodies=[7])


class TestImmersedBlock(unittest.TestCase):
    """Elastic block inside a small fluid grid."""

    def setUp(self):
        self.problem = CoupledProblem(
            mesh=block(1, (0.32, 0.61), (0.27, 0.58)),
            materials={1: NeoHookeMaterial(10.0, 0.3, density=1.0)},
            grid=build_structured_grid((0.0, 0.0), (1.0, 1.0), 6, 6),
            fluid=FluidParams(density=1.0, viscosity=0.1),
            cutting_bodies=[1])
        self.n_solid = self.problem.mesh.n_nodes
        self.snapshot = update_geometry(self.problem, np.zeros((self.n_solid, 2)), FluidState.zeros(49), 0.1)
        self.dofmap = self.snapshot.dofmap

    def random_iterate(self, seed=3):
        rng = np.random.default_rng(seed)
        x = np.zeros(self.dofmap.n_dofs)
        x[:self.dofmap.fluid_offset] = 1e-3 * rng.standard_normal(self.dofmap.fluid_offset)
        block_ = 0.1 * rng.standard_normal((len(self.dofmap.fluid_nodes), 3))
        x[self.dofmap.fluid_offset:] = block_.ravel()
        return x

    def test_snapshot(self):
        samples = self.snapshot.samples
        self.assertGreater(len(samples), 0)
        self.assertTrue(np.all(samples.sides == SIDE_FS))
        self.assertTrue(np.all(samples.partner_edges == -1))
        np.testing.assert_allclose(samples.omega, 1.0)
        self.assertAlmostEqual(samples.weights.sum(), 2 * (0.29 + 0.31))
        self.assertEqual(self.dofmap.n_dofs, 2 * self.n_solid + 3 * len(self.dofmap.fluid_nodes))
        self.assertLess(self.snapshot.cut_state.volume.weights.sum(), 1.0)
        self.assertAlmostEqual(self.snapshot.cut_state.volume.weights.sum(), 1.0 - 0.29 * 0.31)

    def check_jacobian(self, context, forced_cases=None):
        x = self.random_iterate()
        previous = zero_state(self.problem)
        acc, _ = assemble_system(self.problem, self.snapshot, x, previous, context, forced_cases=forced_cases)
        analytic = acc.matrix().toarray()
        numeric = fd_jacobian(self.problem, self.snapshot, x, previous, context, forced_cases)
        scale = np.abs(analytic).max()
        self.assertLess(np.abs(analytic - numeric).max() / scale, 1e-5)

    def test_jacobian_steady(self):
        self.check_jacobian(StepContext(time=0.0))

    def test_jacobian_transient(self):
        self.check_jacobian(StepContext(time=0.1, dt=0.1, theta=0.7))

    def test_jacobian_with_solid_branch(self):
        forced = ['III'] * len(self.snapshot.samples)
        self.check_jacobian(StepContext(time=0.1, dt=0.1), forced)

    def test_no_partner_gives_fluid_cases(self):
        x = self.random_iterate()
        _, evaluation = assemble_system(self.problem, self.snapshot, x, zero_state(self.problem),
                                        StepContext(time=0.0))
        self.assertTrue(np.all(np.isinf(evaluation.indicator)))
        self.assertEqual(set(evaluation.cases), {'I'})

    def test_residual_norms_skip_constrained_dofs(self):
        residual = np.ones(self.dofmap.n_dofs)
        self.dofmap.constrain(np.arange(self.dofmap.fluid_offset), 0.0)
        norms = residual_norms(self.dofmap, residual)
        self.assertEqual(norms['solid'], 0.0)
        self.assertAlmostEqual(norms['momentum'], 1.0)
        self.assertAlmostEqual(norms['continuity'], 1.0)

    def test_transfer_keeps_common_nodes(self):
        fluid = FluidState.zeros(49)
        fluid.p[:] = np.arange(49.0)
        moved = np.zeros((self.n_solid, 2))
        moved[:, 0] = 0.05
        snapshot = update_geometry(self.problem, moved, fluid, 0.1)
        transferred = transfer_to_snapshot(fluid, self.dofmap.active_fluid_nodes, snapshot)
        common = self.dofmap.active_fluid_nodes & snapshot.dofmap.active_fluid_nodes
        np.testing.assert_allclose(transferred.p[common], fluid.p[common])


class TestMinContinuity(unittest.TestCase):
    """Elastic block hovering over a rigid base: fluid and solid branches meet at C = 0."""

    def setUp(self):
        base = block(1, (-0.2, 1.2), (-0.5, 0.23), nx=4, ny=2, tags=parse_edge_tags('top=coupling'))
        top = block(2, (0.33, 0.67), (0.28, 0.61))
        self.problem = CoupledProblem(
            mesh=merge_solid_meshes([("base", base), ("block", top)]),
            materials={2: NeoHookeMaterial(100.0, 0.3)},
            grid=build_structured_grid((0.0, 0.0), (1.0, 1.0), 10, 10),
            fluid=FluidParams(density=1.0, viscosity=0.1),
            cutting_bodies=[1, 2],
            rigid_bodies={1: (ConstantFunction(0.0), ConstantFunction(0.0))})
        n = self.problem.mesh.n_nodes
        self.snapshot = update_geometry(self.problem, np.zeros((n, 2)), FluidState.zeros(121), None)
        samples = self.snapshot.samples
        self.bottom = (samples.bodies == 2) & (samples.normals[:, 1] < -0.99)

    def test_bottom_samples_see_the_base(self):
        samples = self.snapshot.samples
        self.assertTrue(np.any(self.bottom))
        self.assertTrue(np.all(samples.partner_edges[self.bottom] >= 0))
        self.assertTrue(np.all(samples.sides[self.bottom] == SIDE_FS))
        np.testing.assert_allclose(samples.omega[self.bottom], 1.0)

    def test_branches_agree(self):
        samples = self.snapshot.samples
        dofmap = self.snapshot.dofmap
        penalty = samples.gamma_s[self.bottom]
        np.testing.assert_allclose(penalty, penalty[0])
        pressure = -penalty[0] * 0.05
        fluid = FluidState.zeros(121)
        fluid.p[:] = pressure
        x = dofmap.gather(np.zeros((self.problem.mesh.n_nodes, 2)), fluid)
        previous = zero_state(self.problem)
        context = StepContext(time=0.0)

        acc, evaluation = assemble_system(self.problem, self.snapshot, x, previous, context)
        np.testing.assert_allclose(evaluation.gap.value[self.bottom], 0.05, atol=1e-12)
        np.testing.assert_allclose(evaluation.fluid_branch.value[self.bottom],
                                   evaluation.solid_branch.value[self.bottom], rtol=1e-10)
        np.testing.assert_allclose(evaluation.indicator[self.bottom], 0.0, atol=1e-9)

        fsi = np.full(len(samples), 'I', dtype=object)
        contact = fsi.copy()
        contact[self.bottom] = 'III'
        with_fsi, _ = assemble_system(self.problem, self.snapshot, x, previous, context, forced_cases=fsi)
        with_contact, _ = assemble_system(self.problem, self.snapshot, x, previous, context, forced_cases=contact)
        scale = np.abs(with_fsi.residual).max()
        self.assertLess(np.abs(with_fsi.residual - with_contact.residual).max(), 1e-10 * scale)

    def test_rigid_samples_are_fluid_cases(self):
        samples = self.snapshot.samples
        _, evaluation = assemble_system(self.problem, self.snapshot, np.zeros(self.snapshot.dofmap.n_dofs),
                                        zero_state(self.problem), StepContext(time=0.0))
        self.assertTrue(np.all(evaluation.cases[samples.rigid] == 'I'))

    def test_rigid_motion_is_prescribed(self):
        dofmap = self.snapshot.dofmap
        apply_dirichlet(self.problem, dofmap, 0.0)
        base_nodes = self.problem.mesh.nodes_of_body(1)
        self.assertTrue(np.all(dofmap.dirichlet_mask[2 * base_nodes]))
        self.assertFalse(np.any(dofmap.dirichlet_mask[2 * self.problem.mesh.nodes_of_body(2)]))


class TestDryProblem(unittest.TestCase):

    def test_dry_snapshot(self):
        problem = build_problem(parse_config(shipped_scenarios()['dry_contact']))
        n = problem.mesh.n_nodes
        snapshot = update_geometry(problem, np.zeros((n, 2)), FluidState.zeros(0), None)
        self.assertEqual(snapshot.dofmap.n_dofs, 2 * n)
        self.assertTrue(np.all(snapshot.samples.sides == SIDE_DRY))
        acc, evaluation = assemble_system(problem, snapshot, np.zeros(2 * n), zero_state(problem),
                                          StepContext(time=0.0))
        self.assertTrue(set(evaluation.cases) <= {'II', FREE})
        np.testing.assert_allclose(evaluation.fluid_branch.value, 0.0)
        self.assertEqual(acc.residual.shape, (2 * n,))

    def test_separated_blocks_carry_no_contact_cases(self):
        problem = build_problem(parse_config(shipped_scenarios()['dry_contact']))
        n = problem.mesh.n_nodes
        u = np.zeros((n, 2))
        u[problem.mesh.nodes_of_body(2), 1] = 0.05
        snapshot = update_geometry(problem, u, FluidState.zeros(0), None)
        acc, evaluation = assemble_system(problem, snapshot, u.ravel(), zero_state(problem), StepContext(time=0.0))
        self.assertTrue(np.all(evaluation.gap.value[evaluation.gap_valid] > 0.0))
        self.assertEqual(snapshot.samples.case_counts(evaluation.cases), {case: 0 for case in CASES})
        self.assertTrue(np.all(evaluation.cases == FREE))
        self.assertEqual(np.abs(acc.groups.get('interface_contact', np.zeros(1))).max(), 0.0)


class TestStampGeometry(unittest.TestCase):

    def test_initial_cases_before_contact(self):
        problem = build_problem(parse_config(shipped_scenarios()['stamp_coarse']))
        n = problem.mesh.n_nodes
        snapshot = update_geometry(problem, np.zeros((n, 2)), FluidState.zeros(problem.n_grid_nodes), 0.01)
        self.assertIn(SIDE_DRY, set(snapshot.samples.sides))
        x = np.zeros(snapshot.dofmap.n_dofs)
        _, evaluation = assemble_system(problem, snapshot, x, zero_state(problem), StepContext(time=0.0, dt=0.01))
        counts = snapshot.samples.case_counts(evaluation.cases)
        self.assertGreater(counts['I'], 0)
        self.assertEqual([counts['II'], counts['III'], counts['IV']], [0, 0, 0])

    def test_stamp_sinks_until_contact(self):
        config = parse_config(shipped_scenarios()['stamp_coarse'])
        problem = build_problem(config)
        scheme = TimeScheme(theta=config.time.theta, schedule=[(20.0, 1.0), (420.0, 2.0)], t0=config.time.t0)
        probe = nearest_node(problem.mesh, config.output.probe)
        state = zero_state(problem)
        heights, onset = [], None
        for time, dt in scheme.steps():
            result = advance_time_step(problem, state, time, dt, scheme.theta, config.newton)
            state = result.state
            counts = result.snapshot.samples.case_counts(result.evaluation.cases)
            if counts['II'] + counts['III'] > 0:
                onset = time
                break
            heights.append(state.solid.u[probe, 1])
        self.assertIsNotNone(onset)
        self.assertLessEqual(onset, 420.0)
        self.assertGreater(len(heights), 1)
        self.assertTrue(np.all(np.diff(heights) < 0.0))


class TestTangentialLimits(unittest.TestCase):
    """Tangential interface terms of an elastic block immersed in a 6x6 grid."""

    def assemble(self, tangential, v_full=None):
        problem = CoupledProblem(
            mesh=block(1, (0.32, 0.61), (0.27, 0.58)),
            materials={1: NeoHookeMaterial(10.0, 0.3, density=1.0)},
            grid=build_structured_grid((0.0, 0.0), (1.0, 1.0), 6, 6),
            fluid=FluidParams(density=1.0, viscosity=0.1),
            cutting_bodies=[1], interface=InterfaceParams(tangential=tangential))
        n_solid = problem.mesh.n_nodes
        snapshot = update_geometry(problem, np.zeros((n_solid, 2)), FluidState.zeros(49), 0.1)
        rng = np.random.default_rng(11)
        if v_full is None:
            v_full = rng.standard_normal((49, 2))
        p_full = rng.standard_normal(49)
        velocity = rng.standard_normal((n_solid, 2))
        acc = SystemAccumulator(snapshot.dofmap.n_dofs)
        assemble_tangential_coupling(acc, snapshot.dofmap, snapshot.samples, velocity, v_full, p_full,
                                     problem.fluid, StepContext(time=0.1, dt=0.1))
        return problem, snapshot, acc, v_full, velocity

    def test_perfect_slip_transmits_no_tangential_force(self):
        _, snapshot, acc, _, _ = self.assemble('slip')
        self.assertTrue(np.all(np.isinf(snapshot.samples.slip)))
        solid = slice(0, snapshot.dofmap.fluid_offset)
        self.assertLess(np.abs(acc.residual[solid]).max(), 1e-12)
        self.assertLess(np.abs(acc.groups['interface_fsi']).max(), 1e-12)
        matrix = acc.matrix().toarray()
        self.assertLess(np.abs(matrix[solid]).max(initial=0.0), 1e-12)

    def test_perfect_slip_ignores_tangential_slip_velocity(self):
        uniform = np.tile([0.7, -0.4], (49, 1))
        _, _, acc, _, _ = self.assemble('slip', v_full=uniform)
        self.assertLess(np.abs(acc.residual).max(), 1e-12)

    def test_no_slip_matches_direct_nitsche_terms(self):
        problem, snapshot, acc, v_full, velocity = self.assemble('noslip')
        samples = snapshot.samples
        self.assertTrue(np.all(samples.slip == 0.0))
        mu = problem.fluid.viscosity
        penalty = mu * samples.gamma_t / samples.h
        vel_dofs, _ = samples.fluid_dofs(snapshot.dofmap)
        own_dofs = samples.solid_dofs(snapshot.dofmap)
        udot = samples.solid.values(velocity)
        expected = np.zeros(snapshot.dofmap.n_dofs)
        for k in np.nonzero(samples.has_fluid)[0]:
            n = samples.normals[k]
            projector = np.eye(2) - np.outer(n, n)
            shape, grad = samples.fluid_shape[k], samples.fluid_grad[k]
            nodal = v_full[samples.fluid_nodes[k]]
            grad_v = nodal.T @ grad
            traction = projector @ (mu * (grad_v + grad_v.T) @ n)
            slip = projector @ (shape @ nodal - udot[k])
            force = traction + penalty * slip
            weight = samples.weights[k]
            for a in range(4):
                dn = grad[a] @ n
                for i in range(2):
                    adjoint = mu * (slip[i] * dn + (grad[a] @ slip) * n[i])
                    expected[vel_dofs[k, 2 * a + i]] += weight * (shape[a] * force[i] - adjoint)
                    expected[own_dofs[k, 2 * a + i]] -= weight * samples.solid.shape[k, a] * force[i]
        scale = np.abs(expected).max()
        self.assertGreater(scale, 0.0)
        np.testing.assert_allclose(acc.residual, expected, rtol=0.0, atol=1e-12 * scale)


if __name__ == '__main__':
    unittest.main()
