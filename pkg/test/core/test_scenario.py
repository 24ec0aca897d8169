import os
import shutil
import tempfile
import unittest

from cutfsci.core.generator import RectangleMeshGenerator, parse_edge_tags
from cutfsci.core.mesh import write_solid_mesh
from cutfsci.core.scenario import (build_problem, build_scheme, build_solid_mesh, parse_config, parse_config_text,
                                   resolve_scenario, serialize_config, shipped_scenarios)
from cutfsci.core.timefunction import ConstantFunction, RampFunction
from cutfsci.exception import ConfigurationError
from cutfsci.log import get_logger

logger = get_logger()

MINIMAL = """\
[scenario]
name = minimal

[body.block]
id = 1
generator = rectangle
x_range = 0.0, 1.0
y_range = 0.0, 1.0
nx = 2
ny = 2
edge_tags = bottom=dirichlet, top=neumann
youngs_modulus = 10
poisson_ratio = 0.3

[body.block.dirichlet.bottom]
x = 0
y = 0

[body.block.neumann.top]
y = ramp(0.0, -0.5)
"""


class TestShippedScenarios(unittest.TestCase):

    def test_all_parse(self):
        scenarios = shipped_scenarios()
        self.assertTrue({'dry_contact', 'poiseuille', 'squeeze_demo', 'stamp_coarse', 'stamp_fine', 'stamp_incpen',
                         'stamp_noslip', 'stamp_slip'} <= set(scenarios))
        for name, path in scenarios.items():
            config = parse_config(path)
            logger.debug(f"{name}: {config.description}")
            self.assertEqual(config.name, name)
            self.assertNotIn('#', config.description)
            self.assertTrue(config.description)

    def test_serialize_round_trip(self):
        for name, path in shipped_scenarios().items():
            config = parse_config(path)
            again = parse_config_text(serialize_config(config), base_dir=config.base_dir)
            self.assertEqual(again, config, name)

    def test_build_problems(self):
        for name in ('dry_contact', 'poiseuille', 'stamp_coarse'):
            config = parse_config(shipped_scenarios()[name])
            problem = build_problem(config)
            self.assertEqual(problem.has_fluid, config.has_fluid)
            build_scheme(config)

    def test_dry_contact_problem(self):
        problem = build_problem(parse_config(shipped_scenarios()['dry_contact']))
        self.assertEqual(sorted(problem.materials), [1, 2])
        self.assertEqual(problem.rigid_bodies, {})
        self.assertEqual(len(problem.solid_dirichlet), 3)
        self.assertEqual(len(problem.solid_neumann), 1)
        self.assertFalse(problem.has_fluid)
        self.assertEqual(problem.mesh.n_elements, 16 + 20)

    def test_poiseuille_problem(self):
        problem = build_problem(parse_config(shipped_scenarios()['poiseuille']))
        self.assertEqual(sorted(problem.rigid_bodies), [1, 2])
        self.assertEqual(sorted(problem.cutting_bodies), [1, 2])
        self.assertEqual(problem.materials, {})
        self.assertEqual({b.side for b in problem.fluid_boundaries}, {'left', 'right'})

    def test_resolve(self):
        self.assertEqual(resolve_scenario('dry_contact'), shipped_scenarios()['dry_contact'])
        with self.assertRaises(ConfigurationError):
            resolve_scenario('no_such_scenario')


class TestParseConfig(unittest.TestCase):

    def test_minimal_with_defaults(self):
        config = parse_config_text(MINIMAL)
        self.assertEqual(config.name, 'minimal')
        self.assertFalse(config.has_fluid)
        self.assertEqual(config.newton.tolerance, 1e-8)
        self.assertEqual(config.newton.max_iterations, 50)
        self.assertEqual(config.interface.gamma_f0, 10.0)
        self.assertIsNone(config.interface.gamma_t0)
        self.assertEqual(config.geometry.island_ratio, 2.0)
        self.assertEqual(config.output.prefix, 'run')
        body = config.bodies[0]
        self.assertEqual(body.generator_params['edge_tags'], parse_edge_tags('bottom=dirichlet, top=neumann'))
        loads = {load.kind: load for load in body.loads}
        self.assertEqual(loads['dirichlet'].components['x'], ConstantFunction(0.0))
        self.assertEqual(loads['neumann'].components['y'], RampFunction(0.0, -0.5))

    def test_overrides(self):
        text = MINIMAL + "\n[newton]\nmax_iterations = 7\n\n[geometry]\ninterface_order = 3\n"
        config = parse_config_text(text)
        self.assertEqual(config.newton.max_iterations, 7)
        self.assertEqual(config.interface.interface_order, 3)

    def test_key_outside_section(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text("name = lost\n" + MINIMAL)
        self.assertEqual(ctx.exception.line, 1)

    def test_syntax_error(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text(MINIMAL + "\n[time]\nthis line has no separator\n")
        self.assertIsNotNone(ctx.exception.line)

    def test_unknown_key(self):
        text = MINIMAL.replace("name = minimal", "name = minimal\ncolor = red")
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text(text)
        self.assertEqual(ctx.exception.key_path, 'scenario.color')
        self.assertEqual(ctx.exception.line, 3)

    def test_unknown_section(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text(MINIMAL + "\n[fluids]\ndensity = 1\n")
        self.assertEqual(ctx.exception.key_path, 'fluids')

    def test_invalid_value(self):
        text = MINIMAL.replace("nx = 2", "nx = two")
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text(text)
        self.assertEqual(ctx.exception.key_path, 'body.block.nx')

    def test_invalid_time_function(self):
        text = MINIMAL.replace("ramp(0.0, -0.5)", "wave(1)")
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text(text)
        self.assertEqual(ctx.exception.key_path, 'body.block.neumann.top.y')

    def test_bad_schedule(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text(MINIMAL + "\n[time]\nschedule = 1.0:0.1; 0.5:0.1\n")
        self.assertEqual(ctx.exception.key_path, 'time.schedule')
        self.assertEqual(ctx.exception.line, MINIMAL.count('\n') + 3)

    def test_invalid_interface_mode(self):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text(MINIMAL + "\n[interface]\ntangential = sticky\n")
        self.assertEqual(ctx.exception.key_path, 'interface.tangential')

    def test_semantic_errors(self):
        cases = [
            MINIMAL.replace("youngs_modulus = 10\n", ""),
            MINIMAL.replace("poisson_ratio = 0.3", "poisson_ratio = 0.3\nrigid = true"),
            MINIMAL.replace("generator = rectangle", "generator = hexagon"),
            MINIMAL.replace("[body.block.dirichlet.bottom]", "[body.other.dirichlet.bottom]"),
            MINIMAL + "\n[grid]\norigin = 0, 0\nextent = 1, 1\nnx = 2\nny = 2\n",
            MINIMAL + "\n[output]\nflow_boundaries = left\n",
            "[scenario]\nname = empty\n",
        ]
        for text in cases:
            with self.assertRaises(ConfigurationError):
                parse_config_text(text)

    def test_dirichlet_side_needs_section(self):
        text = MINIMAL + "\n[grid]\norigin = 0, 0\nextent = 2, 2\nnx = 2\nny = 2\nleft = dirichlet\n" \
                         "\n[fluid]\ndensity = 1\nviscosity = 1\n"
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config_text(text)
        self.assertEqual(ctx.exception.key_path, 'grid.left')

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            parse_config('./no/such/scenario.ini')


class TestMeshFileBody(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        mesh = RectangleMeshGenerator(x_range=(0.0, 1.0), y_range=(0.0, 0.5), nx=3, ny=1,
                                      edge_tags=parse_edge_tags('bottom=dirichlet')).generate(1)
        write_solid_mesh(mesh, os.path.join(self.tmp_dir, 'block.mesh'))

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_relative_mesh_path(self):
        path = os.path.join(self.tmp_dir, 'scenario.ini')
        with open(path, 'w') as f:
            f.write("[scenario]\nname = from_file\n\n[body.plate]\nid = 4\nmesh = block.mesh\n"
                    "youngs_modulus = 1\npoisson_ratio = 0.2\n\n[body.plate.dirichlet.bottom]\ny = 0\n")
        config = parse_config(path)
        mesh = build_solid_mesh(config)
        self.assertEqual(mesh.n_elements, 3)
        self.assertEqual(set(mesh.bodies), {4})
        self.assertEqual(len(mesh.edge_set_nodes('plate.bottom')), 4)
        build_problem(config)


if __name__ == '__main__':
    unittest.main()
