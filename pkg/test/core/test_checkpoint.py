import os
import shutil
import tempfile
import unittest

import numpy as np

from cutfsci.core.checkpoint import CHECKPOINT_VERSION, checkpoint_path, load_checkpoint, save_checkpoint
from cutfsci.core.state import FluidState, SolidState, SystemState
from cutfsci.exception import CheckpointError


def sample_state():
    rng = np.random.default_rng(11)
    solid = SolidState(rng.standard_normal((5, 2)), rng.standard_normal((5, 2)), rng.standard_normal((5, 2)))
    fluid = FluidState(rng.standard_normal((9, 2)), rng.standard_normal(9), rng.standard_normal((9, 2)),
                       rng.random(9) > 0.5)
    active = rng.random(9) > 0.3
    return SystemState(time=1.25, solid=solid, fluid=fluid, step=17, info={'active_nodes': active})


class TestCheckpoint(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_path(self):
        self.assertEqual(checkpoint_path('out', 'stamp', 42), os.path.join('out', 'stamp_checkpoint_000042.npz'))

    def test_round_trip(self):
        state = sample_state()
        path = save_checkpoint(checkpoint_path(self.tmp_dir, 'run', state.step), state)
        loaded = load_checkpoint(path, n_solid_nodes=5, n_grid_nodes=9)
        self.assertEqual(loaded.time, 1.25)
        self.assertEqual(loaded.step, 17)
        np.testing.assert_array_equal(loaded.solid.u, state.solid.u)
        np.testing.assert_array_equal(loaded.solid.acceleration, state.solid.acceleration)
        np.testing.assert_array_equal(loaded.fluid.v, state.fluid.v)
        np.testing.assert_array_equal(loaded.fluid.has_value, state.fluid.has_value)
        np.testing.assert_array_equal(loaded.info['active_nodes'], state.info['active_nodes'])

    def test_without_active_nodes(self):
        state = sample_state()
        state.info = {}
        path = save_checkpoint(os.path.join(self.tmp_dir, 'nested', 'plain.npz'), state)
        self.assertEqual(load_checkpoint(path).info, {})

    def test_missing_file(self):
        with self.assertRaises(CheckpointError):
            load_checkpoint(os.path.join(self.tmp_dir, 'missing.npz'))

    def test_version_mismatch(self):
        path = save_checkpoint(os.path.join(self.tmp_dir, 'old.npz'), sample_state())
        with np.load(path) as payload:
            arrays = {name: payload[name] for name in payload.files}
        arrays['version'] = np.array(CHECKPOINT_VERSION + 1)
        with open(path, 'wb') as f:
            np.savez(f, **arrays)
        with self.assertRaises(CheckpointError) as ctx:
            load_checkpoint(path)
        self.assertIn('version', str(ctx.exception))

    def test_corrupt_file(self):
        path = os.path.join(self.tmp_dir, 'broken.npz')
        with open(path, 'wb') as f:
            np.savez(f, version=np.array(CHECKPOINT_VERSION), time=np.array(0.0))
        with self.assertRaises(CheckpointError):
            load_checkpoint(path)

    def test_size_mismatch(self):
        path = save_checkpoint(os.path.join(self.tmp_dir, 'size.npz'), sample_state())
        with self.assertRaises(CheckpointError):
            load_checkpoint(path, n_solid_nodes=6)
        with self.assertRaises(CheckpointError):
            load_checkpoint(path, n_solid_nodes=5, n_grid_nodes=10)


if __name__ == '__main__':
    unittest.main()
