# -*- coding: utf-8 -*-
"""Checkpoints of converged states as numpy archives."""
import os

import numpy as np

from .state import FluidState, SolidState, SystemState
from ..exception import CheckpointError
from ..log import get_logger

logger = get_logger()

CHECKPOINT_VERSION = 1
_ARRAYS = ('u', 'velocity', 'acceleration', 'v', 'p', 'rate', 'has_value')


def checkpoint_path(directory: str, prefix: str, step: int) -> str:
    return os.path.join(directory, f"{prefix}_checkpoint_{step:06d}.npz")


def save_checkpoint(path: str, state: SystemState) -> str:
    payload = {
        'version': np.array(CHECKPOINT_VERSION),
        'time': np.array(state.time),
        'step': np.array(state.step),
        'u': state.solid.u,
        'velocity': state.solid.velocity,
        'acceleration': state.solid.acceleration,
        'v': state.fluid.v,
        'p': state.fluid.p,
        'rate': state.fluid.rate,
        'has_value': state.fluid.has_value,
    }
    active = state.info.get('active_nodes')
    if active is not None:
        payload['active_nodes'] = np.asarray(active, dtype=bool)
    directory = os.path.dirname(path)
    try:
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'wb') as f:
            np.savez(f, **payload)
    except OSError as e:
        raise CheckpointError(f"Cannot write checkpoint {path}: {e}")
    logger.info(f"Checkpoint written: {path} (t={state.time:.6g}, step={state.step})")
    return path


def load_checkpoint(path: str, n_solid_nodes: int = None, n_grid_nodes: int = None) -> SystemState:
    """Read a checkpoint, optionally checking it against the problem size."""
    if not os.path.isfile(path):
        raise CheckpointError(f"Checkpoint not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as payload:
            version = int(payload['version'])
            if version != CHECKPOINT_VERSION:
                raise CheckpointError(f"Checkpoint {path} has format version {version}, "
                                      f"expected {CHECKPOINT_VERSION}")
            arrays = {name: np.array(payload[name]) for name in _ARRAYS}
            time = float(payload['time'])
            step = int(payload['step'])
            active = np.array(payload['active_nodes']) if 'active_nodes' in payload.files else None
    except CheckpointError:
        raise
    except (KeyError, ValueError, OSError) as e:
        raise CheckpointError(f"Corrupt checkpoint {path}: {e}")

    if n_solid_nodes is not None and arrays['u'].shape != (n_solid_nodes, 2):
        raise CheckpointError(f"Checkpoint {path} has {len(arrays['u'])} solid nodes, problem has {n_solid_nodes}")
    if n_grid_nodes is not None and arrays['p'].shape != (n_grid_nodes,):
        raise CheckpointError(f"Checkpoint {path} has {len(arrays['p'])} grid nodes, problem has {n_grid_nodes}")
    solid = SolidState(arrays['u'], arrays['velocity'], arrays['acceleration'])
    fluid = FluidState(arrays['v'], arrays['p'], arrays['rate'], arrays['has_value'].astype(bool))
    info = {'active_nodes': active} if active is not None else {}
    logger.info(f"Restarting from {path} (t={time:.6g}, step={step})")
    return SystemState(time=time, solid=solid, fluid=fluid, step=step, info=info)
