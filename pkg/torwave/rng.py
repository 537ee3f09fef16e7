"""
Counter-based random streams.

Every trial owns a Philox generator whose key is the master seed and whose
counter block starts at the trial index, so a trial's draws never depend on
which worker ran it or on what was drawn before it.
"""

import numpy as np

from .errors import ValidationError

SEED_LIMIT = 2**64
# counter word holding the trial index; word 0 advances as values are drawn
_TRIAL_WORD = 2


def check_seed(master_seed: int) -> int:
    seed = int(master_seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValidationError(f"master seed must be in [0, 2**64), got {master_seed}")
    return seed


def trial_generator(master_seed: int, trial_index: int) -> np.random.Generator:
    """
    Generator for one trial.

    Args:
        master_seed: 64-bit experiment seed
        trial_index: Non-negative trial number

    Returns:
        numpy Generator backed by Philox keyed on (master_seed, trial_index)
    """
    seed = check_seed(master_seed)
    if trial_index < 0:
        raise ValidationError(f"trial index must be non-negative, got {trial_index}")
    counter = np.zeros(4, dtype=np.uint64)
    counter[_TRIAL_WORD] = np.uint64(trial_index)
    key = np.array([seed, 0x746F7277], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def derive_seed(master_seed: int, tag: int) -> int:
    """Independent 64-bit seed for a named sub-experiment."""
    seed = check_seed(master_seed)
    state = np.random.SeedSequence([seed, int(tag)]).generate_state(1, np.uint64)
    return int(state[0])
