import numpy as np


def exception_details(e):
    return {'exception_type': e.__class__.__name__, 'exception_message': str(e), 'exception_args': [str(arg) for arg in e.args]}


def derive_seed(master_seed, *counters):
    """Counter-based split of a master seed; adding counters never perturbs earlier streams."""
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(c) for c in counters))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def relative_error(value, reference):
    value = np.asarray(value, dtype=float)
    reference = np.asarray(reference, dtype=float)
    scale = np.maximum(np.abs(reference), np.finfo(float).tiny)
    return np.abs(value - reference) / scale
