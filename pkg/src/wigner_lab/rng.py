"""Deterministic random-stream derivation for parallel Monte Carlo.

Every source of randomness in the package is a counter-based Philox stream
keyed by a tuple of non-negative integer labels, e.g. ``(master_seed, trial)``.
Distinct label tuples give statistically independent streams, and a fixed
tuple reproduces the same bit stream regardless of process, worker count, or
execution order.  Within a stream, the n-th variate is a pure function of the
key and the draw position (the Philox counter), so trials can be generated in
any order or on any worker.
"""

from __future__ import annotations

import numpy as np

# Fixed sub-stream tags, so derived streams never collide with trial indices.
TAG_FRAME = 0x4652414D45  # frame construction
TAG_BOOTSTRAP = 0x424F4F54  # bootstrap resampling inside report statistics


def stream(labels: tuple[int, ...]) -> np.random.Generator:
    """Return the Generator for the stream keyed by ``labels``.

    Labels must be non-negative integers.  The key material is derived with
    numpy's SeedSequence entropy pooling, which is a stable, documented
    algorithm, feeding a Philox counter-based bit generator.
    """
    for lab in labels:
        if lab < 0:
            raise ValueError("stream labels must be non-negative integers")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(tuple(int(x) for x in labels))))


def trial_stream(master_seed: int, trial: int) -> np.random.Generator:
    """Stream used for trial ``trial`` of a study with the given master seed."""
    return stream((master_seed, trial))
