"""Deterministic seed derivation for independent random streams."""

from __future__ import annotations

import numpy as np


def derive_seed(*keys: int | str) -> int:
    """Map a tuple of keys to a stable 32-bit seed.

    Strings are folded to integers first so call sites can use readable
    stream names, e.g. ``derive_seed(base, "fqi", day)``.
    """
    ints = []
    for k in keys:
        if isinstance(k, str):
            ints.append(int.from_bytes(k.encode(), "little") % (2 ** 63))
        else:
            ints.append(int(k))
    return int(np.random.SeedSequence(ints).generate_state(1)[0])
