import hashlib

import numpy as np


def derive_seed(master, *parts):
    """Stable 63-bit seed from a master seed and any identifying parts.

    Independent of call order and process, so parallel and sequential runs
    draw the same random streams.
    """
    key = "/".join([str(int(master))] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def rng_for(master, *parts):
    return np.random.default_rng(derive_seed(master, *parts))
