"""Synthetic expert-advice benchmark built from a Sylvester Hadamard matrix.

The 64 x 64 matrix minus its all-ones row gives 63 +-1 rows; appending their
negations gives 126 experts whose rewards balance out exactly over each
64-round period. ``k`` of them are then made slightly better than the rest.

Gap modes (entries ``h`` mapped to losses ``(1 - h) / 2``):

``"compress"`` (default)
    losses are rescaled to ``[gap, 1]`` and the good rows have ``gap``
    subtracted, so every entry stays in [0, 1] and a good row earns exactly
    ``gap`` more per round than its mirror.
``"clamp_loss"``
    subtract ``gap`` from the {0, 1} losses of the good rows and clamp at 0.
``"clamp_reward"``
    subtract ``gap`` from the {0, 1} rewards of every non-good row and clamp.
"""

import numpy as np

__all__ = ["sylvester_hadamard", "hadamard_expert_rows", "hadamard_experts", "ExpertsStream", "GAP_MODES", "check_orthogonal"]

GAP_MODES = ("compress", "clamp_loss", "clamp_reward")


def sylvester_hadamard(order):
    """Sylvester construction: ``H_{2n} = [[H, H], [H, -H]]`` from ``H_1 = [1]``."""
    if order < 1 or order & (order - 1):
        raise ValueError(f"order must be a power of 2, got {order!r}")
    H = np.ones((1, 1), dtype=np.int64)
    while H.shape[0] < order:
        H = np.block([[H, H], [H, -H]])
    return H


def check_orthogonal(H):
    """Raise unless distinct rows of ``H`` are orthogonal (``H H^T = n I``)."""
    n = H.shape[0]
    if not np.array_equal(H @ H.T, n * np.eye(n, dtype=H.dtype)):
        raise ValueError("Hadamard rows are not mutually orthogonal")


def hadamard_expert_rows(order=64):
    """Rows of the order-``order`` matrix without the constant row, then their negations."""
    H = sylvester_hadamard(order)
    check_orthogonal(H)
    rows = H[1:]
    return np.vstack([rows, -rows])


class ExpertsStream:
    """A (T, N) matrix of expert rewards in [0, 1] plus the indices of the good experts."""

    def __init__(self, rewards, good=()):
        rewards = np.asarray(rewards, dtype=float)
        if rewards.ndim != 2:
            raise ValueError("rewards must be a (T, N) matrix")
        if np.any(rewards < 0.0) or np.any(rewards > 1.0):
            raise ValueError("expert rewards must lie in [0, 1]")
        self.rewards = rewards
        self.good = np.asarray(sorted(good), dtype=int)

    @property
    def T(self):
        return self.rewards.shape[0]

    @property
    def N(self):
        return self.rewards.shape[1]

    def __iter__(self):
        return iter(self.rewards)

    def truncate(self, T):
        return ExpertsStream(self.rewards[:T], self.good)


def hadamard_experts(order=64, k=5, gap=0.025, T=32768, seed=0, mode="compress"):
    """Build the Hadamard expert stream.

    The ``k`` good rows are drawn without replacement from the 2 (order - 1)
    experts with ``numpy.random.default_rng(seed)``. Columns are tiled
    cyclically to ``T`` rounds.
    """
    if mode not in GAP_MODES:
        raise ValueError(f"unknown gap mode {mode!r}; choose from {GAP_MODES}")
    rows = hadamard_expert_rows(order)
    n = rows.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < {n}, got {k!r}")
    if not 0.0 <= gap < 1.0:
        raise ValueError("gap must be in [0, 1)")
    if T < 0:
        raise ValueError("T must be nonnegative")
    rng = np.random.default_rng(seed)
    good = np.sort(rng.choice(n, size=k, replace=False))
    is_good = np.zeros(n, dtype=bool)
    is_good[good] = True

    loss = (1.0 - rows) / 2.0  # (n, order) in {0, 1}
    if mode == "compress":
        loss = gap + (1.0 - gap) * loss
        loss[is_good] -= gap
        reward = 1.0 - loss
    elif mode == "clamp_loss":
        loss[is_good] = np.maximum(loss[is_good] - gap, 0.0)
        reward = 1.0 - loss
    else:
        reward = 1.0 - loss
        reward[~is_good] = np.maximum(reward[~is_good] - gap, 0.0)

    cols = np.arange(T) % order
    return ExpertsStream(np.ascontiguousarray(reward[:, cols].T), good)
