"""Default resource budgets.

``SFTLAB_BUDGET`` (an integer) overrides the node budget of every
backtracking search; the state and alphabet budgets scale with it when set.
"""

import os

SEARCH_NODES = 2_000_000
TRANSFER_STATES = 300_000
ALPHABET_SIZE = 200_000


def _env_budget():
    raw = os.environ.get("SFTLAB_BUDGET")
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"SFTLAB_BUDGET must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError("SFTLAB_BUDGET must be positive")
    return value


def search_nodes(explicit=None):
    if explicit is not None:
        return explicit
    env = _env_budget()
    return SEARCH_NODES if env is None else env


def transfer_states(explicit=None):
    if explicit is not None:
        return explicit
    env = _env_budget()
    return TRANSFER_STATES if env is None else env


def alphabet_size(explicit=None):
    if explicit is not None:
        return explicit
    env = _env_budget()
    return ALPHABET_SIZE if env is None else env
