"""Admission rules for adding an edge given the running prefix gains.

Three interchangeable policies decide whether the candidate edge y_i may be
added after deleting x_i, based on the prefix gain G_i = sum of
c(x_l) - c(y_l) up to step i:

STRICT        G_i must be positive at every step.
HOMOGENEOUS   a non-positive G_i is also allowed whenever G_{i-1} was
              positive (G_0 is assumed positive), so no two consecutive
              steps may carry non-positive gain.
TILTED        like HOMOGENEOUS, but a non-positive G_i is rejected when
              i-1 is a multiple of the search depth k unless G_{i-2} was
              positive, and the assumed sign of G_0 is inherited from the
              previous applied exchange instead of being always positive.

All functions are pure; the mutable per-run wrapper used by the search
engine lives at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

from .errors import StepIndexInvalid


class GainKind(Enum):
    STRICT = "strict"
    HOMOGENEOUS = "homogeneous"
    TILTED = "tilted"


@dataclass(frozen=True)
class GainPolicy:
    """Admission rule selector; k_period is the depth parameter of TILTED."""

    kind: GainKind
    k_period: int = 5

    def __post_init__(self) -> None:
        if self.kind is GainKind.TILTED and self.k_period < 2:
            raise ValueError("TILTED requires k_period >= 2")


@dataclass(frozen=True)
class GainState:
    """Sign memory threaded through a search run.

    violated:      the most recently admitted prefix gain was <= 0.
    prev_violated: the prefix gain admitted before that was <= 0.
    g0_positive:   assumed sign of G_0, carried across exchanges by TILTED.
    """

    violated: bool = False
    prev_violated: bool = False
    g0_positive: bool = True


def init_state(policy: GainPolicy) -> GainState:
    """Fresh state: no violation recorded, G_0 assumed positive."""
    return GainState()


def assumed_g0(policy: GainPolicy, state: GainState) -> int:
    """Sign sentinel standing in for G_0 when step 1 is evaluated."""
    if policy.kind is GainKind.TILTED and not state.g0_positive:
        return -1
    return 1


def path_start(policy: GainPolicy, state: GainState) -> GainState:
    """Per-path state seeded from the run-level carry-over.

    Both G_0 and G_{-1} are taken to have the assumed sign, so the violation
    flags start accordingly.
    """
    neg = policy.kind is GainKind.TILTED and not state.g0_positive
    return GainState(violated=neg, prev_violated=neg, g0_positive=state.g0_positive)


def admits(policy: GainPolicy, state: GainState, i: int, gain_i: int, gain_prev: int) -> bool:
    """Decide whether step i with prefix gain `gain_i` may be taken.

    `gain_prev` is G_{i-1}; for i == 1 the caller passes the assumed G_0
    (see :func:`assumed_g0`). `state` reflects the admitted steps before i.
    """
    if i < 1:
        raise StepIndexInvalid(f"step index must be >= 1, got {i}")
    if gain_i > 0:
        return True
    if policy.kind is GainKind.STRICT:
        return False
    if gain_prev <= 0:
        return False
    if policy.kind is GainKind.HOMOGENEOUS:
        return True
    # TILTED: the relaxation is withheld when i-1 hits a depth boundary,
    # unless the gain two steps back was positive.
    if (i - 1) % policy.k_period != 0:
        return True
    if i <= 2:
        return state.g0_positive
    return not state.prev_violated


def record(policy: GainPolicy, state: GainState, i: int, gain_i: int) -> GainState:
    """Account an admitted step: shift the violation flags."""
    if i < 1:
        raise StepIndexInvalid(f"step index must be >= 1, got {i}")
    return GainState(
        violated=gain_i <= 0,
        prev_violated=state.violated,
        g0_positive=state.g0_positive,
    )


def finish_move(policy: GainPolicy, state: GainState, prefix_gains: Sequence[int]) -> GainState:
    """Carry the assumed G_0 sign over an ended exchange (TILTED only).

    `prefix_gains` is the exchange's full ledger including the closing gain.
    The new sign is that of the last gain, or of the one before it when the
    exchange depth is a multiple of k_period.
    """
    if policy.kind is not GainKind.TILTED or not prefix_gains:
        return state
    depth = len(prefix_gains)
    if depth >= 2 and depth % policy.k_period == 0:
        last = prefix_gains[-2]
    else:
        last = prefix_gains[-1]
    return replace(state, g0_positive=last > 0)


class GainCursor:
    """Mutable run-scoped holder threading GainState through trials."""

    __slots__ = ("policy", "state")

    def __init__(self, policy: GainPolicy):
        self.policy = policy
        self.state = init_state(policy)

    def path_state(self) -> GainState:
        return path_start(self.policy, self.state)

    def move_applied(self, prefix_gains: Sequence[int]) -> None:
        self.state = finish_move(self.policy, self.state, prefix_gains)
