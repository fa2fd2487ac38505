"""Attitude bookkeeping for a single deliberation.

Participants and ideas arrive over time and receive dense integer ids in
arrival order; ids are never reused. Attitudes are ternary (approve,
disapprove, unknown) and live in a sparse map keyed by (participant, idea);
any cell never written reads as unknown. A dense int8 mirror of the map is
kept in sync so numeric consumers get arrays without rebuilding them.

All mutation is expected to come from a single writer. Readers that need a
stable view take a :meth:`AttitudeMatrix.snapshot`, which is frozen and can
be handed to other threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FrozenMatrixError, IdentityError, UndefinedRateError

ParticipantId = int
IdeaId = int


class Attitude(Enum):
    """Ternary stance of a participant toward an idea."""

    APPROVE = 1
    DISAPPROVE = 0
    UNKNOWN = -1

    @property
    def numeric(self) -> float | None:
        """1.0 for approve, 0.0 for disapprove, None when unknown."""
        if self is Attitude.UNKNOWN:
            return None
        return float(self.value)

    @classmethod
    def from_numeric(cls, value: float | int | None) -> "Attitude":
        if value is None:
            return cls.UNKNOWN
        return cls(int(value))


@dataclass(frozen=True)
class Idea:
    """An opaque text contribution. The text is never analyzed."""

    id: IdeaId
    text: str
    author: ParticipantId | None = None


@dataclass(frozen=True)
class ApprovalSet:
    """The ideas a participant currently approves of."""

    participant: ParticipantId
    ideas: frozenset[IdeaId]


class AttitudeMatrix:
    """Dynamic sparse participants-by-ideas matrix of ternary attitudes.

    Tracks, besides the attitudes themselves: which participants are still
    active, how often each idea has been served to participants (its
    exposure), and an audit log of overwritten attitudes.
    """

    def __init__(self) -> None:
        self._entries: dict[tuple[int, int], Attitude] = {}
        self._codes = np.empty((0, 0), dtype=np.int8)
        self._ideas: list[Idea] = []
        self._n = 0
        self._active: set[int] = set()
        self._exposure: list[int] = []
        self._audit_log: list[tuple[int, int, Attitude, Attitude]] = []
        self._frozen = False

    # -- identity checks -------------------------------------------------

    def _check_writable(self) -> None:
        if self._frozen:
            raise FrozenMatrixError("snapshots are immutable")

    def _check_participant(self, i: int) -> None:
        if not 0 <= i < self._n:
            raise IdentityError(f"unknown participant {i}")

    def _check_idea(self, p: int) -> None:
        if not 0 <= p < len(self._ideas):
            raise IdentityError(f"unknown idea {p}")

    # -- growth and churn -------------------------------------------------

    def add_participant(self) -> ParticipantId:
        """Register a new participant; returns its dense id."""
        self._check_writable()
        i = self._n
        grown = np.full((self._n + 1, self.n_ideas), -1, dtype=np.int8)
        grown[: self._n] = self._codes
        self._codes = grown
        self._n += 1
        self._active.add(i)
        return i

    def add_idea(self, text: str, author: ParticipantId | None = None) -> IdeaId:
        """Append a new idea column, all unknown, exposure zero.

        ``author`` is optional so that initiator-seeded or imported ideas
        can exist without a contributing participant.
        """
        self._check_writable()
        if author is not None:
            self._check_participant(author)
        p = len(self._ideas)
        grown = np.full((self._n, p + 1), -1, dtype=np.int8)
        grown[:, :p] = self._codes
        self._codes = grown
        self._ideas.append(Idea(id=p, text=text, author=author))
        self._exposure.append(0)
        return p

    def depart(self, i: ParticipantId) -> None:
        """Mark a participant inactive. Their recorded attitudes remain."""
        self._check_writable()
        self._check_participant(i)
        if i not in self._active:
            raise IdentityError(f"participant {i} is not active")
        self._active.discard(i)

    # -- attitude writes --------------------------------------------------

    def record_attitude(self, i: ParticipantId, p: IdeaId, attitude: Attitude, *, served: bool = False) -> None:
        """Set cell (i, p). Overwrites are allowed and logged.

        Exposure of idea ``p`` goes up when the record answers a served
        query, and also whenever an unknown cell becomes known through any
        other path, so exposure never falls below the number of known
        entries in the column.
        """
        self._check_writable()
        self._check_idea(p)
        if not 0 <= i < self._n or i not in self._active:
            raise IdentityError(f"participant {i} is unknown or inactive")
        if not isinstance(attitude, Attitude):
            raise IdentityError(f"not an attitude: {attitude!r}")
        old = self._entries.get((i, p), Attitude.UNKNOWN)
        if attitude is Attitude.UNKNOWN:
            self._entries.pop((i, p), None)
        else:
            self._entries[(i, p)] = attitude
        self._codes[i, p] = attitude.value
        if old is not Attitude.UNKNOWN and attitude is not old:
            self._audit_log.append((i, p, old, attitude))
        if served or (old is Attitude.UNKNOWN and attitude is not Attitude.UNKNOWN):
            self._exposure[p] += 1

    def note_exposure(self, p: IdeaId, count: int = 1) -> None:
        """Count a serving of idea ``p`` that produced no answer."""
        self._check_writable()
        self._check_idea(p)
        if count < 0:
            raise IdentityError("exposure increments are non-negative")
        self._exposure[p] += count

    # -- reads ------------------------------------------------------------

    def get(self, i: ParticipantId, p: IdeaId) -> Attitude:
        self._check_participant(i)
        self._check_idea(p)
        return self._entries.get((i, p), Attitude.UNKNOWN)

    def approval_set(self, i: ParticipantId) -> ApprovalSet:
        """Exactly the ideas participant ``i`` has approved."""
        self._check_participant(i)
        approved = np.flatnonzero(self._codes[i] == 1)
        return ApprovalSet(participant=i, ideas=frozenset(int(p) for p in approved))

    def column_counts(self, p: IdeaId) -> tuple[int, int]:
        """(approvals, responses) in column ``p``."""
        self._check_idea(p)
        col = self._codes[:, p]
        return int((col == 1).sum()), int((col >= 0).sum())

    def column_counts_all(self) -> tuple[np.ndarray, np.ndarray]:
        """(approvals, responses) per idea, as two length-m arrays."""
        codes = self._codes
        return (codes == 1).sum(axis=0), (codes >= 0).sum(axis=0)

    def column_mean(self, p: IdeaId) -> float | None:
        """Mean of the known numeric values in column ``p``; None if none."""
        approvals, responses = self.column_counts(p)
        if responses == 0:
            return None
        return approvals / responses

    def completion_rate(self) -> float:
        """Fraction of known cells among all n * m cells."""
        total = self._n * self.n_ideas
        if total == 0:
            raise UndefinedRateError("completion rate is undefined on an empty matrix")
        return len(self._entries) / total

    def snapshot(self) -> "AttitudeMatrix":
        """Frozen copy; later mutations of the live matrix do not affect it."""
        snap = AttitudeMatrix()
        snap._entries = dict(self._entries)
        snap._codes = self._codes.copy()
        snap._ideas = list(self._ideas)
        snap._n = self._n
        snap._active = set(self._active)
        snap._exposure = list(self._exposure)
        snap._audit_log = list(self._audit_log)
        snap._frozen = True
        return snap

    # -- numeric views ----------------------------------------------------

    def codes(self) -> np.ndarray:
        """Dense int8 view: 1 approve, 0 disapprove, -1 unknown."""
        return self._codes.copy()

    def known_mask(self) -> np.ndarray:
        return self._codes >= 0

    def approvals(self) -> np.ndarray:
        """Dense boolean approvals; unknown counts as not approved."""
        return self._codes == 1

    def to_dense(self) -> np.ndarray:
        """Dense float matrix with NaN where unknown."""
        out = self._codes.astype(float)
        out[self._codes < 0] = np.nan
        return out

    # -- properties -------------------------------------------------------

    @property
    def n_participants(self) -> int:
        return self._n

    @property
    def n_ideas(self) -> int:
        return len(self._ideas)

    @property
    def shape(self) -> tuple[int, int]:
        return self._n, len(self._ideas)

    @property
    def ideas(self) -> tuple[Idea, ...]:
        return tuple(self._ideas)

    @property
    def active_participants(self) -> frozenset[int]:
        return frozenset(self._active)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def exposure_count(self, p: IdeaId) -> int:
        self._check_idea(p)
        return self._exposure[p]

    @property
    def exposures(self) -> np.ndarray:
        return np.array(self._exposure, dtype=np.int64)

    @property
    def total_exposure(self) -> int:
        return int(sum(self._exposure))

    @property
    def audit_log(self) -> tuple[tuple[int, int, Attitude, Attitude], ...]:
        return tuple(self._audit_log)

    @property
    def n_known(self) -> int:
        return len(self._entries)

    def known_items(self) -> dict[tuple[int, int], Attitude]:
        """Copy of the sparse map (known cells only)."""
        return dict(self._entries)

    # -- construction helpers ----------------------------------------------

    @classmethod
    def from_dense(cls, rows, texts: list[str] | None = None) -> "AttitudeMatrix":
        """Build a matrix from nested values 1 / 0 / None (or Attitude).

        Every row becomes an active participant; idea texts default to
        ``idea <j>``.
        """
        rows = [list(r) for r in rows]
        m = len(rows[0]) if rows else (len(texts) if texts else 0)
        matrix = cls()
        if texts is None:
            texts = [f"idea {j}" for j in range(m)]
        if len(texts) != m:
            raise IdentityError("texts length does not match the number of columns")
        for text in texts:
            matrix._ideas.append(Idea(id=len(matrix._ideas), text=text, author=None))
            matrix._exposure.append(0)
        matrix._codes = np.full((0, m), -1, dtype=np.int8)
        for row in rows:
            if len(row) != m:
                raise IdentityError("ragged rows")
            i = matrix.add_participant()
            for p, value in enumerate(row):
                att = value if isinstance(value, Attitude) else Attitude.from_numeric(value)
                if att is not Attitude.UNKNOWN:
                    matrix.record_attitude(i, p, att)
        return matrix

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        """Attitude-content equality: same shape and same known cells."""
        if not isinstance(other, AttitudeMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __repr__(self) -> str:
        return (
            f"AttitudeMatrix(n={self._n}, m={self.n_ideas}, "
            f"known={len(self._entries)}, active={len(self._active)})"
        )
