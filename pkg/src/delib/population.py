"""Synthetic participant population with latent opinion structure.

Participants live at points in a low-dimensional latent space, drawn from
a mixture of Gaussians; ideas live in the same space, jittered around
their author's position. A participant approves an idea when their
distance to it, plus Gaussian response noise, falls inside the approval
radius. Because the latent state is known, the module can also hand out a
noise-free ground-truth matrix to score estimation quality against.

Everything is a pure function of (config, seed): churn, responses, and
arrivals each derive their generator from the seed plus the round index,
so whole trajectories replay exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IdentityError, ParameterError
from .matrix import Attitude

_MASK = (1 << 63) - 1

# stream tags keep the per-purpose generators disjoint
_TAG_INIT = 101
_TAG_RESPONSE = 202
_TAG_CHURN = 303
_TAG_IDEA = 404


def _rng(*entropy: int) -> np.random.Generator:
    return np.random.default_rng([int(e) & _MASK for e in entropy])


@dataclass(frozen=True)
class MixtureComponent:
    weight: float
    mean: tuple[float, ...]
    cov: float | tuple = 1.0


@dataclass(frozen=True)
class PopulationConfig:
    """JSON-friendly description of a synthetic population.

    ``mixture`` components carry a weight, a latent-space mean, and either
    a scalar variance or a full covariance matrix.
    """

    n0: int
    approval_radius: float
    latent_dim: int = 2
    mixture: tuple[MixtureComponent, ...] = (MixtureComponent(1.0, (0.0, 0.0)),)
    noise_sigma: float = 0.0
    arrival_rate: float = 0.0
    departure_prob: float = 0.0
    idea_jitter: float = 0.25
    seed: int = 0

    def validate(self) -> None:
        if self.n0 < 0:
            raise ParameterError("n0 must be non-negative")
        if self.latent_dim < 1:
            raise ParameterError("latent_dim must be positive")
        if self.approval_radius <= 0:
            raise ParameterError("approval_radius must be positive")
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be non-negative")
        if self.arrival_rate < 0:
            raise ParameterError("arrival_rate must be non-negative")
        if not 0.0 <= self.departure_prob <= 1.0:
            raise ParameterError("departure_prob must lie in [0, 1]")
        if self.idea_jitter < 0:
            raise ParameterError("idea_jitter must be non-negative")
        if not self.mixture:
            raise ParameterError("mixture needs at least one component")
        for component in self.mixture:
            if component.weight <= 0:
                raise ParameterError("mixture weights must be positive")
            if len(component.mean) != self.latent_dim:
                raise ParameterError("mixture mean length must equal latent_dim")

    @classmethod
    def from_dict(cls, raw: dict) -> "PopulationConfig":
        mixture = tuple(
            MixtureComponent(
                weight=float(c["weight"]),
                mean=tuple(float(x) for x in c["mean"]),
                cov=c.get("cov", 1.0) if isinstance(c.get("cov", 1.0), (int, float))
                else tuple(tuple(float(x) for x in row) for row in c["cov"]),
            )
            for c in raw["mixture"]
        )
        return cls(
            n0=int(raw["n0"]),
            approval_radius=float(raw["approval_radius"]),
            latent_dim=int(raw.get("latent_dim", 2)),
            mixture=mixture,
            noise_sigma=float(raw.get("noise_sigma", 0.0)),
            arrival_rate=float(raw.get("arrival_rate", 0.0)),
            departure_prob=float(raw.get("departure_prob", 0.0)),
            idea_jitter=float(raw.get("idea_jitter", 0.25)),
            seed=int(raw.get("seed", 0)),
        )

    def to_dict(self) -> dict:
        return {
            "n0": self.n0,
            "latent_dim": self.latent_dim,
            "mixture": [
                {
                    "weight": c.weight,
                    "mean": list(c.mean),
                    "cov": c.cov if isinstance(c.cov, (int, float)) else [list(r) for r in c.cov],
                }
                for c in self.mixture
            ],
            "approval_radius": self.approval_radius,
            "noise_sigma": self.noise_sigma,
            "arrival_rate": self.arrival_rate,
            "departure_prob": self.departure_prob,
            "idea_jitter": self.idea_jitter,
            "seed": self.seed,
        }


@dataclass
class PopulationModel:
    """Mutable latent state of one synthetic deliberation population."""

    config: PopulationConfig
    seed: int
    participant_positions: list[np.ndarray] = field(default_factory=list)
    bloc_labels: list[int] = field(default_factory=list)
    active: set[int] = field(default_factory=set)
    idea_positions: list[np.ndarray] = field(default_factory=list)
    idea_authors: list[int | None] = field(default_factory=list)

    @property
    def n_participants(self) -> int:
        return len(self.participant_positions)

    @property
    def n_ideas(self) -> int:
        return len(self.idea_positions)

    def _draw_position(self, rng: np.random.Generator) -> tuple[np.ndarray, int]:
        weights = np.array([c.weight for c in self.config.mixture], dtype=float)
        weights /= weights.sum()
        label = int(rng.choice(len(weights), p=weights))
        component = self.config.mixture[label]
        mean = np.asarray(component.mean, dtype=float)
        if isinstance(component.cov, (int, float)):
            position = mean + rng.standard_normal(self.config.latent_dim) * np.sqrt(float(component.cov))
        else:
            position = rng.multivariate_normal(mean, np.asarray(component.cov, dtype=float))
        return position, label

    def spawn_participant(self, rng: np.random.Generator) -> int:
        position, label = self._draw_position(rng)
        i = self.n_participants
        self.participant_positions.append(position)
        self.bloc_labels.append(label)
        self.active.add(i)
        return i

    def spawn_idea(self, author: int | None, rng: np.random.Generator) -> int:
        """New idea at its author's latent position plus Gaussian jitter."""
        if author is None:
            base, _ = self._draw_position(rng)
        else:
            if not 0 <= author < self.n_participants:
                raise IdentityError(f"unknown author {author}")
            base = self.participant_positions[author]
        position = base + rng.standard_normal(self.config.latent_dim) * self.config.idea_jitter
        p = self.n_ideas
        self.idea_positions.append(position)
        self.idea_authors.append(author)
        return p


@dataclass(frozen=True)
class GroundTruth:
    """Noise-free oracle view of the population at one instant."""

    matrix: np.ndarray        # (n, m) int8, 1 approve / 0 disapprove
    support: np.ndarray       # (m,) true approval rate over active participants
    blocs: np.ndarray         # (n,) mixture component per participant
    active: tuple[int, ...]


def generate_population(config: PopulationConfig, seed: int | None = None) -> PopulationModel:
    """Draw the initial participants; deterministic for a given seed."""
    config.validate()
    seed = config.seed if seed is None else seed
    model = PopulationModel(config=config, seed=seed)
    rng = _rng(seed, _TAG_INIT)
    for _ in range(config.n0):
        model.spawn_participant(rng)
    return model


def sample_attitude(model: PopulationModel, i: int, p: int, round_seed: int) -> Attitude:
    """Noisy approval response of participant i to idea p.

    Approve iff distance(i, p) + eps < approval_radius with
    eps ~ Normal(0, noise_sigma^2). Never returns unknown: abstention is a
    routing concern, not a response one. Deterministic per
    (model seed, round_seed, i, p).
    """
    if not 0 <= i < model.n_participants:
        raise IdentityError(f"unknown participant {i}")
    if not 0 <= p < model.n_ideas:
        raise IdentityError(f"unknown idea {p}")
    distance = float(np.linalg.norm(model.participant_positions[i] - model.idea_positions[p]))
    eps = 0.0
    if model.config.noise_sigma > 0:
        rng = _rng(model.seed, _TAG_RESPONSE, round_seed, i, p)
        eps = float(rng.normal(0.0, model.config.noise_sigma))
    return Attitude.APPROVE if distance + eps < model.config.approval_radius else Attitude.DISAPPROVE


def sample_attitudes(model: PopulationModel, pairs, round_seed: int) -> list[Attitude]:
    """Vectorized batch of responses for one round's query plan.

    Uses a single per-round noise stream over the pairs in plan order, so
    it is deterministic for a given plan but not cell-for-cell identical to
    per-pair :func:`sample_attitude` draws. At noise_sigma = 0 both paths
    equal the ground truth.
    """
    pairs = list(pairs)
    if not pairs:
        return []
    participants = np.array([model.participant_positions[i] for i, _ in pairs])
    ideas = np.array([model.idea_positions[p] for _, p in pairs])
    distances = np.sqrt(((participants - ideas) ** 2).sum(axis=1))
    if model.config.noise_sigma > 0:
        rng = _rng(model.seed, _TAG_RESPONSE, round_seed)
        distances = distances + rng.normal(0.0, model.config.noise_sigma, size=len(pairs))
    return [Attitude.APPROVE if d < model.config.approval_radius else Attitude.DISAPPROVE for d in distances]


def step_churn(model: PopulationModel, round_index: int, seed: int) -> tuple[set[int], set[int]]:
    """Apply one round of departures and Poisson arrivals to the model.

    Departures are Bernoulli per active participant; arrivals draw fresh
    positions from the mixture. Returns (arrivals, departures) as id sets.
    Deterministic per (round_index, seed).
    """
    rng = _rng(seed, _TAG_CHURN, round_index)
    ordered = sorted(model.active)
    draws = rng.random(len(ordered))
    departures = {i for i, u in zip(ordered, draws) if u < model.config.departure_prob}
    n_arrivals = int(rng.poisson(model.config.arrival_rate))
    arrivals = {model.spawn_participant(rng) for _ in range(n_arrivals)}
    model.active -= departures
    return arrivals, departures


def ground_truth(model: PopulationModel) -> GroundTruth:
    """Noise-free matrix and exact support rates over active participants."""
    n, m = model.n_participants, model.n_ideas
    if n and m:
        participants = np.array(model.participant_positions)
        ideas = np.array(model.idea_positions)
        distances = np.sqrt(((participants[:, None, :] - ideas[None, :, :]) ** 2).sum(axis=2))
        matrix = (distances < model.config.approval_radius).astype(np.int8)
    else:
        matrix = np.zeros((n, m), dtype=np.int8)
    active = tuple(sorted(model.active))
    if active and m:
        support = matrix[list(active)].mean(axis=0)
    else:
        support = np.full(m, np.nan)
    return GroundTruth(
        matrix=matrix,
        support=support,
        blocs=np.array(model.bloc_labels, dtype=int),
        active=active,
    )
