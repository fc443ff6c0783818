"""Ground types for preference learning over feature subsets.

Alternatives are subsets of a small feature ground set, stored as fixed-width
bit masks.  A model is a family of non-empty feature subsets; together with a
value function it induces an additive-with-interactions utility

    f(A) = sum of v_S over all S in the model with S contained in A.

Strict pairwise preferences ("left strictly preferred to right") are the
learning input; they can be derived from integer ratings.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

MAX_FEATURES = 20  # enumeration oracles and augmented vectors are exponential in n


class ConflictingRatings(ValueError):
    """Identical feature vectors carry unequal ratings.

    ``vectors`` lists one representative mask per colliding group.
    """

    def __init__(self, vectors: Sequence[int]):
        self.vectors = tuple(vectors)
        super().__init__(
            f"{len(self.vectors)} feature vector(s) carry conflicting ratings: "
            f"{[bin(v) for v in self.vectors]}"
        )


@dataclass(frozen=True)
class GroundSet:
    """The fixed set of binary features alternatives are built from."""

    names: tuple[str, ...]

    def __post_init__(self):
        if not 1 <= len(self.names) <= MAX_FEATURES:
            raise ValueError(f"feature count must be in 1..{MAX_FEATURES}")
        if len(set(self.names)) != len(self.names):
            raise ValueError("feature names must be unique")

    @property
    def n(self) -> int:
        return len(self.names)

    @classmethod
    def of_size(cls, n: int) -> "GroundSet":
        return cls(tuple(f"f{i + 1}" for i in range(n)))


@dataclass(frozen=True)
class Alternative:
    """A subset of the ground set, as an n-bit characteristic mask."""

    mask: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_FEATURES:
            raise ValueError(f"width must be in 1..{MAX_FEATURES}")
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError("mask does not fit the declared width")

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "Alternative":
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise ValueError(f"feature index {i} outside 0..{n - 1}")
            mask |= 1 << i
        return cls(mask, n)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Alternative":
        return cls.from_indices(len(bits), [i for i, b in enumerate(bits) if b])

    @classmethod
    def empty(cls, n: int) -> "Alternative":
        return cls(0, n)

    @classmethod
    def full(cls, n: int) -> "Alternative":
        return cls((1 << n) - 1, n)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def covers(self, s: "Alternative") -> bool:
        """True iff ``s`` is a subset of this alternative."""
        return s.mask & ~self.mask == 0

    def to_bits(self) -> tuple[int, ...]:
        return tuple(self.mask >> i & 1 for i in range(self.n))

    def label(self, ground: GroundSet) -> str:
        return "{" + ",".join(ground.names[i] for i in self.indices) + "}"


def indicator(s: Alternative, a: Alternative) -> int:
    """1 iff subset ``s`` is contained in alternative ``a``."""
    if s.n != a.n:
        raise ValueError("alternatives belong to different ground sets")
    return int(a.covers(s))


def _canonical_key(a: Alternative) -> tuple:
    # (|S|, i1, ..., ik) ordering; shared by every subset enumeration here.
    return (a.size, a.indices)


@dataclass(frozen=True)
class Model:
    """A family of distinct non-empty feature subsets (the parameter index set)."""

    n: int
    subsets: tuple[Alternative, ...]

    def __post_init__(self):
        seen = set()
        for s in self.subsets:
            if s.n != self.n:
                raise ValueError("subset width differs from model width")
            if s.mask == 0:
                raise ValueError("model subsets must be non-empty")
            if s.mask in seen:
                raise ValueError("duplicate subset in model")
            seen.add(s.mask)
        object.__setattr__(
            self, "subsets", tuple(sorted(self.subsets, key=_canonical_key))
        )

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "Model":
        return cls(n, tuple(Alternative(m, n) for m in masks))

    @property
    def deg(self) -> int:
        return max((s.size for s in self.subsets), default=0)

    @property
    def card(self) -> int:
        return len(self.subsets)

    @property
    def ws(self) -> int:
        return sum(s.size for s in self.subsets)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(s.mask for s in self.subsets)

    def __contains__(self, s: Alternative) -> bool:
        return any(t.mask == s.mask for t in self.subsets)

    def __iter__(self) -> Iterator[Alternative]:
        return iter(self.subsets)

    def __le__(self, other: "Model") -> bool:
        return set(self.masks) <= set(other.masks)


@dataclass(frozen=True)
class ValueFunction:
    """One real value per subset of a model, in the model's canonical order."""

    entries: tuple[tuple[Alternative, float], ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "entries",
            tuple(sorted(((s, float(v)) for s, v in self.entries),
                         key=lambda e: _canonical_key(e[0]))),
        )

    @classmethod
    def for_model(cls, model: Model, values: Sequence[float]) -> "ValueFunction":
        if len(values) != model.card:
            raise ValueError("one value per model subset required")
        return cls(tuple(zip(model.subsets, values)))

    def domain_masks(self) -> tuple[int, ...]:
        return tuple(s.mask for s, _ in self.entries)

    def as_mapping(self) -> Mapping[Alternative, float]:
        return dict(self.entries)

    def __getitem__(self, s: Alternative) -> float:
        for t, v in self.entries:
            if t.mask == s.mask:
                return v
        raise KeyError(s)


def evaluate(model: Model, v: ValueFunction, a: Alternative) -> float:
    """Utility of ``a``: sum of v_S over model subsets contained in ``a``."""
    if v.domain_masks() != model.masks:
        raise ValueError("value function domain does not match the model")
    if a.n != model.n:
        raise ValueError("alternative width differs from model width")
    return float(sum(val for s, val in v.entries if a.covers(s)))


@dataclass(frozen=True)
class PreferenceSet:
    """Ordered pairs (left, right) meaning left strictly preferred to right."""

    n: int
    pairs: tuple[tuple[Alternative, Alternative], ...]

    def __post_init__(self):
        seen: set[tuple[int, int]] = set()
        unique = []
        for a, b in self.pairs:
            if a.n != self.n or b.n != self.n:
                raise ValueError("pair width differs from preference-set width")
            if a.mask == b.mask:
                raise ValueError("a pair must relate two distinct feature vectors")
            if (b.mask, a.mask) in seen:
                raise ValueError("pair present in both orientations")
            key = (a.mask, b.mask)
            if key not in seen:
                seen.add(key)
                unique.append((a, b))
        object.__setattr__(self, "pairs", tuple(unique))

    @classmethod
    def from_masks(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "PreferenceSet":
        return cls(n, tuple((Alternative(a, n), Alternative(b, n)) for a, b in pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def pair_masks(self) -> tuple[tuple[int, int], ...]:
        return tuple((a.mask, b.mask) for a, b in self.pairs)

    def alternatives(self) -> tuple[Alternative, ...]:
        out, seen = [], set()
        for a, b in self.pairs:
            for x in (a, b):
                if x.mask not in seen:
                    seen.add(x.mask)
                    out.append(x)
        return tuple(out)

    def restricted_to(self, keep: Iterable[tuple[Alternative, Alternative]]) -> "PreferenceSet":
        return PreferenceSet(self.n, tuple(keep))


@dataclass(frozen=True)
class RatedDataset:
    """Alternatives with integer ratings on a declared 1..scale range."""

    n: int
    items: tuple[tuple[Alternative, int], ...]
    scale: int

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError("rating scale must be at least 1")
        for a, r in self.items:
            if a.n != self.n:
                raise ValueError("item width differs from dataset width")
            if not 1 <= r <= self.scale:
                raise ValueError(f"rating {r} outside 1..{self.scale}")

    def __len__(self) -> int:
        return len(self.items)


def derive_preferences(data: RatedDataset, on_conflict: str = "error") -> PreferenceSet:
    """Build the strict preference pairs implied by ratings.

    Items with identical feature vectors are merged first; if a merged group
    carries unequal ratings it is a conflict, handled per ``on_conflict``:
    ``"error"`` raises :class:`ConflictingRatings`, ``"drop"`` omits every
    pair touching a conflicting vector (the number dropped is logged).
    """
    if on_conflict not in ("error", "drop"):
        raise ValueError("on_conflict must be 'error' or 'drop'")
    by_mask: dict[int, set[int]] = {}
    order: list[int] = []
    for a, r in data.items:
        if a.mask not in by_mask:
            by_mask[a.mask] = set()
            order.append(a.mask)
        by_mask[a.mask].add(r)
    conflicts = [m for m in order if len(by_mask[m]) > 1]
    if conflicts:
        if on_conflict == "error":
            raise ConflictingRatings(conflicts)
        for m in conflicts:
            del by_mask[m]
        order = [m for m in order if m not in set(conflicts)]
        logger.warning(
            "dropped %d conflicting feature vector(s) before pairing", len(conflicts)
        )
    rating = {m: next(iter(rs)) for m, rs in by_mask.items()}
    pairs = [
        (Alternative(a, data.n), Alternative(b, data.n))
        for a, b in itertools.permutations(order, 2)
        if rating[a] > rating[b]
    ]
    return PreferenceSet(data.n, tuple(pairs))


def conflicting_groups(data: RatedDataset) -> list[tuple[int, tuple[int, ...]]]:
    """(mask, ratings) for each feature vector rated inconsistently."""
    by_mask: dict[int, list[int]] = {}
    for a, r in data.items:
        by_mask.setdefault(a.mask, []).append(r)
    return [
        (m, tuple(sorted(set(rs)))) for m, rs in by_mask.items() if len(set(rs)) > 1
    ]


# ---------------------------------------------------------------------------
# Vectorized helpers shared by the optimization and learning modules.
# ---------------------------------------------------------------------------

def subset_universe(n: int, max_size: int) -> list[int]:
    """All non-empty subset masks of size <= max_size, in (|S|, i1..ik) order."""
    masks = []
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(range(n), size):
            m = 0
            for i in combo:
                m |= 1 << i
            masks.append(m)
    return masks


def popcount(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr)


def indicator_matrix(alt_masks: np.ndarray, universe_masks: np.ndarray) -> np.ndarray:
    """(len(alts), len(universe)) 0/1 matrix of S-contained-in-A tests."""
    a = np.asarray(alt_masks, dtype=np.int64).reshape(-1, 1)
    u = np.asarray(universe_masks, dtype=np.int64).reshape(1, -1)
    return ((u & ~a) == 0).astype(np.float64)


def margin_matrix(prefs: PreferenceSet, universe_masks: Sequence[int]) -> np.ndarray:
    """Row per preference pair: indicator(left) - indicator(right)."""
    u = np.asarray(universe_masks, dtype=np.int64)
    left = np.asarray([a for a, _ in prefs.pair_masks], dtype=np.int64)
    right = np.asarray([b for _, b in prefs.pair_masks], dtype=np.int64)
    if len(prefs) == 0:
        return np.zeros((0, len(u)))
    return indicator_matrix(left, u) - indicator_matrix(right, u)
