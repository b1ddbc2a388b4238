from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from app.core.config import (
    DEFAULT_PRUNE_SIZES,
    DEFAULT_PRUNE_UPDATES,
    DEFAULT_SIZES,
    DEFAULT_UPDATES,
    settings,
)
from app.core.errors import InvalidUpdateError
from app.core.graph_model import RankOneUpdate

BenchMode = Literal["accuracy", "runtime", "prune"]


class UpdateDescriptor(BaseModel):
    kind: Literal["selfloop", "edge"]
    i: int = Field(ge=1)
    j: int | None = None
    weight: float

    @model_validator(mode="after")
    def _check_nodes(self) -> "UpdateDescriptor":
        if self.kind == "edge" and (self.j is None or self.j <= self.i):
            raise ValueError(f"edge update needs i < j, got i={self.i} j={self.j}")
        if self.kind == "selfloop" and self.j is not None:
            raise ValueError("self-loop update takes a single node")
        if self.weight == 0.0:
            raise ValueError("update weight must be nonzero")
        return self

    @classmethod
    def parse(cls, text: str) -> "UpdateDescriptor":
        parts = text.strip().split(":")
        try:
            if parts[0] == "selfloop" and len(parts) == 3:
                return cls(kind="selfloop", i=int(parts[1]), weight=float(parts[2]))
            if parts[0] == "edge" and len(parts) == 4:
                return cls(kind="edge", i=int(parts[1]), j=int(parts[2]), weight=float(parts[3]))
        except ValueError as exc:
            raise InvalidUpdateError(f"invalid update {text!r}: {exc}") from exc
        raise InvalidUpdateError(
            f"invalid update {text!r}; expected selfloop:i:w or edge:i:j:w"
        )

    @property
    def label(self) -> str:
        if self.kind == "selfloop":
            return f"selfloop:{self.i}:{self.weight:g}"
        return f"edge:{self.i}:{self.j}:{self.weight:g}"

    def to_update(self, n: int) -> RankOneUpdate:
        if self.kind == "selfloop":
            return RankOneUpdate.self_loop(n, self.i, self.weight)
        assert self.j is not None
        return RankOneUpdate.edge(n, self.i, self.j, self.weight)


def parse_update(text: str, n: int) -> RankOneUpdate:
    return UpdateDescriptor.parse(text).to_update(n)


class BenchConfig(BaseModel):
    mode: BenchMode
    sizes: list[int] = Field(default_factory=list)
    trials: int = Field(default=settings.trials, ge=1)
    updates: list[UpdateDescriptor] = Field(default_factory=list)
    epsilon: float = Field(default=settings.epsilon, gt=0.0, lt=1.0)
    seed: int = Field(default=settings.seed, ge=0)
    ar_coefficient: float = Field(default=settings.ar_coefficient, gt=-1.0, lt=1.0)
    warmup: int = Field(default=settings.warmup, ge=0)
    cp: list[int] = Field(default_factory=list)
    threshold: float | None = settings.prune_threshold
    crossover: int = Field(default=settings.nmvp_crossover, ge=2)
    search_crossover: bool = True
    out: Path | None = None

    @field_validator("sizes")
    @classmethod
    def _check_sizes(cls, sizes: list[int]) -> list[int]:
        for n in sizes:
            if n < 2:
                raise ValueError(f"sizes must be >= 2, got {n}")
        return sizes

    @field_validator("cp")
    @classmethod
    def _check_cp(cls, cp: list[int]) -> list[int]:
        for c in cp:
            if c < 1:
                raise ValueError(f"c_p values must be >= 1, got {c}")
        return cp

    @model_validator(mode="after")
    def _apply_defaults(self) -> "BenchConfig":
        if not self.sizes:
            self.sizes = list(DEFAULT_PRUNE_SIZES if self.mode == "prune" else DEFAULT_SIZES)
        if not self.updates:
            texts = DEFAULT_PRUNE_UPDATES if self.mode == "prune" else DEFAULT_UPDATES
            self.updates = [UpdateDescriptor.parse(t) for t in texts]
        return self

    def cp_values(self, n: int) -> list[int]:
        if self.cp:
            return [c for c in self.cp if c <= n]
        return sorted({max(1, n // 4), max(1, n // 2), max(1, 3 * n // 4), n})
