"""Algorithm constants and the explicit cost model for polylog factors."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

from .errors import InputError


@dataclass(frozen=True)
class Config:
    """Every tunable constant of a run.

    ``None`` for ``phi_target``/``epsilon_target``/``kappa_route`` means the
    n-dependent default: ``1/log2(n)^2``, ``1/log2(n)`` and ``log2(n)^3``.
    """

    p: int = 4
    beta: float = 2.0
    gamma: float = 8.0
    gamma_prime: float = 8.0
    phi_target: float | None = None
    epsilon_target: float | None = None
    kappa_bar: float = 1.0
    kappa_prime: float = 1.0
    kappa: float = 1.0
    c_exp: float = 3.0
    kappa_route: float | None = None
    route_pre_exp: float = 0.001
    decomp_exp: float = 0.001
    W: int = 2
    B: int = 1
    avg_degree_const: float = 0.125
    crossing_incidence_const: float = 1.0
    received_volume_const: float = 1.0
    cover_degree_const: float = 0.5
    partition_retries: int = 20
    mix_tolerance: float = 0.25
    oracle_cap: int = 4096
    strict_claims: bool = True

    def __post_init__(self):
        if self.p < 3:
            raise InputError("p must be at least 3")
        if self.W < 1:
            raise InputError("W (words per message) must be at least 1")
        if self.B < 1:
            raise InputError("B (messages per edge per round) must be at least 1")
        if self.beta <= 1 or self.gamma <= 1 or self.gamma_prime <= 1:
            raise InputError("beta, gamma and gamma_prime must exceed 1")
        for name in ("phi_target", "epsilon_target"):
            val = getattr(self, name)
            if val is not None and not 0 < val < 1:
                raise InputError(f"{name} must lie in (0, 1)")
        for name in ("kappa_bar", "kappa_prime", "kappa", "c_exp", "avg_degree_const"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")
        if self.partition_retries < 1:
            raise InputError("partition_retries must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> Config:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def profile(cls, name: str, **overrides) -> Config:
        base = PROFILES.get(name)
        if base is None:
            raise InputError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}")
        return replace(base, **overrides)

    def to_dict(self) -> dict:
        return asdict(self)

    def with_(self, **changes) -> Config:
        return replace(self, **changes)

    # n-dependent quantities

    @staticmethod
    def log2n(n: int) -> float:
        return math.log2(max(n, 2))

    def phi_for(self, n: int) -> float:
        return self.phi_target if self.phi_target is not None else 1.0 / self.log2n(n) ** 2

    def epsilon_for(self, n: int) -> float:
        return self.epsilon_target if self.epsilon_target is not None else 1.0 / self.log2n(n)

    def polylog(self, n: int) -> float:
        return self.log2n(n) ** self.c_exp

    def kappa_route_for(self, n: int) -> float:
        return self.kappa_route if self.kappa_route is not None else self.log2n(n) ** 3

    def t_route_pre(self, n: int) -> int:
        return math.ceil(max(n, 1) ** self.route_pre_exp)

    def t_decomp(self, n: int) -> int:
        return math.ceil(math.ceil(max(n, 1) ** self.decomp_exp) * self.log2n(n) ** 3)

    def load_cap(self, n: int, p: int | None = None) -> float:
        """Per-unit-degree routing load allowed: kappa * n^(1-2/p) * log2(n)^c."""
        pp = self.p if p is None else p
        return self.kappa * n ** (1 - 2 / pp) * self.polylog(n)


PROFILES = {
    "desk": Config(beta=2.0),
    "faithful": Config(beta=32.0),
}
