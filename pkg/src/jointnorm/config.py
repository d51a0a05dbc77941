"""Numerical tolerances and search settings shared by every module."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    """Tolerances, seeds and multi-start sizes.

    Every public routine accepts an optional ``cfg``; ``None`` means
    ``Config()``.  Use :meth:`with_` to derive modified copies.
    """

    seed: int = 0
    n_starts: int = 64
    # random starts for warm-started norm evaluations inside distance searches
    search_starts: int = 12
    max_iter: int = 3000
    # ascent stopping: value stagnation during searches, position step when polishing
    rtol_value: float = 1e-15
    xtol_polish: float = 1e-13

    tau_dual: float = 1e-9
    tau_cluster: float = 1e-7
    tau_norm: float = 1e-7
    tau_attain: float = 1e-7
    delta_sep: float = 1e-4
    tau_bj: float = 1e-6
    tau_cert: float = 1e-6
    tau_tie: float = 1e-7

    # use the max-formula shortcuts for outer exponent infinity
    fast_paths: bool = True
    # pattern/golden search resolution (relative to the a-priori box)
    search_xtol: float = 1e-10

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)


DEFAULT = Config()


def resolve(cfg: Config | None) -> Config:
    return DEFAULT if cfg is None else cfg
