"""The constants ledger.

Every hidden constant used by the algorithms lives in :class:`Params`, so a run
is reproducible from ``Params.to_dict()`` plus the seed.  ``n`` is the node
count the nodes are *told*; it may exceed the real graph size (see
:func:`limrand.engine.inflate_n`).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ParameterError


def clog2(x: int) -> int:
    """ceil(log2 x) for x >= 1."""
    if x < 1:
        raise ParameterError(f"log of non-positive value {x}")
    return (x - 1).bit_length()


@dataclass(frozen=True)
class Params:
    n: int
    # IDs come from {1, ..., n**id_c}
    id_c: int = 3
    # ball carving on cluster graphs: phases = phases_factor * L, geometric cap = geo_cap_factor * L
    phases_factor: int = 10
    geo_cap_factor: int = 10
    # bit gathering: h' = gather_factor * k * h, k = onebit_bits_factor * L**2
    gather_factor: int = 10
    onebit_bits_factor: int = 100
    # shared-randomness carving
    epochs_factor: int = 1          # epochs per phase p = epochs_factor * L
    radius_c: int = 10              # R_i = (p - i) * radius_c * L
    sample_factor: int = 1          # Pr[center] = min(1, sample_factor * 2**i * L / n)
    kwise_factor: int = 1           # tape independence k = kwise_factor * L**2 field elements
    reach_C: int = 8                # calibrated bound on centers reaching a node per epoch
    # splitting and hyperedge marking
    split_k_factor: int = 40
    mark_factor: int = 32
    mark_k_factor: int = 40
    mark_threshold_power: int = 2   # classes with 2**i <= L**power pass through
    # region-growing fallback: grow while |B(r+1)| > growth * |B(r)|
    fallback_growth: float = 2.0

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name != "n" and v <= 0:
                raise ParameterError(f"constant {f.name} must be positive, got {v}")

    @property
    def L(self) -> int:
        """ceil(log2 n), floored at 1 so single-node instances still get one phase."""
        return max(1, clog2(self.n))

    @property
    def id_space(self) -> int:
        return self.n ** self.id_c

    @property
    def id_bits(self) -> int:
        return self.id_space.bit_length()

    @property
    def phases(self) -> int:
        return self.phases_factor * self.L

    @property
    def geo_cap(self) -> int:
        return self.geo_cap_factor * self.L

    @property
    def epochs(self) -> int:
        return self.epochs_factor * self.L

    def base_radius(self, epoch: int) -> int:
        return (self.epochs - epoch) * self.radius_c * self.L

    def center_threshold(self, epoch: int) -> int:
        """Sampling threshold out of 2**L for epoch ``epoch`` (1-based); last epoch is certain."""
        full = 1 << self.L
        if epoch >= self.epochs:
            return full
        return min(full, (self.sample_factor * (1 << epoch) * self.L * full) // self.n)

    @property
    def kwise_k(self) -> int:
        return self.kwise_factor * self.L ** 2

    def with_overrides(self, **overrides) -> "Params":
        known = {f.name for f in dataclasses.fields(self)}
        bad = set(overrides) - known
        if bad:
            raise ParameterError(f"unknown constants: {sorted(bad)}")
        return dataclasses.replace(self, **overrides)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

