"""Default settings and logging setup."""

import logging
from dataclasses import dataclass, replace
from typing import Tuple

LOG_FORMAT = "%(name)s:%(levelname)s:%(message)s"


@dataclass(frozen=True)
class Settings:
    primes: Tuple[int, ...] = (2, 3, 5, 7, 11, 13)
    seed: int = 0
    samples: int = 100
    spot_checks: int = 100
    degree_bound: int = 5
    max_depth: int = 10
    truncation_multiplier: int = 3
    mutation_exponents: Tuple[int, int] = (-8, 8)
    max_exponent: int = 10000
    # sizes of the randomized acceptance sweeps
    eigen_fields: int = 50
    z_derivations: int = 100
    hochschild_pairs: int = 20
    stability_derivations: int = 20
    property_examples: int = 1000

    def with_overrides(self, **overrides) -> "Settings":
        """Copy with every non-None override applied."""
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean)

    @classmethod
    def quick(cls) -> "Settings":
        """Small sweep sizes for smoke runs and the test-suite."""
        return cls(
            primes=(2, 3, 5),
            samples=8,
            spot_checks=5,
            eigen_fields=3,
            z_derivations=4,
            hochschild_pairs=2,
            stability_derivations=2,
            property_examples=50,
        )


DEFAULT_SETTINGS = Settings()


def configure_logging(verbosity: int = 0) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(format=LOG_FORMAT, level=level)
    logging.getLogger("src").setLevel(level)
