"""Discrimination of unitary transformations with local and entangled probes."""

__version__ = "0.1.0"

from . import covariant, matcore, pairdisc, probe  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .pairdisc import (  # noqa: E402
    helstrom_oracle,
    n_copies_analysis,
    optimal_probe,
    p_error_from_overlap,
    polygon,
    relative_phases,
    spread,
)
from .probe import ProbeState, make_probe, majorizes, maximally_entangled, schmidt  # noqa: E402

__all__ = [
    "covariant",
    "matcore",
    "pairdisc",
    "probe",
    "ProbeState",
    "helstrom_oracle",
    "majorizes",
    "make_probe",
    "maximally_entangled",
    "n_copies_analysis",
    "optimal_probe",
    "p_error_from_overlap",
    "polygon",
    "relative_phases",
    "schmidt",
    "spread",
]
