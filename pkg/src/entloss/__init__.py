"""Entanglement-loss and channel-invertibility toolkit.

Submodules: ``qcore`` (states and linear algebra), ``channels`` (Kraus/Choi
channels and samplers), ``entropy`` (entropies and losses), ``eof``
(entanglement of formation), ``recovery`` (fidelities, recoveries, g and the
bound curve), ``cbnorm`` (diamond distance and channel-level quantities),
``suites`` and ``cli`` (verification harness).
"""
from .channels import KrausChannel, ChoiMatrix
from .entropy import LossKind
from .eof import EofConfig, wootters_eof
from .errors import EntlossError
from .qcore import DensityMatrix, PureBipartiteState

__all__ = ["ChoiMatrix", "DensityMatrix", "EntlossError", "EofConfig", "KrausChannel",
           "LossKind", "PureBipartiteState", "wootters_eof"]
__version__ = "0.1.0"
