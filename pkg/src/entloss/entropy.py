"""Entropic quantities in bits and the loss functions built from them."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import channels, qcore
from .errors import BadParam, DimMetadataMissing, DimMismatch, InternalConsistencyError, NotComputable
from .qcore import DensityMatrix

NEG_TOL = 1e-9
ROUNDOFF = 1e-12


class LossKind(str, Enum):
    c = "c"
    f = "f"
    sq = "sq"

    def K(self, dA: int, dB: int) -> float:
        """Prefactor inside the square root of the fidelity bounds."""
        if self is LossKind.c:
            return 1.0
        if self is LossKind.sq:
            return 2.0
        return float((2 * dA * dB - 1) ** 2)


@dataclass(frozen=True)
class MeasureId:
    tag: str

    COMPUTABLE = frozenset({"E_f", "I_c", "I_mutual_half"})
    ALL = ("E_d", "K_d", "E_sq", "E_r", "E_c", "E_f", "I_c", "I_mutual_half")

    def __post_init__(self):
        if self.tag not in self.ALL:
            raise BadParam(f"unknown measure {self.tag!r}")

    @property
    def computable(self) -> bool:
        return self.tag in self.COMPUTABLE


def entropy_of_spectrum(w) -> float:
    w = np.clip(np.real(w), 0.0, None)
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho) -> float:
    """-Tr[rho log2 rho] with 0 log 0 = 0."""
    m = qcore.as_matrix(rho)
    return entropy_of_spectrum(np.linalg.eigvalsh(qcore.hermitize(m)))


def _bipartite(tau) -> DensityMatrix:
    if not isinstance(tau, DensityMatrix) or len(tau.dims) != 2:
        raise DimMetadataMissing("bipartite quantities need a DensityMatrix with dims (dA, dB)")
    return tau


def _direction(direction: str) -> tuple[int, int]:
    d = direction.replace("->", "").replace("→", "").replace(" ", "").upper()
    if d == "AB":
        return 0, 1
    if d == "BA":
        return 1, 0
    raise BadParam(f"direction must be 'A->B' or 'B->A', got {direction!r}")


def coherent_information(tau, direction: str = "A->B") -> float:
    """I_c^{X->Y} = S(tau^Y) - S(tau^{XY})."""
    tau = _bipartite(tau)
    _, dst = _direction(direction)
    return von_neumann_entropy(qcore.partial_trace(tau, [dst])) - von_neumann_entropy(tau)


def mutual_information(tau) -> float:
    tau = _bipartite(tau)
    sa = von_neumann_entropy(qcore.partial_trace(tau, [0]))
    sb = von_neumann_entropy(qcore.partial_trace(tau, [1]))
    return sa + sb - von_neumann_entropy(tau)


def output_state(rho, ch: channels.KrausChannel) -> DensityMatrix:
    """sigma^{RB} obtained by purifying rho and sending the A half through ch."""
    rho = qcore.as_density(rho)
    if rho.dim != ch.dimA:
        raise DimMismatch(f"state of dimension {rho.dim} fed to a channel on {ch.dimA}")
    return channels.apply_to_subsystem(ch, qcore.purify(rho))


def channel_coherent_information(rho, ch: channels.KrausChannel) -> float:
    return coherent_information(output_state(rho, ch), "A->B")


def clip_loss(value: float, what: str) -> float:
    """Clip tiny negative losses to zero; larger negatives signal a numerics bug.

    Values within ``ROUNDOFF`` of zero are entropy round-off and map to 0 exactly,
    so square-root bounds do not amplify them.
    """
    if value < -NEG_TOL:
        raise InternalConsistencyError(f"{what} = {value:.3e} is negative")
    return 0.0 if value <= ROUNDOFF else value


def delta_c_raw(rho, ch: channels.KrausChannel) -> float:
    """S(rho) - I_c(rho, ch), unclipped."""
    rho = qcore.as_density(rho)
    return von_neumann_entropy(rho) - channel_coherent_information(rho, ch)


def delta_c(rho, ch: channels.KrausChannel) -> float:
    """Loss of coherent information caused by ch on the purification of rho."""
    return clip_loss(delta_c_raw(rho, ch), "delta_c")


def delta_c_state(tau, direction: str = "A->B") -> float:
    """S(tau^X) - I_c^{X->Y}(tau)."""
    tau = _bipartite(tau)
    src, _ = _direction(direction)
    sx = von_neumann_entropy(qcore.partial_trace(tau, [src]))
    return clip_loss(sx - coherent_information(tau, direction), "delta_c")


def delta_x_state(tau, x, direction: str = "A->B", eof_config=None) -> float:
    """S(tau^X) - E_x(tau) for a computable loss kind."""
    x = LossKind(x)
    if x is LossKind.sq:
        raise NotComputable("squashed entanglement is not computed")
    if x is LossKind.c:
        return delta_c_state(tau, direction)
    from .eof import eof

    tau = _bipartite(tau)
    src, _ = _direction(direction)
    sx = von_neumann_entropy(qcore.partial_trace(tau, [src]))
    return clip_loss(sx - eof(tau, eof_config).value, "delta_f")


def delta_f(rho, ch: channels.KrausChannel, eof_config=None) -> float:
    """S(rho) - E_f(sigma^{RB}); a lower bound because E_f is estimated from above."""
    from .eof import eof

    rho = qcore.as_density(rho)
    sigma = output_state(rho, ch)
    return clip_loss(von_neumann_entropy(rho) - eof(sigma, eof_config).value, "delta_f")


def delta_x(rho, ch: channels.KrausChannel, x, eof_config=None) -> float:
    x = LossKind(x)
    if x is LossKind.sq:
        raise NotComputable("squashed entanglement is not computed")
    if x is LossKind.c:
        return delta_c(rho, ch)
    return delta_f(rho, ch, eof_config)
