"""Seeded verification suites.

Each suite draws its instances from a generator seeded by
``(master seed, suite code, d_A, d_B, instance index)`` and returns a flat
list of :class:`~entloss.bounds.BoundCheckRecord` in instance order, so a
fixed :class:`SuiteConfig` always reproduces the same numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import cbnorm, channels, checks, eof, qcore, recovery
from .bounds import tally
from .channels import KrausChannel
from .entropy import output_state
from .errors import ConfigError

SUITES = ("dpi", "thm1", "thm2", "corollary", "states", "channels")
_CODES = {name: i + 1 for i, name in enumerate(SUITES)}

# default instances per dimension pair for each suite
DEFAULT_INSTANCES = {"dpi": 1000, "thm1": 500, "thm2": 200, "corollary": 200,
                     "states": 200, "channels": 100}
DEFAULT_RESTARTS = {"eof": 32, "recovery": 4, "diamond": 64, "qcb": 8, "delta": 16, "phi": 6}
DEFAULT_TOLERANCES = {"dpi": 1e-9, "fidelity": 1e-7, "eof": 1e-6, "hashing": 1e-4,
                      "mutualinfo": 1e-9, "channel": 1e-7}
EPSILONS = (1e-3, 1e-5, 1e-7)
QUICK_RESTARTS = 8
QUICK_INSTANCES = 50


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    dims: tuple = ((2, 2), (2, 3), (3, 3))
    instances_per_dim: int | None = None
    restarts: dict = field(default_factory=lambda: dict(DEFAULT_RESTARTS))
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_path: str | None = None
    format: str = "json"
    channel_pool: str = "random"
    suites: tuple = SUITES
    eps_instances: int = 5
    quick: bool = False

    def __post_init__(self):
        dims = tuple((int(a), int(b)) for a, b in self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "suites", tuple(self.suites))
        object.__setattr__(self, "restarts", {**DEFAULT_RESTARTS, **dict(self.restarts)})
        object.__setattr__(self, "tolerances", {**DEFAULT_TOLERANCES, **dict(self.tolerances)})
        if not dims:
            raise ConfigError("at least one dimension pair is required")
        if any(a < 2 or b < 2 for a, b in dims):
            raise ConfigError(f"dimensions must be >= 2, got {dims}")
        if self.instances_per_dim is not None and self.instances_per_dim < 1:
            raise ConfigError("instances must be positive")
        if any(int(v) < 1 for v in self.restarts.values()):
            raise ConfigError("restart counts must be positive")
        if any(not float(v) > 0 for v in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        unknown = set(self.restarts) - set(DEFAULT_RESTARTS)
        unknown |= set(self.tolerances) - set(DEFAULT_TOLERANCES)
        unknown |= set(self.suites) - set(SUITES)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if self.channel_pool not in ("random", "unitary"):
            raise ConfigError(f"channel_pool must be random or unitary, got {self.channel_pool!r}")
        if self.eps_instances < 0:
            raise ConfigError("eps_instances must be non-negative")

    def n(self, suite: str) -> int:
        n = self.instances_per_dim or DEFAULT_INSTANCES[suite]
        return min(n, QUICK_INSTANCES) if self.quick else n

    def r(self, optimizer: str) -> int:
        r = int(self.restarts[optimizer])
        return min(r, QUICK_RESTARTS) if self.quick else r

    def tol(self, name: str) -> float:
        return float(self.tolerances[name])

    def eof_config(self) -> eof.EofConfig:
        return eof.EofConfig(restarts=self.r("eof"), seed=self.seed)

    def recovery_config(self) -> recovery.RecoveryConfig:
        return recovery.RecoveryConfig(restarts=self.r("recovery"), seed=self.seed)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed, "dims": [list(d) for d in self.dims],
            "instances_per_dim": self.instances_per_dim, "restarts": dict(self.restarts),
            "tolerances": dict(self.tolerances), "format": self.format,
            "channel_pool": self.channel_pool, "suites": list(self.suites),
            "eps_instances": self.eps_instances, "quick": self.quick,
        }

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "SuiteConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
        if "dims" in merged:
            merged["dims"] = tuple(tuple(d) for d in merged["dims"])
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def instance_rng(config: SuiteConfig, suite: str, dims, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(
        [config.seed, _CODES[suite], dims[0], dims[1], index]))


def random_pair(dA: int, dB: int, rng: np.random.Generator, pool: str = "random"):
    """A random (state, channel) instance; ``pool="unitary"`` draws isometric channels."""
    rho = channels.random_state(dA, rank=int(rng.integers(1, dA + 1)), seed=rng)
    if pool == "unitary":
        V = qcore.haar_isometry(dB, dA, rng)
        return rho, KrausChannel(V[None], dA, dB)
    lo = max(1, math.ceil(dA / dB))
    rank = int(rng.integers(lo, dA * dB + 1))
    return rho, channels.random_channel(dA, dB, rank, rng)


def near_isometric_channel(dA: int, dB: int, eps: float, rng: np.random.Generator) -> KrausChannel:
    """(1 - eps) V . V^dag + eps M for a Haar isometry V and a random rank <= 2 channel M."""
    V = qcore.haar_isometry(dB, dA, rng)
    rank = int(rng.integers(max(1, math.ceil(dA / dB)), 3))
    noise = channels.random_channel(dA, dB, rank, rng)
    ops = np.concatenate([math.sqrt(1 - eps) * V[None], math.sqrt(eps) * noise.kraus_ops])
    return KrausChannel(ops, dA, dB)


def eps_family(config: SuiteConfig, suite: str):
    """Maximally mixed input through near-isometric channels: sigma^RB is eps-close to maximally entangled."""
    out = []
    n = min(config.eps_instances, 2) if config.quick else config.eps_instances
    for dA, dB in config.dims:
        for k, eps in enumerate(EPSILONS):
            for i in range(n):
                rng = instance_rng(config, suite, (dA, dB), 10**6 + 1000 * k + i)
                ch = near_isometric_channel(dA, dB, eps, rng)
                out.append((f"eps={eps:g} {dA}x{dB} #{i}", qcore.maximally_mixed(dA), ch))
    return out


def _label(dims, i):
    return f"{dims[0]}x{dims[1]} #{i}"


# ---------------------------------------------------------------------------
# suites


def suite_dpi(config: SuiteConfig) -> list:
    recs = []
    for dims in config.dims:
        for i in range(config.n("dpi")):
            rho, ch = random_pair(*dims, instance_rng(config, "dpi", dims, i), config.channel_pool)
            recs.extend(checks.dpi(rho, ch, _label(dims, i), config.tol("dpi")))
    return recs


def suite_thm1(config: SuiteConfig) -> list:
    recs = []
    rcfg = config.recovery_config()
    for dims in config.dims:
        for i in range(config.n("thm1")):
            rho, ch = random_pair(*dims, instance_rng(config, "thm1", dims, i), config.channel_pool)
            r, _ = checks.thm1(rho, ch, rcfg, _label(dims, i), config.tol("fidelity"))
            recs.extend(r)
    return recs


def _thm2_instance(rho, ch, config, label):
    dc_recs, summary = checks.thm1(rho, ch, config.recovery_config(), label,
                                   config.tol("fidelity"))
    fbar = summary.get("optimized_fidelity", summary["transpose_fidelity"])
    r, _ = checks.thm2(rho, ch, fbar, summary["delta_c"], config.eof_config(),
                       instance=label, tol=config.tol("eof"))
    return r


def suite_thm2(config: SuiteConfig) -> list:
    recs = []
    for dims in config.dims:
        if dims[0] * dims[1] > eof.MAX_DIM:
            continue
        for i in range(config.n("thm2")):
            rho, ch = random_pair(*dims, instance_rng(config, "thm2", dims, i), config.channel_pool)
            recs.extend(_thm2_instance(rho, ch, config, _label(dims, i)))
    for label, rho, ch in eps_family(config, "thm2"):
        if ch.dimA * ch.dimB <= eof.MAX_DIM:
            recs.extend(_thm2_instance(rho, ch, config, label))
    return recs


def near_pure_state(dA: int, dB: int, rng: np.random.Generator) -> qcore.DensityMatrix:
    """(1 - eps) psi + eps phi for Haar vectors psi, phi and log-uniform eps in [1e-7, 1e-4]."""
    d = dA * dB
    eps = 10.0 ** rng.uniform(-7, -4)
    psi = qcore.haar_isometry(d, 1, rng)[:, 0]
    phi = qcore.haar_isometry(d, 1, rng)[:, 0]
    m = (1 - eps) * np.outer(psi, psi.conj()) + eps * np.outer(phi, phi.conj())
    return qcore.DensityMatrix(qcore.hermitize(m), (dA, dB))


def suite_corollary(config: SuiteConfig) -> list:
    """Gap checks until ``n`` applicable instances per pair (at most 4n draws)."""
    recs = []
    ecfg = config.eof_config()
    tol = config.tol("eof")
    for dims in config.dims:
        if dims[0] * dims[1] > eof.MAX_DIM:
            continue
        n = config.n("corollary")
        applicable = 0
        for i in range(4 * n):
            if applicable >= n:
                break
            tau = near_pure_state(*dims, instance_rng(config, "corollary", dims, i))
            r = checks.corollary_gap(tau, ecfg, instance=_label(dims, i), tol=tol)
            applicable += sum(rec.applicable for rec in r)
            recs.extend(r)
    for label, rho, ch in eps_family(config, "corollary"):
        if ch.dimA * ch.dimB <= eof.MAX_DIM:
            recs.extend(checks.corollary_gap(output_state(rho, ch), ecfg, instance=label, tol=tol))
    return recs


# beyond two qubits the descent converges sublinearly on weakly entangled
# states; a 2 * rank ensemble with a few restarts reaches the same value faster
STATES_WIDE_RESTARTS = 4


def states_eof_config(config: SuiteConfig, dims, rank: int) -> eof.EofConfig:
    base = config.eof_config()
    if tuple(dims) == (2, 2):
        return base
    return replace(base, restarts=min(base.restarts, STATES_WIDE_RESTARTS), ensemble_size=2 * rank)


def suite_states(config: SuiteConfig) -> list:
    """Entanglement-measure chain on random states with d_A * d_B <= 6."""
    recs = []
    for dims in config.dims:
        if dims[0] * dims[1] > 6:
            continue
        d = dims[0] * dims[1]
        for i in range(config.n("states")):
            rng = instance_rng(config, "states", dims, i)
            rank = int(rng.integers(1, d + 1))
            tau = channels.random_state(dims, rank=rank, seed=rng)
            recs.extend(checks.hashing(tau, states_eof_config(config, dims, rank), _label(dims, i),
                                       config.tol("hashing"), config.tol("mutualinfo"),
                                       wootters=True))
    return recs


def zoo_d2() -> list:
    """Named qubit channels for the channel-level checks."""
    zoo = [("identity", channels.identity(2)), ("Z", channels.channel_zoo("z"))]
    zoo += [(f"depolarizing p={p:.1f}", channels.depolarizing(p)) for p in np.arange(1, 10) / 10]
    zoo += [("depolarizing p=0.001", channels.depolarizing(1e-3))]
    zoo += [(f"dephasing p={p}", channels.dephasing(p)) for p in (0.1, 0.5)]
    zoo += [(f"amplitude_damping gamma={g}", channels.amplitude_damping(g)) for g in (0.1, 0.5)]
    return zoo


def channel_configs(config: SuiteConfig) -> cbnorm.ReportConfig:
    return cbnorm.ReportConfig(seed=config.seed, quick=config.quick,
                               tolerance=config.tol("channel"), eof_tolerance=config.tol("eof"))


def fidelity_diamond_records(config: SuiteConfig) -> list:
    dcfg = cbnorm.DiamondConfig(restarts=config.r("diamond"), seed=config.seed)
    tol = config.tol("channel")
    recs = []
    for name, ch in zoo_d2():
        recs.extend(cbnorm.verify_theorem3(ch, dcfg, tol, name))
    n = config.n("channels")
    for i in range(n):
        rng = instance_rng(config, "channels", (2, 2), i)
        if config.channel_pool == "unitary":
            ch = channels.unitary(qcore.haar_unitary(2, rng))
        else:
            ch = channels.random_channel(2, 2, int(rng.integers(1, 5)), rng)
        recs.extend(cbnorm.verify_theorem3(ch, dcfg, tol, _label((2, 2), i)))
    return recs


def final_bound_records(config: SuiteConfig) -> list:
    """Channel-level final bounds and the Phi chain on the qubit zoo."""
    qcfg = cbnorm.QcbConfig(inner_restarts=config.r("qcb"), seed=config.seed,
                            final_restarts=config.r("diamond"))
    dcfg = cbnorm.DeltaConfig(restarts=config.r("delta"), seed=config.seed,
                              eof_config=eof.EofConfig(restarts=min(config.r("eof"), 8),
                                                       seed=config.seed))
    pcfg = cbnorm.PhiConfig(candidates=config.r("phi"), seed=config.seed,
                            recovery_config=recovery.RecoveryConfig(
                                restarts=max(config.r("recovery"), 8), seed=config.seed))
    tol = config.tol("channel")
    recs = []
    for name, ch in zoo_d2():
        q = cbnorm.q_cb(ch, qcfg)
        phi = cbnorm.big_phi(ch, pcfg)
        for x in ("c", "f"):
            delta = cbnorm.big_delta_x(ch, x, dcfg)
            recs.extend(cbnorm.verify_final_bounds(ch, x, q, delta, tol, name))
            recs.extend(cbnorm.verify_phi_chain(ch, x, phi, delta, tol, name))
    return recs


def suite_channels(config: SuiteConfig) -> list:
    return fidelity_diamond_records(config) + final_bound_records(config)


RUNNERS = {"dpi": suite_dpi, "thm1": suite_thm1, "thm2": suite_thm2,
           "corollary": suite_corollary, "states": suite_states, "channels": suite_channels}

# families whose failure points at an estimator rather than at a clean counterexample
REVIEW_FAMILIES = ("final_a", "final_b")


@dataclass(frozen=True, eq=False)
class SuiteReport:
    config: SuiteConfig
    records: list

    @property
    def counts(self) -> dict:
        return tally(self.records)

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.status == "fail"]

    def exit_code(self) -> int:
        fails = self.failures
        if any(r.name in REVIEW_FAMILIES for r in fails):
            return 3
        return 1 if fails else 0

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "counts": self.counts,
            "records": [r.to_full_dict() for r in self.records],
        }


def run(config: SuiteConfig) -> SuiteReport:
    records = []
    for name in SUITES:
        if name in config.suites:
            records.extend(RUNNERS[name](config))
    return SuiteReport(config, records)


def with_overrides(config: SuiteConfig, **kw) -> SuiteConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
