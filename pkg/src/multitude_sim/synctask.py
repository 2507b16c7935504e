"""Gossip frequency averaging over the simulated interconnect.

Every processing node holds an oscillator frequency in [0, 1].  At step 0
each node sends its frequency to a uniformly random other node; the payload
travels through the message engine under random wandering.  Whenever a node
receives a value it averages it into its own frequency and immediately sends
the updated value to a new random node, so exactly one payload message per
node circulates forever.  Within a step, deliveries are applied one at a time
in a seeded random permutation of the nodes, which resolves "simultaneous"
arrivals deterministically.  The per-step standard deviation of the
frequencies is the convergence signal.

A payload message lost to the TTL (or, in pathological configs, to a full
buffer) would silently kill one gossip stream; the sender therefore re-emits
its current frequency at the start of the next step, preserving the
one-message-per-node population.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .simcore import Routing, SimConfig, Simulation
from .topology import ConfigError, Topology

__all__ = [
    "SYNC_THRESHOLDS",
    "SYNC_CSV_HEADER",
    "OscillatorField",
    "SyncTrace",
    "run_sync_task",
    "trace_csv_rows",
]

SYNC_THRESHOLDS = (0.1, 0.05, 0.01)
SYNC_CSV_HEADER = "family,seed,N,S,alpha,step,stddev"

# entropy tag separating the task's draws from the engine's wandering draws
_TASK_STREAM = 0x5CA1AB1E


@dataclass
class OscillatorField:
    """Per-processing-node frequencies; values stay inside the initial hull."""

    values: np.ndarray

    def stddev(self) -> float:
        return float(np.std(self.values))  # population formula


@dataclass
class SyncTrace:
    """Standard-deviation trace plus steps-to-threshold summary."""

    family: str
    seed: int
    n_processing: int
    n_switch: int
    alpha: float | None
    stddevs: list[float]
    steps_to_threshold: dict[float, int | None]

    @property
    def horizon(self) -> int:
        return len(self.stddevs) - 1


def run_sync_task(
    topology: Topology,
    config: SimConfig,
    horizon: int,
    initial_values: Sequence[float] | None = None,
    on_step: Callable[[int, np.ndarray, Simulation], None] | None = None,
) -> SyncTrace:
    """Run the averaging task for ``horizon`` steps and record the std-dev trace.

    ``initial_values`` overrides the seeded uniform initialization (useful
    for fixed-point tests).  ``on_step(step, frequencies, sim)`` is invoked
    after each step for invariant checking; the frequency array is read-only.
    """
    n = topology.n_processing
    s_count = topology.n_switch
    if n < 2:
        raise ValueError("the synchronization task needs at least 2 processing nodes")
    if config.routing is not Routing.RANDOM_WANDERING:
        raise ConfigError("the synchronization task runs under random wandering")
    if horizon < 0:
        raise ConfigError("horizon must be >= 0")

    sim = Simulation(topology, replace(config, injection_rate=0.0, horizon=horizon))
    task_rng = np.random.default_rng([int(config.seed), _TASK_STREAM])

    if initial_values is None:
        freqs = task_rng.random(n)
    else:
        freqs = np.asarray(initial_values, dtype=float).copy()
        if freqs.shape != (n,):
            raise ConfigError(f"initial_values must hold {n} entries")
        if np.any(freqs < 0) or np.any(freqs > 1):
            raise ConfigError("initial frequencies must lie in [0, 1]")

    pending_reemit: list[int] = []  # pn indices whose payload was lost last step

    def emit(pn_idx: int) -> None:
        pick = int(task_rng.integers(n - 1))
        dst_idx = pick + 1 if pick >= pn_idx else pick
        msg = sim.inject(s_count + pn_idx, s_count + dst_idx, payload=float(freqs[pn_idx]))
        if msg is None:  # entry buffer full; replace the stream next step
            pending_reemit.append(pn_idx)

    for pn in range(n):
        emit(pn)

    stddevs = [float(np.std(freqs))]
    view = freqs.view()
    view.setflags(write=False)

    for step in range(1, horizon + 1):
        sim.step(inject=False)

        replacements, pending_reemit = sorted(pending_reemit), []
        for pn in replacements:
            emit(pn)

        arrivals: dict[int, list] = {}
        for msg in sim.delivered_this_step:
            arrivals.setdefault(msg.dst - s_count, []).append(msg)
        for pn in task_rng.permutation(n):
            pn = int(pn)
            for msg in sorted(arrivals.get(pn, ()), key=lambda m: m.id):
                freqs[pn] = (freqs[pn] + msg.payload) / 2.0
                emit(pn)

        for msg in sim.dropped_this_step:
            if msg.payload is not None:
                pending_reemit.append(msg.src - s_count)

        stddevs.append(float(np.std(freqs)))
        if on_step is not None:
            on_step(step, view, sim)

    thresholds: dict[float, int | None] = {}
    for thr in SYNC_THRESHOLDS:
        hit = next((i for i, sd in enumerate(stddevs) if sd < thr), None)
        thresholds[thr] = hit

    return SyncTrace(
        family=topology.family,
        seed=config.seed,
        n_processing=n,
        n_switch=s_count,
        alpha=topology.alpha,
        stddevs=stddevs,
        steps_to_threshold=thresholds,
    )


def trace_csv_rows(trace: SyncTrace) -> list[str]:
    """Trace rows plus one summary row (`step` column = "summary").

    The summary packs steps-to-threshold as `thr:steps` pairs separated by
    ';' ("-" when the threshold was never reached), keeping the file plain
    7-column CSV.
    """
    alpha = "" if trace.alpha is None else repr(float(trace.alpha))
    prefix = f"{trace.family},{trace.seed},{trace.n_processing},{trace.n_switch},{alpha}"
    rows = [f"{prefix},{step},{sd!r}" for step, sd in enumerate(trace.stddevs)]
    summary = ";".join(
        f"{thr}:{trace.steps_to_threshold[thr] if trace.steps_to_threshold[thr] is not None else '-'}"
        for thr in SYNC_THRESHOLDS
    )
    rows.append(f"{prefix},summary,{summary}")
    return rows
