"""Randomized asynchronous runs and a phase-synchronous reference.

``run_async`` drives the encoded-state kernel under a scheduler that only
picks processes able to make progress, counting every inbox write as one
link transmission.  ``sync_oracle`` runs Peterson's algorithm in lockstep
phases over the active nodes, which predicts the winner's ring position for
any fair asynchronous schedule.
"""

from __future__ import annotations

import csv
import hashlib
import io
import random
from dataclasses import asdict, dataclass, field
from typing import Iterable, List, Optional, Sequence

from . import _layout as L
from . import kernel
from .errors import OverflowEncountered, StepBudgetExhausted
from .protocol import Variant, canonical_encode, initial_state, validate_uids


@dataclass(frozen=True)
class UniformEnabled:
    seed: int

    def make(self, n):
        rng = random.Random(self.seed)

        def pick(enabled):
            return enabled[rng.randrange(len(enabled))]

        return pick


@dataclass(frozen=True)
class RoundRobin:
    def make(self, n):
        pointer = [0]

        def pick(enabled):
            for k in enabled:
                if k >= pointer[0]:
                    break
            else:
                k = enabled[0]
            pointer[0] = k + 1
            return k

        return pick


@dataclass
class SimReport:
    elected: Optional[int]
    elected_vid: Optional[int]
    steps: int
    link_transmissions: int
    terminated: bool
    peak_leaders: int = 0


@dataclass
class SyncPhaseReport:
    phases: int
    survivors_per_phase: List[int]
    winner: int
    winner_vid: int


def _sends(variant: int, mode: int, pc: int, pc_after: int) -> bool:
    """Did a progress step from (mode, pc) write into the successor's inbox?"""
    if mode == L.MODE_RELAY:
        return variant != L.VARIANT_MODIFIED or pc == L.PC_S1
    if pc == L.PC_S0:
        return True
    forward_pc = L.PC_S2 if variant == L.VARIANT_GENERAL else L.PC_S3
    return pc == forward_pc and pc_after != L.PC_LEAD


def run_async(variant: Variant, uids: Sequence[int], sched=None, max_steps: int = 10**6,
              clear_temps: bool = True, backend: Optional[str] = None) -> SimReport:
    """Run until a leader exists and every process is blocked.

    Raises :class:`StepBudgetExhausted` or :class:`OverflowEncountered`; both
    carry the partial :class:`SimReport`.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    uids = validate_uids(uids)
    n = len(uids)
    impl = kernel.backend(backend) if backend else kernel
    step = impl.step
    code = variant.code
    rec = L.record_width(code, n)
    state = canonical_encode(variant, initial_state(variant, uids))
    pick = (sched or UniformEnabled(0)).make(n)

    status = [step(code, n, clear_temps, state, i)[0] for i in range(n)]
    leaders = set()
    report = SimReport(None, None, 0, 0, False)
    while True:
        enabled = [i for i in range(n) if status[i] != L.STUTTER]
        if not enabled:
            break
        if report.steps >= max_steps:
            raise StepBudgetExhausted(report)
        i = pick(enabled)
        o = 1 + i * rec
        mode, pc = state[o + L.F_MODE], state[o + L.F_PC]
        outcome, nxt = step(code, n, clear_temps, state, i)
        report.steps += 1
        if outcome == L.OVERFLOW:
            raise OverflowEncountered(report)
        pc_after = nxt[o + L.F_PC]
        if _sends(code, mode, pc, pc_after):
            report.link_transmissions += 1
        if pc_after == L.PC_LEAD:
            leaders.add(i)
            report.peak_leaders = max(report.peak_leaders, len(leaders))
        state = nxt
        for k in {(i - 1) % n, i, (i + 1) % n}:
            status[k] = step(code, n, clear_temps, state, k)[0]

    if len(leaders) == 1:
        (leader,) = leaders
        report.elected = leader
        report.elected_vid = state[1 + leader * rec + L.F_VID]
        report.terminated = True
    return report


def phase_decision(vid: int, id2: int, id3: int):
    """One active node's end-of-phase rule: ``(survives, new_vid)``."""
    if id2 > max(vid, id3):
        return True, id2
    return False, vid


def sync_oracle(uids: Sequence[int]) -> SyncPhaseReport:
    uids = validate_uids(uids)
    active = list(range(len(uids)))
    vid = list(uids)
    survivors = []
    while len(active) > 1:
        keep = []
        new_vid = {}
        for k, node in enumerate(active):
            id2 = vid[active[k - 1]]
            id3 = vid[active[k - 2]]
            alive, v = phase_decision(vid[node], id2, id3)
            if alive:
                keep.append(node)
                new_vid[node] = v
        for node, v in new_vid.items():
            vid[node] = v
        active = keep
        survivors.append(len(active))
    winner = active[0]
    return SyncPhaseReport(len(survivors), survivors, winner, vid[winner])


# Sweeps.

CSV_FIELDS = ["variant", "n", "seed", "uids", "elected", "elected_vid", "steps", "link_transmissions",
              "oracle_winner", "phases"]


def run_seed(base_seed: int, n: int, run: int) -> int:
    digest = hashlib.sha256(f"{base_seed}/{n}/{run}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _sweep_row(args):
    variant, n, seed, max_steps, backend = args
    uids = random.Random(seed).sample(range(n), n)
    rep = run_async(variant, uids, UniformEnabled(seed), max_steps, backend=backend)
    oracle = sync_oracle(uids)
    return {
        "variant": variant.value,
        "n": n,
        "seed": seed,
        "uids": " ".join(map(str, uids)),
        "elected": rep.elected,
        "elected_vid": rep.elected_vid,
        "steps": rep.steps,
        "link_transmissions": rep.link_transmissions,
        "oracle_winner": oracle.winner,
        "phases": oracle.phases,
    }


def sweep(variants: Iterable[Variant], n_range: Iterable[int], runs_per_cell: int, base_seed: int = 0,
          max_steps: int = 10**6, jobs: int = 1, backend: Optional[str] = None) -> list:
    """One row per (variant, n, run), each on a fresh random permutation.

    The permutation and the scheduler seed depend on ``(base_seed, n, run)``
    only, so every variant sees the same rings and schedules start from the
    same seed.
    """
    if runs_per_cell < 1:
        raise ValueError("runs_per_cell must be positive")
    tasks = [(v, n, run_seed(base_seed, n, r), max_steps, backend)
             for v in variants for n in n_range for r in range(runs_per_cell)]
    if jobs > 1 and len(tasks) > 1:
        from multiprocessing import Pool

        with Pool(jobs) as pool:
            return pool.map(_sweep_row, tasks, chunksize=max(1, len(tasks) // (4 * jobs)))
    return [_sweep_row(t) for t in tasks]


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
