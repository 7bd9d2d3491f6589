"""Simulated-annealing baseline over the same scenes and energy.

The state search shifts one attribute of one movable object per step —
position or orientation, chosen 50/50 — and accepts with the Boltzmann
rule under a linear, evenly spaced temperature schedule. It shares the
projection solver's energy function so runs of the two optimizers are
directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Scene
from .solver import EnergyTrace, LayoutState, SolveContext, evaluate_energy, initialize


@dataclass
class AnnealConfig:
    total_iterations: int = 20_000
    # None scales off the run's initial energy; starting at 2% of it puts
    # most of the schedule in the productive acceptance regime instead of
    # a random walk that freezes the best-so-far early
    t_initial: float | None = None
    t_initial_fraction: float = 0.02
    t_final: float = 1e-3
    stall_window: int = 1500
    stall_threshold: float = 0.001
    # None scales off the room diagonal; fine moves keep the search
    # improving deep into the schedule instead of stalling at the window
    sigma_pos: float | None = None
    sigma_pos_fraction: float = 0.01
    sigma_theta: float = math.radians(15.0)
    seed: int = 0

    def validate(self) -> None:
        if self.total_iterations < 1:
            raise ValueError("need at least one iteration")
        if self.t_initial is not None and not self.t_initial > 0.0:
            raise ValueError("initial temperature must be positive")
        if not self.t_final > 0.0:
            raise ValueError("final temperature must be positive")
        if self.sigma_pos is not None and not self.sigma_pos > 0.0:
            raise ValueError("position sigma must be positive")
        if not self.sigma_theta > 0.0:
            raise ValueError("orientation sigma must be positive")
        if self.stall_window < 1:
            raise ValueError("stall window must be >= 1")


class _Move:
    __slots__ = ("index", "attribute", "old", "new")

    def __init__(self, index, attribute, old, new):
        self.index = index
        self.attribute = attribute  # "position" | "orientation"
        self.old = old
        self.new = new


def movable_particles(ctx: SolveContext) -> list[int]:
    """Particles the state search may shift: free particles that are not
    rigid members (those follow their group particle)."""
    return [
        i
        for i in range(ctx.n)
        if ctx.inv_mass[i] > 0.0 and ctx.owner[i] < 0
    ]


def _draw_move(
    state: LayoutState,
    ctx: SolveContext,
    movable: list[int],
    sigma_pos: float,
    sigma_theta: float,
    rng: np.random.Generator,
) -> _Move:
    idx = movable[int(rng.integers(len(movable)))]
    if rng.random() < 0.5:
        dx = rng.normal(0.0, sigma_pos)
        dy = rng.normal(0.0, sigma_pos)
        x = state.px[idx] + dx
        y = state.py[idx] + dy
        if idx in ctx.stack_top:
            z = state.pz[idx] + rng.normal(0.0, 0.5 * sigma_pos)
        else:
            z = state.pz[idx]
        # shifts that leave the room are rejected (stay put), which keeps
        # the proposal symmetric on the room's interior
        if not ctx.room.contains((x, y)):
            x, y, z = state.px[idx], state.py[idx], state.pz[idx]
        return _Move(idx, "position", (state.px[idx], state.py[idx], state.pz[idx]), (x, y, z))
    dtheta = rng.normal(0.0, sigma_theta)
    new_theta = (state.theta[idx] + dtheta) % (2.0 * math.pi)
    return _Move(idx, "orientation", state.theta[idx], new_theta)


def _apply_move(state: LayoutState, ctx: SolveContext, move: _Move, values) -> None:
    idx = move.index
    if move.attribute == "position":
        state.px[idx], state.py[idx], state.pz[idx] = values
    else:
        state.theta[idx] = values
    rows = ctx.members_of.get(idx)
    if rows:
        gx, gy, gth = state.px[idx], state.py[idx], state.theta[idx]
        c, s = math.cos(gth), math.sin(gth)
        for m, (dx, dy, dth) in rows:
            state.px[m] = gx + c * dx - s * dy
            state.py[m] = gy + s * dx + c * dy
            state.theta[m] = (gth + dth) % (2.0 * math.pi)


def propose(
    state: LayoutState,
    ctx: SolveContext,
    config: AnnealConfig,
    rng: np.random.Generator,
) -> LayoutState:
    """Candidate state differing from the input in one attribute of one
    movable object."""
    sigma_pos = (_default_sigma_pos(ctx, config.sigma_pos_fraction)
                 if config.sigma_pos is None else config.sigma_pos)
    movable = movable_particles(ctx)
    if not movable:
        raise ValueError("no movable object to shift")
    move = _draw_move(state, ctx, movable, sigma_pos, config.sigma_theta, rng)
    candidate = state.copy()
    _apply_move(candidate, ctx, move, move.new)
    return candidate


def accept(
    energy_current: float,
    energy_candidate: float,
    temperature: float,
    rng: np.random.Generator,
) -> bool:
    """Metropolis acceptance with the Boltzmann rule."""
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    if energy_candidate <= energy_current:
        return True
    return rng.random() < math.exp(-(energy_candidate - energy_current) / temperature)


def _default_sigma_pos(ctx: SolveContext, fraction: float) -> float:
    min_x, min_y, max_x, max_y = ctx.room.bounds()
    return fraction * math.hypot(max_x - min_x, max_y - min_y)


def run_sa_mcmc(
    scene: Scene, config: AnnealConfig | None = None
) -> tuple[list, EnergyTrace]:
    """Anneal a scene and return the best-seen layout and its trace.

    Early-stops when the best energy has improved by no more than the
    stall threshold (0.1% by default) over the trailing stall window.
    """
    config = config or AnnealConfig()
    config.validate()
    ctx = SolveContext(scene)
    rng = np.random.default_rng(config.seed ^ 0xA11EA1)
    state = initialize(scene, config.seed)

    movable = movable_particles(ctx)
    if not movable:
        raise ValueError("scene has no movable objects")
    sigma_pos = (_default_sigma_pos(ctx, config.sigma_pos_fraction)
                 if config.sigma_pos is None else config.sigma_pos)

    energy, sums, _, _ = evaluate_energy(state, ctx)
    trace = EnergyTrace()
    trace.energies.append(energy)
    trace.violation_sums.append(sums)

    t_initial = config.t_initial
    if t_initial is None:
        t_initial = config.t_initial_fraction * energy if energy > 0.0 else 1.0
        t_initial = max(t_initial, config.t_final)
    temperatures = np.linspace(t_initial, config.t_final, config.total_iterations)

    best_energy = math.inf
    best_snapshot = state.snapshot()
    best_iteration = 0
    best_history: list[float] = []

    for iteration in range(1, config.total_iterations + 1):
        move = _draw_move(state, ctx, movable, sigma_pos, config.sigma_theta, rng)
        _apply_move(state, ctx, move, move.new)
        candidate_energy, candidate_sums, _, _ = evaluate_energy(state, ctx)
        if accept(energy, candidate_energy, float(temperatures[iteration - 1]), rng):
            energy = candidate_energy
            sums = candidate_sums
        else:
            _apply_move(state, ctx, move, move.old)
        trace.energies.append(energy)
        trace.violation_sums.append(sums)

        if energy < best_energy:
            best_energy = energy
            best_snapshot = state.snapshot()
            best_iteration = iteration
        best_history.append(best_energy)

        if iteration > config.stall_window:
            then = best_history[iteration - 1 - config.stall_window]
            if then - best_energy <= config.stall_threshold * then:
                break

    trace.best_energy = best_energy
    trace.best_iteration = best_iteration
    trace.best_layout = best_snapshot
    return best_snapshot, trace
