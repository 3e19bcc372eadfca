"""Compiled batch planner.

Plans a whole tick's worth of agents in one pass: for each decider it builds
the ego-centric view, runs the rollout budget, and picks the argmax-mean
action.  This must stay bit-for-bit equivalent to the reference path
(cognition.observe -> build_cognitive_world -> decide); the equivalence is
enforced by tests, and the draw-order contract lives in cognition.py's
docstring.  Keep the floating-point expressions in the same shape when
editing either file.

The kernel releases the GIL, so a tick can be split into index chunks and
planned on several threads; results are written per-decider, making the
output independent of chunking and scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from .engine import Species, WorldState
from .model import ModelParams
from .cognition import CognitionParams
from .rng import CELL_DRAW_BASE, GOLDEN, MASK64, PURPOSE_ROLLOUT, PURPOSE_TIEBREAK

DEG = math.pi / 180.0

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_GOLD = np.uint64(GOLDEN)
_CELL_BASE = np.uint64(CELL_DRAW_BASE)
_P_ROLLOUT = np.uint64(PURPOSE_ROLLOUT)
_P_TIEBREAK = np.uint64(PURPOSE_TIEBREAK)


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True, inline="always")
def _fold(h, p):
    return _mix64(h + p + _GOLD)


@njit(cache=True, nogil=True, inline="always")
def _draw(key, index):
    v = _mix64(key + (index + _U1) * _GOLD)
    return np.float64(v >> np.uint64(11)) * 2.0 ** -53


@njit(cache=True, nogil=True, inline="always")
def _randint3(u):
    a = int(u * 3.0)
    return 2 if a > 2 else a


@njit(cache=True, nogil=True, inline="always")
def _wrapd(d, span):
    d = d % span
    if d > span / 2:
        d -= span
    return d


@njit(cache=True, nogil=True)
def _plan_range(start, end, deciders, ax, ay, ah, asp, aen, aid,
                grass, width, height, wrap,
                n_rollouts, lengths, radii, discounts, death_rewards,
                move_cost, sheep_gain, wolf_gain, seed, tick,
                chosen, counts, sums):
    n = ax.shape[0]
    fw = np.float64(width)
    fh = np.float64(height)
    for d in range(start, end):
        e = deciders[d]
        sp = asp[e]
        radius = radii[sp]
        length = lengths[sp]
        rolls = n_rollouts[sp]
        gamma = discounts[sp]
        death_r = death_rewards[sp]
        half = int(math.ceil(radius)) + length
        side = 2 * half + 1
        ncells = side * side
        r2 = radius * radius

        pcx = int(math.floor(ax[e]))
        pcy = int(math.floor(ay[e]))
        fx = ax[e] - math.floor(ax[e])
        fy = ay[e] - math.floor(ay[e])

        base_cells = np.full(ncells, 2, np.int8)
        bound = int(math.ceil(radius)) + 1
        observed = 0
        live = 0
        for dc in range(-bound, bound + 1):
            for dr in range(-bound, bound + 1):
                ccx = dc + 0.5 - fx
                ccy = dr + 0.5 - fy
                if ccx * ccx + ccy * ccy > r2:
                    continue
                mc = pcx + dc
                mr = pcy + dr
                if wrap:
                    mc = mc % width
                    mr = mr % height
                elif mc < 0 or mc >= width or mr < 0 or mr >= height:
                    continue
                observed += 1
                cell = (half + dc) * side + (half + dr)
                if grass[mc, mr]:
                    base_cells[cell] = 1
                    live += 1
                else:
                    base_cells[cell] = 0
        density = live / observed if observed > 0 else 0.0

        ego_cx = half + fx
        ego_cy = half + fy
        nbx = np.empty(n, np.float64)
        nby = np.empty(n, np.float64)
        nbh = np.empty(n, np.float64)
        nbs = np.empty(n, np.int8)
        nag = 0
        for j in range(n):
            if j == e:
                continue
            dx = ax[j] - ax[e]
            dy = ay[j] - ay[e]
            if wrap:
                dx = _wrapd(dx, fw)
                dy = _wrapd(dy, fh)
            if dx * dx + dy * dy <= r2:
                nbx[nag] = ego_cx + dx
                nby[nag] = ego_cy + dy
                nbh[nag] = ah[j]
                nbs[nag] = asp[j]
                nag += 1

        m_ag = nag + 1
        work_cells = np.empty(ncells, np.int8)
        wx = np.empty(m_ag, np.float64)
        wy = np.empty(m_ag, np.float64)
        wh = np.empty(m_ag, np.float64)
        wsp = np.empty(m_ag, np.int8)
        walive = np.empty(m_ag, np.bool_)

        for a in range(3):
            counts[d, a] = 0
            sums[d, a] = 0.0

        for r in range(rolls):
            key = _fold(_fold(_fold(_fold(_fold(_U0, seed), _P_ROLLOUT),
                                    np.uint64(aid[e])), tick), np.uint64(r))
            work_cells[:] = base_cells
            wx[0] = ego_cx
            wy[0] = ego_cy
            wh[0] = ah[e]
            wsp[0] = sp
            walive[0] = True
            for j in range(nag):
                wx[j + 1] = nbx[j]
                wy[j + 1] = nby[j]
                wh[j + 1] = nbh[j]
                wsp[j + 1] = nbs[j]
                walive[j + 1] = True
            ego_energy = aen[e]

            ctr = _U0
            first = _randint3(_draw(key, ctr))
            ctr += _U1
            total = 0.0
            disc = 1.0
            died = False

            for tau in range(length):
                if tau == 0:
                    act = first
                else:
                    act = _randint3(_draw(key, ctr))
                    ctr += _U1
                e_before = ego_energy

                wh[0] = (wh[0] + (act - 1) * 30.0) % 360.0
                rad = wh[0] * DEG
                wx[0] += math.sin(rad)
                wy[0] += math.cos(rad)
                ego_energy -= move_cost
                col = int(wx[0])
                row = int(wy[0])
                if sp == 0:
                    cell = col * side + row
                    st = work_cells[cell]
                    if st == 2:
                        st = 1 if _draw(key, _CELL_BASE + np.uint64(cell)) < density else 0
                        work_cells[cell] = st
                    if st == 1:
                        work_cells[cell] = 0
                        ego_energy += sheep_gain
                else:
                    prey = -1
                    for jj in range(m_ag):
                        if walive[jj] and wsp[jj] == 0 and int(wx[jj]) == col and int(wy[jj]) == row:
                            prey = jj
                            break
                    if prey > 0:
                        walive[prey] = False
                        ego_energy += wolf_gain
                died = ego_energy <= 0.0

                if not died:
                    for j in range(1, m_ag):
                        if not walive[j]:
                            continue
                        u = _draw(key, ctr)
                        ctr += _U1
                        wh[j] = (wh[j] + (u * 90.0 - 45.0)) % 360.0
                        rad = wh[j] * DEG
                        wx[j] += math.sin(rad)
                        wy[j] += math.cos(rad)
                        col = int(wx[j])
                        row = int(wy[j])
                        if wsp[j] == 0:
                            cell = col * side + row
                            st = work_cells[cell]
                            if st == 2:
                                st = 1 if _draw(key, _CELL_BASE + np.uint64(cell)) < density else 0
                                work_cells[cell] = st
                            if st == 1:
                                work_cells[cell] = 0
                        else:
                            prey = -1
                            for jj in range(m_ag):
                                if walive[jj] and wsp[jj] == 0 and int(wx[jj]) == col and int(wy[jj]) == row:
                                    prey = jj
                                    break
                            if prey == 0:
                                walive[0] = False
                                died = True
                                break
                            elif prey > 0:
                                walive[prey] = False

                if died:
                    reward = death_r
                else:
                    reward = ego_energy - e_before
                total += disc * reward
                disc *= gamma
                if died:
                    break

            counts[d, first] += 1
            sums[d, first] += total

        best_mean = 0.0
        has_best = False
        for a in range(3):
            if counts[d, a] > 0:
                mval = sums[d, a] / counts[d, a]
                if not has_best or mval > best_mean:
                    best_mean = mval
                    has_best = True
        nbest = 0
        best0 = 0
        best1 = 0
        best2 = 0
        for a in range(3):
            if counts[d, a] > 0 and sums[d, a] / counts[d, a] == best_mean:
                if nbest == 0:
                    best0 = a
                elif nbest == 1:
                    best1 = a
                else:
                    best2 = a
                nbest += 1
        if nbest > 1:
            tkey = _fold(_fold(_fold(_fold(_U0, seed), _P_TIEBREAK),
                               np.uint64(aid[e])), tick)
            u = _draw(tkey, _U0)
            idx = int(u * nbest)
            if idx >= nbest:
                idx = nbest - 1
            if idx == 0:
                chosen[d] = best0
            elif idx == 1:
                chosen[d] = best1
            else:
                chosen[d] = best2
        else:
            chosen[d] = best0


_POOL: ThreadPoolExecutor | None = None
_POOL_SIZE = 0


def _get_pool(threads: int) -> ThreadPoolExecutor:
    global _POOL, _POOL_SIZE
    if _POOL is None or _POOL_SIZE != threads:
        if _POOL is not None:
            _POOL.shutdown(wait=False)
        _POOL = ThreadPoolExecutor(max_workers=threads)
        _POOL_SIZE = threads
    return _POOL


def _drop_pool_after_fork() -> None:
    # forked children inherit a pool object whose threads do not exist
    global _POOL, _POOL_SIZE
    _POOL = None
    _POOL_SIZE = 0


os.register_at_fork(after_in_child=_drop_pool_after_fork)


def warmup() -> None:
    """Force kernel compilation (or cache load) outside any timed section."""
    grass = np.zeros((3, 3), dtype=bool)
    args = (np.zeros(1, np.int64), np.array([1.5]), np.array([1.5]),
            np.array([0.0]), np.zeros(1, np.int8), np.array([5.0]),
            np.zeros(1, np.int64), grass, np.int64(3), np.int64(3), True,
            np.ones(2, np.int64), np.ones(2, np.int64), np.ones(2, np.float64),
            np.ones(2, np.float64), np.zeros(2, np.float64),
            np.float64(1.0), np.float64(4.0), np.float64(20.0),
            np.uint64(0), np.uint64(1),
            np.empty(1, np.int8), np.zeros((1, 3), np.int64), np.zeros((1, 3), np.float64))
    _plan_range(0, 1, *args)


def roster_arrays(world: WorldState) -> tuple[list, tuple[np.ndarray, ...]]:
    """Flatten the live roster (id order) into kernel-ready arrays."""
    live = [a for a in world.agents if a.alive]
    n = len(live)
    ax = np.empty(n, np.float64)
    ay = np.empty(n, np.float64)
    ah = np.empty(n, np.float64)
    asp = np.empty(n, np.int8)
    aen = np.empty(n, np.float64)
    aid = np.empty(n, np.int64)
    for i, a in enumerate(live):
        ax[i] = a.x
        ay[i] = a.y
        ah[i] = a.heading
        asp[i] = int(a.species)
        aen[i] = a.energy
        aid[i] = a.id
    return live, (ax, ay, ah, asp, aen, aid)


def decide_batch(world: WorldState, arrays: tuple[np.ndarray, ...],
                 deciders: np.ndarray, mparams: ModelParams,
                 cog_by_species: dict[Species, CognitionParams],
                 seed: int, tick: int, threads: int = 1,
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Plan every decider for one tick; returns (chosen, counts, sums).

    `deciders` holds roster indices whose species has an entry in
    `cog_by_species`.  Output is independent of `threads`.
    """
    ax, ay, ah, asp, aen, aid = arrays
    n_rollouts = np.zeros(2, np.int64)
    lengths = np.zeros(2, np.int64)
    radii = np.ones(2, np.float64)
    discounts = np.ones(2, np.float64)
    death_rewards = np.zeros(2, np.float64)
    for sp, cp in cog_by_species.items():
        n_rollouts[int(sp)] = cp.n_rollouts
        lengths[int(sp)] = cp.rollout_length
        radii[int(sp)] = cp.vision_radius
        discounts[int(sp)] = cp.discount
        death_rewards[int(sp)] = cp.death_reward

    m = len(deciders)
    chosen = np.empty(m, np.int8)
    counts = np.zeros((m, 3), np.int64)
    sums = np.zeros((m, 3), np.float64)
    if m == 0:
        return chosen, counts, sums

    useed = np.uint64(seed & MASK64)
    utick = np.uint64(tick)
    args = (deciders, ax, ay, ah, asp, aen, aid,
            world.grass, np.int64(world.width), np.int64(world.height), world.wrap,
            n_rollouts, lengths, radii, discounts, death_rewards,
            np.float64(mparams.move_cost), np.float64(mparams.sheep.gain_from_food),
            np.float64(mparams.wolves.gain_from_food), useed, utick,
            chosen, counts, sums)

    if threads <= 1 or m < 2 * threads:
        _plan_range(0, m, *args)
    else:
        pool = _get_pool(threads)
        step = (m + threads - 1) // threads
        futures = [
            pool.submit(_plan_range, lo, min(lo + step, m), *args)
            for lo in range(0, m, step)
        ]
        for f in futures:
            f.result()
    return chosen, counts, sums
