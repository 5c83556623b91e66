"""Exact dynamics of finite single-valued systems (discrete time, T = Z+).

A finite state set with the discrete metric is a compact metric space, so
closure and interior are the identity here; every statement below that the
continuum theory phrases with cl/int is implemented literally with the set
itself.  State sets are exposed as frozensets of labels; internally all
operations run on bitmasks over the fixed state ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .lattice import SetLattice
from .order import TooLarge, UnknownElement, enum_bound

TABLE_LIMIT = 16  # build full 2^n transfer tables only below this


class InvalidOrbit(ValueError):
    pass


class NotForwardInvariant(ValueError):
    pass


class NotAnAttractor(ValueError):
    pass


class NotARepeller(ValueError):
    pass


@dataclass(frozen=True)
class InvarianceFlags:
    invariant: bool
    forward: bool
    backward: bool
    forward_backward: bool
    strong: bool


@dataclass(frozen=True)
class RegionCheck:
    """Predicate result plus the time witness for trapping/repelling regions."""

    holds: bool
    tau: int | None

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class Orbit:
    """Eventually periodic orbit coding: pre-period then cycle.

    For a backward orbit the states are listed in backward time order,
    pre[0] = x, pre[k+1] a preimage of pre[k], and the cycle repeats forever
    into the past.  Forward orbits read the same data in forward time.
    """

    pre: tuple
    cycle: tuple
    backward: bool = True


@dataclass(frozen=True)
class PairReport:
    ok: bool
    reason: str | None = None
    witness: object = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "Ok" if self.ok else f"violation: {self.reason} at {self.witness!r}"


class FiniteDynSys:
    """A total single-valued map on a finite state set."""

    def __init__(self, states: Sequence[Hashable], next_map: Mapping):
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise ValueError("state labels are not unique")
        self.index = {s: i for i, s in enumerate(self.states)}
        missing = [s for s in self.states if s not in next_map]
        if missing:
            raise ValueError(f"next map is not total, missing {missing!r}")
        for s in self.states:
            if next_map[s] not in self.index:
                raise UnknownElement(next_map[s])
        self.next = {s: next_map[s] for s in self.states}
        n = len(self.states)
        self._n = n
        self._full = (1 << n) - 1
        self._img1 = tuple(1 << self.index[next_map[s]] for s in self.states)
        pre = [0] * n
        for i, s in enumerate(self.states):
            pre[self.index[next_map[s]]] |= 1 << i
        self._pre1 = tuple(pre)
        self._img_tab = None
        self._pre_tab = None
        self._omega_pt = None
        self._cycles_cache = None

    # -- mask plumbing -------------------------------------------------------

    def mask(self, members: Iterable) -> int:
        m = 0
        for s in members:
            if s not in self.index:
                raise UnknownElement(s)
            m |= 1 << self.index[s]
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(self.states[i] for i in range(self._n) if m >> i & 1)

    def _image_mask(self, m: int) -> int:
        tab = self._tables()[0]
        if tab is not None:
            return tab[m]
        out = 0
        rest = m
        while rest:
            i = (rest & -rest).bit_length() - 1
            out |= self._img1[i]
            rest &= rest - 1
        return out

    def _preimage_mask(self, m: int) -> int:
        tab = self._tables()[1]
        if tab is not None:
            return tab[m]
        out = 0
        rest = m
        while rest:
            i = (rest & -rest).bit_length() - 1
            out |= self._pre1[i]
            rest &= rest - 1
        return out

    def _tables(self):
        if self._n > TABLE_LIMIT:
            return None, None
        if self._img_tab is None:
            n = self._n
            img = [0] * (1 << n)
            pre = [0] * (1 << n)
            img1, pre1 = self._img1, self._pre1
            for m in range(1, 1 << n):
                low = (m & -m).bit_length() - 1
                rest = m & (m - 1)
                img[m] = img[rest] | img1[low]
                pre[m] = pre[rest] | pre1[low]
            self._img_tab = img
            self._pre_tab = pre
        return self._img_tab, self._pre_tab

    def _tail_cycle(self, m: int, step) -> int:
        """Union of the eventual cycle of the mask sequence m, step(m), ..."""
        seen = {}
        cur = m
        seq = []
        while cur not in seen:
            seen[cur] = len(seq)
            seq.append(cur)
            cur = step(cur)
        out = 0
        for k in range(seen[cur], len(seq)):
            out |= seq[k]
        return out

    def _inv_mask(self, m: int) -> int:
        # prune states whose image leaves or that have no preimage inside
        cur = m
        while True:
            keep = 0
            rest = cur
            while rest:
                i = (rest & -rest).bit_length() - 1
                if self._img1[i] & cur:
                    keep |= 1 << i
                rest &= rest - 1
            keep &= self._image_mask(cur)
            if keep == cur:
                return cur
            cur = keep

    def _inv_plus_mask(self, m: int) -> int:
        cur = m
        while True:
            nxt = 0
            rest = cur
            while rest:
                i = (rest & -rest).bit_length() - 1
                if self._img1[i] & cur:
                    nxt |= 1 << i
                rest &= rest - 1
            if nxt == cur:
                return cur
            cur = nxt

    def _omega_mask(self, m: int) -> int:
        return self._tail_cycle(m, self._image_mask)

    def _alpha_mask(self, m: int) -> int:
        return self._tail_cycle(m, self._preimage_mask)

    def _omega_points(self):
        if self._omega_pt is None:
            self._omega_pt = tuple(self._omega_mask(1 << i) for i in range(self._n))
        return self._omega_pt

    def _cycle_masks(self):
        """The cycles of the next map, one mask per cycle."""
        if self._cycles_cache is None:
            on_cycle = self._inv_plus_mask_cycles()
            cycles = []
            seen = 0
            for i in range(self._n):
                if on_cycle >> i & 1 and not seen >> i & 1:
                    c = 0
                    j = i
                    while not c >> j & 1:
                        c |= 1 << j
                        j = (self._img1[j]).bit_length() - 1
                    cycles.append(c)
                    seen |= c
            self._cycles_cache = tuple(cycles)
        return self._cycles_cache

    def _inv_plus_mask_cycles(self) -> int:
        # states on a cycle: walk n steps from each state, then test recurrence
        out = 0
        for i in range(self._n):
            j = i
            for _ in range(self._n):
                j = (self._img1[j]).bit_length() - 1
            # j is on a cycle now; mark the whole cycle
            start = j
            while not out >> j & 1:
                out |= 1 << j
                j = (self._img1[j]).bit_length() - 1
                if j == start:
                    break
        return out

    def _reach_fwd_mask(self, m: int) -> int:
        cur = m
        while True:
            nxt = cur | self._image_mask(cur)
            if nxt == cur:
                return cur
            cur = nxt

    def _reach_bwd_mask(self, m: int) -> int:
        cur = m
        while True:
            nxt = cur | self._preimage_mask(cur)
            if nxt == cur:
                return cur
            cur = nxt

    # -- dynamics operations ---------------------------------------------------

    def image(self, subset: Iterable, t: int = 1) -> frozenset:
        m = self.mask(subset)
        for _ in range(t):
            m = self._image_mask(m)
        return self.unmask(m)

    def preimage(self, subset: Iterable, t: int = 1) -> frozenset:
        m = self.mask(subset)
        for _ in range(t):
            m = self._preimage_mask(m)
        return self.unmask(m)

    def reachable_forward(self, subset: Iterable) -> frozenset:
        return self.unmask(self._reach_fwd_mask(self.mask(subset)))

    def reachable_backward(self, subset: Iterable) -> frozenset:
        return self.unmask(self._reach_bwd_mask(self.mask(subset)))

    def classify_invariance(self, subset: Iterable) -> InvarianceFlags:
        m = self.mask(subset)
        img = self._image_mask(m)
        pre = self._preimage_mask(m)
        forward = not (img & ~m)
        invariant = img == m
        backward = not (pre & ~m)
        forward_backward = forward and backward
        strong = invariant and forward_backward
        return InvarianceFlags(invariant, forward, backward, forward_backward, strong)

    def inv(self, subset: Iterable) -> frozenset:
        """Maximal invariant subset: states on a complete orbit inside."""
        return self.unmask(self._inv_mask(self.mask(subset)))

    def inv_plus(self, subset: Iterable) -> frozenset:
        """Maximal forward invariant subset."""
        return self.unmask(self._inv_plus_mask(self.mask(subset)))

    def omega(self, subset: Iterable) -> frozenset:
        return self.unmask(self._omega_mask(self.mask(subset)))

    def alpha(self, subset: Iterable) -> frozenset:
        return self.unmask(self._alpha_mask(self.mask(subset)))

    def backward_orbit_exists(self, x, within: Iterable | None = None) -> bool:
        m = self._full if within is None else self.mask(within)
        return bool(self._backward_orbit_sources(m) & (1 << self.index[x]))

    def _backward_orbit_sources(self, m: int) -> int:
        # states of m with a complete backward orbit inside m: those reachable
        # inside m from a cycle contained in m
        cyc = 0
        for c in self._cycle_masks():
            if not (c & ~m):
                cyc |= c
        cur = cyc
        while True:
            nxt = cur | (self._image_mask(cur) & m)
            if nxt == cur:
                return cur
            cur = nxt

    def validate_orbit(self, orbit: Orbit) -> None:
        states = list(orbit.pre) + list(orbit.cycle)
        for s in states:
            if s not in self.index:
                raise InvalidOrbit(f"unknown state {s!r}")
        if not orbit.cycle:
            raise InvalidOrbit("orbit needs a nonempty cycle")
        cyc = list(orbit.cycle)
        if orbit.backward:
            # consecutive states related by preimage: next(seq[k+1]) == seq[k]
            seq = list(orbit.pre) + cyc
            for a, b in zip(seq, seq[1:]):
                if self.next[b] != a:
                    raise InvalidOrbit(f"{b!r} is not a preimage of {a!r}")
            if self.next[cyc[0]] != cyc[-1]:
                raise InvalidOrbit("cycle part does not close up")
        else:
            seq = list(orbit.pre) + cyc
            for a, b in zip(seq, seq[1:]):
                if self.next[a] != b:
                    raise InvalidOrbit(f"{b!r} does not follow {a!r}")
            if self.next[cyc[-1]] != cyc[0]:
                raise InvalidOrbit("cycle part does not close up")

    def alpha_orbital(self, orbit: Orbit) -> frozenset:
        """States visited at arbitrarily negative times: the backward cycle."""
        if not orbit.backward:
            raise InvalidOrbit("alpha_orbital needs a backward orbit")
        self.validate_orbit(orbit)
        return frozenset(orbit.cycle)

    def backward_orbits_through(self, x) -> list[Orbit]:
        """All backward orbits through x, one per (cycle, path) pair."""
        if x not in self.index:
            raise UnknownElement(x)
        out = []
        target = self.index[x]
        for c in self._cycle_masks():
            for path in self._paths_from_cycle(c, target):
                cyc_states = self._cycle_states_ordered(c, path[-1] if path else target)
                out.append(Orbit(tuple(self.states[i] for i in path[:-1] or []), tuple(cyc_states), True))
        return out

    def _cycle_states_ordered(self, cmask: int, entry: int):
        if not cmask >> entry & 1:
            entry = (cmask & -cmask).bit_length() - 1
        seq = []
        j = entry
        while True:
            seq.append(self.states[j])
            j = self._pre_on_cycle(cmask, j)
            if j == entry:
                break
        return seq

    def _pre_on_cycle(self, cmask: int, j: int) -> int:
        pre = self._pre1[j] & cmask
        return (pre & -pre).bit_length() - 1

    def _paths_from_cycle(self, cmask: int, target: int):
        # backward-time paths target = p0, p1, ..., pk with pk on the cycle and
        # no earlier state on it; forward arrows run pk -> ... -> p0
        if cmask >> target & 1:
            yield [target]
            return
        for path in self._dfs_paths(target, cmask):
            yield path

    def _dfs_paths(self, target: int, cmask: int):
        stack = [[target]]
        while stack:
            path = stack.pop()
            last = path[-1]
            pre = self._pre1[last]
            rest = pre
            while rest:
                i = (rest & -rest).bit_length() - 1
                rest &= rest - 1
                if cmask >> i & 1:
                    yield path + [i]
                elif i not in path:
                    stack.append(path + [i])

    def dual_plus(self, subset: Iterable) -> frozenset:
        """S+ : states whose omega-limit misses S."""
        m = self.mask(subset)
        pts = self._omega_points()
        out = 0
        for i in range(self._n):
            if not pts[i] & m:
                out |= 1 << i
        return self.unmask(out)

    def dual_minus(self, subset: Iterable) -> frozenset:
        """S- : states with some backward orbit whose orbital alpha-limit misses S."""
        m = self.mask(subset)
        seeds = 0
        for c in self._cycle_masks():
            if not (c & m):
                seeds |= c
        return self.unmask(self._reach_fwd_mask(seeds) if seeds else 0)

    def restrict(self, subset: Iterable) -> "FiniteDynSys":
        m = self.mask(subset)
        if self._image_mask(m) & ~m:
            raise NotForwardInvariant(f"{sorted(map(repr, subset))} is not forward invariant")
        sub = [s for s in self.states if m >> self.index[s] & 1]
        return FiniteDynSys(sub, {s: self.next[s] for s in sub})

    def is_surjective(self) -> bool:
        return self._image_mask(self._full) == self._full

    def is_trapping_region(self, subset: Iterable) -> RegionCheck:
        """Trapping iff forward invariant; cl = int = id collapses the tau clause."""
        m = self.mask(subset)
        holds = not (self._image_mask(m) & ~m)
        return RegionCheck(holds, 1 if holds else None)

    def is_repelling_region(self, subset: Iterable) -> RegionCheck:
        m = self.mask(subset)
        holds = not (self._preimage_mask(m) & ~m)
        return RegionCheck(holds, -1 if holds else None)

    def is_attracting_nbhd(self, subset: Iterable) -> bool:
        m = self.mask(subset)
        att = not (self._omega_mask(m) & ~m)
        rep_c = not (self._alpha_mask(~m & self._full) & m)
        if att != rep_c:
            raise AssertionError("complement law U attracting iff U^c repelling failed")
        return att

    def is_repelling_nbhd(self, subset: Iterable) -> bool:
        m = self.mask(subset)
        return not (self._alpha_mask(m) & ~m)

    def attracting_neighborhoods(self, bound: int | None = None) -> list[frozenset]:
        limit = enum_bound() if bound is None else bound
        if self._n > limit:
            raise TooLarge(f"{self._n} states exceeds enumeration bound {limit}")
        return [
            self.unmask(m)
            for m in range(1 << self._n)
            if not (self._omega_mask(m) & ~m)
        ]

    def repelling_neighborhoods(self, bound: int | None = None) -> list[frozenset]:
        limit = enum_bound() if bound is None else bound
        if self._n > limit:
            raise TooLarge(f"{self._n} states exceeds enumeration bound {limit}")
        return [
            self.unmask(m)
            for m in range(1 << self._n)
            if not (self._alpha_mask(m) & ~m)
        ]

    def att_lattice(self, bound: int | None = None) -> SetLattice:
        """Att = omega images of attracting neighborhoods, join union, meet Inv(cap)."""
        limit = enum_bound() if bound is None else bound
        if self._n > limit:
            raise TooLarge(f"{self._n} states exceeds enumeration bound {limit}")
        elems = {self._omega_mask(m) for m in range(1 << self._n) if not (self._omega_mask(m) & ~m)}
        meet = lambda a, b: self.unmask(self._inv_mask(self.mask(a & b)))
        return SetLattice(self.states, (self.unmask(m) for m in elems), meet=meet)

    def rep_lattice(self, bound: int | None = None) -> SetLattice:
        limit = enum_bound() if bound is None else bound
        if self._n > limit:
            raise TooLarge(f"{self._n} states exceeds enumeration bound {limit}")
        elems = {self._alpha_mask(m) for m in range(1 << self._n) if not (self._alpha_mask(m) & ~m)}
        return SetLattice(self.states, (self.unmask(m) for m in elems))

    def basin(self, attractor: Iterable) -> frozenset:
        """The canonical trapping region: states whose omega-limit lies in A."""
        m = self.mask(attractor)
        pts = self._omega_points()
        out = 0
        for i in range(self._n):
            if not (pts[i] & ~m):
                out |= 1 << i
        return self.unmask(out)

    def dual_repeller(self, attractor: Iterable) -> frozenset:
        """A* = Inv+(U^c) for a trapping region U of A; cross-checked against A+."""
        a = self.mask(attractor)
        if self._omega_mask(a) != a or (self._image_mask(a) != a):
            raise NotAnAttractor(f"{sorted(map(repr, attractor))}")
        u = self.mask(self.basin(self.unmask(a)))
        if self._omega_mask(u) != a:
            raise NotAnAttractor(f"{sorted(map(repr, attractor))}")
        star = self._inv_plus_mask(~u & self._full)
        plus = self.mask(self.dual_plus(self.unmask(a)))
        if star != plus:
            raise AssertionError("Eq (6) cross-check failed: A* != A+")
        return self.unmask(star)

    def dual_attractor(self, repeller: Iterable) -> frozenset:
        """R* = Inv(U^c) for a repelling region U of R; cross-checked against R-.

        R is forward-backward invariant, so R itself is a repelling region
        for R and Prop 3.16 makes the choice irrelevant.
        """
        r = self.mask(repeller)
        if (
            self._image_mask(r) & ~r
            or self._preimage_mask(r) & ~r
            or self._inv_plus_mask(r) != r
        ):
            raise NotARepeller(f"{sorted(map(repr, repeller))}")
        star = self._inv_mask(~r & self._full)
        minus = self.mask(self.dual_minus(self.unmask(r)))
        if star != minus:
            raise AssertionError("Eq (7) cross-check failed: R* != R-")
        return self.unmask(star)

    def check_ar_pair(self, attractor: Iterable, repeller: Iterable) -> PairReport:
        """Both characterizations of an attractor-repeller pair, which must agree."""
        a = self.mask(attractor)
        r = self.mask(repeller)
        try:
            by_duality = self.mask(self.dual_repeller(self.unmask(a))) == r
        except NotAnAttractor:
            by_duality = False
        direct, reason, witness = self._ar_direct(a, r)
        if direct != by_duality:
            raise AssertionError("Theorem 3.19 characterizations disagree")
        if direct:
            return PairReport(True)
        return PairReport(False, reason, witness)

    def _ar_direct(self, a: int, r: int):
        if a & r:
            return False, "A and R are not disjoint", self.unmask(a & r)
        if self._image_mask(a) != a:
            return False, "A is not invariant", self.unmask(a)
        if self._image_mask(r) & ~r:
            return False, "R is not forward invariant", self.unmask(r)
        outside = self._full & ~(a | r)
        pts = self._omega_points()
        rest = outside
        while rest:
            i = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if pts[i] & ~a:
                return False, "omega(x) escapes A", self.states[i]
            for c in self._cycle_masks():
                if self._mask_reaches(c, i) and (c & ~r):
                    return False, "alpha_o of a backward orbit escapes R", self.states[i]
        return True, None, None

    def _mask_reaches(self, source: int, target_bit: int) -> bool:
        return bool(self._reach_fwd_mask(source) >> target_bit & 1)

    def commuting_square_check(self, bound: int | None = None) -> PairReport:
        """Diagram (1): omega = Inv on ANbhd, alpha = Inv+ on RNbhd, and the square commutes."""
        limit = enum_bound() if bound is None else bound
        if self._n > limit:
            raise TooLarge(f"{self._n} states exceeds enumeration bound {limit}")
        full = self._full
        for m in range(1 << self._n):
            om = self._omega_mask(m)
            if om & ~m:
                continue
            u = self.unmask(m)
            if self._inv_mask(m) != om:
                return PairReport(False, "Inv(U) != omega(U) on an attracting neighborhood", u)
            mc = full & ~m
            al = self._alpha_mask(mc)
            if al & ~mc:
                return PairReport(False, "U attracting but U^c not repelling", u)
            if self._inv_plus_mask(mc) != al:
                return PairReport(False, "Inv+(U^c) != alpha(U^c)", u)
            if self.mask(self.dual_repeller(self.unmask(om))) != al:
                return PairReport(False, "omega(U)* != alpha(U^c)", u)
        # Props 4.6 / 4.7: the anti-isomorphism laws on the full lattices
        att = self.att_lattice(bound=limit)
        for x in att.elements:
            for y in att.elements:
                sx = self.dual_repeller(x)
                sy = self.dual_repeller(y)
                if self.dual_repeller(att.join(x, y)) != sx & sy:
                    return PairReport(False, "(A v A')* != A* ^ A'*", (x, y))
                if self.dual_repeller(att.meet(x, y)) != sx | sy:
                    return PairReport(False, "(A ^ A')* != A* v A'*", (x, y))
            if self.dual_attractor(self.dual_repeller(x)) != x:
                return PairReport(False, "(A*)* != A", x)
        return PairReport(True)

    def cycles(self) -> list[frozenset]:
        return [self.unmask(c) for c in self._cycle_masks()]


def system_from_map(next_map: Mapping) -> FiniteDynSys:
    return FiniteDynSys(sorted(next_map, key=repr), next_map)


# shared test fixtures from the exact-dynamics corpus
def ds1() -> FiniteDynSys:
    return FiniteDynSys("mzab", {"m": "z", "z": "z", "a": "b", "b": "b"})


def ds2() -> FiniteDynSys:
    return FiniteDynSys((0, 1, 2), {0: 1, 1: 2, 2: 0})


def ds3() -> FiniteDynSys:
    return FiniteDynSys("pqr", {"p": "p", "q": "p", "r": "r"})
