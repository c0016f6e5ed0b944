"""Topology model, route enumeration and first-fit wavelength assignment.

User sites attach to carrier POPs through access links (AAL); POPs
interconnect through carrier links (CL).  Candidate routes between two
user sites are all simple paths subject to a POP-count cap (default 3, to
bound latency) and a one-way latency cap derived from fiber length.
Wavelength assignment is plain first-fit over the channel grid with a
preference list of designated service channels; smarter assignment is out
of scope here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

DEFAULT_DELAY_MS_PER_KM = 0.005  # 5 us/km fiber propagation delay
DEFAULT_MAX_POPS = 3


class UnknownNodeError(KeyError):
    pass


class NoWavelengthAvailableError(RuntimeError):
    def __init__(self, message: str, blocking_link: Optional[str] = None):
        super().__init__(message)
        self.blocking_link = blocking_link


@dataclass(frozen=True)
class Edge:
    link_id: str
    a: str
    b: str
    length_km: float

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


@dataclass(frozen=True)
class RouteCandidate:
    nodes: Tuple[str, ...]          # site, POP..., site
    link_ids: Tuple[str, ...]
    total_length_km: float
    latency_ms: float

    @property
    def pop_count(self) -> int:
        return len(self.nodes) - 2


class DcxGraph:
    """Sites, POPs and the links connecting them."""

    def __init__(self, sites: Sequence[str], pops: Sequence[str],
                 edges: Sequence[Edge],
                 delay_ms_per_km: float = DEFAULT_DELAY_MS_PER_KM):
        self.sites = set(sites)
        self.pops = set(pops)
        overlap = self.sites & self.pops
        if overlap:
            raise ValueError(f"nodes listed as both site and POP: {sorted(overlap)}")
        self.delay_ms_per_km = delay_ms_per_km
        self._adj: Dict[str, List[Edge]] = {n: [] for n in (*sites, *pops)}
        self.edges: List[Edge] = []
        seen_links: Set[str] = set()
        for e in edges:
            for node in (e.a, e.b):
                if node not in self._adj:
                    raise UnknownNodeError(node)
            if e.a in self.sites and e.b in self.sites:
                raise ValueError(
                    f"link {e.link_id}: user sites may not be adjacent")
            if e.link_id in seen_links:
                raise ValueError(f"link {e.link_id} used by more than one edge")
            seen_links.add(e.link_id)
            self.edges.append(e)
            self._adj[e.a].append(e)
            self._adj[e.b].append(e)

    def latency_of(self, length_km: float) -> float:
        return length_km * self.delay_ms_per_km

    def enumerate_routes(self, src: str, dst: str,
                         max_pops: int = DEFAULT_MAX_POPS,
                         max_latency_ms: Optional[float] = None) -> List[RouteCandidate]:
        """All simple site-to-site paths within the POP and latency caps.

        Sorted by (POP count, length, node ids) so candidate order is
        reproducible.
        """
        for node in (src, dst):
            if node not in self._adj:
                raise UnknownNodeError(node)
        if src == dst:
            return []
        results: List[RouteCandidate] = []

        def walk(node: str, visited: Tuple[str, ...], links: Tuple[str, ...],
                 length: float) -> None:
            for edge in self._adj[node]:
                nxt = edge.other(node)
                if nxt in visited:
                    continue
                # intermediate hops must be POPs; sites terminate a path
                if nxt == dst:
                    candidate_len = length + edge.length_km
                    pops = len(visited) - 1  # nodes after src are POPs
                    if pops > max_pops:
                        continue
                    latency = self.latency_of(candidate_len)
                    if max_latency_ms is not None and latency > max_latency_ms:
                        continue
                    results.append(RouteCandidate(
                        nodes=visited + (nxt,),
                        link_ids=links + (edge.link_id,),
                        total_length_km=candidate_len,
                        latency_ms=latency))
                    continue
                if nxt in self.sites:
                    continue
                if len(visited) - 1 + 1 > max_pops:  # would exceed POP cap
                    continue
                walk(nxt, visited + (nxt,), links + (edge.link_id,),
                     length + edge.length_km)

        walk(src, (src,), (), 0.0)
        results.sort(key=lambda r: (r.pop_count, r.total_length_km, r.nodes))
        return results


@dataclass(frozen=True)
class ChannelPlan:
    """Frequency grid, service-channel preference list and background load."""

    grid_start_thz: float = 191.5
    grid_stop_thz: float = 196.0
    grid_spacing_ghz: float = 100.0
    service_channels_thz: Tuple[float, ...] = (191.5, 192.1, 194.6, 193.3, 196.0)
    background_blocks: Tuple[Tuple[float, float], ...] = (
        (193.4, 194.5), (194.7, 195.9))
    launch_power_dbm: float = 4.0

    def grid(self) -> List[float]:
        step = self.grid_spacing_ghz / 1e3
        n = int(round((self.grid_stop_thz - self.grid_start_thz) / step)) + 1
        return [round(self.grid_start_thz + i * step, 6) for i in range(n)]

    def background_channels(self) -> List[float]:
        step = self.grid_spacing_ghz / 1e3
        out = []
        for start, stop in self.background_blocks:
            n = int(round((stop - start) / step)) + 1
            out.extend(round(start + i * step, 6) for i in range(n))
        return out

    def scan_order(self) -> List[float]:
        """Service channels first (in list order), then the grid bottom-up."""
        seen = list(self.service_channels_thz)
        for f in self.grid():
            if f not in seen:
                seen.append(f)
        return seen


class WavelengthLedger:
    """Per-link occupancy of the channel grid.

    A frequency is assignable on a route iff it is free on every link of
    the route; reservations for a request are atomic.
    """

    def __init__(self, plan: ChannelPlan, link_ids: Sequence[str],
                 occupied: Optional[Dict[str, Sequence[float]]] = None):
        self.plan = plan
        self._occupied: Dict[str, Set[float]] = {lk: set() for lk in link_ids}
        background = plan.background_channels()
        for lk in link_ids:
            self._occupied[lk].update(background)
        for lk, freqs in (occupied or {}).items():
            if lk not in self._occupied:
                raise KeyError(f"unknown link id {lk!r}")
            self._occupied[lk].update(round(f, 6) for f in freqs)

    def occupied(self, link_id: str) -> FrozenSet[float]:
        return frozenset(self._occupied[link_id])

    def is_free(self, link_ids: Sequence[str], freq_thz: float) -> bool:
        f = round(freq_thz, 6)
        return all(f not in self._occupied[lk] for lk in link_ids)

    def assign(self, link_ids: Sequence[str], count: int) -> List[float]:
        """First-fit assignment of `count` channels across the route."""
        if count < 1:
            raise ValueError("count must be >= 1")
        for lk in link_ids:
            if lk not in self._occupied:
                raise KeyError(f"unknown link id {lk!r}")
        chosen: List[float] = []
        for freq in self.plan.scan_order():
            if freq in chosen:
                continue
            if self.is_free(link_ids, freq):
                chosen.append(freq)
                if len(chosen) == count:
                    break
        if len(chosen) < count:
            blocking = self._most_loaded(link_ids)
            raise NoWavelengthAvailableError(
                f"only {len(chosen)} of {count} channels free across "
                f"{list(link_ids)} (most loaded link: {blocking})",
                blocking_link=blocking)
        for freq in chosen:
            for lk in link_ids:
                self._occupied[lk].add(freq)
        return chosen

    def release(self, link_ids: Sequence[str], freqs: Sequence[float]) -> None:
        for freq in freqs:
            f = round(freq, 6)
            for lk in link_ids:
                self._occupied[lk].discard(f)

    def _most_loaded(self, link_ids: Sequence[str]) -> str:
        return max(link_ids, key=lambda lk: len(self._occupied[lk]))
