"""Ground-truth optical line-system simulator.

Each link is an ordered chain of (fiber span, amplifier) pairs.  The
simulator computes per-link GSNR as a function of channel frequency and
simulated time from three ingredients:

* amplifier noise -- per-amplifier ASE power ``NF * h * nu * (G - 1) * B``
  propagated to the link end, with ``B`` the receiver-matched reference
  bandwidth (the probing mode's symbol rate);
* fiber nonlinearity -- an incoherent per-span inverse-SNR contribution
  ``eta * P_mW^2``, deliberately small for a metro-scale system and
  checkable by hand;
* slow drift -- a per-link Ornstein-Uhlenbeck perturbation in the dB
  domain, sampled on a fixed grid so that sample paths are a pure function
  of (seed, t) and therefore reproducible regardless of query order.

A linear wavelength tilt (dB/THz around a pivot frequency) models the
small frequency dependence of the line; per-amplifier gain tilt is also
supported for ideal-chain experiments.

BER measurements for a transceiver pair patched across a path compose the
pair's back-to-back SNR with every link GSNR by reciprocal addition and
push the result through the modulation format's BER mapping, averaging
samples over the measurement window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from wdmprov.clock import VirtualClock
from wdmprov.modes import TransmissionMode
from wdmprov.qot import ber_from_gsnr, combine_inverse, db_to_linear, linear_to_db

PLANCK_H = 6.62607015e-34  # J*s

DEFAULT_SAMPLE_CADENCE_S = 5.0


class UnachievableError(ValueError):
    """Calibration target exceeds what the link can deliver."""


class FrequencyOutOfRangeError(ValueError):
    """Requested frequency is outside the transceiver pair's range."""


@dataclass(frozen=True)
class FiberSpan:
    length_km: float
    loss_db_per_km: float = 0.25
    nli_eta_per_mw2: float = 0.0  # incoherent per-span NLI efficiency

    def __post_init__(self):
        if self.length_km < 0 or self.loss_db_per_km < 0 or self.nli_eta_per_mw2 < 0:
            raise ValueError(f"negative span parameter: {self}")

    @property
    def loss_db(self) -> float:
        return self.length_km * self.loss_db_per_km


@dataclass(frozen=True)
class Amplifier:
    gain_db: float
    noise_figure_db: float = 5.0
    tilt_db_per_thz: float = 0.0  # gain slope across band, around the pivot

    def __post_init__(self):
        if self.gain_db < 0:
            raise ValueError(f"negative amplifier gain: {self.gain_db}")
        if self.noise_figure_db < 0:
            raise ValueError(f"negative noise figure: {self.noise_figure_db}")


@dataclass(frozen=True)
class FluctuationParams:
    sigma_db: float = 0.0  # stationary std of the dB-domain drift
    tau_s: float = 600.0   # correlation time
    seed: int = 0

    def __post_init__(self):
        if self.sigma_db < 0:
            raise ValueError("sigma must be >= 0")
        if self.tau_s <= 0:
            raise ValueError("tau must be > 0")


@dataclass(frozen=True)
class OpticalLink:
    id: str
    kind: str  # "AAL" (user site <-> POP) or "CL" (POP <-> POP)
    elements: Tuple[Tuple[FiberSpan, Amplifier], ...]
    fluctuation: FluctuationParams = field(default_factory=FluctuationParams)
    gsnr_tilt_db_per_thz: float = 0.0  # net link GSNR slope vs frequency
    gain_residual_db: float = 0.0      # allowed gain/loss mismatch per element

    def __post_init__(self):
        if self.kind not in ("AAL", "CL"):
            raise ValueError(f"link kind must be AAL or CL, got {self.kind!r}")
        for span, amp in self.elements:
            residual = abs(amp.gain_db - span.loss_db)
            if residual > self.gain_residual_db + 1e-9:
                raise ValueError(
                    f"link {self.id}: amplifier gain {amp.gain_db} dB does not "
                    f"compensate span loss {span.loss_db} dB "
                    f"(allowed residual {self.gain_residual_db} dB)")

    @property
    def length_km(self) -> float:
        return sum(span.length_km for span, _ in self.elements)


@dataclass
class BerReading:
    """One windowed BER measurement and the GSNR it corresponds to."""
    ber: float
    gsnr_db: float  # window-mean path GSNR (incl. transceiver SNR)
    window_s: float
    n_samples: int
    t_start: float


class _OuProcess:
    """Ornstein-Uhlenbeck dB perturbation on a fixed time grid.

    The exact discrete update x' = a*x + sigma*sqrt(1-a^2)*N(0,1) with
    a = exp(-step/tau) is stationary from the first sample; values between
    grid points hold the previous grid value.
    """

    def __init__(self, params: FluctuationParams, system_seed: int,
                 link_id: str, step_s: float):
        self.params = params
        self.step_s = step_s
        entropy = [system_seed, params.seed,
                   int.from_bytes(link_id.encode("utf-8")[:8].ljust(8, b"\0"),
                                  "big")]
        self._rng = np.random.default_rng(entropy)
        self._values = np.empty(0)

    def _extend_to(self, n: int) -> None:
        have = self._values.size
        if n <= have:
            return
        grow = max(n - have, 4096)
        draws = self._rng.standard_normal(grow)
        out = np.empty(grow)
        a = math.exp(-self.step_s / self.params.tau_s)
        b = self.params.sigma_db * math.sqrt(1.0 - a * a)
        prev = self._values[-1] if have else None
        for i in range(grow):
            if prev is None:
                prev = self.params.sigma_db * draws[0]
            else:
                prev = a * prev + b * draws[i]
            out[i] = prev
        self._values = np.concatenate([self._values, out])

    def values_at(self, t: np.ndarray) -> np.ndarray:
        if self.params.sigma_db == 0.0:
            return np.zeros(np.shape(t))
        idx = np.floor(np.asarray(t, dtype=float) / self.step_s).astype(int)
        if np.any(idx < 0):
            raise ValueError("fluctuation queried before t=0")
        self._extend_to(int(idx.max()) + 1)
        return self._values[idx]

    def value_at(self, t: float) -> float:
        return float(self.values_at(np.asarray([t]))[0])


class LineSystem:
    """Owner of all links, the launch-power plan and the drift processes.

    All queries are expected to come from a single orchestration context;
    the control-plane agents serialize concurrent callers.
    """

    def __init__(self, links: Iterable[OpticalLink], *,
                 launch_power_dbm: float = 4.0,
                 reference_bandwidth_ghz: float = 64.0,
                 tilt_pivot_thz: float = 191.5,
                 background_loading: float = 1.0,
                 seed: int = 0,
                 sample_cadence_s: float = DEFAULT_SAMPLE_CADENCE_S):
        self.links: Dict[str, OpticalLink] = {}
        for link in links:
            if link.id in self.links:
                raise ValueError(f"duplicate link id {link.id!r}")
            self.links[link.id] = link
        self.launch_power_dbm = launch_power_dbm
        self.reference_bandwidth_ghz = reference_bandwidth_ghz
        self.tilt_pivot_thz = tilt_pivot_thz
        self.background_loading = background_loading
        self.seed = seed
        self.sample_cadence_s = sample_cadence_s
        self._fluct: Dict[tuple, _OuProcess] = {}

    # -- noise terms --------------------------------------------------

    def _resolve(self, link: "OpticalLink | str") -> OpticalLink:
        if isinstance(link, OpticalLink):
            return link
        try:
            return self.links[link]
        except KeyError:
            raise KeyError(f"unknown link id {link!r}") from None

    def ase_snr(self, link: "OpticalLink | str", freq_thz: float,
                launch_power_dbm: Optional[float] = None,
                reference_bandwidth_ghz: Optional[float] = None) -> float:
        """SNR against accumulated amplifier ASE at the link output, dB.

        The photon energy is evaluated at the pivot frequency so that all
        frequency dependence of a link is carried by the explicit tilt
        parameters (which are what gets calibrated), not by the ~0.1 dB
        h*nu slope across the band.
        """
        link = self._resolve(link)
        launch = self.launch_power_dbm if launch_power_dbm is None else launch_power_dbm
        bw_hz = 1e9 * (self.reference_bandwidth_ghz
                       if reference_bandwidth_ghz is None else reference_bandwidth_ghz)
        nu_hz = self.tilt_pivot_thz * 1e12
        df = freq_thz - self.tilt_pivot_thz

        p_sig = db_to_linear(launch) * 1e-3  # dBm -> W
        p_ase = 0.0
        for span, amp in link.elements:
            att = db_to_linear(span.loss_db)
            p_sig /= att
            p_ase /= att
            g_db = amp.gain_db + amp.tilt_db_per_thz * df
            nf_db = max(amp.noise_figure_db - amp.tilt_db_per_thz * df, 0.0)
            g = db_to_linear(g_db)
            p_sig *= g
            p_ase *= g
            if g > 1.0:
                p_ase += db_to_linear(nf_db) * PLANCK_H * nu_hz * (g - 1.0) * bw_hz
        if p_ase == 0.0:
            return math.inf
        return linear_to_db(p_sig / p_ase)

    def nli_snr(self, link: "OpticalLink | str", freq_thz: float,
                launch_power_dbm: Optional[float] = None) -> float:
        """SNR against nonlinear interference, incoherent per-span sum, dB."""
        link = self._resolve(link)
        launch = self.launch_power_dbm if launch_power_dbm is None else launch_power_dbm
        p_mw = db_to_linear(launch)
        inv = sum(span.nli_eta_per_mw2 * self.background_loading * p_mw * p_mw
                  for span, _ in link.elements)
        if inv == 0.0:
            return math.inf
        return linear_to_db(1.0 / inv)

    # -- link and path GSNR -------------------------------------------

    def _fluct_process(self, link: OpticalLink) -> _OuProcess:
        key = (link.id, link.fluctuation)
        proc = self._fluct.get(key)
        if proc is None:
            proc = _OuProcess(link.fluctuation, self.seed, link.id,
                              self.sample_cadence_s)
            self._fluct[key] = proc
        return proc

    def _link_gsnr_static(self, link: OpticalLink, freq_thz: float,
                          reference_bandwidth_ghz: Optional[float] = None,
                          launch_power_dbm: Optional[float] = None) -> float:
        core = combine_inverse([
            self.ase_snr(link, freq_thz, launch_power_dbm, reference_bandwidth_ghz),
            self.nli_snr(link, freq_thz, launch_power_dbm),
        ])
        offset = link.gsnr_tilt_db_per_thz * (freq_thz - self.tilt_pivot_thz)
        return core + offset

    def link_gsnr(self, link: "OpticalLink | str", freq_thz: float, t_s: float,
                  reference_bandwidth_ghz: Optional[float] = None) -> float:
        link = self._resolve(link)
        value = self._link_gsnr_static(link, freq_thz, reference_bandwidth_ghz)
        if link.fluctuation.sigma_db > 0.0:
            value += self._fluct_process(link).value_at(t_s)
        return value

    def link_gsnr_series(self, link: "OpticalLink | str", freq_thz: float,
                         t_s: np.ndarray,
                         reference_bandwidth_ghz: Optional[float] = None) -> np.ndarray:
        link = self._resolve(link)
        base = self._link_gsnr_static(link, freq_thz, reference_bandwidth_ghz)
        return base + self._fluct_process(link).values_at(np.asarray(t_s, dtype=float))

    def path_line_gsnr_series(self, link_ids: Sequence[str], freq_thz: float,
                              t_s: np.ndarray,
                              reference_bandwidth_ghz: Optional[float] = None) -> np.ndarray:
        """Line-only path GSNR (no transceiver term) over time, dB."""
        t_s = np.asarray(t_s, dtype=float)
        inv = np.zeros_like(t_s)
        for link_id in link_ids:
            series = self.link_gsnr_series(link_id, freq_thz, t_s,
                                           reference_bandwidth_ghz)
            inv += 10.0 ** (-series / 10.0)
        if not link_ids:
            return np.full_like(t_s, math.inf)
        return -10.0 * np.log10(inv)

    def path_gsnr(self, link_ids: Sequence[str], snr_trx_db: float,
                  freq_thz: float, t_s: float,
                  reference_bandwidth_ghz: Optional[float] = None) -> float:
        """Transceiver-to-transceiver GSNR across the path (dB)."""
        parts = [snr_trx_db]
        parts += [self.link_gsnr(link_id, freq_thz, t_s, reference_bandwidth_ghz)
                  for link_id in link_ids]
        return combine_inverse(parts)

    # -- calibration ---------------------------------------------------

    def calibrate_link(self, link: "OpticalLink | str", target_gsnr_db: float,
                       freq_thz: float, nf_floor_db: float = 0.0) -> OpticalLink:
        """Scale the link's noise figures so its drift-free GSNR at
        `freq_thz` equals the target, and return the adjusted link.

        Raises :class:`UnachievableError` when the target exceeds the bound
        set by nonlinearity and the noise-figure floor.
        """
        link = self._resolve(link)
        if not link.elements:
            raise UnachievableError(f"link {link.id} has no amplifiers to adjust")
        offset = link.gsnr_tilt_db_per_thz * (freq_thz - self.tilt_pivot_thz)
        core_target = target_gsnr_db - offset
        target_inv = 1.0 / db_to_linear(core_target) if core_target != math.inf else 0.0
        nli = self.nli_snr(link, freq_thz)
        nli_inv = 0.0 if nli == math.inf else 1.0 / db_to_linear(nli)
        ase_inv_needed = target_inv - nli_inv
        if ase_inv_needed <= 0.0:
            raise UnachievableError(
                f"link {link.id}: target {target_gsnr_db} dB at or above the "
                f"nonlinearity-limited bound")
        ase_now = self.ase_snr(link, freq_thz)
        if ase_now == math.inf:
            raise UnachievableError(f"link {link.id} produces no ASE to scale")
        scale_db = linear_to_db(ase_inv_needed * db_to_linear(ase_now))
        new_elements = []
        for span, amp in link.elements:
            nf = amp.noise_figure_db + scale_db
            if nf < nf_floor_db - 1e-9:
                raise UnachievableError(
                    f"link {link.id}: target needs noise figure {nf:.2f} dB "
                    f"below the {nf_floor_db} dB floor")
            new_elements.append((span, replace(amp, noise_figure_db=nf)))
        return replace(link, elements=tuple(new_elements))

    def recalibrate(self, link_id: str, target_gsnr_db: float,
                    freq_thz: float) -> None:
        """Calibrate in place (replaces the stored link)."""
        self.links[link_id] = self.calibrate_link(link_id, target_gsnr_db, freq_thz)

    # -- measurement ----------------------------------------------------

    def measure_ber(self, link_ids: Sequence[str], snr_trx_db: float,
                    mode: TransmissionMode, freq_thz: float, window_s: float,
                    clock: VirtualClock,
                    freq_range_thz: Optional[Tuple[float, float]] = None) -> BerReading:
        """Windowed BER of a transceiver pair patched across `link_ids`.

        Samples the path GSNR on the system cadence across the window,
        averages the per-sample BER, and advances the clock by the window.
        An empty path measures the pair back-to-back.
        """
        if window_s <= 0:
            raise ValueError("measurement window must be positive")
        if freq_range_thz is not None:
            lo, hi = freq_range_thz
            if not lo <= freq_thz <= hi:
                raise FrequencyOutOfRangeError(
                    f"{freq_thz} THz outside [{lo}, {hi}] THz")
        t0 = clock.now
        cadence = self.sample_cadence_s
        n = int(window_s // cadence)
        times = [t0 + cadence * (k + 1) for k in range(n)] or [t0 + window_s]
        bers = []
        gsnrs = []
        for t in times:
            g = self.path_gsnr(link_ids, snr_trx_db, freq_thz, t,
                               reference_bandwidth_ghz=mode.baud_gbd)
            gsnrs.append(g)
            bers.append(ber_from_gsnr(g, mode.modulation))
        clock.advance(window_s)
        return BerReading(ber=float(np.mean(bers)),
                          gsnr_db=float(np.mean(gsnrs)),
                          window_s=window_s, n_samples=len(times), t_start=t0)
