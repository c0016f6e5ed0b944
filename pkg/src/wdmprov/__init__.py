"""Fast WDM provisioning on a simulated optical line system.

The package has three layers:

* ground truth -- an optical line-system simulator (:mod:`wdmprov.linesys`)
  that answers BER measurements for transceiver pairs patched across links;
* control plane -- muxponder agents speaking a small JSON wire protocol
  (:mod:`wdmprov.agent`, :mod:`wdmprov.protocol`);
* provisioning -- the engine (:mod:`wdmprov.provision`) that probes links
  one by one, converts BER to per-link GSNR, composes the end-to-end GSNR,
  applies distance-based margins and selects transmission modes.

Scenarios (topology, links, transceiver catalogs, channel plan, seeds) are
plain JSON documents loaded by :mod:`wdmprov.scenario`; two reference
scenarios are bundled under ``wdmprov/scenarios``.
"""

__version__ = "0.1.0"

from wdmprov.qot import (  # noqa: F401
    ModulationFormat,
    ber_from_gsnr,
    combine_inverse,
    gsnr_from_ber,
    q_squared_from_ber,
    remove_contribution,
)
