"""Rate accounting for the incremental index sequence.

For every spectral component ``i`` the predecessors are stacked from best to
worst side information (ascending conditional eigenvalue).  Each level adds
the increment needed to move from the previous predecessor's required rate
to the next one, so every predecessor's requirement is a prefix of the stack.
The stored stream is the full stack over all components; the stream served
to a client holding ``j`` is the union of ``j``'s per-component prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .covariance import SourceNetwork
from .errors import UnknownPredecessor
from .theorem import network_spectra, storage_rate, transmission_rate

__all__ = [
    "ComponentLayout",
    "BitstreamLayout",
    "VerificationReport",
    "build_layout",
    "extract_rate",
    "verify_against_theorem",
    "required_rates",
]


def required_rates(spectra, theta: float) -> np.ndarray:
    """``(M, n)`` array of per-component rate contributions, ``max(0, log2(lambda/theta)/2) / n``."""
    lam = np.vstack([np.asarray(s, dtype=float) for s in spectra])
    return np.maximum(0.0, 0.5 * np.log2(lam / theta)) / lam.shape[1]


@dataclass(frozen=True)
class ComponentLayout:
    index: int
    order: tuple
    increments: tuple

    def prefix_rate(self, j) -> float:
        pos = self.order.index(j)
        return float(sum(self.increments[: pos + 1]))


@dataclass(frozen=True, eq=False)
class BitstreamLayout:
    """Per-component orders and increments, plus the resulting totals.

    ``order[i, m]`` is the position in ``ids`` of the predecessor at level
    ``m`` of component ``i``; ``increments[i, m]`` is the rate added at that
    level (bits per source symbol).
    """

    ids: tuple
    theta: float
    order: np.ndarray = field(repr=False)
    increments: np.ndarray = field(repr=False)
    storage: float = float("nan")
    rates: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.order.shape[0]

    def component(self, i: int) -> ComponentLayout:
        return ComponentLayout(
            i,
            tuple(self.ids[k] for k in self.order[i]),
            tuple(float(x) for x in self.increments[i]),
        )

    def extraction_set(self, j) -> np.ndarray:
        """Per-component prefix length (number of levels) served for predecessor ``j``."""
        try:
            k = self.ids.index(j)
        except ValueError:
            raise UnknownPredecessor(j) from None
        return np.argmax(self.order == k, axis=1) + 1

    def prefix_rates(self, j) -> np.ndarray:
        lengths = self.extraction_set(j)
        cum = np.cumsum(self.increments, axis=1)
        return cum[np.arange(self.n), lengths - 1]

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "n": self.n,
            "predecessors": list(self.ids),
            "components": [
                {"index": i, "order": [self.ids[k] for k in self.order[i]],
                 "increments": [float(x) for x in self.increments[i]]}
                for i in range(self.n)
            ],
            "extraction": {j: [int(v) for v in self.extraction_set(j)] for j in self.ids},
            "totals": {"storage": self.storage, "rates": dict(self.rates)},
        }


def build_layout(net: SourceNetwork, theta: float, spectra=None) -> BitstreamLayout:
    specs = spectra if spectra is not None else network_spectra(net)
    ids = tuple(net.ids)
    req = required_rates([specs[j] for j in ids], theta).T  # (n, M)
    # stable sort keeps list order for ties; ascending requirement = best side info first
    order = np.argsort(req, axis=1, kind="stable")
    stacked = np.take_along_axis(req, order, axis=1)
    increments = np.diff(stacked, axis=1, prepend=0.0)
    layout = BitstreamLayout(ids, float(theta), order, increments)
    rates = {j: extract_rate(layout, j) for j in ids}
    object.__setattr__(layout, "rates", rates)
    object.__setattr__(layout, "storage", float(increments.sum()))
    return layout


def extract_rate(layout: BitstreamLayout, j) -> float:
    """Rate of the subsequence served to a client holding predecessor ``j``."""
    return float(layout.prefix_rates(j).sum())


@dataclass
class VerificationReport:
    passed: bool
    mismatched_components: list
    rate_errors: dict
    storage_error: float
    negative_increments: list

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "mismatched_components": [int(i) for i in self.mismatched_components],
            "rate_errors": self.rate_errors,
            "storage_error": self.storage_error,
            "negative_increments": [int(i) for i in self.negative_increments],
        }


def verify_against_theorem(layout: BitstreamLayout, net: SourceNetwork, theta: float,
                           atol: float = 1e-12, spectra=None) -> VerificationReport:
    """Compare the layout with the closed-form rates at ``theta``.

    Totals are recomputed from the increments, so a tampered layout is caught
    even if its cached totals were left alone.
    """
    specs = spectra if spectra is not None else network_spectra(net)
    ids = list(net.ids)
    req = required_rates([specs[j] for j in ids], theta)
    bad = np.zeros(layout.n, dtype=bool)
    rate_errors = {}
    for k, j in enumerate(ids):
        try:
            prefix = layout.prefix_rates(j)
        except UnknownPredecessor:
            rate_errors[j] = float("inf")
            continue
        bad |= np.abs(prefix - req[k]) > atol
        rate_errors[j] = abs(float(prefix.sum()) - transmission_rate(specs[j], theta))
    stored = np.cumsum(layout.increments, axis=1)[:, -1]
    bad |= np.abs(stored - req.max(axis=0)) > atol
    storage_error = abs(float(layout.increments.sum()) - storage_rate([specs[j] for j in ids], theta))
    negative = list(np.nonzero(np.any(layout.increments < 0, axis=1))[0])
    mismatched = list(np.nonzero(bad)[0])
    passed = (
        not mismatched and not negative and storage_error <= atol
        and all(err <= atol for err in rate_errors.values())
    )
    return VerificationReport(passed, mismatched, rate_errors, storage_error, negative)
