"""Toeplitz correlation models and the source networks built from them.

A correlation model produces the sequence ``rho_1, rho_2, ...`` that fills the
first row of a stationary covariance matrix,

    M[a, b] = rho_{|a - b| + 1},

with ``rho_1`` the per-symbol variance.  Four families are available:

* :class:`NearestNeighbor`   ``rho = (s2, s2/2, 0, 0, ...)``
* :class:`FirstOrderMarkov`  ``rho_i = s2 * |gamma|**(i - 1)``
* :class:`Memoryless`        ``rho = (s2, 0, 0, ...)``
* :class:`CustomToeplitz`    any finite sequence, zero-extended

A :class:`SourceNetwork` gathers, for one requested source, the set of
predecessors that may sit in the client's memory and the conditional model
linking each of them to the requested source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import InvalidParameter, NotPositiveDefinite

__all__ = [
    "CorrelationModel",
    "NearestNeighbor",
    "FirstOrderMarkov",
    "Memoryless",
    "CustomToeplitz",
    "ToeplitzMatrix",
    "Predecessor",
    "SourceNetwork",
    "build_covariance",
    "paper_example_network",
    "model_from_dict",
    "model_to_dict",
]


def _check_variance(sigma2: float) -> None:
    if not (math.isfinite(sigma2) and sigma2 > 0):
        raise InvalidParameter(f"sigma2 must be a positive finite number, got {sigma2!r}")


class CorrelationModel:
    """Base class for correlation sequence generators."""

    #: closed-form families are trusted positive-definite at every n
    closed_form = True

    def rho(self, n: int) -> np.ndarray:
        """First ``n`` correlation values, zero beyond the model's support."""
        raise NotImplementedError

    @property
    def variance(self) -> float:
        return float(self.rho(1)[0])

    @property
    def tag(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class NearestNeighbor(CorrelationModel):
    sigma2: float = 1.0

    def __post_init__(self):
        _check_variance(self.sigma2)

    def rho(self, n):
        r = np.zeros(n)
        r[0] = self.sigma2
        if n > 1:
            r[1] = self.sigma2 / 2
        return r

    @property
    def tag(self):
        return f"nearest_neighbor(sigma2={self.sigma2:g})"


@dataclass(frozen=True)
class FirstOrderMarkov(CorrelationModel):
    sigma2: float = 1.0
    gamma: float = 0.5

    def __post_init__(self):
        _check_variance(self.sigma2)
        if not (-1 < self.gamma < 1):
            raise InvalidParameter(f"gamma must lie in (-1, 1), got {self.gamma!r}")

    def rho(self, n):
        # the sequence uses |gamma|, so negative gamma yields the same matrix
        return self.sigma2 * np.abs(self.gamma) ** np.arange(n)

    @property
    def tag(self):
        return f"first_order_markov(sigma2={self.sigma2:g},gamma={self.gamma:g})"


@dataclass(frozen=True)
class Memoryless(CorrelationModel):
    sigma2: float = 1.0

    def __post_init__(self):
        _check_variance(self.sigma2)

    def rho(self, n):
        r = np.zeros(n)
        r[0] = self.sigma2
        return r

    @property
    def tag(self):
        return f"memoryless(sigma2={self.sigma2:g})"


@dataclass(frozen=True)
class CustomToeplitz(CorrelationModel):
    """User-supplied correlation sequence; ``rho[0]`` is the variance.

    Sequences shorter than the requested dimension are zero-extended, which
    is how finite memory is expressed.
    """

    rho_values: tuple = ()
    closed_form = False

    def __post_init__(self):
        values = tuple(float(v) for v in self.rho_values)
        if not values:
            raise InvalidParameter("custom correlation sequence is empty")
        if not all(math.isfinite(v) for v in values):
            raise InvalidParameter("custom correlation sequence has non-finite entries")
        _check_variance(values[0])
        object.__setattr__(self, "rho_values", values)

    def rho(self, n):
        r = np.zeros(n)
        m = min(n, len(self.rho_values))
        r[:m] = self.rho_values[:m]
        return r

    @property
    def tag(self):
        return "custom(" + ",".join(f"{v:g}" for v in self.rho_values) + ")"


@dataclass(frozen=True, eq=False)
class ToeplitzMatrix:
    """A dense symmetric Toeplitz matrix together with its generating sequence."""

    rho: np.ndarray
    tag: str = ""
    dense: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        rho.flags.writeable = False
        dense = scipy.linalg.toeplitz(rho)
        dense.flags.writeable = False
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "dense", dense)

    @property
    def n(self) -> int:
        return self.rho.size

    @property
    def trace(self) -> float:
        return self.n * float(self.rho[0])

    def __array__(self, dtype=None, copy=None):
        return np.array(self.dense, dtype=dtype)


def _assert_positive_definite(dense: np.ndarray, tag: str) -> None:
    try:
        np.linalg.cholesky(dense)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(f"covariance {tag or '(unnamed)'} is not positive-definite") from None


def build_covariance(model: CorrelationModel, n: int) -> ToeplitzMatrix:
    """Build the ``n x n`` covariance matrix generated by ``model``.

    Custom sequences are checked for positive-definiteness with a Cholesky
    factorization; the closed-form families are positive-definite by
    construction and only checked under ``__debug__`` for small ``n``.

    Raises
    ------
    InvalidParameter
        If ``n < 1``.
    NotPositiveDefinite
        If the custom sequence does not define a positive-definite matrix.
    """
    if int(n) != n or n < 1:
        raise InvalidParameter(f"dimension must be a positive integer, got {n!r}")
    mat = ToeplitzMatrix(model.rho(int(n)), tag=model.tag)
    if not model.closed_form:
        _assert_positive_definite(mat.dense, mat.tag)
    elif __debug__ and n <= 64:
        _assert_positive_definite(mat.dense, mat.tag)
    return mat


@dataclass(frozen=True)
class Predecessor:
    """One possible previously-requested source ``j``.

    ``conditional`` generates the covariance of the requested source given
    this predecessor.  ``marginal`` generates the predecessor's own covariance
    (identity when omitted); it only affects Monte Carlo sampling.
    ``baseline`` is an optional reference model, typically the memoryless
    counterpart, used for comparison curves.
    """

    id: str
    conditional: CorrelationModel
    marginal: Optional[CorrelationModel] = None
    baseline: Optional[CorrelationModel] = None

    def marginal_model(self) -> CorrelationModel:
        return self.marginal if self.marginal is not None else Memoryless(1.0)


@dataclass(frozen=True)
class SourceNetwork:
    source_id: str
    predecessors: tuple
    n: int = 1000

    def __post_init__(self):
        preds = tuple(self.predecessors)
        if not preds:
            raise InvalidParameter("a source network needs at least one predecessor")
        ids = [p.id for p in preds]
        if len(set(ids)) != len(ids):
            raise InvalidParameter(f"duplicate predecessor ids: {ids}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameter(f"block length must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "predecessors", preds)
        object.__setattr__(self, "n", int(self.n))
        for p in preds:
            if p.marginal is not None and not p.marginal.closed_form:
                build_covariance(p.marginal, self.n)

    @property
    def ids(self) -> list:
        return [p.id for p in self.predecessors]

    @property
    def size(self) -> int:
        """Number of possible predecessors."""
        return len(self.predecessors)

    def __getitem__(self, j) -> Predecessor:
        for p in self.predecessors:
            if p.id == j:
                return p
        raise KeyError(j)

    def covariance(self, j) -> ToeplitzMatrix:
        return build_covariance(self[j].conditional, self.n)

    def with_n(self, n: int) -> "SourceNetwork":
        return SourceNetwork(self.source_id, self.predecessors, n)

    def baseline_network(self) -> "SourceNetwork":
        """The network whose conditional models are the predecessors' baselines."""
        preds = []
        for p in self.predecessors:
            if p.baseline is None:
                raise InvalidParameter(f"predecessor {p.id!r} has no baseline model")
            preds.append(Predecessor(p.id, p.baseline, p.marginal))
        return SourceNetwork(self.source_id + ":baseline", tuple(preds), self.n)

    def has_baseline(self) -> bool:
        return all(p.baseline is not None for p in self.predecessors)


def paper_example_network(family: str, n: int = 1000) -> SourceNetwork:
    """The three-predecessor example networks.

    ``nearest_neighbor`` uses variances 1, 2 and 4; ``first_order_markov``
    uses unit variance with correlation coefficients 1/2, 1/4 and 1/5.  Each
    predecessor carries the memoryless model of equal variance as baseline.
    """
    family = family.replace("-", "_")
    if family in ("nearest_neighbor", "nn"):
        preds = tuple(
            Predecessor(str(j), NearestNeighbor(s2), baseline=Memoryless(s2))
            for j, s2 in enumerate((1.0, 2.0, 4.0), start=1)
        )
        return SourceNetwork("nearest_neighbor", preds, n)
    if family in ("first_order_markov", "markov"):
        preds = tuple(
            Predecessor(str(j), FirstOrderMarkov(1.0, g), baseline=Memoryless(1.0))
            for j, g in enumerate((1 / 2, 1 / 4, 1 / 5), start=1)
        )
        return SourceNetwork("first_order_markov", preds, n)
    raise InvalidParameter(f"unknown example family {family!r}")


_KINDS = {
    "nearest_neighbor": NearestNeighbor,
    "first_order_markov": FirstOrderMarkov,
    "memoryless": Memoryless,
}


def model_from_dict(spec: dict) -> CorrelationModel:
    """Parse ``{"kind": ..., ...}`` into a model.

    ``kind`` is one of ``nearest_neighbor``, ``first_order_markov``,
    ``memoryless`` or ``custom`` (with a ``rho`` list).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidParameter(f"model description needs a 'kind' field: {spec!r}")
    kind = str(spec["kind"]).replace("-", "_")
    params = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "custom":
        if set(params) != {"rho"}:
            raise InvalidParameter("custom model takes exactly one field, 'rho'")
        return CustomToeplitz(tuple(params["rho"]))
    if kind not in _KINDS:
        raise InvalidParameter(f"unknown model kind {kind!r}")
    try:
        return _KINDS[kind](**{k: float(v) for k, v in params.items()})
    except TypeError as exc:
        raise InvalidParameter(f"bad parameters for {kind}: {exc}") from None


def model_to_dict(model: CorrelationModel) -> dict:
    if isinstance(model, CustomToeplitz):
        return {"kind": "custom", "rho": list(model.rho_values)}
    for kind, cls in _KINDS.items():
        if type(model) is cls:
            return {"kind": kind, **model.__dict__}
    raise InvalidParameter(f"cannot serialize {model!r}")


def toeplitz_from_sequence(rho: Sequence[float], n: Optional[int] = None) -> ToeplitzMatrix:
    """Shortcut for a checked custom matrix, handy in tests and scripts."""
    rho = tuple(rho)
    return build_covariance(CustomToeplitz(rho), n or len(rho))
