"""
Finite-alphabet probability objects and information measures.

All quantities are in bits. Symbols of an alphabet of size ``m`` are the
indices ``0..m-1``. Mass checks use an absolute tolerance of 1e-12 and
``0 log 0`` is taken as 0 everywhere.

Joint distributions carry one label per axis so that measures can be asked
for by variable name, e.g.::

    j = joint_from(adder_kernel(0.1), uniform(2), uniform(2))
    conditional_mutual_information(j, ["x12"], ["yR"], ["x21"])
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

MASS_TOL = 1e-12
NEG_TOL = 1e-12

Axes = Union[str, int, Sequence[Union[str, int]]]


class InformationError(ValueError):
    """Raised for invalid distributions, kernels or axis selections."""


def _check_mass(arr: np.ndarray, what: str) -> None:
    if arr.size == 0:
        raise InformationError(f"{what} is empty")
    if not np.all(np.isfinite(arr)):
        raise InformationError(f"{what} has non-finite entries")
    if np.any(arr < 0):
        raise InformationError(f"{what} has negative entries")


# ------------------------------------------------------------------------------
# array-level helpers (vectorised, used by the region code)

def entropy_bits(p, axis=-1) -> np.ndarray:
    """Entropy in bits of probability vectors stored along ``axis``."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return terms.sum(axis=axis)


def _clamp(value: float, what: str) -> float:
    if value < -NEG_TOL:
        raise InformationError(f"{what} is negative ({value:.3e}); inputs are inconsistent")
    return max(float(value), 0.0)


# ------------------------------------------------------------------------------
# scalar measures

def binary_entropy(p: float) -> float:
    """h(p) = -p log2 p - (1-p) log2 (1-p)."""
    p = float(p)
    if not 0.0 <= p <= 1.0 or np.isnan(p):
        raise InformationError(f"probability out of range: {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


# ------------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class Pmf:
    """Probability mass function over ``0..size-1``."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.probs, dtype=float).reshape(-1)
        _check_mass(arr, "pmf")
        if abs(arr.sum() - 1.0) > MASS_TOL:
            raise InformationError(f"pmf sums to {arr.sum()!r}, not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def size(self) -> int:
        return self.probs.size

    def __getitem__(self, k):
        return self.probs[k]


def uniform(size: int) -> Pmf:
    if size < 1:
        raise InformationError("alphabet size must be >= 1")
    return Pmf(np.full(size, 1.0 / size))


def point_mass(size: int, symbol: int) -> Pmf:
    p = np.zeros(size)
    p[symbol] = 1.0
    return Pmf(p)


def bernoulli(p1: float) -> Pmf:
    return Pmf([1.0 - p1, p1])


@dataclass(frozen=True)
class Kernel:
    """
    Conditional pmf p(output | inputs) for one or two inputs.

    ``table`` has shape ``input_sizes + (output_size,)``; every slice along
    the last axis is a pmf.
    """

    table: np.ndarray

    def __post_init__(self):
        arr = np.array(self.table, dtype=float)
        if arr.ndim not in (2, 3):
            raise InformationError("kernel must have one or two inputs")
        _check_mass(arr, "kernel")
        sums = arr.sum(axis=-1)
        if np.max(np.abs(sums - 1.0)) > MASS_TOL:
            raise InformationError("kernel rows must sum to 1")
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    @property
    def input_sizes(self) -> tuple[int, ...]:
        return self.table.shape[:-1]

    @property
    def output_size(self) -> int:
        return self.table.shape[-1]

    @property
    def arity(self) -> int:
        return self.table.ndim - 1

    def row(self, *inputs: int) -> Pmf:
        return Pmf(self.table[inputs])


def bsc_kernel(eps: float) -> Kernel:
    """Binary symmetric channel with crossover ``eps``."""
    return Kernel([[1.0 - eps, eps], [eps, 1.0 - eps]])


def adder_kernel(eps: float) -> Kernel:
    """Binary adder uplink: y = x12 xor x21 xor z, z ~ Bernoulli(eps)."""
    t = np.empty((2, 2, 2))
    for a in range(2):
        for b in range(2):
            s = a ^ b
            t[a, b, s] = 1.0 - eps
            t[a, b, 1 - s] = eps
    return Kernel(t)


def identity_kernel(size: int) -> Kernel:
    return Kernel(np.eye(size))


@dataclass(frozen=True)
class JointPmf:
    """Joint pmf over several finite alphabets with one label per axis."""

    table: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        arr = np.array(self.table, dtype=float)
        labels = tuple(self.labels)
        if len(labels) != arr.ndim:
            raise InformationError(f"{arr.ndim} axes but {len(labels)} labels")
        if len(set(labels)) != len(labels):
            raise InformationError("axis labels must be unique")
        _check_mass(arr, "joint pmf")
        if abs(arr.sum() - 1.0) > MASS_TOL:
            raise InformationError(f"joint pmf sums to {arr.sum()!r}, not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)
        object.__setattr__(self, "labels", labels)

    def axis(self, a: Union[str, int]) -> int:
        if isinstance(a, (int, np.integer)):
            if not 0 <= a < self.table.ndim:
                raise InformationError(f"axis {a} out of range")
            return int(a)
        try:
            return self.labels.index(a)
        except ValueError:
            raise InformationError(f"unknown axis label {a!r}") from None

    def axes(self, spec: Axes) -> tuple[int, ...]:
        if isinstance(spec, (str, int, np.integer)):
            spec = [spec]
        return tuple(self.axis(a) for a in spec)

    def marginal(self, spec: Axes) -> np.ndarray:
        """Marginal table over the given axes, in ascending axis order."""
        keep = set(self.axes(spec))
        drop = tuple(i for i in range(self.table.ndim) if i not in keep)
        return self.table.sum(axis=drop)

    def marginal_pmf(self, a: Union[str, int]) -> Pmf:
        return Pmf(self.marginal([a]))

    def entropy(self, spec: Axes = ()) -> float:
        """Joint entropy of the named axes (empty selection gives 0)."""
        if not self.axes(spec):
            return 0.0
        return float(entropy_bits(self.marginal(spec).reshape(-1)))


def _disjoint(j: JointPmf, *groups: Axes, allow_empty_last: bool = False) -> list[tuple[int, ...]]:
    resolved = [j.axes(g) for g in groups]
    for idx, g in enumerate(resolved):
        if not g and not (allow_empty_last and idx == len(resolved) - 1):
            raise InformationError("axis selections must be nonempty")
    flat = [a for g in resolved for a in g]
    if len(set(flat)) != len(flat):
        raise InformationError("axis selections overlap")
    return resolved


# ------------------------------------------------------------------------------
# measures

def entropy(d: Pmf) -> float:
    return float(entropy_bits(d.probs))


def joint_from(uplink: Kernel, d12: Pmf, d21: Pmf,
               labels: tuple[str, str, str] = ("x12", "x21", "yR")) -> JointPmf:
    """p(x12, x21, y) = p(x12) p(x21) p(y | x12, x21)."""
    if uplink.arity != 2:
        raise InformationError("uplink kernel must take two inputs")
    if uplink.input_sizes != (d12.size, d21.size):
        raise InformationError(
            f"kernel inputs {uplink.input_sizes} do not match pmfs ({d12.size}, {d21.size})")
    t = d12.probs[:, None, None] * d21.probs[None, :, None] * uplink.table
    return JointPmf(t / t.sum(), labels)


def joint_single(kernel: Kernel, d: Pmf, labels: tuple[str, str] = ("x", "y")) -> JointPmf:
    """p(x, y) = p(x) p(y | x) for a single-input kernel."""
    if kernel.arity != 1 or kernel.input_sizes[0] != d.size:
        raise InformationError("kernel and pmf dimensions differ")
    t = d.probs[:, None] * kernel.table
    return JointPmf(t / t.sum(), labels)


def mutual_information(j: JointPmf, axes_a: Axes, axes_b: Axes) -> float:
    a, b = _disjoint(j, axes_a, axes_b)
    v = j.entropy(a) + j.entropy(b) - j.entropy(a + b)
    return _clamp(v, "mutual information")


def conditional_mutual_information(j: JointPmf, axes_a: Axes, axes_b: Axes, axes_c: Axes) -> float:
    a, b, c = _disjoint(j, axes_a, axes_b, axes_c, allow_empty_last=True)
    v = j.entropy(a + c) + j.entropy(b + c) - j.entropy(a + b + c) - j.entropy(c)
    return _clamp(v, "conditional mutual information")


def conditional_entropy(j: JointPmf, axes_a: Axes, axes_c: Axes) -> float:
    a, c = _disjoint(j, axes_a, axes_c, allow_empty_last=True)
    return _clamp(j.entropy(a + c) - j.entropy(c), "conditional entropy")


def product(*pmfs: Pmf, labels: Iterable[str]) -> JointPmf:
    """Joint of independent variables."""
    t = np.ones(())
    for p in pmfs:
        t = np.multiply.outer(t, p.probs)
    return JointPmf(t, tuple(labels))
