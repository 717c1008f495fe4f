"""Closed-form holomorphic maps with exact derivatives."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ScenarioError

__all__ = [
    "HoloMap",
    "Identity",
    "RotationScale",
    "Power",
    "Blaschke",
    "MoebiusDisk",
    "Polynomial",
    "Composition",
    "recenter",
    "df_norm",
    "from_spec",
]


def _complex(x):
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    return complex(x)


class HoloMap:
    """Base class: a holomorphic map of a disk ``|z| < radius`` into the plane."""

    variant = "abstract"
    #: Radius of the largest disk around 0 on which the map is holomorphic.
    radius = math.inf

    def __call__(self, z):
        z = self._check(z)
        return self._eval(z)

    def deriv(self, z):
        """Exact complex derivative ``f'(z)``."""
        z = self._check(z)
        return self._deriv(z)

    def _check(self, z):
        z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
        if np.any(np.abs(z) >= self.radius):
            raise DomainError(f"{self.variant}: point outside |z| < {self.radius}")
        return z

    def params(self):
        return {}

    def describe(self):
        return {"variant": self.variant, "params": self.params()}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"

    def __eq__(self, other):
        return type(self) is type(other) and self.describe() == other.describe()

    def __hash__(self):
        return hash(repr(self))


@dataclass(frozen=True, eq=False, repr=False)
class Identity(HoloMap):
    variant = "identity"

    def _eval(self, z):
        return z

    def _deriv(self, z):
        return np.ones_like(z) if np.ndim(z) else 1.0 + 0j


@dataclass(frozen=True, eq=False, repr=False)
class RotationScale(HoloMap):
    """``z -> c z``; the equality case of the Schwarz lemma when ``|c| = R2/R1``."""

    c: complex = 1.0 + 0j
    variant = "rotation_scale"

    @classmethod
    def polar(cls, scale=1.0, alpha=0.0):
        return cls(complex(scale * math.cos(alpha), scale * math.sin(alpha)))

    def _eval(self, z):
        return self.c * z

    def _deriv(self, z):
        return np.full_like(z, self.c) if np.ndim(z) else complex(self.c)

    def params(self):
        return {"c": [self.c.real, self.c.imag]}


@dataclass(frozen=True, eq=False, repr=False)
class Power(HoloMap):
    n: int = 2
    variant = "power"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("power exponent must be a positive integer")

    def _eval(self, z):
        return z**self.n

    def _deriv(self, z):
        return self.n * z ** (self.n - 1)

    def params(self):
        return {"n": int(self.n)}


@dataclass(frozen=True, eq=False, repr=False)
class MoebiusDisk(HoloMap):
    """Disk automorphism ``exp(i alpha) (z - a) / (1 - conj(a) z)``."""

    a: complex = 0j
    alpha: float = 0.0
    variant = "moebius_disk"

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise ValueError("automorphism parameter must satisfy |a| < 1")

    @property
    def radius(self):
        return math.inf if self.a == 0 else 1.0 / abs(self.a)

    def _eval(self, z):
        return cmath.exp(1j * self.alpha) * (z - self.a) / (1 - self.a.conjugate() * z)

    def _deriv(self, z):
        return cmath.exp(1j * self.alpha) * (1 - abs(self.a) ** 2) / (1 - self.a.conjugate() * z) ** 2

    def params(self):
        return {"a": [self.a.real, self.a.imag], "alpha": self.alpha}


@dataclass(frozen=True, eq=False, repr=False)
class Blaschke(MoebiusDisk):
    """Blaschke factor ``(z - a) / (1 - conj(a) z)``."""

    variant = "blaschke"

    def params(self):
        return {"a": [self.a.real, self.a.imag]}


@dataclass(frozen=True, eq=False, repr=False)
class Polynomial(HoloMap):
    """``sum_k coeffs[k] z**k`` with ``coeffs[0] == 0``."""

    coeffs: tuple = (0j, 1 + 0j)
    variant = "polynomial"

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs or coeffs[0] != 0:
            raise ValueError("polynomial maps must have zero constant term")
        object.__setattr__(self, "coeffs", coeffs)

    def _eval(self, z):
        return np.polyval(self.coeffs[::-1], z)

    def _deriv(self, z):
        d = [k * c for k, c in enumerate(self.coeffs)][1:]
        return np.polyval(d[::-1], z) if d else 0 * z

    def params(self):
        return {"coeffs": [[c.real, c.imag] for c in self.coeffs]}


@dataclass(frozen=True, eq=False, repr=False)
class Composition(HoloMap):
    """Apply ``maps[0]``, then ``maps[1]``, and so on."""

    maps: tuple = ()
    variant = "composition"

    def __post_init__(self):
        if not self.maps:
            raise ValueError("composition needs at least one map")
        object.__setattr__(self, "maps", tuple(self.maps))

    @property
    def radius(self):
        return self.maps[0].radius

    def _eval(self, z):
        for f in self.maps:
            z = f(z)
        return z

    def _deriv(self, z):
        d = 1.0 + 0j
        for f in self.maps:
            d = d * f.deriv(z)
            z = f(z)
        return d

    def params(self):
        return {"maps": [f.describe() for f in self.maps]}


def recenter(f):
    """Follow ``f`` by the disk automorphism taking ``f(0)`` to 0."""
    a = complex(f(0))
    return f if a == 0 else Composition((f, MoebiusDisk(a)))


def df_norm(f, domain_metric, target, z):
    """Norm of ``df_z`` from the domain metric to the target metric.

    ``mu(f(z)) |f'(z)| / lam(|z|)``.
    """
    w = f(z)
    mu = target.factor_at(w)
    lam = domain_metric.lam(np.abs(z))
    out = mu * np.abs(f.deriv(z)) / lam
    return float(out) if np.ndim(out) == 0 else out


_VARIANTS = {
    "identity": lambda p: Identity(),
    "rotation_scale": lambda p: (
        RotationScale(_complex(p["c"])) if "c" in p else RotationScale.polar(p.get("scale", 1.0), p.get("alpha", 0.0))
    ),
    "power": lambda p: Power(int(p["n"])),
    "blaschke": lambda p: Blaschke(_complex(p.get("a", 0.0))),
    "moebius_disk": lambda p: MoebiusDisk(_complex(p.get("a", 0.0)), float(p.get("alpha", 0.0))),
    "polynomial": lambda p: Polynomial(tuple(_complex(c) for c in p["coeffs"])),
    "composition": lambda p: Composition(tuple(from_spec(m) for m in p["maps"])),
}

_ALLOWED = {
    "identity": set(),
    "rotation_scale": {"c", "scale", "alpha"},
    "power": {"n"},
    "blaschke": {"a"},
    "moebius_disk": {"a", "alpha"},
    "polynomial": {"coeffs"},
    "composition": {"maps"},
}


def from_spec(spec):
    """Build a map from ``{"variant": name, "params": {...}}``."""
    if not isinstance(spec, dict) or "variant" not in spec:
        raise ScenarioError("map description needs a 'variant'")
    unknown = set(spec) - {"variant", "params"}
    if unknown:
        raise ScenarioError(f"map: unknown keys {sorted(unknown)}")
    variant = spec["variant"]
    if variant not in _VARIANTS:
        raise ScenarioError(f"map: unknown variant {variant!r}; expected one of {sorted(_VARIANTS)}")
    params = spec.get("params", {})
    bad = set(params) - _ALLOWED[variant]
    if bad:
        raise ScenarioError(f"map.params: unknown keys {sorted(bad)} for {variant}")
    try:
        return _VARIANTS[variant](params)
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"map.params: invalid parameters for {variant}: {exc}") from exc
