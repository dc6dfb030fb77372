"""Evaluable copula families, rectangle volumes, survival/reflection transforms, joins.

Raw evaluation is deliberately unclamped so that axiom violations stay
observable to the check suites; ``value_clamped`` clips into [0,1] for callers
that want a guaranteed probability.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .distributions import DistributionFunction
from .errors import GeneratorValidationError
from .generators import (
    Generator,
    GeneratorClass,
    IdentityOffsetGenerator,
    ReflectedGenerator,
    closed_form,
    validate,
)


class Copula(ABC):
    @abstractmethod
    def _eval(self, u, v):
        """Evaluate the family formula at floats or ndarrays."""

    def value(self, u: float, v: float) -> float:
        if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
            raise ValueError(f"copula arguments must lie in [0,1]^2, got ({u}, {v})")
        return float(self._eval(u, v))

    def value_array(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        return np.asarray(self._eval(np.asarray(us, dtype=float), np.asarray(vs, dtype=float)))

    def value_clamped(self, u: float, v: float) -> float:
        return min(1.0, max(0.0, self.value(u, v)))

    def volume(self, rect: "Rectangle") -> float:
        return (
            self.value(rect.u2, rect.v2)
            - self.value(rect.u1, rect.v2)
            - self.value(rect.u2, rect.v1)
            + self.value(rect.u1, rect.v1)
        )

    @abstractmethod
    def describe(self) -> str:
        """Canonical descriptor string."""

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.describe()}>"


@dataclass(frozen=True)
class Rectangle:
    u1: float
    u2: float
    v1: float
    v2: float

    def __post_init__(self):
        if not (0.0 <= self.u1 <= self.u2 <= 1.0 and 0.0 <= self.v1 <= self.v2 <= 1.0):
            raise ValueError(f"rectangle corners must be ordered inside the unit square: {self}")


def volume(c: Copula, rect: Rectangle) -> float:
    return c.volume(rect)


# ---------------------------------------------------------------------------
# base families
# ---------------------------------------------------------------------------


class FrechetW(Copula):
    """Lower bound max{0, u+v-1}: the countermonotonic copula."""

    def _eval(self, u, v):
        return np.maximum(0.0, u + v - 1.0)

    def describe(self) -> str:
        return "frechet-w"


class FrechetM(Copula):
    """Upper bound min{u, v}: the comonotonic copula."""

    def _eval(self, u, v):
        return np.minimum(u, v)

    def describe(self) -> str:
        return "frechet-m"


class Independence(Copula):
    def _eval(self, u, v):
        return u * v

    def describe(self) -> str:
        return "indep"


class MarshallCopula(Copula):
    """min{u*psi(v), v*phi(u)} from a max/max model with comonotonic shocks."""

    def __init__(self, phi: Generator, psi: Generator):
        _expect_class(phi, GeneratorClass.MARSHALL, "phi")
        _expect_class(psi, GeneratorClass.MARSHALL, "psi")
        self.phi = phi
        self.psi = psi

    def _eval(self, u, v):
        return np.minimum(u * self.psi._eval(v), v * self.phi._eval(u))

    def describe(self) -> str:
        return f"marshall:phi={self.phi.describe()},psi={self.psi.describe()}"


class MaxminCopula(Copula):
    """min{u, phi(u)(v-psi(v)) + u*psi(v)} from a max/min model with one shared shock."""

    def __init__(self, phi: Generator, psi: Generator):
        _expect_class(phi, GeneratorClass.MARSHALL, "phi")
        _expect_class(psi, GeneratorClass.MAXMIN_PSI, "psi")
        self.phi = phi
        self.psi = psi

    def _eval(self, u, v):
        psi_v = self.psi._eval(v)
        return np.minimum(u, self.phi._eval(u) * (v - psi_v) + u * psi_v)

    def describe(self) -> str:
        return f"maxmin:phi={self.phi.describe()},psi={self.psi.describe()}"


class RmmCopula(Copula):
    """max{0, uv - f(u)g(v)} from a max/max model with countermonotonic shocks."""

    def __init__(self, f: Generator, g: Generator):
        _expect_class(f, GeneratorClass.RMM, "f")
        _expect_class(g, GeneratorClass.RMM, "g")
        self.f = f
        self.g = g

    def _eval(self, u, v):
        return np.maximum(0.0, u * v - self.f._eval(u) * self.g._eval(v))

    def describe(self) -> str:
        return f"rmm:f={self.f.describe()},g={self.g.describe()}"


class SmmCopula(Copula):
    """max{u+v-1, uv - h(u)k(v)} from a min/min model with countermonotonic shocks."""

    def __init__(self, h: Generator, k: Generator):
        _expect_class(h, GeneratorClass.SMM, "h")
        _expect_class(k, GeneratorClass.SMM, "k")
        self.h = h
        self.k = k

    def _eval(self, u, v):
        return np.maximum(u + v - 1.0, u * v - self.h._eval(u) * self.k._eval(v))

    def describe(self) -> str:
        return f"smm:h={self.h.describe()},k={self.k.describe()}"


def _expect_class(gen: Generator, cls: GeneratorClass, slot: str) -> None:
    if gen.declared_class is not cls:
        raise GeneratorValidationError(
            f"slot {slot} needs a {cls.value} generator, got {gen.declared_class.value}"
        )


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


class SurvivalCopula(Copula):
    """u + v - 1 + C(1-u, 1-v): the copula of the negated pair."""

    def __init__(self, inner: Copula):
        self.inner = inner

    def _eval(self, u, v):
        return u + v - 1.0 + self.inner._eval(1.0 - u, 1.0 - v)

    def describe(self) -> str:
        return f"survival({self.inner.describe()})"


class Sigma1Copula(Copula):
    """v - C(1-u, v): reflection in the first argument."""

    def __init__(self, inner: Copula):
        self.inner = inner

    def _eval(self, u, v):
        return v - self.inner._eval(1.0 - u, v)

    def describe(self) -> str:
        return f"sigma1({self.inner.describe()})"


class Sigma2Copula(Copula):
    """u - C(u, 1-v): reflection in the second argument."""

    def __init__(self, inner: Copula):
        self.inner = inner

    def _eval(self, u, v):
        return u - self.inner._eval(u, 1.0 - v)

    def describe(self) -> str:
        return f"sigma2({self.inner.describe()})"


def survival(c: Copula) -> SurvivalCopula:
    return SurvivalCopula(c)


def reflect(c: Copula, which: str) -> Copula:
    if which == "sigma1":
        return Sigma1Copula(c)
    if which == "sigma2":
        return Sigma2Copula(c)
    raise ValueError(f"reflection must be 'sigma1' or 'sigma2', got {which!r}")


def normalize(c: Copula) -> Copula:
    """Rewrite transform wrappers into explicit families where an identity applies.

    survival(RMM) -> SMM with reflected generators, survival(SMM) -> RMM,
    sigma2(maxmin) -> RMM with f = phi - id and g = reflect(id - psi),
    sigma1(maxmin) -> SMM with h = reflect(phi - id) and k = id - psi.
    Anything without a rewrite rule is returned unchanged.
    """
    if isinstance(c, SurvivalCopula):
        inner = normalize(c.inner)
        if isinstance(inner, RmmCopula):
            return SmmCopula(
                ReflectedGenerator(inner.f, GeneratorClass.SMM),
                ReflectedGenerator(inner.g, GeneratorClass.SMM),
            )
        if isinstance(inner, SmmCopula):
            return RmmCopula(
                ReflectedGenerator(inner.h, GeneratorClass.RMM),
                ReflectedGenerator(inner.k, GeneratorClass.RMM),
            )
        if isinstance(inner, SurvivalCopula):
            return normalize(inner.inner)
        return SurvivalCopula(inner)
    if isinstance(c, Sigma2Copula) and isinstance(c.inner, MaxminCopula):
        phi, psi = c.inner.phi, c.inner.psi
        f = IdentityOffsetGenerator(phi, "minus-id", GeneratorClass.RMM)
        g = ReflectedGenerator(
            IdentityOffsetGenerator(psi, "id-minus", GeneratorClass.RMM), GeneratorClass.RMM
        )
        return RmmCopula(f, g)
    if isinstance(c, Sigma1Copula) and isinstance(c.inner, MaxminCopula):
        phi, psi = c.inner.phi, c.inner.psi
        h = ReflectedGenerator(
            IdentityOffsetGenerator(phi, "minus-id", GeneratorClass.SMM), GeneratorClass.SMM
        )
        k = IdentityOffsetGenerator(psi, "id-minus", GeneratorClass.SMM)
        return SmmCopula(h, k)
    return c


# ---------------------------------------------------------------------------
# joins and constructors
# ---------------------------------------------------------------------------


class JointDistribution:
    """H(x,y) = C(F_U(x), F_V(y)): the bivariate CDF with the given margins."""

    def __init__(self, copula: Copula, margin_u: DistributionFunction, margin_v: DistributionFunction):
        self.copula = copula
        self.margin_u = margin_u
        self.margin_v = margin_v

    def cdf(self, x, y) -> float:
        return self.copula.value(self.margin_u.cdf(x), self.margin_v.cdf(y))

    def __repr__(self) -> str:
        return (
            f"<JointDistribution {self.copula.describe()} | "
            f"{self.margin_u.describe()} , {self.margin_v.describe()}>"
        )


def sklar_join(c: Copula, margin_u: DistributionFunction, margin_v: DistributionFunction) -> JointDistribution:
    return JointDistribution(c, margin_u, margin_v)


def _validated(gen: Generator, slot: str) -> Generator:
    report = validate(gen)
    if not report.passed:
        raise GeneratorValidationError(
            f"generator for slot {slot} ({gen.describe()}) failed validation: "
            + "; ".join(str(v) for v in report.violations),
            report=report,
        )
    return gen


def marshall(phi: Generator, psi: Generator) -> MarshallCopula:
    return MarshallCopula(_validated(phi, "phi"), _validated(psi, "psi"))


def maxmin(phi: Generator, psi: Generator) -> MaxminCopula:
    return MaxminCopula(_validated(phi, "phi"), _validated(psi, "psi"))


def rmm(f: Generator, g: Generator) -> RmmCopula:
    return RmmCopula(_validated(f, "f"), _validated(g, "g"))


def smm(h: Generator, k: Generator) -> SmmCopula:
    return SmmCopula(_validated(h, "h"), _validated(k, "k"))


def efgm(a: float) -> RmmCopula:
    """EFGM copula uv - a^2 uv(1-u)(1-v), built as RMM with f = g = a*t*(1-t)."""
    if not 0.0 < a <= 1.0:
        raise ValueError(f"EFGM weight must lie in (0,1], got {a}")
    f = closed_form("efgmf", GeneratorClass.RMM, a=a)
    g = closed_form("efgmf", GeneratorClass.RMM, a=a)
    return rmm(f, g)


def exprmm_ab(alpha: float, beta: float) -> RmmCopula:
    """RMM copula of exponential max shocks, parameterized by the exponent pair."""
    if not (0.0 < alpha <= 1.0 and 0.0 < beta <= 1.0):
        raise ValueError(f"exponents must lie in (0,1], got alpha={alpha}, beta={beta}")
    return rmm(
        closed_form("power", GeneratorClass.RMM, alpha=alpha),
        closed_form("power", GeneratorClass.RMM, alpha=beta),
    )


def exponential_rmm(l1: float, l2: float, m1: float, m2: float) -> RmmCopula:
    """RMM copula of the countermonotonic max model with exponential shock rates."""
    for name, val in (("l1", l1), ("l2", l2), ("m1", m1), ("m2", m2)):
        if not val > 0.0:
            raise ValueError(f"rate {name} must be positive, got {val}")
    return exprmm_ab(l1 / (l1 + m1), l2 / (l2 + m2))


def independence() -> Independence:
    return Independence()


def frechet_w() -> FrechetW:
    return FrechetW()


def frechet_m() -> FrechetM:
    return FrechetM()
