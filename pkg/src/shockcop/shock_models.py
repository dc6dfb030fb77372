"""Stochastic shock mechanisms, their joint laws, induced copulas, and reconstructions.

Four couplings of idiosyncratic shocks (X, Y) with systemic shocks are
supported:

=============  ==================  ==========================================
combiner       coupling            induced family
=============  ==================  ==========================================
max/max        comonotonic         Marshall: min{u psi(v), v phi(u)}
max/max        countermonotonic    RMM: max{0, uv - f(u)g(v)}
min/min        countermonotonic    SMM: max{u+v-1, uv - h(u)k(v)}
max/min        one shared shock    maxmin: min{u, phi(u)(v-psi(v)) + u psi(v)}
=============  ==================  ==========================================

``induced_copula`` realizes the forward direction by composing each component
CDF with the generalized inverse of its margin; the ``reconstruct_*``
functions invert a copula-plus-margins pair back into explicit shock CDFs and
verify the factorization and joint-law postconditions on a grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import copulas as cop
from .distributions import (
    DistributionFunction,
    Exponential,
    NegExponential,
    Product,
    SurvivalProduct,
    negated,
)
from .errors import IllegalModelError, ReconstructionError
from .extreal import POS_INF, _Infinity
from .generators import (
    Generator,
    GeneratorClass,
    derived_value,
    generator_from_shocks,
    hat_of,
    hat_to_f,
    identity_minus,
    smm_to_rmm,
)


class Combiner(enum.Enum):
    MAX_MAX = "max-max"
    MIN_MIN = "min-min"
    MAX_MIN = "max-min"


@dataclass(frozen=True)
class Comonotonic:
    g1: DistributionFunction
    g2: DistributionFunction


@dataclass(frozen=True)
class Countermonotonic:
    g1: DistributionFunction
    g2: DistributionFunction


@dataclass(frozen=True)
class SharedShock:
    g: DistributionFunction


Coupling = Union[Comonotonic, Countermonotonic, SharedShock]

_LEGAL = {
    (Combiner.MAX_MAX, Comonotonic),
    (Combiner.MAX_MAX, Countermonotonic),
    (Combiner.MIN_MIN, Countermonotonic),
    (Combiner.MAX_MIN, SharedShock),
}


@dataclass(frozen=True)
class ShockModel:
    f_x: DistributionFunction
    f_y: DistributionFunction
    coupling: Coupling
    combiner: Combiner

    def __post_init__(self):
        if (self.combiner, type(self.coupling)) not in _LEGAL:
            raise IllegalModelError(
                f"no supported family for combiner {self.combiner.value} with "
                f"{type(self.coupling).__name__} coupling"
            )

    def describe(self) -> str:
        if isinstance(self.coupling, SharedShock):
            shocks = f"g={self.coupling.g.describe()}"
        else:
            shocks = f"g1={self.coupling.g1.describe()},g2={self.coupling.g2.describe()}"
        prefix = {
            (Combiner.MAX_MAX, Comonotonic): "marshall-max",
            (Combiner.MAX_MAX, Countermonotonic): "rmm-max",
            (Combiner.MIN_MIN, Countermonotonic): "smm-min",
            (Combiner.MAX_MIN, SharedShock): "maxmin-shared",
        }[(self.combiner, type(self.coupling))]
        return f"{prefix}:fx={self.f_x.describe()},fy={self.f_y.describe()},{shocks}"


def marshall_model(f_x, f_y, g1, g2) -> ShockModel:
    return ShockModel(f_x, f_y, Comonotonic(g1, g2), Combiner.MAX_MAX)


def rmm_model(f_x, f_y, g1, g2) -> ShockModel:
    return ShockModel(f_x, f_y, Countermonotonic(g1, g2), Combiner.MAX_MAX)


def smm_model(f_x, f_y, g1, g2) -> ShockModel:
    return ShockModel(f_x, f_y, Countermonotonic(g1, g2), Combiner.MIN_MIN)


def maxmin_model(f_x, f_y, g) -> ShockModel:
    return ShockModel(f_x, f_y, SharedShock(g), Combiner.MAX_MIN)


def exponential_marshall_model(l1: float, l2: float, m1: float, m2: float) -> ShockModel:
    """Comonotonic max/max model with exponential shocks."""
    return marshall_model(Exponential(l1), Exponential(l2), Exponential(m1), Exponential(m2))


def exponential_rmm_model(l1: float, l2: float, m1: float, m2: float) -> ShockModel:
    """Countermonotonic max/max model inducing the power-generator RMM family exactly.

    Negated exponential shocks are used because their CDFs are powers of each
    other, which makes the composed generator u ** (l/(l+m)) exact for every
    rate pair.  (Positive exponentials achieve this only at equal rates.)
    """
    return rmm_model(NegExponential(l1), NegExponential(l2), NegExponential(m1), NegExponential(m2))


def exponential_smm_model(l1: float, l2: float, m1: float, m2: float) -> ShockModel:
    """Countermonotonic min/min model with exponential lifetimes."""
    return smm_model(Exponential(l1), Exponential(l2), Exponential(m1), Exponential(m2))


def exprmm_ab_model(alpha: float, beta: float) -> ShockModel:
    """The countermonotonic max/max model matching exprmm_ab(alpha, beta)."""
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise ValueError("model exponents must lie strictly inside (0,1)")
    return exponential_rmm_model(alpha, beta, 1.0 - alpha, 1.0 - beta)


# ---------------------------------------------------------------------------
# forward direction
# ---------------------------------------------------------------------------


def margins(m: ShockModel) -> tuple[DistributionFunction, DistributionFunction]:
    """Marginal CDFs of (U, V) under the model."""
    if m.combiner is Combiner.MAX_MAX:
        return Product(m.f_x, m.coupling.g1), Product(m.f_y, m.coupling.g2)
    if m.combiner is Combiner.MIN_MIN:
        return SurvivalProduct(m.f_x, m.coupling.g1), SurvivalProduct(m.f_y, m.coupling.g2)
    return Product(m.f_x, m.coupling.g), SurvivalProduct(m.f_y, m.coupling.g)


def joint_cdf(m: ShockModel, x, y) -> float:
    """P[U <= x, V <= y] in closed form."""
    fx = m.f_x.cdf(x)
    fy = m.f_y.cdf(y)
    if m.combiner is Combiner.MAX_MAX:
        g1 = m.coupling.g1.cdf(x)
        g2 = m.coupling.g2.cdf(y)
        if isinstance(m.coupling, Comonotonic):
            return fx * fy * min(g1, g2)
        return fx * fy * max(0.0, g1 + g2 - 1.0)
    if m.combiner is Combiner.MIN_MIN:
        g1 = m.coupling.g1.cdf(x)
        g2 = m.coupling.g2.cdf(y)
        fu = 1.0 - (1.0 - fx) * (1.0 - g1)
        fv = 1.0 - (1.0 - fy) * (1.0 - g2)
        return fu + fv - 1.0 + (1.0 - fx) * (1.0 - fy) * max(0.0, 1.0 - g1 - g2)
    gx = m.coupling.g.cdf(x)
    gy = m.coupling.g.cdf(y)
    return fx * (gx - (1.0 - fy) * max(0.0, gx - gy))


def induced_copula(m: ShockModel, resolution: int = 4096) -> cop.Copula:
    """The copula of (U, V), built from tabulated generators and validated."""
    f_u, f_v = margins(m)
    if m.combiner is Combiner.MAX_MAX:
        side_u = generator_from_shocks(m.f_x, f_u, resolution=resolution)
        side_v = generator_from_shocks(m.f_y, f_v, resolution=resolution)
        if isinstance(m.coupling, Comonotonic):
            return cop.marshall(side_u, side_v)
        return cop.rmm(
            hat_to_f(side_u, GeneratorClass.RMM), hat_to_f(side_v, GeneratorClass.RMM)
        )
    if m.combiner is Combiner.MIN_MIN:
        # the max model of the negated pair has hat generators 1 - A(1-u) with
        # A below; its survival copula is the SMM with h = id - A directly
        a_u = generator_from_shocks(m.f_x, f_u, resolution=resolution, margin_side="above")
        a_v = generator_from_shocks(m.f_y, f_v, resolution=resolution, margin_side="above")
        return cop.smm(
            identity_minus(a_u, GeneratorClass.SMM), identity_minus(a_v, GeneratorClass.SMM)
        )
    phi = generator_from_shocks(m.f_x, f_u, resolution=resolution)
    psi = generator_from_shocks(
        m.f_y, f_v, resolution=resolution, margin_side="above",
        declared_class=GeneratorClass.MAXMIN_PSI,
    )
    return cop.maxmin(phi, psi)


# ---------------------------------------------------------------------------
# reconstruction support types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiMap:
    """Increasing alignment map between the two margins' supports."""

    forward: Callable[[float], float]
    inverse: Callable[[float], float]
    label: str = "identity"


IDENTITY_CHI = ChiMap(lambda x: x, lambda x: x, "identity")


class ComposedCdf(DistributionFunction):
    """gen(base.cdf(x)) for a continuous nondecreasing generator with gen(0)=0, gen(1)=1."""

    def __init__(self, gen: Generator, base: DistributionFunction):
        self.gen = gen
        self.base = base

    def _cdf(self, x: float) -> float:
        return self.gen.value(self.base.cdf(x))

    def _cdf_left(self, x: float) -> float:
        return self.gen.value(self.base.cdf_left(x))

    def cdf_array(self, xs):
        return self.gen.value_array(self.base.cdf_array(xs))

    def cdf_left_array(self, xs):
        return self.gen.value_array(self.base.cdf_left_array(xs))

    def jump_points(self):
        return self.base.jump_points()

    def support_hint(self):
        return self.base.support_hint()

    def describe(self) -> str:
        return f"composed({self.gen.describe()},{self.base.describe()})"


class _BranchShockCdf(DistributionFunction):
    """Shock CDF defined pointwise from the two margin values at the same point."""

    def __init__(self, margin_u, margin_v, label: str):
        self.margin_u = margin_u
        self.margin_v = margin_v
        self._label = label

    def _value(self, fu: float, fv: float) -> float:
        raise NotImplementedError

    def _values(self, fu: np.ndarray, fv: np.ndarray) -> np.ndarray:
        out = np.empty_like(fu)
        for i in range(fu.size):
            out[i] = self._value(float(fu[i]), float(fv[i]))
        return out

    def _cdf(self, x: float) -> float:
        return self._value(self.margin_u.cdf(x), self.margin_v.cdf(x))

    def _cdf_left(self, x: float) -> float:
        return self._value(self.margin_u.cdf_left(x), self.margin_v.cdf_left(x))

    def cdf_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        return self._values(self.margin_u.cdf_array(xs), self.margin_v.cdf_array(xs))

    def cdf_left_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        return self._values(
            self.margin_u.cdf_left_array(xs), self.margin_v.cdf_left_array(xs)
        )

    def jump_points(self):
        extra = []
        for margin in (self.margin_u, self.margin_v):
            start = margin.quantile(1e-12)
            if not isinstance(start, _Infinity):
                extra.append(float(start))
        return tuple(
            sorted(set(self.margin_u.jump_points()) | set(self.margin_v.jump_points()) | set(extra))
        )

    def support_hint(self):
        lo1, hi1 = self.margin_u.support_hint()
        lo2, hi2 = self.margin_v.support_hint()
        return (min(lo1, lo2), max(hi1, hi2))

    def describe(self) -> str:
        return self._label


class RmmShockCdf(_BranchShockCdf):
    """Reconstructed systemic-shock CDF of the countermonotonic max/max model.

    On {margin_u > 0} it is margin_u / hat_f(margin_u); where margin_u
    vanishes it continues as s/(1+s) with s the star value of the opposite
    generator at 1 - margin_v.
    """

    def __init__(self, f: Generator, g: Generator, margin_u, margin_v, side: str):
        label = f"rmm-shock-{side}"
        if side == "v":
            margin_u, margin_v = margin_v, margin_u
            f, g = g, f
        super().__init__(margin_u, margin_v, label)
        self.f = f
        self.g = g

    def _value(self, fu: float, fv: float) -> float:
        if fu == 0.0:
            s = derived_value(self.g, "star", 1.0 - fv)
            if isinstance(s, _Infinity):
                return 1.0
            return s / (1.0 + s)
        return fu / (self.f.value(fu) + fu)

    def _values(self, fu, fv):
        out = np.empty_like(fu)
        pos = fu > 0.0
        fu_pos = fu[pos]
        out[pos] = fu_pos / (self.f.value_array(fu_pos) + fu_pos)
        for i in np.nonzero(~pos)[0]:
            out[i] = self._value(0.0, float(fv[i]))
        return out


class MarshallShockCdf(_BranchShockCdf):
    """Reconstructed second systemic shock of the comonotonic max/max model."""

    def __init__(self, phi: Generator, psi: Generator, margin_u, margin_v, chi: ChiMap):
        super().__init__(margin_u, margin_v, "marshall-shock")
        self.phi = phi
        self.psi = psi
        self.chi = chi

    def _cdf(self, x: float) -> float:
        return self._value(self.margin_u.cdf(self.chi.forward(x)), self.margin_v.cdf(x))

    def _cdf_left(self, x: float) -> float:
        return self._value(
            self.margin_u.cdf_left(self.chi.forward(x)), self.margin_v.cdf_left(x)
        )

    def _shift(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.chi.forward(float(x)) for x in xs])

    def cdf_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        return self._values(self.margin_u.cdf_array(self._shift(xs)), self.margin_v.cdf_array(xs))

    def cdf_left_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        return self._values(
            self.margin_u.cdf_left_array(self._shift(xs)), self.margin_v.cdf_left_array(xs)
        )

    def _value(self, fu: float, fv: float) -> float:
        if fu == 0.0 and fv == 0.0:
            return 0.0
        if fu == 0.0:
            den = self.psi.value(fv)
            if den == 0.0:
                raise ReconstructionError(
                    "generator-vanishes", f"psi vanishes at a point with margin value {fv}"
                )
            return fv / den
        den = self.phi.value(fu)
        if den == 0.0:
            raise ReconstructionError(
                "generator-vanishes", f"phi vanishes at a point with margin value {fu}"
            )
        return fu / den


class ChiShiftedCdf(DistributionFunction):
    """inner.cdf(chi_inverse(x)): transports the second shock back to the first axis."""

    def __init__(self, inner: DistributionFunction, chi: ChiMap):
        self.inner = inner
        self.chi = chi

    def _cdf(self, x: float) -> float:
        return self.inner.cdf(self.chi.inverse(x))

    def _cdf_left(self, x: float) -> float:
        return self.inner.cdf_left(self.chi.inverse(x))

    def _shift(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self.chi.inverse(float(x)) for x in xs])

    def cdf_array(self, xs):
        return self.inner.cdf_array(self._shift(np.asarray(xs, dtype=float)))

    def cdf_left_array(self, xs):
        return self.inner.cdf_left_array(self._shift(np.asarray(xs, dtype=float)))

    def jump_points(self):
        return tuple(sorted(self.chi.forward(j) for j in self.inner.jump_points()))

    def support_hint(self):
        lo, hi = self.inner.support_hint()
        return tuple(sorted((self.chi.forward(lo), self.chi.forward(hi))))

    def describe(self) -> str:
        return f"chi-shifted({self.inner.describe()})"


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def support_grid(dists, n: int = 1001, pad: float = 0.0) -> np.ndarray:
    """Points spanning the union of effective supports (quantile 1e-6 .. 1-1e-6)."""
    levels = np.linspace(1e-6, 1.0 - 1e-6, n)
    pieces = [d.quantile_array(levels) for d in dists]
    for d in dists:
        jumps = np.asarray(d.jump_points(), dtype=float)
        if jumps.size:
            pieces.append(jumps)
    xs = np.unique(np.concatenate(pieces))
    if pad > 0.0:
        span = xs[-1] - xs[0] if xs[-1] > xs[0] else 1.0
        xs = np.concatenate(([xs[0] - pad * span], xs, [xs[-1] + pad * span]))
    return xs


def _subsample(xs: np.ndarray, k: int) -> np.ndarray:
    if xs.size <= k:
        return xs
    idx = np.linspace(0, xs.size - 1, k).round().astype(int)
    return xs[np.unique(idx)]


# ---------------------------------------------------------------------------
# reconstructions
# ---------------------------------------------------------------------------


def reconstruct_marshall(
    c: cop.Copula,
    margin_u: DistributionFunction,
    margin_v: DistributionFunction,
    chi: ChiMap | None = None,
    grid_size: int = 1001,
    tol: float = 1e-9,
) -> ShockModel:
    """Invert a Marshall copula plus margins into a comonotonic max/max model.

    Checks the alignment, left-endpoint, and star-divergence assumptions on
    the grid before building the shocks, and the factorization and joint-law
    postconditions afterwards.
    """
    if not isinstance(c, cop.MarshallCopula):
        raise ReconstructionError("family", f"expected a Marshall copula, got {c.describe()}")
    chi = chi or IDENTITY_CHI
    phi, psi = c.phi, c.psi
    xs = support_grid([margin_u, margin_v], grid_size)

    # alignment of the star ratios wherever both composed margins are positive
    for x in xs:
        fu = margin_u.cdf(chi.forward(x))
        fv = margin_v.cdf(x)
        if fu > 0.0 and fv > 0.0:
            left = phi.value(fu) / fu
            right = psi.value(fv) / fv
            if abs(left - right) > tol * max(1.0, abs(left), abs(right)):
                raise ReconstructionError(
                    "alignment",
                    f"phi-star({fu:.6g})={left:.6g} != psi-star({fv:.6g})={right:.6g}",
                    witness=float(x),
                )

    _check_left_endpoint("margin-u", phi, margin_u, tol)
    _check_left_endpoint("margin-v", psi, margin_v, tol)
    _check_star_divergence("margin-u", phi, margin_u, xs)
    _check_star_divergence("margin-v", psi, margin_v, xs)

    f_x = ComposedCdf(phi, margin_u)
    f_y = ComposedCdf(psi, margin_v)
    g2 = MarshallShockCdf(phi, psi, margin_u, margin_v, chi)
    g1 = ChiShiftedCdf(g2, chi)
    model = ShockModel(f_x, f_y, Comonotonic(g1, g2), Combiner.MAX_MAX)
    _check_postconditions(model, c, margin_u, margin_v, xs, tol)
    return model


def _check_left_endpoint(label, gen, margin, tol):
    """Either the generator is continuous at 0 or the margin has an atom at a
    finite left support endpoint."""
    if gen.value(1e-9) <= 1e-6:
        return
    start = margin.quantile(1e-15)
    if not isinstance(start, _Infinity):
        q = float(start)
        if margin.cdf(q) - margin.cdf_left(q) > 1e-12:
            return
    raise ReconstructionError(
        "left-endpoint",
        f"{label}: generator not continuous at 0 and margin has no left-endpoint atom",
    )


def _check_star_divergence(label, gen, margin, xs):
    """Either the star ratio diverges at 0+ or the margin vanishes somewhere."""
    star0 = derived_value(gen, "star", 0.0)
    if star0 == POS_INF:
        return
    span = xs[-1] - xs[0] if xs[-1] > xs[0] else 1.0
    probe = xs[0] - 0.05 * span - 1.0
    if margin.cdf(probe) == 0.0:
        return
    raise ReconstructionError(
        "star-divergence",
        f"{label}: star ratio bounded at 0+ and margin never vanishes",
        witness=float(probe),
    )


def reconstruct_rmm(
    c: cop.Copula,
    margin_u: DistributionFunction,
    margin_v: DistributionFunction,
    grid_size: int = 1001,
    tol: float = 1e-9,
) -> ShockModel:
    """Invert an RMM copula plus margins into a countermonotonic max/max model."""
    if not isinstance(c, cop.RmmCopula):
        raise ReconstructionError("family", f"expected an RMM copula, got {c.describe()}")
    xs = support_grid([margin_u, margin_v], grid_size)
    _check_interior_point(margin_u, margin_v, xs)

    f, g = c.f, c.g
    f_x = ComposedCdf(hat_of(f), margin_u)
    f_y = ComposedCdf(hat_of(g), margin_v)
    g1 = RmmShockCdf(f, g, margin_u, margin_v, "u")
    g2 = RmmShockCdf(f, g, margin_u, margin_v, "v")
    model = ShockModel(f_x, f_y, Countermonotonic(g1, g2), Combiner.MAX_MAX)

    for label, shock in (("g1", g1), ("g2", g2)):
        vals = shock.cdf_array(xs)
        steps = np.diff(vals)
        if steps.size and steps.min() < -1e-12:
            idx = int(np.argmin(steps))
            raise ReconstructionError(
                "shock-monotone",
                f"reconstructed {label} decreases by {-steps.min():.3g}",
                witness=float(xs[idx + 1]),
            )
    _check_postconditions(model, c, margin_u, margin_v, xs, tol)
    return model


def _check_interior_point(margin_u, margin_v, xs):
    fu = margin_u.cdf_array(xs)
    fv = margin_v.cdf_array(xs)
    interior = (fu > 0.0) & (fu < 1.0) & (fv > 0.0) & (fv < 1.0)
    if not interior.any():
        raise ReconstructionError(
            "interior-point",
            "margins admit no common point with both values strictly inside (0,1)",
        )


def reconstruct_smm(
    c: cop.Copula,
    margin_u: DistributionFunction,
    margin_v: DistributionFunction,
    grid_size: int = 1001,
    tol: float = 1e-9,
) -> ShockModel:
    """Invert an SMM copula plus margins into a countermonotonic min/min model.

    Reduction: the negated pair has the survival copula, which is RMM with
    reflected generators; reconstruct that max/max model on the negated line
    and negate every shock back.
    """
    if not isinstance(c, cop.SmmCopula):
        raise ReconstructionError("family", f"expected an SMM copula, got {c.describe()}")
    xs = support_grid([margin_u, margin_v], grid_size)
    _check_interior_point(margin_u, margin_v, xs)

    f = smm_to_rmm(c.h)
    g = smm_to_rmm(c.k)
    neg_model = reconstruct_rmm(
        cop.RmmCopula(f, g), negated(margin_u), negated(margin_v), grid_size, tol
    )
    model = ShockModel(
        negated(neg_model.f_x),
        negated(neg_model.f_y),
        Countermonotonic(negated(neg_model.coupling.g1), negated(neg_model.coupling.g2)),
        Combiner.MIN_MIN,
    )
    _check_postconditions(model, c, margin_u, margin_v, xs, tol)
    return model


def _check_postconditions(model, c, margin_u, margin_v, xs, tol):
    got_u, got_v = margins(model)
    target_u = margin_u.cdf_array(xs)
    target_v = margin_v.cdf_array(xs)
    err_u = np.max(np.abs(got_u.cdf_array(xs) - target_u))
    err_v = np.max(np.abs(got_v.cdf_array(xs) - target_v))
    if max(err_u, err_v) > tol:
        raise ReconstructionError(
            "margin-factorization",
            f"reconstructed margins deviate by {max(err_u, err_v):.3g} (tol {tol:.1g})",
        )
    sub = _subsample(xs, 21)
    joint = cop.sklar_join(c, margin_u, margin_v)
    worst = 0.0
    witness = None
    for x in sub:
        for y in sub:
            diff = abs(joint_cdf(model, float(x), float(y)) - joint.cdf(float(x), float(y)))
            if diff > worst:
                worst = diff
                witness = (float(x), float(y))
    if worst > tol:
        raise ReconstructionError(
            "joint-law",
            f"model joint CDF deviates from the join by {worst:.3g} (tol {tol:.1g})",
            witness=witness,
        )


def reconstruct(c: cop.Copula, margin_u, margin_v, **kwargs) -> ShockModel:
    """Dispatch reconstruction on the (normalized) family of the copula."""
    c = cop.normalize(c)
    if isinstance(c, cop.MarshallCopula):
        return reconstruct_marshall(c, margin_u, margin_v, **kwargs)
    if isinstance(c, cop.RmmCopula):
        return reconstruct_rmm(c, margin_u, margin_v, **kwargs)
    if isinstance(c, cop.SmmCopula):
        return reconstruct_smm(c, margin_u, margin_v, **kwargs)
    raise ReconstructionError(
        "family", f"no reconstruction is defined for {c.describe()}"
    )
