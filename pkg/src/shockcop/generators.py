"""Generator functions on [0,1] for the four shock-copula families.

A generator is a function I -> R tagged with the condition set it claims to
satisfy:

* ``MARSHALL``   : 0 at 0, 1 at 1, nondecreasing, f(u)/u nonincreasing;
* ``MAXMIN_PSI`` : 0 at 0, 1 at 1, nondecreasing, (1-psi(v))/(v-psi(v))
  nonincreasing with the +oo convention where psi(v) = v;
* ``RMM``        : 0 at both ends, f(u)+u nondecreasing, f(u)/u nonincreasing
  on (0,1];
* ``SMM``        : 0 at both ends, u-h(u) nondecreasing, h(u)/(1-u)
  nondecreasing on [0,1).

``validate`` turns these into grid checks, ``derived_value`` exposes the
auxiliary maps (star, hat, dagger...), and ``generator_from_shocks`` builds a
tabulated generator from a component CDF and a margin CDF by composing the
component with the margin's generalized inverse and interpolating linearly
across gaps in the margin's image.
"""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .distributions import DistributionFunction
from .errors import (
    GeneratorKindError,
    GeneratorValidationError,
    ShockStructureError,
    TableFormatError,
)
from .extreal import POS_INF, ExtendedReal

STAR_LIMIT_PROBES = (1e-9, 1e-12)
STAR_DIVERGENCE_CAP = 1e12
_STAR_GROWTH_RATIO = 1.5
DEFAULT_GRID = 1001
CLOSED_FORM_TOL = 1e-12
TABULATED_TOL = 1e-9


class GeneratorClass(enum.Enum):
    MARSHALL = "marshall"
    MAXMIN_PSI = "maxmin-psi"
    RMM = "rmm"
    SMM = "smm"


#: boundary values (at 0, at 1) required by each class
_BOUNDARIES = {
    GeneratorClass.MARSHALL: (0.0, 1.0),
    GeneratorClass.MAXMIN_PSI: (0.0, 1.0),
    GeneratorClass.RMM: (0.0, 0.0),
    GeneratorClass.SMM: (0.0, 0.0),
}


class Generator(ABC):
    declared_class: GeneratorClass

    @abstractmethod
    def _eval(self, u):
        """Evaluate at a float or ndarray of points in [0,1]."""

    def value(self, u: float) -> float:
        if not 0.0 <= u <= 1.0:
            raise ValueError(f"generator argument must lie in [0,1], got {u}")
        return float(self._eval(u))

    def value_array(self, us: np.ndarray) -> np.ndarray:
        return np.asarray(self._eval(np.asarray(us, dtype=float)), dtype=float)

    def __call__(self, u: float) -> float:
        return self.value(u)

    @property
    def grid_tol(self) -> float:
        """Monotonicity slack appropriate to the representation."""
        return CLOSED_FORM_TOL

    def param_domain_violations(self) -> list[tuple[str, str]]:
        """(condition id, detail) pairs for named-family parameter constraints."""
        return []

    @abstractmethod
    def describe(self) -> str:
        """Canonical descriptor string."""

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.describe()} [{self.declared_class.value}]>"


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Family:
    params: tuple[str, ...]
    fn: object
    check: object = None  # construction-time evaluability constraints
    domain: object = None  # family parameter-domain constraints, reported by validate()


def _power_domain(p):
    if not p["alpha"] <= 1.0:
        return [("power-domain", f"alpha={p['alpha']} must lie in (0,1]")]
    return []


def _twoparam_domain(p):
    alpha, beta = p["alpha"], p["beta"]
    out = []
    if alpha > 1.0:
        out.append(("twoparam-domain", f"alpha={alpha} must lie in (0,1]"))
    elif alpha == 1.0:
        if beta > 1.0:
            out.append(("twoparam-domain", f"beta={beta} must lie in (0,1] when alpha=1"))
    elif beta < (1.0 - alpha) - 1e-12:
        out.append(("twoparam-domain", f"beta={beta} must be >= 1-alpha={1.0 - alpha}"))
    return out


def _efgm_domain(p):
    if not 0.0 < p["a"] <= 1.0:
        return [("efgm-domain", f"a={p['a']} must lie in (0,1]")]
    return []


def _positive(*names):
    def check(p):
        for n in names:
            if not p[n] > 0.0:
                raise ValueError(f"parameter {n} must be positive, got {p[n]}")

    return check


def _poly_eval(p, t):
    coeffs = [p[f"c{i}"] for i in range(len(p))]
    acc = t * 0.0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


_FAMILIES: dict[str, _Family] = {
    "power": _Family(("alpha",), lambda p, t: t ** p["alpha"] - t, _positive("alpha"), _power_domain),
    "twoparam": _Family(
        ("alpha", "beta"),
        lambda p, t: t ** p["alpha"] * (1.0 - t ** p["beta"]),
        _positive("alpha", "beta"),
        _twoparam_domain,
    ),
    "efgmhat": _Family(("a",), lambda p, t: (p["a"] + 1.0) * t - p["a"] * t * t, None, _efgm_domain),
    "efgmf": _Family(("a",), lambda p, t: p["a"] * t * (1.0 - t), None, _efgm_domain),
    "identity": _Family((), lambda p, t: t + 0.0),
    "zero": _Family((), lambda p, t: t * 0.0),
    "fullshock": _Family((), lambda p, t: np.where(np.asarray(t) > 0.0, 1.0, 0.0)),
    "capped": _Family(("slope",), lambda p, t: np.minimum(p["slope"] * t, 1.0), _positive("slope")),
}


class ClosedFormGenerator(Generator):
    """Named closed-form generator; ``poly`` takes coefficients c0, c1, ..."""

    def __init__(self, family: str, params: dict | None, declared_class: GeneratorClass):
        params = dict(params or {})
        if family == "poly":
            expected = {f"c{i}" for i in range(len(params))}
            if set(params) != expected or not params:
                raise ValueError(f"poly parameters must be c0..c{{n}}, got {sorted(params)}")
        else:
            spec = _FAMILIES.get(family)
            if spec is None:
                raise ValueError(f"unknown generator family {family!r}")
            if set(params) != set(spec.params):
                raise ValueError(
                    f"{family} expects parameters {spec.params}, got {tuple(sorted(params))}"
                )
            if spec.check is not None:
                spec.check(params)
        self.family = family
        self.params = params
        self.declared_class = declared_class

    def _eval(self, u):
        if self.family == "poly":
            return _poly_eval(self.params, u)
        return _FAMILIES[self.family].fn(self.params, u)

    def param_domain_violations(self):
        if self.family == "poly":
            return []
        domain = _FAMILIES[self.family].domain
        return list(domain(self.params)) if domain else []

    def describe(self) -> str:
        if not self.params:
            return self.family
        args = ",".join(f"{k}={self.params[k]!r}" for k in sorted(self.params))
        return f"{self.family}:{args}"


def closed_form(family: str, declared_class: GeneratorClass, **params) -> ClosedFormGenerator:
    return ClosedFormGenerator(family, params, declared_class)


class TabulatedGenerator(Generator):
    """Piecewise-linear generator on knots spanning [0,1]."""

    def __init__(self, us, values, declared_class: GeneratorClass):
        us = np.asarray(us, dtype=float)
        values = np.asarray(values, dtype=float)
        if us.ndim != 1 or us.shape != values.shape or us.size < 2:
            raise TableFormatError("tabulated generator needs matching u/value knots")
        if us[0] != 0.0 or us[-1] != 1.0:
            raise TableFormatError("tabulated generator knots must span [0,1]")
        if np.any(np.diff(us) <= 0):
            raise TableFormatError("tabulated generator knots must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise TableFormatError("tabulated generator values must be finite")
        self.us = us
        self.values = values
        self.declared_class = declared_class

    def _eval(self, u):
        return np.interp(u, self.us, self.values)

    @property
    def grid_tol(self) -> float:
        return TABULATED_TOL

    def describe(self) -> str:
        return f"tabulated:knots={self.us.size}"


# ---------------------------------------------------------------------------
# adapters
# ---------------------------------------------------------------------------

_REFLECT_CLASS = {
    GeneratorClass.RMM: GeneratorClass.SMM,
    GeneratorClass.SMM: GeneratorClass.RMM,
    GeneratorClass.MARSHALL: GeneratorClass.MARSHALL,
    GeneratorClass.MAXMIN_PSI: GeneratorClass.MAXMIN_PSI,
}


class ReflectedGenerator(Generator):
    """Evaluates the wrapped generator at 1-u."""

    def __init__(self, inner: Generator, declared_class: GeneratorClass | None = None):
        self.inner = inner
        self.declared_class = declared_class or _REFLECT_CLASS[inner.declared_class]

    def _eval(self, u):
        return self.inner._eval(1.0 - u)

    @property
    def grid_tol(self) -> float:
        return self.inner.grid_tol

    def param_domain_violations(self):
        return self.inner.param_domain_violations()

    def describe(self) -> str:
        return f"reflect({self.inner.describe()})"


class IdentityOffsetGenerator(Generator):
    """Combine a generator with the identity map: inner-id, id-inner, or inner+id."""

    _MODES = {
        "minus-id": lambda g, u: g - u,
        "id-minus": lambda g, u: u - g,
        "plus-id": lambda g, u: g + u,
    }

    def __init__(self, inner: Generator, mode: str, declared_class: GeneratorClass):
        if mode not in self._MODES:
            raise ValueError(f"unknown identity-offset mode {mode!r}")
        self.inner = inner
        self.mode = mode
        self.declared_class = declared_class

    def _eval(self, u):
        return self._MODES[self.mode](self.inner._eval(u), u)

    @property
    def grid_tol(self) -> float:
        return self.inner.grid_tol

    def describe(self) -> str:
        return f"{self.mode}({self.inner.describe()})"


def hat_to_f(hat: Generator, declared_class: GeneratorClass = GeneratorClass.RMM) -> Generator:
    """Subtract the identity from a hat-form generator (0 at 0, 1 at 1)."""
    h0, h1 = hat.value(0.0), hat.value(1.0)
    if h0 != 0.0 or h1 != 1.0:
        raise GeneratorValidationError(
            f"hat form must satisfy hat(0)=0 and hat(1)=1, got {h0} and {h1}"
        )
    if isinstance(hat, TabulatedGenerator):
        return TabulatedGenerator(hat.us, hat.values - hat.us, declared_class)
    return IdentityOffsetGenerator(hat, "minus-id", declared_class)


def hat_of(f: Generator) -> Generator:
    """Add the identity to a generator: the hat form used in shock reconstruction."""
    if isinstance(f, TabulatedGenerator):
        return TabulatedGenerator(f.us, f.values + f.us, f.declared_class)
    return IdentityOffsetGenerator(f, "plus-id", f.declared_class)


def identity_minus(g: Generator, declared_class: GeneratorClass) -> Generator:
    """u - g(u), tagged with the requested class."""
    if isinstance(g, TabulatedGenerator):
        return TabulatedGenerator(g.us, g.us - g.values, declared_class)
    return IdentityOffsetGenerator(g, "id-minus", declared_class)


def rmm_to_smm(f: Generator) -> Generator:
    """h(u) = f(1-u); requires a valid RMM generator, returns a valid SMM one."""
    _require_valid(f, GeneratorClass.RMM)
    if isinstance(f, ReflectedGenerator) and f.inner.declared_class is GeneratorClass.SMM:
        out = f.inner
    else:
        out = ReflectedGenerator(f, GeneratorClass.SMM)
    _require_valid(out, GeneratorClass.SMM)
    return out


def smm_to_rmm(h: Generator) -> Generator:
    """f(u) = h(1-u); inverse of :func:`rmm_to_smm`, round-trip is exact."""
    _require_valid(h, GeneratorClass.SMM)
    if isinstance(h, ReflectedGenerator) and h.inner.declared_class is GeneratorClass.RMM:
        out = h.inner
    else:
        out = ReflectedGenerator(h, GeneratorClass.RMM)
    _require_valid(out, GeneratorClass.RMM)
    return out


def _require_valid(gen: Generator, expected: GeneratorClass) -> None:
    if gen.declared_class is not expected:
        raise GeneratorValidationError(
            f"expected a {expected.value} generator, got {gen.declared_class.value}"
        )
    report = validate(gen)
    if not report.passed:
        raise GeneratorValidationError(
            f"{gen.describe()} fails {expected.value} validation: {report.violations[0]}",
            report=report,
        )


# ---------------------------------------------------------------------------
# derived functions
# ---------------------------------------------------------------------------

_KINDS_BY_CLASS = {
    GeneratorClass.MARSHALL: {"star"},
    GeneratorClass.MAXMIN_PSI: {"psi_star"},
    GeneratorClass.RMM: {"star", "hat"},
    GeneratorClass.SMM: {"dagger", "hat_dagger"},
}


def derived_value(gen: Generator, kind: str, u: float) -> ExtendedReal:
    """Evaluate a derived map; divergent one-sided limits come back as +oo."""
    if kind not in _KINDS_BY_CLASS.get(gen.declared_class, ()):
        raise GeneratorKindError(
            f"derived kind {kind!r} is not defined for class {gen.declared_class.value}"
        )
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"argument must lie in [0,1], got {u}")
    if kind == "hat":
        return gen.value(u) + u
    if kind == "hat_dagger":
        return u - gen.value(u)
    if kind == "star":
        if u == 0.0:
            return _one_sided_limit(lambda p: gen.value(p) / p)
        return gen.value(u) / u
    if kind == "dagger":
        if u == 1.0:
            return _one_sided_limit(lambda p: gen.value(1.0 - p) / p)
        return gen.value(u) / (1.0 - u)
    # psi_star
    val = gen.value(u)
    den = u - val
    if den == 0.0:
        return POS_INF
    return (1.0 - val) / den


def _one_sided_limit(ratio) -> ExtendedReal:
    """Estimate a one-sided limit of a monotone ratio from two probe offsets.

    Reported as +oo when the closer probe exceeds the divergence cap or keeps
    growing markedly as the probe tightens (a power-law divergence too slow to
    reach the cap at representable offsets).
    """
    far = ratio(STAR_LIMIT_PROBES[0])
    near = ratio(STAR_LIMIT_PROBES[1])
    if near > STAR_DIVERGENCE_CAP:
        return POS_INF
    if near > _STAR_GROWTH_RATIO * max(far, 1e-300) and near > far + 1e-9:
        return POS_INF
    return near


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    condition: str
    u: float
    observed: float
    threshold: float

    def __str__(self) -> str:
        if np.isnan(self.u):  # parameter-domain violations carry no grid point
            return self.condition
        return f"{self.condition} at u={self.u:.6g}: observed {self.observed:.6g} (threshold {self.threshold:.3g})"


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple[Violation, ...]
    notes: tuple[str, ...] = ()

    def __str__(self) -> str:
        if self.passed:
            return "passed" + (f" ({'; '.join(self.notes)})" if self.notes else "")
        lines = [str(v) for v in self.violations]
        return "failed:\n  " + "\n  ".join(lines)


_UNENFORCED_NOTES = {
    GeneratorClass.RMM: ("literal zero-limit condition on f(u)/u at u=0 not enforced",),
    GeneratorClass.SMM: ("literal end condition on u-h(u) at u=1 not enforced",),
}


def validate(gen: Generator, grid_size: int = DEFAULT_GRID, tol: float | None = None) -> ValidationReport:
    """Check the condition set of the generator's declared class on a uniform grid.

    Boundary values are compared exactly; monotonicity of the raw and derived
    maps is checked between consecutive grid points with additive slack
    ``tol`` (defaults to 1e-12 for closed forms, 1e-9 for tabulated ones).
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    if tol is None:
        tol = gen.grid_tol
    us = np.linspace(0.0, 1.0, grid_size)
    vals = gen.value_array(us)
    cls = gen.declared_class
    violations: list[Violation] = []

    for cond, detail in gen.param_domain_violations():
        violations.append(Violation(f"{cond} ({detail})", float("nan"), float("nan"), float("nan")))

    lo, hi = _BOUNDARIES[cls]
    if vals[0] != lo:
        violations.append(Violation("boundary-at-0", 0.0, float(vals[0]), 0.0))
    if vals[-1] != hi:
        violations.append(Violation("boundary-at-1", 1.0, float(vals[-1]), 0.0))

    if cls in (GeneratorClass.MARSHALL, GeneratorClass.MAXMIN_PSI):
        _check_monotone("nondecreasing", us, vals, +1, tol, violations)
    if cls is GeneratorClass.MARSHALL:
        star = vals[1:] / us[1:]
        _check_monotone("star-nonincreasing", us[1:], star, -1, tol, violations)
    elif cls is GeneratorClass.MAXMIN_PSI:
        interior = us[:-1]  # psi_star lives on [0,1)
        psi = vals[:-1]
        den = interior - psi
        with np.errstate(divide="ignore", invalid="ignore"):
            star = np.where(den == 0.0, np.inf, (1.0 - psi) / den)
        _check_monotone("psi-star-nonincreasing", interior, star, -1, tol, violations)
    elif cls is GeneratorClass.RMM:
        hat = vals + us
        _check_monotone("hat-nondecreasing", us, hat, +1, tol, violations)
        star = vals[1:] / us[1:]
        _check_monotone("star-nonincreasing", us[1:], star, -1, tol, violations)
    elif cls is GeneratorClass.SMM:
        hat_dag = us - vals
        _check_monotone("hat-dagger-nondecreasing", us, hat_dag, +1, tol, violations)
        dag = vals[:-1] / (1.0 - us[:-1])
        _check_monotone("dagger-nondecreasing", us[:-1], dag, +1, tol, violations)

    return ValidationReport(
        passed=not violations,
        violations=tuple(violations),
        notes=_UNENFORCED_NOTES.get(cls, ()),
    )


def _check_monotone(condition, us, ys, direction, tol, violations):
    diffs = direction * np.diff(ys)
    # inf -> inf steps difference to nan; equal infinities do not violate
    both_inf = np.isinf(ys[1:]) & np.isinf(ys[:-1])
    bad = (diffs < -tol) & ~(np.isnan(diffs) & both_inf)
    if bad.any():
        idx = int(np.argmin(np.where(bad, diffs, np.inf)))
        violations.append(Violation(condition, float(us[1:][idx]), float(diffs[idx]), tol))


# ---------------------------------------------------------------------------
# construction from shock distributions
# ---------------------------------------------------------------------------

DEFAULT_RESOLUTION = 4096
_IMAGE_ATOL = 1e-12


def generator_from_shocks(
    component: DistributionFunction,
    margin: DistributionFunction,
    *,
    declared_class: GeneratorClass = GeneratorClass.MARSHALL,
    resolution: int = DEFAULT_RESOLUTION,
    margin_side: str = "below",
    precheck_points: int = 512,
    precheck_tol: float = 1e-9,
) -> TabulatedGenerator:
    """Tabulate u -> component(margin^{-1}(u)) with interpolation across image gaps.

    ``margin_side="below"`` asserts margin <= component pointwise (max-type
    models, where the margin is the product of the component with a shock);
    ``"above"`` asserts the reverse (min-type models).  The result has value 0
    at 0 and 1 at 1, takes component(quantile(u)) wherever u is attained by
    the margin, and joins the bracket values linearly across each jump of the
    margin; the bracket levels themselves are inserted as knots so the
    tabulated form reproduces the gap interpolation exactly.
    """
    if margin_side not in ("below", "above"):
        raise ValueError(f"margin_side must be 'below' or 'above', got {margin_side!r}")
    if resolution < 8:
        raise ValueError("resolution must be at least 8")

    _check_margin_order(component, margin, margin_side, precheck_points, precheck_tol)

    levels = np.linspace(0.0, 1.0, resolution + 1)
    # power-graded ladders refine both tails: uniform knots alone leave the
    # piecewise-linear error of hat maps ~ u**beta unbounded near the ends,
    # while spacing ~ u**(5/6) keeps it O(resolution**-2) down to tiny levels
    ladder = (np.arange(1, resolution, dtype=float) / resolution) ** 6
    brackets: list[float] = []
    for x in margin.jump_points():
        under = margin.cdf_left(x)
        over = margin.cdf(x)
        if over - under > 1e-15:
            brackets.extend((under, over))
    us = np.unique(
        np.concatenate((levels, ladder, 1.0 - ladder, np.asarray(brackets, dtype=float)))
    )
    us = us[(us >= 0.0) & (us <= 1.0)]

    interior = us[(us > 0.0) & (us < 1.0)]
    qs = margin.quantile_array(interior)
    qs = _snap_to_jumps(qs, margin.jump_points())
    overs = margin.cdf_array(qs)
    unders = margin.cdf_left_array(qs)
    comp_at = component.cdf_array(qs)
    comp_left = component.cdf_left_array(qs)

    in_image = np.abs(overs - interior) <= _IMAGE_ATOL
    anchor_hi = np.where(overs >= 1.0, 1.0, comp_at)
    anchor_lo = np.where(unders <= 0.0, 0.0, comp_left)
    width = overs - unders
    frac = np.where(width > 0.0, (interior - unders) / np.where(width > 0.0, width, 1.0), 0.0)
    gap_vals = anchor_lo + frac * (anchor_hi - anchor_lo)
    interior_vals = np.where(in_image, comp_at, gap_vals)

    values = np.concatenate(([0.0], interior_vals, [1.0]))
    return TabulatedGenerator(us, values, declared_class)


def _snap_to_jumps(qs: np.ndarray, jumps) -> np.ndarray:
    """Round bisected quantiles onto exact jump locations.

    The generic inverse converges to a jump point from above within ~1e-13;
    evaluating the margin's left limit there would miss the jump entirely, so
    anything within snapping distance of a known discontinuity is moved onto
    it before the brackets are read off.
    """
    jumps = np.asarray(jumps, dtype=float)
    if jumps.size == 0:
        return qs
    order = np.argsort(jumps)
    jumps = jumps[order]
    idx = np.clip(np.searchsorted(jumps, qs), 0, jumps.size - 1)
    below = np.clip(idx - 1, 0, jumps.size - 1)
    nearest = np.where(
        np.abs(jumps[idx] - qs) <= np.abs(jumps[below] - qs), jumps[idx], jumps[below]
    )
    snap = np.abs(nearest - qs) <= 1e-9 * np.maximum(1.0, np.abs(nearest))
    return np.where(snap, nearest, qs)


def _check_margin_order(component, margin, margin_side, points, tol):
    levels = np.linspace(1e-6, 1.0 - 1e-6, points)
    xs = np.unique(
        np.concatenate((margin.quantile_array(levels), np.asarray(margin.jump_points())))
    )
    cvals = component.cdf_array(xs)
    mvals = margin.cdf_array(xs)
    gap = mvals - cvals if margin_side == "below" else cvals - mvals
    worst = int(np.argmax(gap))
    if gap[worst] > tol:
        rel = "margin > component" if margin_side == "below" else "component > margin"
        raise ShockStructureError(
            f"{rel} by {gap[worst]:.3g} at x={xs[worst]:.6g} "
            f"(component {component.describe()}, margin {margin.describe()})",
            witness=float(xs[worst]),
        )
