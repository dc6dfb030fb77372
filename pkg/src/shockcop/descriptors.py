"""Descriptor strings: the round-trippable text forms of copulas, generators,
distributions, and shock models used by the CLI.

Grammar sketch::

    copula   := indep | frechet-w | frechet-m
              | efgm:a=0.95
              | exprmm:l1=1,l2=1,m1=1,m2=1 | exprmm-ab:alpha=0.1,beta=0.1
              | rmm:f=GEN,g=GEN | smm:h=GEN,k=GEN
              | marshall:phi=GEN,psi=GEN | maxmin:phi=GEN,psi=GEN
              | survival(COPULA) | sigma1(COPULA) | sigma2(COPULA)
    gen      := power:alpha=0.5 | twoparam:alpha=0.5,beta=0.5 | efgmhat:a=1
              | efgmf:a=1 | identity | zero | fullshock | capped:slope=2
              | poly:c0=0,c1=1 | tabulated:file=PATH
              | reflect(GEN) | minus-id(GEN) | id-minus(GEN) | plus-id(GEN)
    dist     := uniform[:a=0,b=1] | exp:rate=1 | neg-exp:rate=1
              | efgm-margin:a=1 | efgm-shock:a=1 | pointmass:x=0
              | step:file=PATH | linear:file=PATH
              | product(DIST;DIST) | survival-product(DIST;DIST) | negated(DIST)
    model    := marshall-max:fx=DIST,fy=DIST,g1=DIST,g2=DIST
              | rmm-max:... | smm-min:... | maxmin-shared:fx=,fy=,g=
              (an optional combiner=max-max|min-min|max-min field overrides the
               prefix's combiner, which can make the configuration illegal)

Commas nested inside parentheses never split fields, and a comma-separated
token that does not introduce a known field name continues the previous field,
so generator parameters survive inside copula descriptors.
"""

from __future__ import annotations

import re

from . import copulas as cop
from . import shock_models as sm
from .distributions import (
    DistributionFunction,
    EfgmMargin,
    EfgmShock,
    Exponential,
    NegExponential,
    Product,
    SurvivalProduct,
    Uniform,
    load_tabulated_csv,
    negated,
    point_mass,
)
from .errors import DescriptorError, ShockcopError
from .generators import (
    ClosedFormGenerator,
    Generator,
    GeneratorClass,
    IdentityOffsetGenerator,
    ReflectedGenerator,
    TabulatedGenerator,
    _REFLECT_CLASS,
)

_WRAPPER = re.compile(r"^([a-z0-9-]+)\((.*)\)$")


def split_top_level(text: str, sep: str = ",") -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise DescriptorError(f"unbalanced parentheses in {text!r}")
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise DescriptorError(f"unbalanced parentheses in {text!r}")
    parts.append(text[start:])
    return parts


def _split_head(text: str) -> tuple[str, str]:
    head, sep, body = text.partition(":")
    return head.strip(), body if sep else ""


def _parse_fields(body: str, names: set[str], context: str) -> dict[str, str]:
    """Group comma-separated tokens into named fields; unknown tokens continue
    the previous field (they belong to a nested descriptor)."""
    fields: dict[str, str] = {}
    current = None
    for token in split_top_level(body):
        key, eq, rest = token.partition("=")
        key_l = key.strip().lower()
        if eq and key_l in names:
            if key_l in fields:
                raise DescriptorError(f"{context}: duplicate field {key_l!r}")
            fields[key_l] = rest
            current = key_l
        elif current is not None:
            fields[current] += "," + token
        else:
            raise DescriptorError(f"{context}: expected one of {sorted(names)}, got {token!r}")
    return fields


def _require(fields: dict[str, str], names: tuple[str, ...], context: str) -> list[str]:
    missing = [n for n in names if n not in fields]
    if missing:
        raise DescriptorError(f"{context}: missing field(s) {missing}")
    return [fields[n] for n in names]


def _float(text: str, context: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise DescriptorError(f"{context}: bad number {text!r}") from exc


def _float_params(body: str, context: str) -> dict[str, float]:
    params = {}
    if not body:
        return params
    for token in split_top_level(body):
        key, eq, rest = token.partition("=")
        if not eq:
            raise DescriptorError(f"{context}: expected k=v, got {token!r}")
        params[key.strip()] = _float(rest, context)
    return params


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------


def parse_distribution(text: str) -> DistributionFunction:
    text = text.strip()
    wrapped = _WRAPPER.match(text)
    if wrapped:
        name, inner = wrapped.group(1), wrapped.group(2)
        if name == "negated":
            return negated(parse_distribution(inner))
        if name in ("product", "survival-product"):
            parts = split_top_level(inner, ";")
            if len(parts) != 2:
                raise DescriptorError(
                    f"{name} needs exactly two ';'-separated distributions, got {text!r}"
                )
            d1, d2 = (parse_distribution(p) for p in parts)
            return Product(d1, d2) if name == "product" else SurvivalProduct(d1, d2)
        raise DescriptorError(f"unknown distribution wrapper {name!r}")

    head, body = _split_head(text)
    try:
        if head == "uniform":
            params = _float_params(body, text)
            return Uniform(params.pop("a", 0.0), params.pop("b", 1.0))
        if head in ("exp", "exponential"):
            return Exponential(_float_params(body, text)["rate"])
        if head == "neg-exp":
            return NegExponential(_float_params(body, text)["rate"])
        if head == "efgm-margin":
            return EfgmMargin(_float_params(body, text)["a"])
        if head == "efgm-shock":
            return EfgmShock(_float_params(body, text)["a"])
        if head == "pointmass":
            return point_mass(_float_params(body, text)["x"])
        if head in ("step", "linear"):
            fields = _parse_fields(body, {"file"}, text)
            (path,) = _require(fields, ("file",), text)
            return load_tabulated_csv(path, head)
    except DescriptorError:
        raise
    except (KeyError, ShockcopError, ValueError) as exc:
        raise DescriptorError(f"bad distribution descriptor {text!r}: {exc}") from exc
    raise DescriptorError(f"unknown distribution family {head!r} in {text!r}")


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

_OFFSET_MODES = {"minus-id", "id-minus", "plus-id"}


def parse_generator(text: str, declared_class: GeneratorClass) -> Generator:
    text = text.strip()
    wrapped = _WRAPPER.match(text)
    if wrapped:
        name, inner = wrapped.group(1), wrapped.group(2)
        if name == "reflect":
            return ReflectedGenerator(
                parse_generator(inner, _REFLECT_CLASS[declared_class]), declared_class
            )
        if name in _OFFSET_MODES:
            return IdentityOffsetGenerator(
                parse_generator(inner, GeneratorClass.MARSHALL), name, declared_class
            )
        raise DescriptorError(f"unknown generator wrapper {name!r}")

    head, body = _split_head(text)
    try:
        if head == "tabulated":
            fields = _parse_fields(body, {"file"}, text)
            (path,) = _require(fields, ("file",), text)
            return load_tabulated_generator(path, declared_class)
        if head == "poly":
            return ClosedFormGenerator("poly", _float_params(body, text), declared_class)
        return ClosedFormGenerator(head, _float_params(body, text), declared_class)
    except DescriptorError:
        raise
    except (KeyError, ShockcopError, ValueError) as exc:
        raise DescriptorError(f"bad generator descriptor {text!r}: {exc}") from exc


def load_tabulated_generator(path, declared_class: GeneratorClass) -> TabulatedGenerator:
    """Load a generator table from CSV with header ``u,value``."""
    import csv

    from .errors import TableFormatError

    us, values = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["u", "value"]:
            raise TableFormatError(f"{path}: expected header 'u,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                us.append(float(row[0]))
                values.append(float(row[1]))
            except (IndexError, ValueError) as exc:
                raise TableFormatError(f"{path}:{lineno}: bad row {row!r}") from exc
    return TabulatedGenerator(us, values, declared_class)


def write_tabulated_generator(target, gen: TabulatedGenerator, version: str = "") -> None:
    close = False
    if isinstance(target, (str, bytes)):
        fh = open(target, "w", newline="")
        close = True
    else:
        fh = target
    try:
        fh.write(f"# shockcop={version} generator={gen.describe()}\n")
        fh.write("u,value\n")
        for u, val in zip(gen.us, gen.values):
            fh.write(f"{float(u)!r},{float(val)!r}\n")
    finally:
        if close:
            fh.close()


GENERATOR_CLASS_NAMES = {
    "marshall": GeneratorClass.MARSHALL,
    "maxmin-psi": GeneratorClass.MAXMIN_PSI,
    "rmm": GeneratorClass.RMM,
    "smm": GeneratorClass.SMM,
}


# ---------------------------------------------------------------------------
# copulas
# ---------------------------------------------------------------------------

_GEN_SLOTS = {
    "rmm": (("f", "g"), (GeneratorClass.RMM, GeneratorClass.RMM), cop.rmm),
    "smm": (("h", "k"), (GeneratorClass.SMM, GeneratorClass.SMM), cop.smm),
    "marshall": (
        ("phi", "psi"),
        (GeneratorClass.MARSHALL, GeneratorClass.MARSHALL),
        cop.marshall,
    ),
    "maxmin": (
        ("phi", "psi"),
        (GeneratorClass.MARSHALL, GeneratorClass.MAXMIN_PSI),
        cop.maxmin,
    ),
}


def parse_copula(text: str) -> cop.Copula:
    text = text.strip()
    wrapped = _WRAPPER.match(text)
    if wrapped:
        name, inner = wrapped.group(1), wrapped.group(2)
        if name == "survival":
            return cop.survival(parse_copula(inner))
        if name in ("sigma1", "sigma2"):
            return cop.reflect(parse_copula(inner), name)
        raise DescriptorError(f"unknown copula wrapper {name!r}")

    head, body = _split_head(text)
    try:
        if head == "indep":
            return cop.independence()
        if head == "frechet-w":
            return cop.frechet_w()
        if head == "frechet-m":
            return cop.frechet_m()
        if head == "efgm":
            return cop.efgm(_float_params(body, text)["a"])
        if head == "exprmm":
            p = _float_params(body, text)
            return cop.exponential_rmm(p["l1"], p["l2"], p["m1"], p["m2"])
        if head == "exprmm-ab":
            p = _float_params(body, text)
            return cop.exprmm_ab(p["alpha"], p["beta"])
        if head in _GEN_SLOTS:
            slots, classes, build = _GEN_SLOTS[head]
            fields = _parse_fields(body, set(slots), text)
            texts = _require(fields, slots, text)
            gens = [parse_generator(t, c) for t, c in zip(texts, classes)]
            return build(*gens)
    except DescriptorError:
        raise
    except (KeyError, ShockcopError, ValueError) as exc:
        raise DescriptorError(f"bad copula descriptor {text!r}: {exc}") from exc
    raise DescriptorError(f"unknown copula family {head!r} in {text!r}")


# ---------------------------------------------------------------------------
# shock models
# ---------------------------------------------------------------------------

_MODEL_PREFIXES = {
    "marshall-max": (sm.Combiner.MAX_MAX, "comonotonic"),
    "rmm-max": (sm.Combiner.MAX_MAX, "countermonotonic"),
    "smm-min": (sm.Combiner.MIN_MIN, "countermonotonic"),
    "maxmin-shared": (sm.Combiner.MAX_MIN, "shared"),
}

_COMBINER_NAMES = {c.value: c for c in sm.Combiner}


def parse_model(text: str) -> sm.ShockModel:
    text = text.strip()
    head, body = _split_head(text)
    if head not in _MODEL_PREFIXES:
        raise DescriptorError(f"unknown model kind {head!r} in {text!r}")
    combiner, coupling_kind = _MODEL_PREFIXES[head]
    names = {"fx", "fy", "combiner"} | ({"g"} if coupling_kind == "shared" else {"g1", "g2"})
    fields = _parse_fields(body, names, text)
    fx_text, fy_text = _require(fields, ("fx", "fy"), text)
    f_x = parse_distribution(fx_text)
    f_y = parse_distribution(fy_text)
    if coupling_kind == "shared":
        (g_text,) = _require(fields, ("g",), text)
        coupling: sm.Coupling = sm.SharedShock(parse_distribution(g_text))
    else:
        g1_text, g2_text = _require(fields, ("g1", "g2"), text)
        shocks = (parse_distribution(g1_text), parse_distribution(g2_text))
        coupling = (
            sm.Comonotonic(*shocks) if coupling_kind == "comonotonic" else sm.Countermonotonic(*shocks)
        )
    if "combiner" in fields:
        override = fields["combiner"].strip().lower()
        if override not in _COMBINER_NAMES:
            raise DescriptorError(f"{text}: unknown combiner {override!r}")
        combiner = _COMBINER_NAMES[override]
    return sm.ShockModel(f_x, f_y, coupling, combiner)
