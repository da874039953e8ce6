import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List

from utils import scalars
from utils.errors import SpecParseError
from utils.scalars import CONSTANT_KINDS, BasisConstant, RealScalar

logger = logging.getLogger(__name__)

CHECKS = ("theorem1", "proposition", "transference", "theorem2")


@dataclass(frozen=True)
class VectorSpec:
    name: str
    constants: tuple[BasisConstant, ...]
    entries: tuple[tuple[Fraction, ...], ...]
    independence: str = ""

    @property
    def n(self) -> int:
        return len(self.entries)

    def vector(self) -> list[RealScalar]:
        return [
            scalars.combination(dict(zip(self.constants, coefficients)))
            for coefficients in self.entries
        ]

    def to_json(self) -> Dict:
        return {
            "name": self.name,
            "constants": [_constant_json(c) for c in self.constants],
            "entries": [[str(q) for q in row] for row in self.entries],
            "independence": self.independence,
        }


@dataclass(frozen=True)
class SweepSpec:
    name: str
    vectors: tuple[VectorSpec, ...]
    deltas: tuple[str, ...]
    Qs: tuple[str, ...]
    checks: tuple[str, ...]
    rotations: tuple[str, ...] = ()
    circle_deltas: tuple[str, ...] = ()
    tol: Fraction | None = None
    epsilon: Fraction | None = None
    transference: Dict = field(default_factory=dict)


def _constant_json(c: BasisConstant) -> Dict:
    out: Dict = {"symbol": c.symbol, "kind": c.kind}
    if c.kind == "sqrt":
        out["radicand"] = c.radicand
    if c.kind == "root":
        out["polynomial"] = list(c.polynomial)
        out["interval"] = [str(x) for x in c.interval]
    return out


def _fraction(value, where: str) -> Fraction:
    try:
        return scalars.to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SpecParseError(f"{where}: {value!r} is not a rational number") from exc


def parse_constant(raw: Dict, where: str) -> BasisConstant:
    """Build a BasisConstant from its JSON declaration.

    Expected shapes:
      {"symbol": "1", "kind": "one"}
      {"symbol": "sqrt2", "kind": "sqrt", "radicand": 2}
      {"symbol": "cbrt2", "kind": "root", "polynomial": [-2, 0, 0, 1], "interval": ["5/4", "13/10"]}
    Polynomial coefficients are listed lowest degree first.
    """
    if not isinstance(raw, dict):
        raise SpecParseError(f"{where}: constant declarations must be objects")
    symbol = raw.get("symbol")
    kind = raw.get("kind")
    if not isinstance(symbol, str) or not symbol:
        raise SpecParseError(f"{where}: missing symbol")
    if kind not in CONSTANT_KINDS:
        raise SpecParseError(f"{where}: kind must be one of {CONSTANT_KINDS}, got {kind!r}")
    try:
        if kind == "one":
            if symbol != "1":
                raise SpecParseError(f"{where}: the rational unit must use the symbol '1'")
            return scalars.ONE
        if kind == "sqrt":
            return scalars.sqrt_constant(int(raw.get("radicand")), symbol)
        polynomial = raw.get("polynomial")
        interval = raw.get("interval")
        if not isinstance(polynomial, list) or not isinstance(interval, list) or len(interval) != 2:
            raise SpecParseError(f"{where}: root constants need a polynomial list and a 2-element interval")
        return scalars.algebraic_root(
            symbol,
            [int(c) for c in polynomial],
            (_fraction(interval[0], where), _fraction(interval[1], where)),
        )
    except SpecParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecParseError(f"{where}: {exc}") from exc


def parse_vector_spec(raw: Dict, where: str = "vector spec") -> VectorSpec:
    """Validate a vector-spec document.

    Expected input shape:
    {
      "name": str,
      "constants": [constant, ...],          # must declare {"symbol": "1", "kind": "one"}
      "entries": [[coefficient, ...], ...],  # one list per component, aligned with constants
      "independence": str                    # acknowledgement that the constants are Q-independent
    }
    """
    if not isinstance(raw, dict):
        raise SpecParseError(f"{where}: expected a JSON object")
    name = raw.get("name") or "unnamed"
    constants_raw = raw.get("constants")
    entries_raw = raw.get("entries")
    if not isinstance(constants_raw, list) or not constants_raw:
        raise SpecParseError(f"{where}: 'constants' must be a nonempty list")
    if not isinstance(entries_raw, list) or not entries_raw:
        raise SpecParseError(f"{where}: 'entries' must be a nonempty list (n >= 1)")

    constants = tuple(
        parse_constant(c, f"{where}: constant {i}") for i, c in enumerate(constants_raw)
    )
    symbols = [c.symbol for c in constants]
    if len(set(symbols)) != len(symbols):
        raise SpecParseError(f"{where}: duplicate constant symbols {symbols}")
    if scalars.ONE not in constants:
        raise SpecParseError(f"{where}: the constant {{'symbol': '1', 'kind': 'one'}} must be declared")

    entries: List[tuple[Fraction, ...]] = []
    for i, row in enumerate(entries_raw):
        if not isinstance(row, list) or len(row) != len(constants):
            raise SpecParseError(
                f"{where}: entry {i} must list {len(constants)} coefficients, one per constant"
            )
        entries.append(tuple(_fraction(x, f"{where}: entry {i}") for x in row))

    independence = raw.get("independence") or ""
    if not isinstance(independence, str):
        raise SpecParseError(f"{where}: 'independence' must be a string")
    return VectorSpec(str(name), constants, tuple(entries), independence)


def load_json(path: str) -> Dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise SpecParseError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def load_vector_spec(path: str) -> VectorSpec:
    return parse_vector_spec(load_json(path), path)


# --- built-ins --------------------------------------------------------------

SQRT2 = scalars.sqrt_constant(2)
SQRT3 = scalars.sqrt_constant(3)
SQRT5 = scalars.sqrt_constant(5)
CBRT2 = scalars.algebraic_root("cbrt2", (-2, 0, 0, 1), (Fraction(5, 4), Fraction(13, 10)))
CBRT4 = scalars.algebraic_root("cbrt4", (-4, 0, 0, 1), (Fraction(3, 2), Fraction(8, 5)))

_TRUSTED = "standard: distinct square roots of square-free integers and the cube-root basis are Q-independent"


def _builtin(name: str, constants, entries) -> VectorSpec:
    return VectorSpec(
        name,
        tuple(constants),
        tuple(tuple(Fraction(x) for x in row) for row in entries),
        _TRUSTED,
    )


BUILTIN_VECTORS: Dict[str, VectorSpec] = {
    spec.name: spec
    for spec in (
        _builtin("sqrt2", (scalars.ONE, SQRT2), [(1, 0), (0, 1)]),
        _builtin("golden", (scalars.ONE, SQRT5), [(1, 0), (Fraction(-1, 2), Fraction(1, 2))]),
        _builtin("sqrt2-sqrt3", (scalars.ONE, SQRT2, SQRT3), [(1, 0, 0), (0, 1, 0), (0, 0, 1)]),
        _builtin("cbrt2", (scalars.ONE, CBRT2, CBRT4), [(1, 0, 0), (0, 1, 0), (0, 0, 1)]),
        _builtin("resonant", (scalars.ONE, SQRT2), [(1, 0), (0, 1), (1, 1)]),
        _builtin("half", (scalars.ONE,), [(1,), (Fraction(1, 2),)]),
    )
}

BUILTIN_ROTATIONS: Dict[str, RealScalar] = {
    "sqrt2-1": scalars.scalar(SQRT2) - 1,
    "sqrt3-1": scalars.scalar(SQRT3) - 1,
    "golden": scalars.combination({SQRT5: Fraction(1, 2), scalars.ONE: Fraction(-1, 2)}),
    "cbrt2-1": scalars.scalar(CBRT2) - 1,
}


def resolve_vector(ref, base_dir: str | None = None) -> VectorSpec:
    """A built-in name, a path to a vector-spec file, or an inline spec object."""
    if isinstance(ref, dict):
        return parse_vector_spec(ref)
    if not isinstance(ref, str) or not ref:
        raise SpecParseError(f"cannot resolve vector reference {ref!r}")
    if ref in BUILTIN_VECTORS:
        return BUILTIN_VECTORS[ref]
    path = ref if base_dir is None or os.path.isabs(ref) else os.path.join(base_dir, ref)
    if os.path.exists(path):
        return load_vector_spec(path)
    raise SpecParseError(
        f"unknown vector {ref!r}; built-ins are {sorted(BUILTIN_VECTORS)}"
    )


def resolve_rotation(ref: str) -> tuple[str, RealScalar]:
    """A built-in rotation name or a rational "p/q"."""
    if ref in BUILTIN_ROTATIONS:
        return ref, BUILTIN_ROTATIONS[ref]
    try:
        return ref, scalars.rational(_fraction(ref, "rotation"))
    except SpecParseError as exc:
        raise SpecParseError(
            f"unknown rotation {ref!r}; use p/q or one of {sorted(BUILTIN_ROTATIONS)}"
        ) from exc


def parse_sweep_spec(raw: Dict, base_dir: str | None = None, where: str = "sweep spec") -> SweepSpec:
    """Validate a sweep document.

    Expected input shape:
    {
      "name": str,
      "vectors": [name | path | inline vector spec, ...],
      "deltas": ["max", "max/2", "1/4", ...],   # absolute or relative to each vector's δ_max
      "Qs": ["min", "2*min", "16", ...],        # absolute or relative to (n+2)Q_α
      "checks": ["theorem1", "proposition", "transference", "theorem2"],
      "rotations": ["golden", "sqrt2-1", "1/3", ...],
      "circle_deltas": ["1/2", "1/4", ...],
      "tol": rational, "epsilon": rational,
      "transference": {"random_lattices": int, "max_rank": int, "max_entry": int, "seed": int}
    }
    """
    if not isinstance(raw, dict):
        raise SpecParseError(f"{where}: expected a JSON object")
    checks = raw.get("checks") or list(CHECKS)
    if not isinstance(checks, list) or any(c not in CHECKS for c in checks):
        raise SpecParseError(f"{where}: checks must be drawn from {CHECKS}")
    vectors = tuple(resolve_vector(ref, base_dir) for ref in raw.get("vectors") or [])

    def grid(key: str, required: bool) -> tuple[str, ...]:
        values = raw.get(key) or []
        if not isinstance(values, list):
            raise SpecParseError(f"{where}: '{key}' must be a list")
        if required and not values:
            raise SpecParseError(f"{where}: '{key}' must be nonempty for the selected checks")
        for value in values:
            parse_grid_value(str(value), Fraction(1), f"{where}: {key}")
        return tuple(str(v) for v in values)

    deltas = grid("deltas", "theorem1" in checks)
    Qs = grid("Qs", "proposition" in checks)
    rotations = tuple(str(r) for r in raw.get("rotations") or [])
    for ref in rotations:
        resolve_rotation(ref)
    circle_deltas = grid("circle_deltas", "theorem2" in checks and bool(rotations))

    transference = raw.get("transference") or {}
    if not isinstance(transference, dict):
        raise SpecParseError(f"{where}: 'transference' must be an object")
    tol = raw.get("tol")
    epsilon = raw.get("epsilon")
    return SweepSpec(
        name=str(raw.get("name") or "sweep"),
        vectors=vectors,
        deltas=deltas,
        Qs=Qs,
        checks=tuple(checks),
        rotations=rotations,
        circle_deltas=circle_deltas,
        tol=None if tol is None else _fraction(tol, f"{where}: tol"),
        epsilon=None if epsilon is None else _fraction(epsilon, f"{where}: epsilon"),
        transference=transference,
    )


def load_sweep_spec(path: str) -> SweepSpec:
    return parse_sweep_spec(load_json(path), os.path.dirname(os.path.abspath(path)), path)


def parse_grid_value(text: str, reference: Fraction, where: str = "grid") -> Fraction:
    """"max"/"min", "max/4", "2*min" are relative to reference; anything else is absolute."""
    text = text.strip()
    for word in ("max", "min"):
        if word in text:
            factor = Fraction(1)
            rest = text.replace(word, "", 1).strip()
            if rest.startswith("/"):
                divisor = _fraction(rest[1:], where)
                if divisor <= 0:
                    raise SpecParseError(f"{where}: cannot read grid value {text!r}")
                factor = 1 / divisor
            elif rest.endswith("*"):
                factor = _fraction(rest[:-1], where)
            elif rest:
                raise SpecParseError(f"{where}: cannot read grid value {text!r}")
            value = reference * factor
            break
    else:
        value = _fraction(text, where)
    if value <= 0:
        raise SpecParseError(f"{where}: grid values must be positive, got {text!r}")
    return value
