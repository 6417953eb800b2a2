"""Named data presets and the JSON problem description.

A preset is a vector-valued function on the sphere (boundary data) or on
the closed ball (the source term). Every preset knows its exact sup norm,
so the inequality checks never have to estimate it from samples.
"""

import json
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .errors import DomainError, SchemaError
from .geometry import operator_norm
from .quadrature import Budget
from .radial_oracle import RadialPoly

EQUATOR_TOL = 1e-12
PRESETS = ("zero", "const", "radial_poly", "coordinate", "hemisphere_sign")

_PRESET_SCHEMA = {
    "type": "object",
    "required": ["preset"],
    "additionalProperties": False,
    "properties": {
        "preset": {"enum": list(PRESETS)},
        "value": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "coeffs": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "index": {"type": "integer", "minimum": 0},
        "matrix": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        },
        "axis": {"type": "array", "items": {"type": "number"}, "minItems": 1},
    },
}

SPEC_SCHEMA = {
    "type": "object",
    "required": ["n", "m", "phi"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 3},
        "m": {"type": "integer", "minimum": 2},
        "target_dim": {"type": "integer", "minimum": 1},
        "phi": {"type": "array", "items": _PRESET_SCHEMA},
        "budget": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                k: {"type": "integer", "minimum": 1}
                for k in ("sphere_level", "radial", "grid_radial", "grid_level")
            },
        },
    },
}


@dataclass(frozen=True)
class Preset:
    """A named data function ``R^n -> R^(n1)``.

    ``params`` is the JSON object without the ``"preset"`` key; ``n1`` is
    the target dimension the preset is evaluated in.
    """

    name: str
    n: int
    n1: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in PRESETS:
            raise SchemaError(f"unknown preset {self.name!r}")
        allowed = {
            "zero": set(),
            "const": {"value"},
            "radial_poly": {"coeffs", "value"},
            "coordinate": {"index", "value", "matrix"},
            "hemisphere_sign": {"axis", "value"},
        }[self.name]
        extra = set(self.params) - allowed
        if extra:
            raise SchemaError(f"preset {self.name!r} does not take {sorted(extra)}")
        if self.name == "const" and "value" not in self.params:
            raise SchemaError("const preset needs a value")
        if self.name == "radial_poly" and "coeffs" not in self.params:
            raise SchemaError("radial_poly preset needs coeffs")
        if self.name == "coordinate":
            if "matrix" in self.params and ("index" in self.params or "value" in self.params):
                raise SchemaError("coordinate takes either a matrix or an index (and value)")
            if "matrix" not in self.params and "index" not in self.params:
                raise SchemaError("coordinate preset needs an index or a matrix")
            if "index" in self.params and not 0 <= self.params["index"] < self.n:
                raise SchemaError(f"coordinate index must lie in 0..{self.n - 1}")
            if "matrix" in self.params and self._matrix().shape != (self.n1, self.n):
                raise SchemaError(f"coordinate matrix must be {self.n1} x {self.n}")
        if "value" in self.params and len(self.params["value"]) != self.n1:
            raise SchemaError(f"value must have length target_dim = {self.n1}")
        if "axis" in self.params:
            a = np.asarray(self.params["axis"], dtype=float)
            if a.shape != (self.n,) or not np.linalg.norm(a) > 0:
                raise SchemaError(f"axis must be a nonzero vector of length {self.n}")

    def to_json(self):
        return {"preset": self.name, **self.params}

    def _vector(self):
        if "value" in self.params:
            return np.asarray(self.params["value"], dtype=float)
        v = np.zeros(self.n1)
        v[0] = 1.0
        return v

    def _matrix(self):
        return np.atleast_2d(np.asarray(self.params["matrix"], dtype=float))

    def _axis(self):
        if "axis" in self.params:
            a = np.asarray(self.params["axis"], dtype=float)
            return a / np.linalg.norm(a)
        a = np.zeros(self.n)
        a[-1] = 1.0
        return a

    def _poly(self):
        return RadialPoly(self.n, tuple(self.params["coeffs"]))

    @property
    def is_zero(self):
        return self.sup_norm("ball") == 0.0

    def __call__(self, y):
        """Values at points ``y`` of shape ``(N, n)``; returns ``(N, n1)``."""
        y = np.asarray(y, dtype=float)
        N = y.shape[0]
        if self.name == "zero":
            return np.zeros((N, self.n1))
        if self.name == "const":
            return np.broadcast_to(self._vector(), (N, self.n1)).copy()
        if self.name == "radial_poly":
            return self._poly().at_points(y)[:, None] * self._vector()[None, :]
        if self.name == "coordinate":
            if "matrix" in self.params:
                return y @ self._matrix().T
            return y[:, self.params["index"], None] * self._vector()[None, :]
        # the equator (up to rounding, e.g. sin(pi) != 0) has value 0
        h = y @ self._axis()
        s = np.where(np.abs(h) <= EQUATOR_TOL, 0.0, np.sign(h))
        return s[:, None] * self._vector()[None, :]

    def sup_norm(self, on="sphere"):
        """Exact ``sup |phi|`` over the unit sphere or the closed ball."""
        if self.name == "zero":
            return 0.0
        v = float(np.linalg.norm(self._vector()))
        if self.name in ("const", "hemisphere_sign"):
            return v
        if self.name == "radial_poly":
            p = self._poly()
            return v * (abs(float(p(1.0))) if on == "sphere" else p.sup_abs())
        if "matrix" in self.params:
            return operator_norm(_square(self._matrix()))
        return v

    def lipschitz(self):
        """Lipschitz constant on the sphere, ``None`` if there is none."""
        if self.name in ("zero", "const", "radial_poly"):
            return 0.0
        if self.name == "coordinate":
            return self.sup_norm()
        return None

    def derivative(self, y):
        """Ambient derivative matrices ``(N, n1, n)`` of a smooth preset."""
        y = np.asarray(y, dtype=float)
        N = y.shape[0]
        if self.name in ("zero", "const"):
            return np.zeros((N, self.n1, self.n))
        if self.name == "coordinate":
            if "matrix" in self.params:
                return np.broadcast_to(self._matrix(), (N, self.n1, self.n)).copy()
            D = np.zeros((self.n1, self.n))
            D[:, self.params["index"]] = self._vector()
            return np.broadcast_to(D, (N, self.n1, self.n)).copy()
        if self.name == "radial_poly":
            p = self._poly()
            dp = RadialPoly(self.n, tuple(k * c for k, c in enumerate(p.coeffs))[1:] or (0,))
            g = 2.0 * dp.at_points(y)[:, None] * y
            return self._vector()[None, :, None] * g[:, None, :]
        raise DomainError("hemisphere_sign is not differentiable")


def _square(A):
    r, c = A.shape
    if r == c:
        return A
    k = max(r, c)
    out = np.zeros((k, k))
    out[:r, :c] = A
    return out


def _infer_target_dim(items, n):
    dims = set()
    for item in items:
        if "value" in item:
            dims.add(len(item["value"]))
        if "matrix" in item:
            dims.add(len(item["matrix"]))
    if len(dims) > 1:
        raise SchemaError(f"inconsistent target dimensions {sorted(dims)}")
    return dims.pop() if dims else 1


@dataclass(frozen=True)
class ProblemSpec:
    """Dirichlet chain data for ``Delta^m f = phi_m`` on the unit ball of R^n.

    ``phis[k]`` is the boundary value of ``Delta^k f`` for ``k < m`` and
    ``phis[m]`` is the source on the ball.
    """

    n: int
    m: int
    phis: tuple
    target_dim: int = 1
    budget: Budget = field(default_factory=Budget)

    def __post_init__(self):
        if self.n < 3:
            raise SchemaError("n must be at least 3")
        if self.m < 2:
            raise SchemaError("the order m must be at least 2")
        if len(self.phis) != self.m + 1:
            raise SchemaError(f"expected m + 1 = {self.m + 1} data entries, got {len(self.phis)}")
        for p in self.phis:
            if p.n != self.n or p.n1 != self.target_dim:
                raise SchemaError("preset dimensions do not match the problem")

    @classmethod
    def from_json(cls, doc):
        """Build from a JSON string or a decoded object; unknown keys are rejected."""
        if isinstance(doc, (str, bytes)):
            try:
                doc = json.loads(doc)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc}") from exc
        try:
            jsonschema.validate(doc, SPEC_SCHEMA)
        except jsonschema.ValidationError as exc:
            raise SchemaError(exc.message) from exc
        n, m = doc["n"], doc["m"]
        n1 = doc.get("target_dim") or _infer_target_dim(doc["phi"], n)
        phis = tuple(
            Preset(item["preset"], n, n1, {k: v for k, v in item.items() if k != "preset"})
            for item in doc["phi"]
        )
        try:
            budget = Budget(**doc.get("budget", {}))
        except DomainError as exc:
            raise SchemaError(str(exc)) from exc
        return cls(n=n, m=m, phis=phis, target_dim=n1, budget=budget)

    def to_json(self):
        b = self.budget
        budget = {"sphere_level": b.sphere_level, "radial": b.radial, "grid_radial": b.grid_radial}
        if b.grid_level is not None:
            budget["grid_level"] = b.grid_level
        return {
            "n": self.n,
            "m": self.m,
            "target_dim": self.target_dim,
            "phi": [p.to_json() for p in self.phis],
            "budget": budget,
        }

    def norms(self):
        """``[||phi_1||, ..., ||phi_m||]``: sphere sups, then the ball sup of the source."""
        out = [p.sup_norm("sphere") for p in self.phis[1 : self.m]]
        out.append(self.phis[self.m].sup_norm("ball"))
        return out


def oracle_spec(n, m, M=1, budget=None):
    """The ``M (1 - |x|^(2(m-1)))`` family as a ProblemSpec (scalar valued)."""
    from .radial_oracle import polyharmonic_oracle

    _, phis = polyharmonic_oracle(n, m, M)
    items = []
    for c in phis[:m]:
        items.append(Preset("zero", n, 1) if c == 0 else Preset("const", n, 1, {"value": [float(c)]}))
    src = phis[m]
    items.append(
        Preset("zero", n, 1)
        if src.is_zero()
        else Preset("radial_poly", n, 1, {"coeffs": [float(c) for c in src.coeffs]})
    )
    return ProblemSpec(n=n, m=m, phis=tuple(items), target_dim=1, budget=budget or Budget())
