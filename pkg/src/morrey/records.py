"""Witness and Verdict records emitted by every checker."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from .numeric import dump_number, load_number

if TYPE_CHECKING:
    from .density import GradientPoint

VIOLATED = "violated"
NO_VIOLATION = "no_violation_within_budget"
INCONCLUSIVE = "inconclusive"
STATUSES = (VIOLATED, NO_VIOLATION, INCONCLUSIVE)

WEAK_VIOLATION = "weak_violation"
STRONG_FALSIFICATION = "strong_falsification"
NONCONVEX_SUBLEVEL = "nonconvex_sublevel"
WITNESS_KINDS = (WEAK_VIOLATION, STRONG_FALSIFICATION, NONCONVEX_SUBLEVEL)

NORM_CONVENTIONS = (
    "gradient norm: max absolute entry over simplices; "
    "boundary norm: Euclidean norm of nodal values on boundary nodes"
)


def _num(x: Any) -> Any:
    return None if x is None else dump_number(x)


def _unnum(x: Any) -> Any:
    return None if x is None else load_number(x)


@dataclass
class Witness:
    kind: str
    density_id: str
    A: "GradientPoint"
    f_at_A: Any
    ess_sup: Any = None
    construction: dict | None = None
    boundary_sup: Any = None
    boundary_sup_sq: Any = None
    grad_norm: Any = None
    argmax_simplex: int | None = None
    epsilon_def: Any = None
    K: Any = None
    delta: Any = None
    pair: tuple | None = None
    level: Any = None
    rng_seed: int | None = None
    arithmetic_mode: str = "rational"
    norm_conventions: str = NORM_CONVENTIONS

    def __post_init__(self) -> None:
        if self.kind not in WITNESS_KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "kind": self.kind,
            "density_id": self.density_id,
            "A": self.A.to_dict(),
            "f_at_A": _num(self.f_at_A),
            "arithmetic_mode": self.arithmetic_mode,
            "rng_seed": self.rng_seed,
        }
        if self.kind == NONCONVEX_SUBLEVEL:
            out["pair"] = [[dump_number(v) for v in p] for p in self.pair]
            out["level"] = _num(self.level)
            return out
        out.update(
            {
                "ess_sup": _num(self.ess_sup),
                "construction": self.construction,
                "boundary_sup": _num(self.boundary_sup),
                "boundary_sup_sq": _num(self.boundary_sup_sq),
                "grad_norm": _num(self.grad_norm),
                "argmax_simplex": self.argmax_simplex,
                "norm_conventions": self.norm_conventions,
            }
        )
        if self.kind == STRONG_FALSIFICATION:
            out["epsilon_def"] = _num(self.epsilon_def)
            out["K"] = _num(self.K)
            out["delta"] = _num(self.delta)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Witness":
        from .density import GradientPoint

        pair = data.get("pair")
        return cls(
            kind=data["kind"],
            density_id=data["density_id"],
            A=GradientPoint.from_dict(data["A"]),
            f_at_A=_unnum(data["f_at_A"]),
            ess_sup=_unnum(data.get("ess_sup")),
            construction=data.get("construction"),
            boundary_sup=_unnum(data.get("boundary_sup")),
            boundary_sup_sq=_unnum(data.get("boundary_sup_sq")),
            grad_norm=_unnum(data.get("grad_norm")),
            argmax_simplex=data.get("argmax_simplex"),
            epsilon_def=_unnum(data.get("epsilon_def")),
            K=_unnum(data.get("K")),
            delta=_unnum(data.get("delta")),
            pair=None if pair is None else tuple(tuple(load_number(v) for v in p) for p in pair),
            level=_unnum(data.get("level")),
            rng_seed=data.get("rng_seed"),
            arithmetic_mode=data.get("arithmetic_mode", "rational"),
            norm_conventions=data.get("norm_conventions", NORM_CONVENTIONS),
        )


@dataclass
class Verdict:
    status: str
    budget_spent: int
    budget: str
    witness: Witness | None = None
    witnesses: list[Witness] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"unknown verdict status {self.status!r}")
        if (self.witness is not None) != (self.status == VIOLATED):
            raise ValueError("witness must be present iff status is 'violated'")

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED

    def summary(self) -> str:
        if self.status == VIOLATED:
            return f"violated ({self.witness.kind}) after {self.budget_spent} evaluations"
        if self.status == NO_VIOLATION:
            return f"no violation found within budget: {self.budget}"
        return f"inconclusive: {self.budget}"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "budget_spent": self.budget_spent,
            "budget": self.budget,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "witnesses": [w.to_dict() for w in self.witnesses],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Verdict":
        w = data.get("witness")
        return cls(
            status=data["status"],
            budget_spent=data["budget_spent"],
            budget=data["budget"],
            witness=None if w is None else Witness.from_dict(w),
            witnesses=[Witness.from_dict(x) for x in data.get("witnesses", [])],
            notes=list(data.get("notes", [])),
        )
