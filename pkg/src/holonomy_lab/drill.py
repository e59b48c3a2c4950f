"""Pointwise bounds for quadratic differentials on surfaces and the drilling chain.

Surfaces enter only through a ``SurfaceSummary``: the total L^2 norm and,
for each short geodesic, its length, the L^2 norm on its standard collar,
the sup norm on the half-collar and the smallest injectivity radius there.
Cited external results (the Bers inequality and the L^2 drilling estimate)
appear as explicit assumption steps of the report.
"""

import json
import math
from dataclasses import asdict, dataclass, field

from .errors import DomainError

EPS2 = math.asinh(1.0)
EPS2BAR = math.asinh(1 / math.sqrt(3))
TEO_CLAIMED = 1.1  # the value the curve-selection argument assumes for C(eps2bar)
BOOTSTRAP_LEVEL = 1 / 36
COMPLEMENT_LEVEL = 1 / 64
REL_SLACK = 1e-12


def teo_C(x):
    """C(x) = (4 pi / 3) (1 - sech^6(x / 2))^{-1/2}."""
    x = float(x)
    if not x > 0:
        raise DomainError("C(x) needs x > 0")
    # 1 - sech^6 = t^2 (3 - 3 t^2 + t^4) with t = tanh(x / 2), free of cancellation
    t2 = math.tanh(x / 2) ** 2
    return 4 * math.pi / 3 / math.sqrt(t2 * (3 - 3 * t2 + t2 * t2))


def thick_bound(total_l2, x):
    """Pointwise bound C(x) ||Phi||_2 on the x-thick part."""
    return teo_C(x) * total_l2


def thin_bound(collar_l2, inj):
    """Pointwise bound ||Phi|_U||_2 / sqrt(inj) on a half-collar."""
    if not inj > 0:
        raise DomainError("injectivity radius must be positive")
    return collar_l2 / math.sqrt(inj)


def tail_bound(phi0_sup, collar_l2):
    """Pointwise bound ||Phi_0||_inf + 2 C(eps2bar) ||Phi|_U||_2 on a half-collar."""
    if phi0_sup < 0 or collar_l2 < 0:
        raise DomainError("norms must be nonnegative")
    return phi0_sup + 2 * teo_C(EPS2BAR) * collar_l2


# data -------------------------------------------------------------------


_GEODESIC_KEYS = ("name", "length", "collar_l2", "halfcollar_sup", "min_inj")


@dataclass(frozen=True)
class Geodesic:
    name: str
    length: float
    collar_l2: float
    halfcollar_sup: float
    min_inj: float


@dataclass(frozen=True)
class SurfaceSummary:
    """Thin-part data of a hyperbolic surface together with ||Phi||_2."""

    total_l2: float
    geodesics: tuple = ()

    def __post_init__(self):
        if self.total_l2 < 0:
            raise DomainError("total_l2 must be nonnegative")
        for g in self.geodesics:
            if not g.length > 0:
                raise DomainError(f"geodesic {g.name!r} has nonpositive length")

    def with_total(self, total_l2):
        return SurfaceSummary(total_l2, self.geodesics)

    def to_dict(self):
        return {"total_l2": self.total_l2, "geodesics": [asdict(g) for g in self.geodesics]}

    @classmethod
    def from_dict(cls, data):
        extra = set(data) - {"total_l2", "geodesics"}
        if extra:
            raise DomainError(f"unknown summary keys {sorted(extra)}")
        geos = []
        for rec in data.get("geodesics", []):
            if set(rec) != set(_GEODESIC_KEYS):
                raise DomainError(f"geodesic record needs exactly the keys {_GEODESIC_KEYS}")
            geos.append(Geodesic(str(rec["name"]), *(float(rec[k]) for k in _GEODESIC_KEYS[1:])))
        return cls(float(data["total_l2"]), tuple(geos))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def audit_summary(summary):
    """Structural invariants of a summary, as a list of (name, message) failures."""
    failures = []
    total = summary.total_l2
    if sum(g.collar_l2**2 for g in summary.geodesics) > total**2 * (1 + REL_SLACK):
        failures.append(("collar_sum", "sum of squared collar norms exceeds the total"))
    for g in summary.geodesics:
        if g.collar_l2 > total * (1 + REL_SLACK):
            failures.append((g.name, "collar norm exceeds the total"))
        if g.min_inj < g.length / 2 * (1 - REL_SLACK):
            failures.append((g.name, "injectivity radius below half the length"))
        if g.min_inj > 0 and g.halfcollar_sup > thin_bound(g.collar_l2, g.min_inj) * (1 + REL_SLACK):
            failures.append((g.name, "half-collar sup exceeds the thin-part bound"))
    return failures


def choose_curves(summary):
    """Select short geodesics whose half-collar sup reaches sqrt(||Phi||_2)."""
    total = summary.total_l2
    threshold = math.sqrt(total)
    selected, skipped_thin = [], []
    for g in summary.geodesics:
        if g.length <= 2 * EPS2BAR:
            (selected if g.halfcollar_sup >= threshold else skipped_thin).append(g)
    failures = audit_summary(summary)
    for g in selected:
        if thin_bound(g.collar_l2, g.length / 2) < threshold:
            failures.append((g.name, "selected curve cannot reach the threshold at inj = length / 2"))
    length = sum(g.length for g in selected)
    c_bar = teo_C(EPS2BAR)
    return {
        "selected": [g.name for g in selected],
        "selected_length": length,
        "length_budget": 2 * total,
        "length_holds": bool(length <= 2 * total * (1 + REL_SLACK)),
        "complement_bound": threshold,
        "thick_case": {
            "C_eps2bar": c_bar,
            "C_eps2bar_claimed": TEO_CLAIMED,
            "bound": c_bar * total,
            "holds": bool(c_bar * total <= threshold),
            "holds_with_claimed": bool(TEO_CLAIMED * total <= threshold),
        },
        "thin_case": {
            "unselected": [g.name for g in skipped_thin],
            "max_sup": max((g.halfcollar_sup for g in skipped_thin), default=0.0),
            "holds": all(g.halfcollar_sup < threshold for g in skipped_thin),
        },
        "consistent": not failures,
        "audit_failures": [{"name": n, "message": m} for n, m in failures],
        "hypothesis_violated": not total < 0.5,
    }


# constants and the chain ------------------------------------------------


@dataclass(frozen=True)
class DrillConstants:
    L0: float
    c_drill: float
    eps2: float
    eps2bar: float
    C_eps2bar: float
    D0: float
    D1: float
    D: float
    C0: float
    C1: float

    def to_dict(self):
        return asdict(self)


def drill_constants(L0, c_drill):
    if not (L0 > 0 and c_drill > 0):
        raise DomainError("L0 and c_drill must be positive")
    c_bar = teo_C(EPS2BAR)
    D0 = 4 * c_drill * c_bar
    D1 = 16 * math.exp(4 * math.pi * L0)
    D = 2 * D0 + 2 * D1
    C0 = min(COMPLEMENT_LEVEL**2, 1 / (128 * math.pi * D) ** 2, L0 / 4)
    return DrillConstants(L0, c_drill, EPS2, EPS2BAR, c_bar, D0, D1, D, C0, 2 * math.pi * D + 1)


@dataclass
class BoundStep:
    name: str
    kind: str  # hypothesis | derived | assumption | audit
    lhs: float
    rhs: float
    holds: bool
    slack: float
    conditional: bool = False
    note: str = ""


@dataclass
class BoundReport:
    steps: list
    constants: dict
    selection: dict
    info: dict = field(default_factory=dict)

    @property
    def holds(self):
        """All non-audit steps hold."""
        return all(s.holds for s in self.steps if s.kind != "audit")

    def step(self, name):
        return next(s for s in self.steps if s.name == name)

    def to_dict(self):
        return {
            "holds": self.holds,
            "steps": [asdict(s) for s in self.steps],
            "constants": self.constants,
            "selection": self.selection,
            "info": self.info,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _step(name, kind, lhs, rhs, note="", conditional=False):
    holds = lhs <= rhs + REL_SLACK * max(abs(rhs), abs(lhs))
    return BoundStep(name, kind, float(lhs), float(rhs), bool(holds), float(rhs - lhs), conditional, note)


def chain_report(summary, constants):
    """Evaluate the drilling inequality chain for a summary.

    Steps after a failing hypothesis are marked conditional.  The audit step
    ``bootstrap_gap`` checks the lower bound used in the continuity
    argument: at the first time where ||Phi_t|| reaches 1/36 the distance
    from Phi_Y is only known to be at least 1/36 - 1/64.
    """
    total = summary.total_l2
    root = math.sqrt(total)
    k = constants
    steps = [_step("hypothesis", "hypothesis", total, k.C0, "||Phi_Y||_2 <= C0")]
    steps.append(_step("complement_bound", "derived", root, COMPLEMENT_LEVEL,
                       "sqrt(||Phi_Y||_2) <= 1/64 off the selected half-collars"))
    steps.append(_step("drilling_length", "derived", 4 * total, k.L0,
                       "Bers: L_C(M) <= 2 l_C(Y) <= 4 ||Phi_Y||_2 <= L0"))
    steps.append(_step("bers", "assumption", 2 * 2 * total, 4 * total,
                       "L_C(M) <= 2 l_C(Y) with l_C(Y) <= 2 ||Phi_Y||_2"))
    steps.append(_step("drilling_l2", "assumption", k.c_drill * math.sqrt(4 * total), 2 * k.c_drill * root,
                       "||phi_t||_2 <= c_drill sqrt(L_C(M))"))
    steps.append(_step("main_factor", "derived", 9 * BOOTSTRAP_LEVEL / 0.5, 0.5,
                       "9 K / r with K = 1/36, r = 1/2"))
    steps.append(_step("bootstrap_threshold", "derived", 2 * math.pi * k.D * root, COMPLEMENT_LEVEL,
                       "2 pi D sqrt(||Phi_Y||_2) <= 1/64"))
    steps.append(_step("bootstrap_gap", "audit", COMPLEMENT_LEVEL, BOOTSTRAP_LEVEL - COMPLEMENT_LEVEL,
                       "claimed lower bound 1/64 vs available 1/36 - 1/64"))
    steps.append(_step("bootstrap_contradiction", "audit", 2 * math.pi * k.D * root,
                       BOOTSTRAP_LEVEL - COMPLEMENT_LEVEL,
                       "increment bound must fall below 1/36 - 1/64"))
    increment = 2 * math.pi * k.D * root
    steps.append(_step("integration", "derived", increment, 2 * math.pi * k.D * root,
                       "||Phi_hat - Phi_Y|| <= 2 pi D sqrt(||Phi_Y||_2)"))
    steps.append(_step("final", "derived", root + increment, k.C1 * root,
                       "||Phi_hat(z)|| <= C1 sqrt(||Phi_Y||_2)"))
    failed = False
    for s in steps:
        if failed and s.kind != "audit":
            s.conditional = True
        if not s.holds and s.kind == "hypothesis":
            failed = True
    gap = BOOTSTRAP_LEVEL - COMPLEMENT_LEVEL
    info = {
        "phi_hat_increment_bound": increment,
        "C_eps2bar": k.C_eps2bar,
        "C_eps2bar_claimed": TEO_CLAIMED,
        "C0_for_corrected_bootstrap": min(COMPLEMENT_LEVEL**2, (gap / (2 * math.pi * k.D)) ** 2, k.L0 / 4),
    }
    return BoundReport(steps, k.to_dict(), choose_curves(summary), info)
