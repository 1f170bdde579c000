"""Filtering, generalized measurements, twirling, BBPSSW recurrence and the
end-to-end distillation pipeline.
"""

from dataclasses import dataclass, field
import csv
import io
import json
from typing import NamedTuple

import numpy as np

from .errors import (
    FidelityTooLow,
    FilterTooLarge,
    NotDistillable,
    TargetUnreachable,
    ZeroWeight,
)
from .geometry import diagonalize_t
from .inseparability import Filter, derive_filter, ppt_test
from .qlinalg import SY, I2, dagger, kron, sqrt_psd
from .qstate import (
    MIN_WEIGHT,
    P0,
    SINGLET,
    DensityMatrix,
    _mat,
    local_unitary_for_maximizer,
    overlap,
    singlet_fraction,
    werner_state,
)

COMPLETENESS_TOL = 1e-10
RECURSION_MIN_WEIGHT = 1e-6


@dataclass(frozen=True)
class GeneralizedMeasurement:
    elements: tuple

    def __post_init__(self):
        els = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        if not els:
            raise ValueError("measurement needs at least one element")
        for e in els:
            if e.shape != (4, 4):
                raise ValueError(f"measurement elements must be 4x4, got {e.shape}")
            if np.linalg.norm(e) < MIN_WEIGHT:
                raise ValueError("measurement element is zero")
        total = sum(dagger(e) @ e for e in els)
        resid = float(np.max(np.abs(total - np.eye(4))))
        if resid > COMPLETENESS_TOL:
            raise ValueError(f"elements do not resolve the identity (residual {resid:.3e})")
        object.__setattr__(self, "elements", els)


@dataclass(frozen=True)
class BranchOutcome:
    index: int
    probability: float
    state: DensityMatrix


@dataclass(frozen=True)
class StageRecord:
    label: str
    fidelity_before: float
    fidelity_after: float
    pass_probability: float
    pairs_consumed_ratio: float

    @property
    def efficiency_factor(self):
        return self.pass_probability / self.pairs_consumed_ratio


@dataclass
class DistillationReport:
    stages: list = field(default_factory=list)
    cumulative_efficiency: float = 0.0
    geometry_trail: list = field(default_factory=list)
    reached_target: bool = False
    distillable: bool = True
    f_target: float = None
    final_state: DensityMatrix = None

    def to_dict(self):
        running = 1.0
        stages = []
        for st in self.stages:
            running *= st.efficiency_factor
            stages.append(
                {
                    "label": st.label,
                    "fidelity_before": st.fidelity_before,
                    "fidelity_after": st.fidelity_after,
                    "pass_probability": st.pass_probability,
                    "pairs_consumed_ratio": st.pairs_consumed_ratio,
                    "efficiency_factor": st.efficiency_factor,
                    "cumulative_efficiency": running,
                }
            )
        return {
            "distillable": self.distillable,
            "reached_target": self.reached_target,
            "f_target": self.f_target,
            "cumulative_efficiency": self.cumulative_efficiency,
            "stages": stages,
            "geometry_trail": [list(map(float, d)) for d in self.geometry_trail],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def stages_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stage", "fidelity", "pass_probability", "cumulative_efficiency"])
        for i, row in enumerate(self.to_dict()["stages"]):
            w.writerow([i, repr(row["fidelity_after"]), repr(row["pass_probability"]),
                        repr(row["cumulative_efficiency"])])
        return buf.getvalue()

    def trail_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t1", "t2", "t3"])
        for d in self.geometry_trail:
            w.writerow([repr(float(x)) for x in d])
        return buf.getvalue()


def filter_ensemble(rho, filt):
    """Post-selected state after ``filt`` and its pass probability."""
    op = filt.operator()
    out = op @ _mat(rho) @ dagger(op)
    p = float(np.trace(out).real)
    if p <= MIN_WEIGHT:
        raise ZeroWeight(f"filter annihilates the state (pass probability {p:.3e})")
    return DensityMatrix._trusted(out / p), p


def make_two_outcome(filt):
    """``{F, sqrt(I - F^+ F)}`` for the filter operator ``F``; zero elements are dropped."""
    if filt.norm > 1.0 + 1e-12:
        raise FilterTooLarge(f"filter norm {filt.norm:.6g} exceeds 1")
    f_op = filt.operator()
    rest = sqrt_psd(np.eye(4) - dagger(f_op) @ f_op)
    elements = [f_op]
    if np.linalg.norm(rest) > 1e-12:
        elements.append(rest)
    return GeneralizedMeasurement(tuple(elements))


def measure_branches(rho, m):
    out = []
    for i, v in enumerate(m.elements):
        unnorm = v @ _mat(rho) @ dagger(v)
        p = float(np.trace(unnorm).real)
        if p <= MIN_WEIGHT:
            continue
        out.append(BranchOutcome(i, p, DensityMatrix._trusted(unnorm / p)))
    return out


@dataclass(frozen=True)
class AcceptedBranch:
    round: int
    state: DensityMatrix
    weight: float


@dataclass(frozen=True)
class RecursiveFilterResult:
    accepted: list
    rounds: int
    stop_reason: str

    @property
    def total_weight(self):
        return float(sum(a.weight for a in self.accepted))


def recursive_filter(rho, max_rounds, side="B", normalize="schmidt"):
    """Repeat the two-outcome measurement on the rejected branch while it stays entangled.

    Each round derives a fresh filter from the current rejected-branch state.
    With ``normalize='spectral'`` the rejection element has rank one and the
    rejected branch is always a product state, so recursion only fires with
    the unscaled (``'schmidt'``) filters.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    accepted = []
    current = rho
    path = 1.0
    reason = "max_rounds"
    rounds = 0
    for k in range(1, max_rounds + 1):
        if not ppt_test(current).inseparable:
            reason = "separable"
            break
        filt, rotated, _ = derive_filter(current, side=side, normalize=normalize)
        branches = measure_branches(rotated, make_two_outcome(filt))
        rounds = k
        first = branches[0]
        if first.index != 0:
            reason = "filter annihilated"
            break
        accepted.append(AcceptedBranch(k, first.state, path * first.probability))
        if len(branches) < 2:
            reason = "no rejected branch"
            break
        path *= branches[1].probability
        current = branches[1].state
        if path < RECURSION_MIN_WEIGHT:
            reason = "weight"
            break
    return RecursiveFilterResult(accepted, rounds, reason)


def twirl_werner(rho):
    """Exact bilateral twirl: the Werner state with the same singlet overlap."""
    f = overlap(rho, SINGLET)
    return werner_state(min(1.0, max(0.0, f)))


class BbpsswResult(NamedTuple):
    state: DensityMatrix
    f_new: float
    p_success: float


_TO_PHI = kron(I2, SY)  # singlet <-> phi+ (up to phase)


def _cnot(control, target, n=4):
    dim = 2 ** n
    u = np.zeros((dim, dim))
    for x in range(dim):
        bits = [(x >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[control]:
            bits[target] ^= 1
        y = sum(b << (n - 1 - q) for q, b in enumerate(bits))
        u[y, x] = 1.0
    return u


# qubit order A1 B1 A2 B2; pair 1 is the source, pair 2 the target
_BXOR = _cnot(0, 2) @ _cnot(1, 3)
_KEEP = [np.kron(np.eye(4), np.kron(np.diag(e), np.diag(e))) for e in ([1.0, 0.0], [0.0, 1.0])]


def _align_to_singlet(rho):
    res = singlet_fraction(rho)
    u = local_unitary_for_maximizer(res.maximizer)
    u_s = local_unitary_for_maximizer(SINGLET)
    return DensityMatrix._trusted(kron(I2, u_s @ dagger(u)) @ _mat(rho) @ kron(I2, u @ dagger(u_s)))


def bbpssw_step(rho):
    """One recurrence round on two copies of ``rho``, computed on the 16-dim state.

    The pair is twirled to Werner form, mapped to the phi+ convention, hit by a
    bilateral CNOT, the target pair is measured in Z on both sides and kept
    only on agreeing outcomes. The surviving pair is mapped back and twirled.
    A state whose best maximally entangled overlap is not with the singlet is
    first rotated locally so that it is.
    """
    f0 = overlap(rho, SINGLET)
    if f0 <= 0.5:
        rho = _align_to_singlet(rho)
        f0 = overlap(rho, SINGLET)
    if f0 <= 0.5:
        raise FidelityTooLow(f"singlet fraction {f0:.12g} must exceed 1/2")
    w = twirl_werner(rho).mat
    w = _TO_PHI @ w @ dagger(_TO_PHI)
    two = _BXOR @ np.kron(w, w) @ _BXOR.T
    kept = sum(k @ two @ k for k in _KEEP)
    p_success = float(np.trace(kept).real)
    reduced = np.trace(kept.reshape(4, 4, 4, 4), axis1=1, axis2=3)
    reduced = _TO_PHI @ (reduced / p_success) @ dagger(_TO_PHI)
    out = twirl_werner(DensityMatrix._trusted(reduced))
    return BbpsswResult(out, float(np.real(np.trace(P0 @ out.mat))), p_success)


def _trail_point(rho):
    return np.array(diagonalize_t(rho).d, dtype=float)


def distill_pipeline(rho, f_target, max_steps=50, side="B", filt=None):
    """PPT check, filtering, then BBPSSW rounds until ``f_target`` is reached.

    ``filt`` overrides the derived filter (it is then applied to ``rho``
    directly, with no witness rotation). Each BBPSSW round contributes
    ``p_success / 2`` to the efficiency. Raises ``NotDistillable`` or
    ``TargetUnreachable`` with the partial report attached.
    """
    if not 0.5 < f_target < 1.0:
        raise ValueError(f"f_target must lie in (1/2, 1), got {f_target}")
    report = DistillationReport(f_target=f_target, geometry_trail=[_trail_point(rho)])
    verdict = ppt_test(rho)
    if not verdict.inseparable:
        report.distillable = False
        report.cumulative_efficiency = 0.0
        raise NotDistillable(
            f"state is separable (min PT eigenvalue {verdict.min_eigenvalue:.3e})", report
        )
    f_in = singlet_fraction(rho).f
    if filt is None:
        filt, state, _ = derive_filter(rho, side=side)
    else:
        state = rho
    if filt.is_identity:
        p = 1.0
        label = "filter (identity)"
    else:
        state, p = filter_ensemble(state, filt)
        label = f"filter {filt.side}"
    f = singlet_fraction(state).f
    report.stages.append(StageRecord(label, f_in, f, p, 1.0))
    report.geometry_trail.append(_trail_point(state))
    eff = report.stages[0].efficiency_factor
    report.cumulative_efficiency = eff
    step = 0
    while f < f_target:
        if step >= max_steps:
            report.final_state = state
            raise TargetUnreachable(
                f"f = {f:.6f} after {max_steps} BBPSSW steps, target {f_target}", report
            )
        res = bbpssw_step(state)
        step += 1
        st = StageRecord(f"bbpssw {step}", f, res.f_new, res.p_success, 2.0)
        report.stages.append(st)
        eff *= st.efficiency_factor
        report.cumulative_efficiency = eff
        state, f = res.state, res.f_new
        report.geometry_trail.append(_trail_point(state))
    report.reached_target = True
    report.final_state = state
    return report
