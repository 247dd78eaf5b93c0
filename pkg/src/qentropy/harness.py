"""Verification suites over seeded random instances.

Each suite draws its instances from per-case seeds derived deterministically
from ``(config.seed, case index)``, so any single case can be replayed in
isolation and a whole report is byte-identical across reruns, with or without
parallel execution (cases are pure functions of their seed and are assembled
in index order regardless of scheduling).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import entropy as ent
from . import pce, roof
from .channels import (
    KrausChannel,
    apply,
    family_example1,
    family_from_channel,
    family_geometric,
    family_identity,
    make_identity,
    make_pinching,
    random_channel,
    tensor_channels,
)
from .linalg import (
    partial_trace,
    projector,
    purify,
    random_density,
    random_pure,
    trace_norm,
)

SUITE_NAMES = (
    "inequalities",
    "continuity",
    "monotonicity",
    "complementary",
    "criteria",
    "roof",
    "eof",
    "appendix",
)

DEFAULT_SCHEDULE = (64, 256, 1024)


@dataclass
class SuiteConfig:
    suite: str
    dims: list = field(default_factory=lambda: [4])
    trials: int = 100
    seed: int = 0
    tol: float = 1e-8
    n_schedule: list = field(default_factory=lambda: list(DEFAULT_SCHEDULE))
    output_path: str = None

    def __post_init__(self):
        if isinstance(self.dims, int):
            self.dims = [self.dims]
        self.dims = [int(d) for d in self.dims]
        if self.suite not in SUITE_NAMES:
            raise ValueError(f"unknown suite {self.suite!r}; known: {SUITE_NAMES}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "dims": list(self.dims),
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "n_schedule": list(self.n_schedule),
        }


@dataclass
class SuiteReport:
    suite: str
    config: dict
    cases: list
    failures: int

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "cases": self.cases,
            "failures": self.failures,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"suite {self.suite}: {len(self.cases)} cases, {self.failures} failures"]
        for c in self.cases:
            status = "pass" if c["pass"] else "FAIL"
            lines.append(f"  [{status}] case {c['index']:4d} seed={c['seed']} {c['name']}")
            if not c["pass"]:
                for key, val in c["measured"].items():
                    lines.append(f"         {key} = {val}")
        return "\n".join(lines)


def _case_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(entropy=(int(seed), int(index))).generate_state(1)[0])


def _dim_for(cfg: SuiteConfig, i: int) -> int:
    return cfg.dims[i % len(cfg.dims)]


def _finite_le(lhs: float, rhs: float, tol: float) -> bool:
    if math.isinf(rhs):
        return True
    if math.isinf(lhs):
        return False
    return lhs <= rhs + tol


def _case_result(index, seed, name, inputs, measured, bounds, ok):
    return {
        "index": index,
        "seed": seed,
        "name": name,
        "inputs": inputs,
        "measured": measured,
        "bounds": bounds,
        "pass": bool(ok),
    }


# ---------------------------------------------------------------------------
# Suite case functions (module level so the process pool can pickle them)


def _case_inequalities(cfg: SuiteConfig, i: int) -> dict:
    seed = _case_seed(cfg.seed, i)
    rng = np.random.default_rng(seed)
    dim = _dim_for(cfg, i)
    measured, bounds = {}, {}

    # mixture inequality: H(sum p_k rho_k) <= sum p_k H(rho_k) + S({p_k})
    count = int(rng.integers(2, 6))
    ops = [
        float(rng.uniform(0.05, 1.0))
        * random_density(dim, int(rng.integers(1, dim + 1)), rng)
        for _ in range(count)
    ]
    p = rng.uniform(0.05, 1.0, size=count)
    p /= p.sum()
    mixture = sum(w * op for w, op in zip(p, ops))
    measured["mixture_lhs"] = ent.von_neumann(mixture)
    bounds["mixture_rhs"] = float(
        sum(w * ent.von_neumann(op) for w, op in zip(p, ops)) + ent.shannon_ext(p)
    )

    # sum inequality: H(sum rho_k) <= sum H(rho_k) + S({Tr rho_k})
    count = int(rng.integers(2, 5))
    ops = [
        float(rng.uniform(0.05, 1.0))
        * random_density(dim, int(rng.integers(1, dim + 1)), rng)
        for _ in range(count)
    ]
    total = sum(ops)
    traces = [float(np.real(np.trace(op))) for op in ops]
    measured["sum_lhs"] = ent.von_neumann(total)
    bounds["sum_rhs"] = float(
        sum(ent.von_neumann(op) for op in ops) + ent.shannon_ext(traces)
    )

    # orthogonal supports turn the sum inequality into an equality
    if dim >= 2:
        s1 = int(rng.integers(1, dim))
        blocks = [(0, s1), (s1, dim)]
        ops = []
        for lo, hi in blocks:
            b = hi - lo
            op = np.zeros((dim, dim), dtype=complex)
            op[lo:hi, lo:hi] = float(rng.uniform(0.05, 1.0)) * random_density(
                b, int(rng.integers(1, b + 1)), rng
            )
            ops.append(op)
        total = sum(ops)
        traces = [float(np.real(np.trace(op))) for op in ops]
        gap = ent.von_neumann(total) - (
            sum(ent.von_neumann(op) for op in ops) + ent.shannon_ext(traces)
        )
        measured["orthogonal_gap"] = float(gap)
        bounds["orthogonal_gap_abs"] = cfg.tol

    # concavity sandwich with the binary entropy excess
    w = float(rng.uniform(0.01, 0.99))
    r1 = random_density(dim, int(rng.integers(1, dim + 1)), rng)
    r2 = random_density(dim, int(rng.integers(1, dim + 1)), rng)
    h_mix = ent.von_neumann(w * r1 + (1 - w) * r2)
    h_avg = w * ent.von_neumann(r1) + (1 - w) * ent.von_neumann(r2)
    measured["sandwich_mix"] = float(h_mix)
    bounds["sandwich_low"] = float(h_avg)
    bounds["sandwich_high"] = float(h_avg + ent.binary(w))

    ok = (
        measured["mixture_lhs"] <= bounds["mixture_rhs"] + cfg.tol
        and measured["sum_lhs"] <= bounds["sum_rhs"] + cfg.tol
        and abs(measured.get("orthogonal_gap", 0.0)) <= cfg.tol
        and bounds["sandwich_low"] - cfg.tol <= measured["sandwich_mix"]
        and measured["sandwich_mix"] <= bounds["sandwich_high"] + cfg.tol
    )
    return _case_result(i, seed, "entropy_inequalities", {"dim": dim}, measured, bounds, ok)


def _case_continuity(cfg: SuiteConfig, i: int) -> dict:
    seed = _case_seed(cfg.seed, i)
    rng = np.random.default_rng(seed)
    dim = _dim_for(cfg, i)
    structured = i % 25 == 24 and dim >= 2 and dim % 2 == 0
    if structured:
        half = dim // 2
        phi = make_pinching(dim, [list(range(half)), list(range(half, dim))])
        m = 2
        u = np.zeros(dim, dtype=complex)
        u[:half] = random_pure(half, rng)
        v = np.zeros(dim, dtype=complex)
        v[half:] = random_pure(half, rng)
        rho = projector(u)
        sigma = projector((u + v) / np.sqrt(2))
        r1 = r2 = 1
    else:
        m = int(rng.integers(2, 5))
        phi = random_channel(dim, dim, m, True, rng)
        r1 = int(rng.integers(1, min(4, dim) + 1))
        r2 = int(rng.integers(1, min(4, dim) + 1))
        rho = random_density(dim, r1, rng)
        sigma = random_density(dim, r2, rng)
    eps = trace_norm(rho - sigma) / 2
    bound = pce.continuity_bound(math.log(m), r1, r2, eps)
    measured_val = abs(pce.output_entropy(phi, rho) - pce.output_entropy(phi, sigma))
    ratio = measured_val / bound if bound > 0 else 0.0
    ok = measured_val <= bound + cfg.tol
    return _case_result(
        i,
        seed,
        "continuity_bound" + ("_structured" if structured else ""),
        {"dim": dim, "choi_rank": m, "ranks": [r1, r2]},
        {"entropy_diff": float(measured_val), "epsilon": float(eps), "ratio": float(ratio)},
        {"bound": float(bound)},
        ok,
    )


def _tni_channel(dim, rng):
    """Genuinely trace-non-increasing CP map: a Kraus subset of a random channel."""
    r = int(rng.integers(2, dim + 1))
    base = random_channel(dim, dim, r, True, rng)
    j = int(rng.integers(1, r))
    return KrausChannel(
        base.kraus[:j], d_in=dim, d_out=dim, tp_mode="trace_non_increasing"
    )


def _case_monotonicity(cfg: SuiteConfig, i: int) -> dict:
    seed = _case_seed(cfg.seed, i)
    rng = np.random.default_rng(seed)
    dim = _dim_for(cfg, i)
    kind = i % 4
    if kind < 2:
        phi = random_channel(dim, dim, int(rng.integers(1, dim + 1)), True, rng)
        label = "cptp"
    elif kind == 2:
        phi = _tni_channel(dim, rng)
        label = "tni_subset"
    else:
        phi = random_channel(dim, dim, int(rng.integers(1, dim + 1)), False, rng)
        label = "tni_scaled"
    rho = random_density(dim, int(rng.integers(1, dim + 1)), rng)
    sigma = random_density(dim, dim, rng)
    lhs = ent.relative_entropy(apply(phi, rho), apply(phi, sigma))
    rhs = ent.relative_entropy(rho, sigma)
    ok = _finite_le(lhs, rhs, cfg.tol)
    return _case_result(
        i,
        seed,
        f"relative_entropy_monotone_{label}",
        {"dim": dim},
        {"lhs": float(lhs)},
        {"rhs": float(rhs)},
        ok,
    )


def _case_complementary(cfg: SuiteConfig, i: int) -> dict:
    seed = _case_seed(cfg.seed, i)
    rng = np.random.default_rng(seed)
    dim = _dim_for(cfg, i)
    from .channels import complementary

    phi = random_channel(dim, dim, int(rng.integers(1, dim + 1)), True, rng)
    comp = complementary(phi)
    psi = random_pure(dim, rng)
    pure_in = projector(psi)
    measured, bounds = {}, {}
    measured["pure_gap"] = abs(
        pce.output_entropy(phi, pure_in) - pce.output_entropy(comp, pure_in)
    )
    measured["double_complement_gap"] = abs(
        pce.output_entropy(complementary(comp), pure_in) - pce.output_entropy(phi, pure_in)
    )

    rho = random_density(dim, int(rng.integers(1, dim + 1)), rng)
    psi_hat = purify(rho)
    ref = psi_hat.size // dim
    extended = tensor_channels(phi, make_identity(ref))
    measured["purification_gap"] = abs(
        pce.output_entropy(comp, rho) - ent.von_neumann(apply(extended, projector(psi_hat)))
    )
    bounds["tol"] = cfg.tol
    ok = all(v <= cfg.tol for v in measured.values())
    return _case_result(
        i, seed, "complementary_channel", {"dim": dim}, measured, bounds, ok
    )


_ALPHA = math.log(2.0)


def _criteria_scenarios(cfg: SuiteConfig):
    schedule = [int(n) for n in cfg.n_schedule]
    top = max(schedule)

    def example1_c(rng):
        rep = pce.criterion_c_report(family_example1(_ALPHA), "2lnk", schedule)
        norms = rep.values["weighted_norms"]
        exps = rep.values["exp_sums"]
        ok = (
            all(abs(v - 2 * _ALPHA) <= 1e-12 for v in norms)
            and all(1.0 <= v <= math.pi**2 / 6 + 1e-12 for v in exps)
            and rep.verdict == pce.SATISFIED
        )
        return {"norms": norms, "exp_sums": exps}, {"norm_target": 2 * _ALPHA}, ok

    def example1_b(rng):
        rep = pce.criterion_b_report(family_example1(_ALPHA), schedule)
        sums = rep.values["norm_partial_sums"]
        ok = rep.verdict == pce.DIVERGING and sums[-1] > (50.0 if top >= 1024 else 1.0)
        return {"partial_sums": sums, "verdict": rep.verdict}, {}, ok

    def geometric_b(rng):
        rep = pce.criterion_b_report(family_geometric(3), schedule)
        ok = rep.verdict == pce.SATISFIED and rep.values["norm_partial_sums"][-1] <= 1.0
        return {"partial_sums": rep.values["norm_partial_sums"], "verdict": rep.verdict}, {}, ok

    def finite_b(rng):
        ch = random_channel(4, 4, 3, True, rng)
        rep = pce.criterion_b_report(family_from_channel(ch), schedule)
        sums = rep.values["norm_partial_sums"]
        ok = rep.verdict == pce.SATISFIED and max(sums) - min(sums) == 0.0
        return {"partial_sums": sums, "verdict": rep.verdict}, {}, ok

    def identity_a(rng):
        fam = family_identity()
        val = pce.criterion_a_value(fam, random_pure(schedule[0], rng), schedule[0])
        sup = pce.criterion_a_sup(fam, schedule[0], n_starts=4, seed=1).value
        ok = abs(val) <= 1e-12 and sup <= 1e-9
        return {"value": float(val), "sup": float(sup)}, {}, ok

    def zero_h_c(rng):
        rep = pce.criterion_c_report(family_example1(_ALPHA), "const:0", schedule)
        ok = rep.verdict != pce.SATISFIED
        return {"verdict": rep.verdict, "exp_sums": rep.values["exp_sums"]}, {}, ok

    return [
        ("example1_criterion_c", example1_c),
        ("example1_criterion_b", example1_b),
        ("geometric_criterion_b", geometric_b),
        ("finite_channel_criterion_b", finite_b),
        ("identity_criterion_a", identity_a),
        ("zero_h_criterion_c", zero_h_c),
    ]


def _case_criteria(cfg: SuiteConfig, i: int) -> dict:
    scenarios = _criteria_scenarios(cfg)
    name, fn = scenarios[i % len(scenarios)]
    seed = _case_seed(cfg.seed, i)
    rng = np.random.default_rng(seed)
    measured, bounds, ok = fn(rng)
    return _case_result(i, seed, name, {"n_schedule": list(cfg.n_schedule)}, measured, bounds, ok)


def _case_roof(cfg: SuiteConfig, i: int) -> dict:
    seed = _case_seed(cfg.seed, i)
    rng = np.random.default_rng(seed)
    dim = _dim_for(cfg, i)
    sub = i % 3
    measured, bounds = {}, {}
    if sub == 0:
        # Delta_1 algebraic identity: any pure decomposition averages to H(rho)
        rank = int(rng.integers(1, dim + 1))
        rho = random_density(dim, rank, rng)
        m = rank + int(rng.integers(0, 4))
        params = rng.standard_normal((m, rank)) + 1j * rng.standard_normal((m, rank))
        ens = roof.ensemble_from_isometry(rho, m, params)
        val = roof.ensemble_average_relative_entropy(ens, rho)
        target = ent.von_neumann(rho)
        measured["delta1"] = float(val)
        bounds["entropy"] = float(target)
        ok = abs(val - target) <= cfg.tol
        name = "defect_rank_one_identity"
    elif sub == 1:
        rank = int(rng.integers(1, dim + 1))
        rho = random_density(dim, rank, rng)
        res = roof.k_approximator(rho, rank, m=dim, n_starts=2, seed=seed, iters=12)
        target = ent.von_neumann(rho)
        measured["k_approx"] = float(res.value)
        bounds["entropy"] = float(target)
        ok = abs(res.value - target) <= 1e-9
        name = "approximator_singleton_exact"
    else:
        phi = random_channel(dim, dim, int(rng.integers(1, dim + 1)), True, rng)
        rank = int(rng.integers(1, dim + 1))
        rho = random_density(dim, rank, rng)
        m = rank + int(rng.integers(0, 3))
        params = rng.standard_normal((m, rank)) + 1j * rng.standard_normal((m, rank))
        ens = roof.ensemble_from_isometry(rho, m, params)
        lhs, rhs = roof.ensemblewise_monotonicity_gap(phi, ens)
        measured["lhs"] = float(lhs)
        bounds["rhs"] = float(rhs)
        ok = _finite_le(lhs, rhs, cfg.tol)
        name = "ensemblewise_monotonicity"
    return _case_result(i, seed, name, {"dim": dim}, measured, bounds, ok)


def two_qubit_eof_closed_form(rho: np.ndarray) -> float:
    """Closed-form two-qubit entanglement of formation via the concurrence, in nats."""
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]])
    yy = np.kron(sy, sy)
    tilde = yy @ rho.conj() @ yy
    evals = np.linalg.eigvals(rho @ tilde)
    lams = np.sort(np.sqrt(np.clip(evals.real, 0.0, None)))[::-1]
    c = max(0.0, lams[0] - lams[1] - lams[2] - lams[3])
    x = (1.0 + math.sqrt(max(0.0, 1.0 - c * c))) / 2.0
    return ent.binary(x)


def _case_eof(cfg: SuiteConfig, i: int) -> dict:
    seed = _case_seed(cfg.seed, i)
    rng = np.random.default_rng(seed)
    da = _dim_for(cfg, i)
    db = da
    if i % 5 == 4:
        rho = random_density(4, int(rng.integers(1, 5)), rng)
        res = roof.eof(rho, (2, 2), m=16, n_starts=64, seed=seed, iters=64)
        oracle = two_qubit_eof_closed_form(rho)
        ok = abs(res.value - oracle) <= 1e-4
        return _case_result(
            i,
            seed,
            "eof_two_qubit_concurrence",
            {"split": [2, 2]},
            {"eof": float(res.value)},
            {"closed_form": float(oracle)},
            ok,
        )
    psi = random_pure(da * db, rng)
    rho = projector(psi)
    res = roof.eof(rho, (da, db), m=4, n_starts=1, seed=seed, iters=4)
    target = ent.von_neumann(partial_trace(rho, (da, db), [0]))
    ok = abs(res.value - target) <= 1e-9
    return _case_result(
        i,
        seed,
        "eof_pure_state",
        {"split": [da, db]},
        {"eof": float(res.value)},
        {"reduced_entropy": float(target)},
        ok,
    )


def appendix_construction_check(phi: KrausChannel, tau: np.ndarray, rho: np.ndarray, sigma: np.ndarray):
    """Direct-sum extension of a trace-non-increasing map and its entropy chain.

    Builds Phi'(x) = Phi(x) (+) Psi(x) with Psi(x) = Tr(x - Phi(x)) tau, and
    returns (lhs_sum, direct, bound) where lhs_sum = H(Phi rho||Phi sigma) +
    H(Psi rho||Psi sigma), direct = H(Phi' rho||Phi' sigma) and
    bound = H(rho||sigma).  Block additivity makes lhs_sum = direct, and
    direct <= bound is the trace-preserving monotonicity applied to Phi'.
    """
    tau = np.asarray(tau, dtype=complex)
    if abs(np.real(np.trace(tau)) - 1.0) > 1e-9:
        raise ValueError("tau must have unit trace")

    def weight(x):
        w = float(np.real(np.trace(x) - np.trace(apply(phi, x))))
        if w < -1e-9:
            raise ValueError("the map increases trace; the extension needs Phi TNI")
        return max(w, 0.0)

    def extended(x):
        top = apply(phi, x)
        bottom = weight(x) * tau
        d1, d2 = top.shape[0], bottom.shape[0]
        out = np.zeros((d1 + d2, d1 + d2), dtype=complex)
        out[:d1, :d1] = top
        out[d1:, d1:] = bottom
        return out

    h_phi = ent.relative_entropy(apply(phi, rho), apply(phi, sigma))
    h_psi = ent.relative_entropy(weight(rho) * tau, weight(sigma) * tau)
    direct = ent.relative_entropy(extended(rho), extended(sigma))
    bound = ent.relative_entropy(rho, sigma)
    return h_phi + h_psi, direct, bound


def _case_appendix(cfg: SuiteConfig, i: int) -> dict:
    seed = _case_seed(cfg.seed, i)
    rng = np.random.default_rng(seed)
    dim = _dim_for(cfg, i)
    kind = i % 5
    if kind == 3:
        phi = KrausChannel(
            [np.eye(dim, dtype=complex) / np.sqrt(2)],
            d_in=dim,
            d_out=dim,
            tp_mode="trace_non_increasing",
        )
        label = "half_identity"
    elif kind == 4:
        phi = random_channel(dim, dim, int(rng.integers(1, dim + 1)), True, rng)
        label = "trace_preserving"
    elif kind == 2:
        phi = random_channel(dim, dim, int(rng.integers(1, dim + 1)), False, rng)
        label = "tni_scaled"
    else:
        phi = _tni_channel(dim, rng)
        label = "tni_subset"
    tau = random_density(dim, int(rng.integers(1, dim + 1)), rng)
    rho = random_density(dim, int(rng.integers(1, dim + 1)), rng)
    sigma = random_density(dim, dim, rng)
    lhs_sum, direct, bound = appendix_construction_check(phi, tau, rho, sigma)
    h_phi = ent.relative_entropy(apply(phi, rho), apply(phi, sigma))
    additive = (
        abs(direct - lhs_sum) <= cfg.tol
        if math.isfinite(direct) and math.isfinite(lhs_sum)
        else math.isinf(direct) == math.isinf(lhs_sum)
    )
    ok = additive and _finite_le(direct, bound, cfg.tol) and _finite_le(h_phi, direct, cfg.tol)
    return _case_result(
        i,
        seed,
        f"appendix_extension_{label}",
        {"dim": dim},
        {"block_sum": float(lhs_sum), "direct": float(direct), "h_phi": float(h_phi)},
        {"input_relative_entropy": float(bound)},
        ok,
    )


_CASE_FUNCS = {
    "inequalities": _case_inequalities,
    "continuity": _case_continuity,
    "monotonicity": _case_monotonicity,
    "complementary": _case_complementary,
    "criteria": _case_criteria,
    "roof": _case_roof,
    "eof": _case_eof,
    "appendix": _case_appendix,
}


def _case_entry(args):
    cfg, index = args
    return _CASE_FUNCS[cfg.suite](cfg, index)


def run_suite(config: SuiteConfig, jobs: int = 1) -> SuiteReport:
    """Run a suite; the report is deterministic for a fixed config.

    ``jobs > 1`` evaluates cases in a process pool; results are assembled in
    case-index order, so parallel and serial runs produce identical reports.
    """
    if config.suite == "criteria":
        ncases = len(_criteria_scenarios(config))
    else:
        ncases = config.trials
    args = [(config, i) for i in range(ncases)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cases = list(pool.map(_case_entry, args))
    else:
        cases = [_case_entry(a) for a in args]
    failures = sum(1 for c in cases if not c["pass"])
    return SuiteReport(
        suite=config.suite, config=config.to_json(), cases=cases, failures=failures
    )
