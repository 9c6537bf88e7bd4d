"""Config-driven experiments: bound ratios, Schatten decay, norm audits and the verification suite."""

from __future__ import annotations

import concurrent.futures
import dataclasses
import itertools
import logging
import math
import os
from importlib import resources
from typing import Any, Callable, Iterable, Sequence, TypeVar

import numpy as np

from . import calibration, checks
from .config import ExperimentConfig, loads_config
from .errors import ConfigError, NumericalFailure
from .grid import GridSpec, SampledFunction
from .identities import kernel_stft_identity
from .norms import AMPLITUDE_VARIANTS, AmplitudeLayout, amplitude_norm, modulation_norm, patch_norm
from .operators import OperatorMatrix, fio_kernel, op_fio
from .phase import PhaseSpec, nondegeneracy
from .report import CheckRecord
from .schatten import hs_kernel_identity, schatten_norm, singular_values, weighted_gram
from .stft import stft
from .weights import WeightSpec, WindowSpec

LOGGER = logging.getLogger(__name__)

RANDOM_INPUTS = 200
SCHATTEN_MEMBERS = 4

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """Worker cap from ``TFOP_THREADS`` (default 1)."""
    raw = os.environ.get("TFOP_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"TFOP_THREADS: expected an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("TFOP_THREADS: must be at least 1")
    return n


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """Map over ``items`` with at most ``threads`` workers; results keep input order."""
    items = list(items)
    threads = thread_count() if threads is None else threads
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def bundled_config(name: str) -> ExperimentConfig:
    """One of the configurations shipped in ``tfop/configs``."""
    try:
        text = resources.files("tfop").joinpath("configs").joinpath(f"{name}.json").read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigError(f"no bundled configuration named {name!r}") from exc
    return loads_config(text)


def _window(grid: GridSpec, spread: float) -> WindowSpec:
    chi = WindowSpec("gaussian", grid, spread)
    chi.check_fitness()
    return chi


def _require_nondegenerate(phi: PhaseSpec, grid: GridSpec) -> float:
    nd = nondegeneracy(phi, grid, "full")
    if nd.degenerate:
        raise NumericalFailure(f"degenerate phase: min |det| of the mixed Hessian block is {nd.d:.3e}")
    return nd.d


# ---------------------------------------------------------------- bound


@dataclasses.dataclass(frozen=True)
class BoundReport:
    """Empirical operator norm against the amplitude and phase norms.

    ``ratio = lhs * d / (amp_norm * exp(phase_norm))``.
    """

    lhs: float
    d: float
    amp_norm: float
    phase_norm: float
    ratio: float
    metadata: dict[str, Any]

    def __post_init__(self) -> None:
        for name in ("lhs", "d", "amp_norm", "phase_norm", "ratio"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise NumericalFailure(f"bound report field {name} is {v!r}")

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def phase_second_derivative_norm(phi: PhaseSpec, grid: GridSpec, window: WindowSpec, v: WeightSpec) -> float:
    """Sum over ``|alpha| = 2`` of the ``M^{inf,1}_(v)`` norms of the sampled ``phi^(alpha)``."""
    H = phi.hessian(grid.coords())
    total = 0.0
    for i, j in itertools.combinations_with_replacement(range(phi.dim), 2):
        d2 = SampledFunction(grid, H[..., i, j])
        total += modulation_norm(stft(d2, window), math.inf, 1, v)
    return total


def randomized_lower_bound(
    T: OperatorMatrix,
    window: WindowSpec,
    omega_1: WeightSpec,
    omega_2: WeightSpec,
    p: float,
    seed: int,
    count: int = RANDOM_INPUTS,
) -> float:
    """``max ||T f||_{M^p(omega_2)} / ||f||_{M^p(omega_1)}`` over seeded band-limited ``f``.

    Every ratio is attained, so the result is a lower bound of the operator norm.
    """
    rng = np.random.default_rng(seed)
    inputs = [checks.band_limited(T.source, rng) for _ in range(count)]

    def ratio(f: SampledFunction) -> float:
        num = modulation_norm(stft(T.apply(f), window), p, p, omega_2)
        den = modulation_norm(stft(f, window), p, p, omega_1)
        return num / den

    return float(max(ordered_map(ratio, inputs)))


def run_bound_experiment(cfg: ExperimentConfig) -> BoundReport:
    """Operator norm of the FIO against the amplitude and phase norms of the bound estimate."""
    n = cfg.grid.dim
    phi = cfg.phase.spec(n)
    g_amp = cfg.grid.spec(phi.dim)
    d = _require_nondegenerate(phi, g_amp)
    a = cfg.amplitude.sample(g_amp)
    T = op_fio(a, phi)
    chi_amp = _window(g_amp, cfg.window_spread)
    omega = cfg.weight("omega", 2 * phi.dim)
    v = cfg.weight("v", 2 * phi.dim)
    amp = modulation_norm(stft(a, chi_amp), math.inf, 1, omega)
    phase_norm = phase_second_derivative_norm(phi, g_amp, chi_amp, v)
    g_n = cfg.grid.spec(n)
    chi = _window(g_n, cfg.window_spread)
    w1 = cfg.weight("omega_1", 2 * n)
    w2 = cfg.weight("omega_2", 2 * n)
    p = cfg.exponents.p
    if p == 2.0:
        G1 = weighted_gram(w1, chi, g_n)
        G2 = weighted_gram(w2, chi, g_n)
        lhs = singular_values(T, G1, G2).values[0]
        method = "largest weighted singular value"
    else:
        lhs = randomized_lower_bound(T, chi, w1, w2, p, cfg.seed)
        method = f"randomized lower bound over {RANDOM_INPUTS} band-limited inputs"
    if amp == 0:
        raise NumericalFailure("amplitude norm vanishes")
    log_ratio = math.log(lhs) + math.log(d) - math.log(amp) - phase_norm if lhs > 0 else -math.inf
    ratio = math.exp(log_ratio)
    meta = {
        "grid": {"dim": n, "points": g_n.points, "half_width": g_n.half_width},
        "phase": cfg.phase.family,
        "weights": {name: cfg.weights[name].factors if name in cfg.weights else () for name in ("omega", "v", "omega_1", "omega_2")},
        "p": p,
        "lhs_method": method,
        "lower_bound": p != 2.0,
        "log_ratio": log_ratio,
        "seed": cfg.seed,
    }
    return BoundReport(float(lhs), float(d), float(amp), float(phase_norm), float(ratio), meta)


def bound_calibration_records(cfg: ExperimentConfig | None = None) -> list[CheckRecord]:
    """Scaling invariance and drift of the bound ratio on the reference configuration."""
    cfg = bundled_config("reference_bound") if cfg is None else cfg
    base = run_bound_experiment(cfg)
    scaled_cfg = dataclasses.replace(cfg, amplitude=dataclasses.replace(cfg.amplitude, scale=2.0 * cfg.amplitude.scale))
    scaled = run_bound_experiment(scaled_cfg)
    return [
        CheckRecord("bound_scaling_invariance", abs(scaled.ratio / base.ratio - 1.0), 1e-10, "bound ratio is homogeneous of degree zero in the amplitude"),
        CheckRecord("bound_lhs_homogeneity", abs(scaled.lhs / (2.0 * base.lhs) - 1.0), 1e-10, "operator norm is linear in the amplitude"),
        CheckRecord("bound_ratio_drift", abs(base.ratio / calibration.BOUND_RATIO_REFERENCE - 1.0), calibration.DRIFT_TOLERANCE, "committed bound calibration constant"),
    ]


# ---------------------------------------------------------------- Schatten


def run_schatten_experiment(cfg: ExperimentConfig) -> dict[str, Any]:
    """Schatten norms of the FIO for amplitudes whose spread halves at each step."""
    n = cfg.grid.dim
    phi = cfg.phase.spec(n)
    g_amp = cfg.grid.spec(phi.dim)
    _require_nondegenerate(phi, g_amp)
    g_n = cfg.grid.spec(n)
    w1 = cfg.weight("omega_1", 2 * n)
    w2 = cfg.weight("omega_2", 2 * n)
    weighted = not (w1.is_trivial and w2.is_trivial)
    G1 = G2 = None
    if weighted:
        chi = _window(g_n, cfg.window_spread)
        G1, G2 = weighted_gram(w1, chi, g_n), weighted_gram(w2, chi, g_n)
    spreads = [cfg.amplitude.spread / 2**k for k in range(SCHATTEN_MEMBERS)]

    def row(spread: float) -> dict[str, Any]:
        a = cfg.amplitude.sample(g_amp, spread=spread)
        T = op_fio(a, phi)
        plain = singular_values(T)
        sig = singular_values(T, G1, G2) if weighted else plain
        norms = {f"I{'inf' if math.isinf(p) else int(p)}": schatten_norm(sig, p) for p in checks.SCHATTEN_EXPONENTS}
        return {
            "spread": spread,
            "norms": norms,
            "hs_kernel_discrepancy": hs_kernel_identity(fio_kernel(a, phi), n),
            "hs_plain": schatten_norm(plain, 2),
            "singular_values": list(sig.values),
            "space": sig.target,
        }

    rows = ordered_map(row, spreads)
    i1 = [r["norms"]["I1"] for r in rows]
    return {
        "experiment": "schatten_decay",
        "weighted": weighted,
        "rows": rows,
        "i1_monotone_decreasing": all(b < a for a, b in zip(i1, i1[1:])),
    }


def schatten_records(report: dict[str, Any]) -> list[CheckRecord]:
    out = []
    for k, r in enumerate(report["rows"]):
        nm = r["norms"]
        mono = max(0.0, nm["Iinf"] - nm["I4"], nm["I4"] - nm["I2"], nm["I2"] - nm["I1"])
        out.append(CheckRecord(f"schatten_monotonicity[{k}]", mono, 1e-12, "Schatten norms decrease in the exponent"))
        out.append(CheckRecord(f"hs_kernel_identity[{k}]", r["hs_kernel_discrepancy"], 1e-8, "Hilbert-Schmidt norm equals the kernel L2 norm"))
    i1 = [r["norms"]["I1"] for r in report["rows"]]
    rise = max([0.0] + [b - a for a, b in zip(i1, i1[1:])])
    out.append(CheckRecord("trace_norm_decay", rise, 0.0, "trace norm decreases as the amplitude localizes", passed=report["i1_monotone_decreasing"]))
    return out


# ---------------------------------------------------------------- norms


def run_norm_audits(cfg: ExperimentConfig) -> dict[str, Any]:
    """Modulation, patch and amplitude norms of the configured data."""
    n = cfg.grid.dim
    g_n = cfg.grid.spec(n)
    chi = _window(g_n, cfg.window_spread)
    p, q = cfg.exponents.p, cfg.exponents.q
    w = cfg.weight("omega_1", 2 * n)
    f = checks.gaussian_family(g_n, 3)[1] if n == 1 else SampledFunction.from_callable(g_n, lambda *x: np.exp(-sum(xi * xi for xi in x)))
    V = stft(f, chi)
    phi = cfg.phase.spec(n)
    g_amp = cfg.grid.spec(phi.dim)
    a = cfg.amplitude.sample(g_amp)
    chi_amp = _window(g_amp, cfg.window_spread)
    Va = stft(a, chi_amp)
    omega = cfg.weight("omega", 2 * phi.dim)
    layout = AmplitudeLayout(n, n, n)
    amp = {var: amplitude_norm(Va, var, layout, p, q, omega=omega) for var in AMPLITUDE_VARIANTS}
    return {
        "experiment": "norm_audits",
        "modulation_norm": modulation_norm(V, p, q, w),
        "single_patch_norm": patch_norm(f, 2 * g_n.half_width, WindowSpec.from_values(g_n, np.ones(g_n.shape)), p, q, w),
        "l2_norm": f.norm(),
        "window_l2_norm": chi.l2_norm(),
        "amplitude_norms": amp,
        "amplitude_minf1": modulation_norm(Va, math.inf, 1, omega),
    }


# ---------------------------------------------------------------- verification suite


def run_verification_suite(cfg: ExperimentConfig | None = None, include_bound: bool = True) -> list[CheckRecord]:
    """Run every identity check; records are returned in a fixed order.

    A degenerate phase raises :class:`NumericalFailure` before any check runs.
    """
    cfg = ExperimentConfig() if cfg is None else cfg
    phi = cfg.phase.spec(1)
    _require_nondegenerate(phi, GridSpec.self_dual(phi.dim, 8))

    def run(item: tuple[int, tuple[str, checks.Check]]) -> list[CheckRecord]:
        idx, (name, fn) = item
        LOGGER.debug("running check %s", name)
        return fn(np.random.default_rng([cfg.seed, idx]), phi)

    groups = ordered_map(run, list(enumerate(checks.CHECKS)))
    records = [r for g in groups for r in g]
    if include_bound:
        records.extend(bound_calibration_records())
    return records


def kernel_identity_records(cfg: ExperimentConfig) -> list[CheckRecord]:
    """Kernel STFT identity for the configured amplitude and phase."""
    n = cfg.grid.dim
    if n != 1:
        raise ConfigError("config.grid.dim: kernel identities are implemented for n = 1")
    phi = cfg.phase.spec(1)
    g3 = cfg.grid.spec(3)
    _require_nondegenerate(phi, g3)
    a = cfg.amplitude.sample(g3)
    g1 = g3.with_dim(1)
    chi = _window(g1, cfg.window_spread)
    rng = np.random.default_rng(cfg.seed)
    samples = [tuple(int(v) for v in rng.integers(0, g1.points, 4)) for _ in range(10)]
    audit = kernel_stft_identity(a, phi, chi, chi, samples)
    return [
        CheckRecord("kernel_stft_identity", audit.kernel, 1e-6, "STFT of the FIO kernel as a localized pairing"),
        CheckRecord("kernel_source_covariance", audit.source_covariance, 1e-10, "covariance of the localized source window"),
        CheckRecord("kernel_target_covariance", audit.target_covariance, 1e-10, "covariance of the localized target window"),
    ]


def reformulation_records(cfg: ExperimentConfig) -> list[CheckRecord]:
    """Localized pairing against the direct pairing for the configured phase, at N = 8 and 16."""
    phi = cfg.phase.spec(1)
    _require_nondegenerate(phi, GridSpec.self_dual(3, 8))
    points = sorted({8, cfg.grid.points} & {8, 16}) or [8]
    errs = {N: checks.reformulation_error(phi, N) for N in points}
    out = [CheckRecord(f"reformulation_pairing[N={N}]", e, 1e-3, "STFT reformulation of the FIO pairing") for N, e in errs.items()]
    return out


def run_experiment(cfg: ExperimentConfig) -> tuple[list[CheckRecord], dict[str, Any] | None]:
    """Dispatch on ``cfg.experiment``; returns check records and an optional report body."""
    kind = cfg.experiment
    if kind == "identity_suite":
        return run_verification_suite(cfg), None
    if kind == "bound_2_7":
        rep = run_bound_experiment(cfg)
        return [], {"experiment": kind, **rep.as_dict()}
    if kind == "schatten_decay":
        rep = run_schatten_experiment(cfg)
        return schatten_records(rep), rep
    if kind == "kernel_identities":
        return kernel_identity_records(cfg), None
    if kind == "reformulation_2_6":
        return reformulation_records(cfg), None
    if kind == "norm_audits":
        return [], run_norm_audits(cfg)
    raise ConfigError(f"config.experiment: unknown experiment {kind!r}")


def summarize(records: Sequence[CheckRecord]) -> dict[str, int]:
    failed = sum(1 for r in records if not r.passed)
    return {"checks": len(records), "passed": len(records) - failed, "failed": failed}
