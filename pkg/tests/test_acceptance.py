"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary (see ``conftest.py``) and also when this file is run as a script.
"""

import dataclasses
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from tfop import calibration
from tfop.checks import band_limited, gaussian_family, reformulation_error, symbol_family, symbol_kernel_ratios
from tfop.grid import GridSpec, SampledFunction, forward_dft, inverse_dft
from tfop.harness import bundled_config, run_bound_experiment
from tfop.identities import gaussian_identity_check, kernel_stft_identity, symbol_kernel_stft_check
from tfop.norms import modulation_norm
from tfop.operators import fio_kernel, op_fio, op_pseudo, quantization_transfer
from tfop.phase import PhaseSpec, nondegeneracy
from tfop.schatten import hs_kernel_identity, interpolation_audit, schatten_norm, singular_values
from tfop.stft import stft
from tfop.weights import WindowSpec

RESULTS: dict[int, str] = {}

# reformulation phase: bilinear block plus a small smooth ripple, so that the
# discretization error is resolved above round-off at both grid sizes
RIPPLED = PhaseSpec(
    "perturbed",
    A=np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, -1.0, 0.0]]),
    eps=0.05,
    freqs=np.array([[0.5, 0.3, 0.4]]),
)


def report(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS[number] = line
    print(line)
    assert ok, line


def rel(a, b):
    return float(np.linalg.norm(np.ravel(a - b)) / np.linalg.norm(np.ravel(b)))


def test_criterion_01_dft_round_trip_and_parseval():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    g = GridSpec(1, 8.0, 64)
    f = SampledFunction(g, rng.standard_normal(64) + 1j * rng.standard_normal(64))
    F = forward_dft(f)
    rt = rel(inverse_dft(F).values, f.values)
    lhs = np.sum(np.abs(F.values) ** 2) * g.cell("frequency")
    rhs = np.sum(np.abs(f.values) ** 2) * g.cell()
    parseval = abs(lhs - rhs) / rhs
    elapsed = time.perf_counter() - start
    ok = rt < 1e-12 and parseval < 1e-12 and elapsed < 1.0
    report(1, ok, f"round trip {rt:.2e}, Parseval {parseval:.2e} (< 1e-12), runtime {elapsed:.3f} s (< 1 s)")


@pytest.fixture(scope="module")
def line64():
    g = GridSpec(1, 8.0, 64)
    return g, WindowSpec("gaussian", g, 1.0), gaussian_family(g, 10)


def test_criterion_02_moyal(line64):
    g, chi, family = line64
    worst = 0.0
    for f in family:
        target = chi.l2_norm() * f.norm()
        worst = max(worst, abs(math.sqrt(stft(f, chi).energy()) - target) / target)
    report(2, worst < 1e-8, f"max relative Moyal defect {worst:.2e} over {len(family)} Gaussians (< 1e-8)")


def test_criterion_03_m2_norm(line64):
    g, chi, family = line64
    worst = 0.0
    for f in family:
        target = chi.l2_norm() * f.norm()
        worst = max(worst, abs(modulation_norm(stft(f, chi), 2, 2) - target) / target)
    report(3, worst < 1e-8, f"max relative M2 defect {worst:.2e} (< 1e-8)")


def test_criterion_04_quantization_transfer():
    g2 = GridSpec.self_dual(2, 32)
    a = SampledFunction.from_callable(
        g2, lambda x, z: np.exp(-(x**2) / 2 - z**2 / 2) * (1 + 0.3 * np.cos(z)) * (1 + 0.2 * x)
    )
    same = all(quantization_transfer(a, s, s) is a for s in (0.0, 0.5, 1.0, 0.3))
    ops = rt = 0.0
    for s, t in ((0.0, 1.0), (1.0, 0.0), (0.0, 0.5), (0.5, 0.25)):
        b = quantization_transfer(a, s, t)
        ops = max(ops, float(np.max(np.abs(op_pseudo(a, s).entries - op_pseudo(b, t).entries))))
        rt = max(rt, float(np.max(np.abs(quantization_transfer(b, t, s).values - a.values))))
    ok = same and ops < 1e-6 and rt < 1e-10
    report(4, ok, f"s=t identity {'exact' if same else 'NOT exact'}, operators {ops:.2e} (< 1e-6), round trip {rt:.2e} (< 1e-10)")


def test_criterion_05_fio_reduces_to_pseudo():
    g3 = GridSpec.self_dual(3, 16)
    g2, g1 = g3.with_dim(2), g3.with_dim(1)
    sym = lambda x, z: np.exp(-(x**2) - z**2) * (1 + 0.3 * np.cos(z))  # noqa: E731
    bil = PhaseSpec.bilinear(1)
    a3 = SampledFunction.from_callable(g3, lambda x, y, z: sym(x, z))
    b2 = SampledFunction.from_callable(g2, sym)
    red = float(np.max(np.abs(op_fio(a3, bil).entries - op_pseudo(b2, 0.0).entries)))
    T = op_fio(SampledFunction(g3, np.ones(g3.shape)), bil, require_decay=False)
    rng = np.random.default_rng(5)
    rec = max(rel(T.apply(f).values, f.values) for f in (band_limited(g1, rng) for _ in range(5)))
    ok = red < 1e-8 and rec < 1e-6
    report(5, ok, f"reduction {red:.2e} (< 1e-8), identity recovery {rec:.2e} (< 1e-6)")


def test_criterion_06_reformulation():
    start = time.perf_counter()
    e8 = reformulation_error(RIPPLED, 8)
    elapsed = time.perf_counter() - start
    e16 = reformulation_error(RIPPLED, 16)
    ok = e8 < 1e-3 and e16 < e8 and elapsed < 60.0
    report(6, ok, f"N=8 {e8:.2e} (< 1e-3), N=16 {e16:.2e} (< N=8), N=8 runtime {elapsed:.2f} s (< 60 s)")


def test_criterion_07_gaussian_closed_form():
    res = gaussian_identity_check([k / 10 for k in range(1, 11)], GridSpec(1, 8.0, 128))
    report(7, res.max_error < 1e-8, f"max error {res.max_error:.2e} over t = 0.1..1.0 (< 1e-8)")


def test_criterion_08_kernel_stft_identity():
    g3 = GridSpec.self_dual(3, 16)
    g1 = g3.with_dim(1)
    a = SampledFunction.from_callable(g3, lambda x, y, z: np.exp(-(x * x + y * y + z * z)))
    rng = np.random.default_rng(8)
    samples = [tuple(int(v) for v in rng.integers(0, 16, 4)) for _ in range(10)]
    audit = kernel_stft_identity(a, PhaseSpec.bilinear(), WindowSpec("gaussian", g1, 0.6), WindowSpec("gaussian", g1, 0.55), samples)
    ok = audit.max_discrepancy < 1e-6
    report(
        8,
        ok,
        f"kernel {audit.kernel:.2e}, covariances {audit.source_covariance:.2e} / {audit.target_covariance:.2e} (< 1e-6)",
    )


def test_criterion_09_symbol_kernel():
    g2 = GridSpec.self_dual(2, 32)
    chi = WindowSpec("gaussian", g2, 0.9)
    rng = np.random.default_rng(9)
    samples = [tuple(float(v) for v in g2.spacing * rng.integers(-3, 4, 4)) for _ in range(10)]
    mag = max(symbol_kernel_stft_check(a, t, chi, samples) for t in (0.0, 0.5, 1.0) for a in symbol_family(g2, 3))
    r = symbol_kernel_ratios(10)
    spread = float(r.max() / r.min() - 1.0)
    ok = mag < 1e-6 and spread <= 0.02
    report(9, ok, f"magnitude {mag:.2e} (< 1e-6), ratio spread {spread:.2e} over 10 symbols (<= 2%)")


def test_criterion_10_schatten():
    g3 = GridSpec.self_dual(3, 16)
    a = SampledFunction.from_callable(g3, lambda x, y, z: np.exp(-(x * x + y * y + z * z)))
    phi = PhaseSpec.bilinear()
    hs = hs_kernel_identity(fio_kernel(a, phi), 1)
    sig = singular_values(op_fio(a, phi))
    ps = (1.0, 1.5, 2.0, 3.0, 4.0, math.inf)
    norms = [schatten_norm(sig, p) for p in ps]
    mono = min(norms[i] - norms[j] for i in range(len(ps)) for j in range(i + 1, len(ps)))
    rng = np.random.default_rng(10)
    logc = math.inf
    for _ in range(100):
        M = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        p1, p2 = rng.uniform(1.0, 8.0, 2)
        logc = min(logc, interpolation_audit(M, p1, p2, float(rng.uniform())))
    diag = singular_values(np.diag([3.0, 4.0]))
    exact = (schatten_norm(diag, 1), schatten_norm(diag, 2), schatten_norm(diag, math.inf))
    ok = hs < 1e-8 and mono >= -1e-12 and logc >= -1e-10 and exact == (7.0, 5.0, 4.0)
    report(
        10,
        ok,
        f"HS {hs:.2e} (< 1e-8), monotone slack {mono:.2e} (>= -1e-12), log-convex slack {logc:.2e} (>= -1e-10), diag(3,4) {exact}",
    )


def test_criterion_11_nondegeneracy():
    g = GridSpec.self_dual(3, 8)
    variants = ("full", "yzeta", "xzeta")
    bil = [nondegeneracy(PhaseSpec.bilinear(), g, w).d for w in variants]
    zero = [nondegeneracy(PhaseSpec.zero(), g, w).degenerate for w in variants]
    ok = bil == [1.0, 1.0, 1.0] and all(zero)
    report(11, ok, f"bilinear d = {bil}, zero phase degenerate = {zero}")


def test_criterion_12_bound_report():
    cfg = bundled_config("reference_bound")
    base = run_bound_experiment(cfg)
    worst = 0.0
    for lam in (0.5, 2.0, 10.0):
        scaled = dataclasses.replace(cfg, amplitude=dataclasses.replace(cfg.amplitude, scale=lam))
        worst = max(worst, abs(run_bound_experiment(scaled).ratio / base.ratio - 1.0))
    drift = abs(base.ratio / calibration.BOUND_RATIO_REFERENCE - 1.0)
    ok = worst < 1e-10 and drift <= 0.02
    report(12, ok, f"scaling invariance {worst:.2e} (< 1e-10), calibration drift {drift:.2e} (<= 2%)")


def test_criterion_13_determinism(tmp_path):
    blobs = []
    for run in range(2):
        out = tmp_path / "reports"
        cmd = [sys.executable, "-m", "tfop", "verify", "--seed", "7", "--out", str(out), "--format", "json", "--format", "csv"]
        proc = subprocess.run(cmd, capture_output=True, text=True, check=False)
        assert proc.returncode == 0, proc.stderr
        blobs.append(((out / "verify.json").read_bytes(), (out / "verify.csv").read_bytes()))
    ok = blobs[0] == blobs[1]
    report(13, ok, f"two fresh processes at seed 7 wrote {'identical' if ok else 'DIFFERENT'} JSON and CSV reports")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
