"""One-shot reproduction of the canonical Y-00 security figures.

Each claim recomputes a published reference number or property at its stated
tolerance and reports measured-vs-expected.  Claims are deliberately small and
independent so a failure isolates one quantity; the same registry backs both
the ``reproduce`` CLI command and the acceptance test module.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import attacks, channel, cipher, detection
from .constellation import make_psk, neighbor_error, overlap


@dataclass
class ClaimResult:
    claim_id: str
    description: str
    measured: float
    expected: str
    passed: bool
    elapsed_s: float
    detail: str = ""


# Fixed designed operating points (see README for the design rationale).
# One-time-pad demonstration: M >= 512 with the energy backed off until the
# even/odd mixtures are indistinguishable to < 1e-3 while neighbor confusion
# stays >= 0.3.
OTP_CONFIG = dict(M=512, S=4000.0, key_bits=16, seed=0xACE1, osk=True)
# Key-entropy demonstration: the per-period record must carry less Gaussian
# information than |K| bits for the posterior to stay spread, which forces the
# pulse energy far down; the control point reverses that.
ENTROPY_CONFIG = dict(M=64, S=0.005, key_bits=12, seed=0x5A5, osk=True)
ENTROPY_CONTROL = dict(M=2, S=1e4, key_bits=12, seed=0x5A5, osk=False)

_REGISTRY: list[tuple[str, str, Callable[[], ClaimResult]]] = []


def _claim(claim_id: str, description: str):
    def wrap(fn):
        _REGISTRY.append((claim_id, description, fn))
        return fn
    return wrap


def _result(claim_id, description, measured, expected, passed, t0, detail=""):
    return ClaimResult(claim_id, description, float(measured), expected,
                       bool(passed), time.perf_counter() - t0, detail)


def _ls_slope(x: np.ndarray, y: np.ndarray) -> float:
    a = np.vstack([x, np.ones_like(x)]).T
    return float(np.linalg.lstsq(a, y, rcond=None)[0][0])


def _exponent_without_prefactor(s: np.ndarray, log_pe: np.ndarray) -> float:
    """Coefficient on S after absorbing the Gaussian tail's algebraic prefactor
    (an extra log-S regressor); exact for pure exponential laws."""
    a = np.vstack([s, np.log(s), np.ones_like(s)]).T
    return float(np.linalg.lstsq(a, log_pe, rcond=None)[0][0])


@_claim("1a", "symmetric-ensemble optimum error at N=2047, S=100 is 0.975 +/- 0.02")
def _claim_srm_low():
    t0 = time.perf_counter()
    rep = detection.srm_symmetric(2047, 100.0)
    ok = abs(rep.value - 0.975) <= 0.02
    detail = ""
    if not ok:
        detail = f"optimality residual {detection.srm_symmetric_residual(2047, 100.0):.3e}"
    return _result("1a", "minimum-error reproduction (N=2047, S=100)",
                   rep.value, "0.975 +/- 0.02", ok, t0, detail)


@_claim("1b", "symmetric-ensemble optimum error at N=2047, S=1e4 is 0.755 +/- 0.02")
def _claim_srm_high():
    t0 = time.perf_counter()
    rep = detection.srm_symmetric(2047, 1e4)
    ok = abs(rep.value - 0.755) <= 0.02
    detail = ""
    if not ok:
        detail = f"optimality residual {detection.srm_symmetric_residual(2047, 1e4):.3e}"
    return _result("1b", "minimum-error reproduction (N=2047, S=1e4)",
                   rep.value, "0.755 +/- 0.02", ok, t0, detail)


@_claim("2a", "unambiguous success at N=2000, S=1e4 within a factor of 3 of 3e-12")
def _claim_usd_value():
    t0 = time.perf_counter()
    pd = detection.usd_symmetric(2000, 1e4).value
    ok = 1e-12 <= pd <= 9e-12
    detail = ("true value is ~7.5e-21 (60-digit evaluation of the same DFT); "
              "the 3e-12 reference equals the double-precision DFT noise floor "
              "(raw spectral minimum here: {:.2e}); clamped honest output is 0".format(
                  float(np.fft.fft(np.exp(1e4 * (np.exp(2j * np.pi * np.arange(2000) / 2000) - 1))).real.min()))
              if not ok else "")
    return _result("2a", "unambiguous-discrimination reproduction (N=2000, S=1e4)",
                   pd, "3e-12, factor 3", ok, t0, detail)


@_claim("2b", "chain P_D(USD) < 1/N < optimal success holds at N=2000, S=1e4")
def _claim_usd_chain():
    t0 = time.perf_counter()
    pd = detection.usd_symmetric(2000, 1e4).value
    succ = detection.srm_symmetric(2000, 1e4).success
    ok = pd < 1.0 / 2000 < succ
    return _result("2b", "unambiguous < guessing < optimal-success chain",
                   succ, "P_D < 5e-4 < success", ok, t0,
                   f"P_D={pd:.3e}, 1/N=5e-4, success={succ:.6f}")


@_claim("2c", "optimal success at N=2000, S=1e4 is 0.2 +/- 0.05")
def _claim_srm_success_band():
    t0 = time.perf_counter()
    succ = detection.srm_symmetric(2000, 1e4).success
    ok = abs(succ - 0.2) <= 0.05
    detail = ""
    if not ok:
        succ_2047 = detection.srm_symmetric(2047, 1e4).success
        detail = (f"reference rounds the true value to one significant figure; "
                  f"at N=2047 the success is {succ_2047:.6f} (in band)")
    return _result("2c", "optimal success magnitude (N=2000, S=1e4)",
                   succ, "0.2 +/- 0.05", ok, t0, detail)


_SLOPE_GRID = np.arange(2.0, 5.01, 0.5)


@_claim("3a", "ln Pe slope of the keyed optimum is -4 +/- 5% over S in {2..5}")
def _claim_slope_helstrom():
    t0 = time.perf_counter()
    pe = np.array([detection.helstrom_binary_pure(math.sqrt(s), -math.sqrt(s)).value
                   for s in _SLOPE_GRID])
    slope = _ls_slope(_SLOPE_GRID, np.log(pe))
    ok = abs(slope / -4.0 - 1.0) <= 0.05
    return _result("3a", "keyed-receiver error exponent", slope, "-4 +/- 5%", ok, t0)


@_claim("3b", "ln Pe slope of the homodyne receiver is -2 +/- 5% over S in {2..5}")
def _claim_slope_quadrature():
    t0 = time.perf_counter()
    pe = np.array([detection.quadrature_binary(math.sqrt(s), -math.sqrt(s), "homodyne").value
                   for s in _SLOPE_GRID])
    log_pe = np.log(pe)
    slope = _ls_slope(_SLOPE_GRID, log_pe)
    ok = abs(slope / -2.0 - 1.0) <= 0.05
    detail = ""
    if not ok:
        corrected = _exponent_without_prefactor(_SLOPE_GRID, log_pe)
        detail = (f"Gaussian tail Q(2 sqrt(S)) carries a 1/sqrt(S) prefactor that "
                  f"steepens the finite-window slope; exponent after absorbing the "
                  f"prefactor: {corrected:.4f} (within 5% of -2)")
    return _result("3b", "unkeyed homodyne error exponent", slope, "-2 +/- 5%", ok, t0, detail)


def _otp_config() -> cipher.CipherConfig:
    return cipher.CipherConfig(**OTP_CONFIG)


@_claim("4a", "designed config: even/odd mixture Helstrom error >= 0.499")
def _claim_otp_bound():
    t0 = time.perf_counter()
    cfg = _otp_config()
    ne = neighbor_error(cfg.constellation())
    rho_even, rho_odd = detection.even_odd_mixtures(cfg.constellation())
    pe = detection.helstrom_binary_mixed(rho_even, rho_odd).value
    ok = pe >= 0.499 and ne >= 0.3
    return _result("4a", "one-time-pad bound at the designed point",
                   pe, ">= 0.499 (neighbor confusion >= 0.3)", ok, t0,
                   f"neighbor_error={ne:.4f}")


@_claim("4b", "designed config: ciphertext-only bit error 0.5 +/- 0.01 over 1e5 slots")
def _claim_otp_empirical():
    t0 = time.perf_counter()
    cfg = _otp_config()
    rng = np.random.default_rng(20240717)
    n = 100_000
    plaintext = rng.integers(0, 2, size=n)
    rec = channel.transmit(cipher.encode(plaintext, cfg), cfg, rng)
    rep = attacks.eve_ctoa_data(rec, cfg, plaintext)
    ok = abs(rep.empirical.value - 0.5) <= 0.01
    return _result("4b", "one-time-pad empirical bit error",
                   rep.empirical.value, "0.5 +/- 0.01", ok, t0,
                   f"stderr={rep.empirical.stderr:.2e}, bound Pe={rep.bound.value:.6f}")


@_claim("5a", "designed config: exhaustive key posterior keeps positive entropy")
def _claim_entropy_positive():
    t0 = time.perf_counter()
    cfg = cipher.CipherConfig(**ENTROPY_CONFIG)
    slots = cipher.slots_per_period(cfg)
    plaintext = np.zeros(slots, dtype=np.int64)
    rng = np.random.default_rng(99)
    rec = channel.transmit(cipher.encode(plaintext, cfg), cfg, rng)
    h = attacks.key_posterior_entropy(rec, cfg, plaintext)
    ok = h > 0.0
    return _result("5a", "key equivocation after one period (designed)",
                   h, "> 0 bits", ok, t0, f"{slots} slots, |K|={cfg.key_bits}")


@_claim("5b", "control config (M=2, S=1e4): key recovered, entropy < 0.1 bits")
def _claim_entropy_control():
    t0 = time.perf_counter()
    cfg = cipher.CipherConfig(**ENTROPY_CONTROL)
    slots = cipher.slots_per_period(cfg)
    plaintext = np.zeros(slots, dtype=np.int64)
    rng = np.random.default_rng(99)
    rec = channel.transmit(cipher.encode(plaintext, cfg), cfg, rng)
    h = attacks.key_posterior_entropy(rec, cfg, plaintext)
    ok = h < 0.1
    return _result("5b", "key equivocation after one period (control)",
                   h, "< 0.1 bits", ok, t0)


@_claim("6", "unambiguous success never beats the optimum on the full grid")
def _claim_usd_vs_srm_grid():
    t0 = time.perf_counter()
    worst = -math.inf
    for n_exp in range(1, 12):
        n = 2 ** n_exp
        for s in (0.1, 1.0, 10.0, 100.0, 1e4):
            gap = (detection.usd_symmetric(n, s).success
                   - detection.srm_symmetric(n, s).success)
            worst = max(worst, gap)
    ok = worst <= 1e-10
    return _result("6", "unambiguous <= optimal success, 55-point grid",
                   worst, "<= 1e-10", ok, t0, "worst (usd - optimal) gap")


@_claim("7a", "span trace norm matches dense orthonormalized brute force to 1e-10")
def _claim_small_oracle():
    t0 = time.perf_counter()
    c = make_psk(2, 1.3)
    rho0 = detection.WeightedEnsemble(c, np.array([0.7, 0.3]), np.array([0, 1]))
    rho1 = detection.WeightedEnsemble(c, np.array([0.6, 0.4]), np.array([2, 3]))
    pe = detection.helstrom_binary_mixed(rho0, rho1).value
    pe_dense = _dense_mixed_helstrom(c.amplitudes, rho0, rho1)
    diff = abs(pe - pe_dense)
    return _result("7a", "mixed-Helstrom dual-route agreement",
                   diff, "<= 1e-10", diff <= 1e-10, t0,
                   f"span={pe:.12f}, dense={pe_dense:.12f}")


@_claim("7b", "two-slot joint success equals per-slot success squared (MC)")
def _claim_collective_enumeration():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    trials, s_energy, m_states = 200_000, 0.8, 2
    amps = math.sqrt(s_energy) * np.exp(2j * np.pi * np.arange(m_states) / m_states)
    sym = rng.integers(0, m_states, size=(trials, 2))
    y = amps[sym] + rng.normal(0, math.sqrt(0.5), (trials, 2)) \
        + 1j * rng.normal(0, math.sqrt(0.5), (trials, 2))
    d2 = np.abs(y[:, :, None] - amps[None, None, :]) ** 2
    per_slot = np.argmin(d2, axis=2)
    # exhaustive joint MAP over all m^2 product hypotheses must factorize
    cost = d2[:, 0, :, None] + d2[:, 1, None, :]
    flat = np.argmin(cost.reshape(trials, -1), axis=1)
    joint_guess = np.stack([flat // m_states, flat % m_states], axis=1)
    if not np.array_equal(joint_guess, per_slot):
        return _result("7b", "collective = product of per-slot successes",
                       math.inf, "joint MAP factorizes", False, t0)
    p1 = float(np.mean(per_slot == sym))
    pj = float(np.mean(np.all(per_slot == sym, axis=1)))
    se = math.sqrt(pj * (1 - pj) / trials)
    diff = abs(pj - p1 ** 2)
    ok = diff <= 4 * se
    log2_formula = attacks.collective_success(p1, 2)
    return _result("7b", "collective = product of per-slot successes",
                   diff, f"<= 4*SE ({4*se:.2e})", ok, t0,
                   f"per-slot {p1:.5f}, joint {pj:.5f}, log2 formula {log2_formula:.5f}")


@_claim("7c", "keyed round trip is the identity, exhaustive for M <= 16")
def _claim_roundtrip():
    t0 = time.perf_counter()
    failures = 0
    for m in (2, 4, 8, 16):
        cfg = cipher.CipherConfig(M=m, S=10.0, key_bits=8, seed=0x5B, osk=True)
        rng = np.random.default_rng(m)
        x = rng.integers(0, 2, size=503)
        if not np.array_equal(cipher.decode(cipher.encode(x, cfg), cfg), x):
            failures += 1
        # every (symbol, bit) cell of the map must invert
        for k in range(m):
            for bit in (0, 1):
                idx = (k + bit * m) % (2 * m)
                if ((idx - k) % (2 * m)) // m != bit:
                    failures += 1
    return _result("7c", "cipher round-trip exhaustion", failures, "0 failures",
                   failures == 0, t0)


@_claim("8", "collective unambiguous attack sits below pure guessing at |K|=110")
def _claim_collective_usd():
    t0 = time.perf_counter()
    log2_pd, below = attacks.collective_usd_bound(2000, 1e4, 110)
    ok = below and log2_pd < -300
    return _result("8", "collective unambiguous-attack bound",
                   log2_pd, "log2 P_D < -300 and below 2^-110", ok, t0)


def _state_inner(u: np.ndarray, v: np.ndarray, amps: np.ndarray) -> complex:
    acc = 0.0 + 0.0j
    for i, cu in enumerate(u):
        if cu == 0:
            continue
        for j, cv in enumerate(v):
            if cv == 0:
                continue
            acc += np.conj(cu) * cv * overlap(amps[i], amps[j])
    return complex(acc)


def _dense_mixed_helstrom(amps: np.ndarray, rho0, rho1) -> float:
    """Independent oracle: explicit modified Gram-Schmidt orthonormalization of
    the states, dense density matrices, dense eigendecomposition."""
    n = len(amps)
    basis: list[np.ndarray] = []
    for i in range(n):
        v = np.zeros(n, dtype=complex)
        v[i] = 1.0
        for _ in range(2):  # reorthogonalize once for accuracy
            for b in basis:
                v = v - _state_inner(b, v, amps) * b
        norm = math.sqrt(max(_state_inner(v, v, amps).real, 0.0))
        if norm > 1e-12:
            basis.append(v / norm)
    d = len(basis)
    coords = np.zeros((n, d), dtype=complex)
    for i in range(n):
        e = np.zeros(n, dtype=complex)
        e[i] = 1.0
        coords[i] = [_state_inner(b, e, amps) for b in basis]
    rho_m = []
    for ens in (rho0, rho1):
        m = np.zeros((d, d), dtype=complex)
        for p, idx in zip(ens.probabilities, ens.indices):
            v = coords[idx]
            m += p * np.outer(v, v.conj())
        rho_m.append(m)
    delta = 0.5 * rho_m[1] - 0.5 * rho_m[0]
    tn = float(np.abs(np.linalg.eigvalsh(delta)).sum())
    return 0.5 - 0.5 * tn


def run_all() -> list[ClaimResult]:
    return [fn() for _, _, fn in _REGISTRY]


def run_claim(claim_id: str) -> ClaimResult:
    for cid, _, fn in _REGISTRY:
        if cid == claim_id:
            return fn()
    raise KeyError(claim_id)


def claim_ids() -> list[str]:
    return [cid for cid, _, _ in _REGISTRY]
