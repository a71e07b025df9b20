"""Eavesdropper strategies and security metrics.

Eve's simulated receiver is heterodyne followed by optimal classical
post-processing (MAP over Gaussian mixture likelihoods); quantum-optimal
attacks enter only as bounds, so the empirical/bound gap stays visible.
The exhaustive key-posterior oracle enumerates every seed at desk scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .channel import MeasurementRecord, apply_loss
from .cipher import CipherConfig, _lfsr_orbit, osk_stream, running_key
from .detection import (
    BoundReport,
    WeightedEnsemble,
    helstrom_binary_mixed,
    srm_symmetric,
    usd_symmetric,
)

_CHUNK = 4096  # slots per likelihood block; bounds peak memory at ~2M floats per state


@dataclass(frozen=True)
class EmpiricalRate:
    """A measured probability with its Monte Carlo standard error."""

    value: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class AttackReport:
    attack_kind: str  # ctoa_data | ctoa_key | kpa_key | collective | repetition
    empirical: EmpiricalRate
    bound: BoundReport
    trials: int
    seed: int | None = None
    key_posterior_entropy_bits: float | None = None


def _rate(errors: int, n: int) -> EmpiricalRate:
    p = errors / n
    return EmpiricalRate(p, math.sqrt(max(p * (1 - p), 1.0 / n) / n), n)


def bit_hypothesis_ensembles(config: CipherConfig) -> tuple[WeightedEnsemble, WeightedEnsemble]:
    """Eve's ciphertext-only hypothesis mixtures for data bit 0 and 1.

    Bit b occupies indices {k + (b xor r) M}: without OSK these are the two
    half-rings; with OSK the polarity bit is marginalized and both hypotheses
    become the same uniform mixture over all 2M points (the one-time-pad
    situation).
    """
    c = config.constellation()
    M = config.M
    if config.osk:
        all_idx = np.arange(2 * M)
        return (WeightedEnsemble.uniform(c, all_idx), WeightedEnsemble.uniform(c, all_idx))
    return (WeightedEnsemble.uniform(c, np.arange(M)),
            WeightedEnsemble.uniform(c, np.arange(M, 2 * M)))


def _log_gaussian_slab(samples: np.ndarray, points: np.ndarray) -> np.ndarray:
    """log f(y | point) up to a constant, heterodyne variance 1/2 per quadrature."""
    d2 = np.abs(samples[:, None] - points[None, :]) ** 2
    return -d2


def eve_ctoa_data(record: MeasurementRecord, config: CipherConfig, truth,
                  seed: int | None = None) -> AttackReport:
    """Ciphertext-only attack on the data: per-slot MAP bit decision.

    Likelihoods are prior-weighted Gaussian mixtures over each bit's index
    set; the reported bound is the mixed-state Helstrom value for the same
    two hypothesis ensembles.
    """
    truth = np.asarray(truth, dtype=np.int64)
    if len(truth) != len(record):
        raise ValueError("record and plaintext lengths differ")
    beta = apply_loss(config.constellation().amplitudes, config.kappa)
    M = config.M
    if config.osk:
        idx0 = idx1 = np.arange(2 * M)
    else:
        idx0, idx1 = np.arange(M), np.arange(M, 2 * M)
    errors = 0
    for lo in range(0, len(record), _CHUNK):
        y = record.samples[lo:lo + _CHUNK]
        ll = _log_gaussian_slab(y, beta)
        l0 = logsumexp(ll[:, idx0], axis=1)
        l1 = logsumexp(ll[:, idx1], axis=1)
        guess = (l1 > l0).astype(np.int64)
        errors += int(np.sum(guess != truth[lo:lo + len(y)]))
    rho0, rho1 = bit_hypothesis_ensembles(config)
    return AttackReport("ctoa_data", _rate(errors, len(record)),
                        helstrom_binary_mixed(rho0, rho1), len(record), seed)


def eve_key_symbol(record: MeasurementRecord, config: CipherConfig,
                   plaintext=None, seed: int | None = None) -> AttackReport:
    """Attack on the running-key symbol, known-plaintext or ciphertext-only.

    With known plaintext the per-slot candidates are the M states of symbol k
    (two antipodal points each under OSK, polarity marginalized); without it
    all 2M states compete and the symbol estimate is the index mod M.  The
    bound is the symmetric-ensemble optimum at N = M (known plaintext) or
    N = 2M (ciphertext-only).
    """
    beta = apply_loss(config.constellation().amplitudes, config.kappa)
    M = config.M
    n = len(record)
    k_true = np.asarray(_true_symbols(config, n), dtype=np.int64)
    known = plaintext is not None
    x = np.asarray(plaintext, dtype=np.int64) if known else None
    if known and len(x) != n:
        raise ValueError("record and plaintext lengths differ")

    errors = 0
    for lo in range(0, n, _CHUNK):
        y = record.samples[lo:lo + _CHUNK]
        ll = _log_gaussian_slab(y, beta)  # (chunk, 2M)
        if not known:
            guess = np.argmax(ll, axis=1) % M
        elif config.osk:
            # symbol k appears as k + (x xor r) M with r marginalized: the
            # antipodal pair collapses onto the same symbol either way
            pair = np.logaddexp(ll[:, :M], ll[:, M:])
            guess = np.argmax(pair, axis=1)
        else:
            xb = x[lo:lo + len(y)]
            cand = np.where(xb[:, None] == 0, np.arange(M)[None, :],
                            np.arange(M)[None, :] + M)
            guess = np.argmax(np.take_along_axis(ll, cand, axis=1), axis=1)
        errors += int(np.sum(guess != k_true[lo:lo + len(y)]))

    bound = srm_symmetric(M if known else 2 * M, config.S)
    kind = "kpa_key" if known else "ctoa_key"
    return AttackReport(kind, _rate(errors, n), bound, n, seed)


def _true_symbols(config: CipherConfig, count: int) -> np.ndarray:
    return running_key(config, count)


def symmetric_symbol_error_mc(N: int, S: float, trials: int,
                              rng: np.random.Generator, kappa: float = 1.0) -> EmpiricalRate:
    """Heterodyne symbol error for N symmetric states under uniform symbols.

    Detection-level experiment (no cipher machinery), so N need not be a
    power of two; nearest-state decoding reduces to phase quantization.
    """
    symbols = rng.integers(0, N, size=trials)
    amps = math.sqrt(S * kappa) * np.exp(2j * np.pi * symbols / N)
    y = amps + rng.normal(0, math.sqrt(0.5), trials) + 1j * rng.normal(0, math.sqrt(0.5), trials)
    guess = np.round(np.angle(y) / (2 * np.pi / N)).astype(np.int64) % N
    return _rate(int(np.sum(guess != symbols)), trials)


# --- exhaustive key posterior ------------------------------------------------

def _all_seed_symbol_matrix(config: CipherConfig, slots: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(seeds, symbols, osk bits) for every nonzero seed, vectorized via the
    single-cycle structure of a maximal-length register: every seed's stream
    is a rotation of one master cycle."""
    period = (1 << config.key_bits) - 1
    bps = config.bits_per_symbol
    nbits = slots * bps
    seeds = np.arange(1, period + 1, dtype=np.int64)

    main_cycle, main_pos = _lfsr_orbit(config.taps, config.key_bits, 1)
    osk_cycle, osk_pos = _lfsr_orbit(config.osk_taps, config.key_bits, 1)
    maximal = len(main_cycle) == period and len(osk_cycle) == period
    if maximal:
        mpos = np.array([main_pos[int(s)] for s in seeds])
        take = (mpos[:, None] + np.arange(nbits)[None, :]) % period
        bits = main_cycle[take]
        if bps:
            weights = 1 << np.arange(bps - 1, -1, -1)
            symbols = bits.reshape(len(seeds), slots, bps) @ weights
        else:
            symbols = np.zeros((len(seeds), slots), dtype=np.int64)
        opos = np.array([osk_pos[int(s)] for s in seeds])
        otake = (opos[:, None] + np.arange(slots)[None, :]) % period
        osk = osk_cycle[otake].astype(np.int64)
        return seeds, symbols, osk

    # non-maximal taps: per-seed streams
    symbols = np.empty((len(seeds), slots), dtype=np.int64)
    osk = np.empty((len(seeds), slots), dtype=np.int64)
    for i, s in enumerate(seeds):
        cfg = config.with_seed(int(s))
        symbols[i] = _true_symbols(cfg, slots)
        osk[i] = osk_stream(cfg, slots)
    return seeds, symbols, osk


def key_posterior_entropy(record: MeasurementRecord, config: CipherConfig,
                          plaintext) -> float:
    """Shannon entropy (bits) of the exact key posterior given Eve's record.

    Enumerates all 2^|K|-1 seeds, scores each seed's deterministic state
    sequence against the Gaussian record, and normalizes.  This is the
    brute-force key-security oracle; it requires |K| <= 20.
    """
    if config.key_bits > 20:
        raise ValueError("exhaustive posterior is limited to |K| <= 20")
    x = np.asarray(plaintext, dtype=np.int64)
    slots = len(record)
    if len(x) != slots:
        raise ValueError("record and plaintext lengths differ")

    seeds, symbols, osk = _all_seed_symbol_matrix(config, slots)
    xs = (x[None, :] ^ osk) if config.osk else np.broadcast_to(x, symbols.shape)
    indices = symbols + xs * config.M

    beta = apply_loss(config.constellation().amplitudes, config.kappa)
    y = record.samples
    loglik = np.empty(len(seeds))
    for lo in range(0, len(seeds), 256):
        pts = beta[indices[lo:lo + 256]]
        loglik[lo:lo + 256] = -np.sum(np.abs(y[None, :] - pts) ** 2, axis=1)

    log_post = loglik - logsumexp(loglik)
    p = np.exp(log_post)
    nz = p > 0
    return max(0.0, float(-(p[nz] * log_post[nz]).sum() / math.log(2)))


# --- closed-form security metrics --------------------------------------------

def binary_entropy(p: float) -> float:
    """h(p) in bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability out of range")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


def data_equivocation(pe_eve: float, n_bits: int, key_bits: int) -> tuple[float, bool]:
    """Total data equivocation n*h(pe) and whether it exceeds the key length.

    Crossing the key length is the signature that the cipher's secrecy has
    left the classical key-uncertainty regime.
    """
    if not 0.0 <= pe_eve <= 0.5:
        raise ValueError("pe_eve must lie in [0, 1/2]")
    total = n_bits * binary_entropy(pe_eve)
    return total, total > key_bits


def collective_success(per_slot_pd: float, L: int) -> float:
    """log2 of the joint success probability pd^L.

    The optimal collective measurement over product hypotheses factorizes
    into per-slot measurements, so the joint success is the per-slot success
    to the L-th power; it is returned in log2 because the value itself
    underflows at once for realistic L.
    """
    if not 0.0 <= per_slot_pd <= 1.0:
        raise ValueError("per_slot_pd out of range")
    if L < 1:
        raise ValueError("L must be >= 1")
    if per_slot_pd == 0.0:
        return -math.inf
    return L * math.log2(per_slot_pd)


def repetition_success(pd: float, J: int) -> float:
    """Success of J independent repetitions, 1 - (1 - pd)^J, stable for tiny pd."""
    if not 0.0 <= pd <= 1.0:
        raise ValueError("pd out of range")
    if J < 1:
        raise ValueError("J must be >= 1")
    if pd == 1.0:
        return 1.0
    return float(-math.expm1(J * math.log1p(-pd)))


def collective_usd_bound(N: int, S: float, key_bits: int) -> tuple[float, bool]:
    """Collective unambiguous-attack success over one key's worth of slots.

    L = floor(|K| / log2 N) slots carry the key; the collective success is the
    per-slot unambiguous success to the L-th power (log2-domain), compared
    against the 2^-|K| pure-guessing line.
    """
    pd = usd_symmetric(N, S).value
    L = max(1, int(key_bits / math.log2(N)))
    log2_pd = collective_success(pd, L)
    return log2_pd, log2_pd < -key_bits


def keygen_advantage(pe_bob: float, pe_eve: float) -> bool:
    """True when Eve's equivocation exceeds Bob's, the condition for keyed
    advantage creation (both error rates as binary-symmetric proxies)."""
    for p in (pe_bob, pe_eve):
        if not 0.0 <= p <= 0.5:
            raise ValueError("error rates must lie in [0, 1/2]")
    return binary_entropy(pe_eve) > binary_entropy(pe_bob)
