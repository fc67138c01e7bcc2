"""Numba kernels for the first-passage Monte Carlo engine.

Design notes, kept here because they are load-bearing:

* RNG: xoshiro256++ with one independent stream per path, derived from
  (root seed, global path index) via splitmix64.  Results are therefore
  bit-identical for any number of worker threads and any batching of paths.
* Between retained jumps the path is Brownian with drift.  The segment
  endpoint is sampled first, then the segment maximum from the exact
  Brownian-bridge law, so first passage and the running maximum carry no
  time-discretisation bias; ``seg_cap`` only bounds the segment length so
  mode switches and horizon checks happen on a bounded grid.
* Jumps >= eps are kept (Poisson rate = Levy tail at eps, sizes by Pareto
  proposal with exponential-tempering acceptance); smaller jumps enter the
  drift compensation and, optionally, the diffusion variance.
* Two truncation levels: the fine level applies within ``band`` of the
  target u, a coarse level far below it, each with its own compensated
  drift/variance/rate.  Passing identical levels recovers the single-level
  scheme.
"""

import math

import numpy as np
from numba import njit, prange

_U64 = np.uint64
_GOLD = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_S30 = _U64(30)
_S27 = _U64(27)
_S31 = _U64(31)
_S17 = _U64(17)
_S45 = _U64(45)
_S23 = _U64(23)
_S41 = _U64(41)
_S12 = _U64(12)
_ONE = _U64(1)
_TWO53_INV = 1.0 / 9007199254740992.0  # 2^-53
_TWO_PI = 6.283185307179586476925287


@njit(inline="always", cache=True)
def _splitmix64(z):
    z = z + _GOLD
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31), z


@njit(inline="always", cache=True)
def _seed_state(seed, idx):
    # decorrelate (seed, idx) pairs, then expand to 4 state words
    z = _U64(seed) * _GOLD + (_U64(idx) + _ONE) * _MIX1
    z, s0 = _splitmix64(z)
    z, s1 = _splitmix64(z)
    z, s2 = _splitmix64(z)
    z, s3 = _splitmix64(z)
    if s0 == _U64(0) and s1 == _U64(0) and s2 == _U64(0) and s3 == _U64(0):
        s0 = _GOLD
    return s0, s1, s2, s3


@njit(inline="always", cache=True)
def _rotl(x, k, nk):
    return (x << k) | (x >> nk)


@njit(inline="always", cache=True)
def _next_u64(s0, s1, s2, s3):
    # xoshiro256++
    result = _rotl(s0 + s3, _S23, _S41) + s0
    t = s1 << _S17
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, _S45, _U64(19))
    return s0, s1, s2, s3, result


@njit(inline="always", cache=True)
def _uniform(s0, s1, s2, s3):
    # strictly inside (0, 1): maps the top 52 bits with a half-ulp offset
    s0, s1, s2, s3, x = _next_u64(s0, s1, s2, s3)
    u = (np.float64(x >> _S12) + 0.5) * (2.0 * _TWO53_INV)
    return s0, s1, s2, s3, u


@njit(inline="always", cache=True)
def _normal(s0, s1, s2, s3):
    s0, s1, s2, s3, u1 = _uniform(s0, s1, s2, s3)
    s0, s1, s2, s3, u2 = _uniform(s0, s1, s2, s3)
    z = math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)
    return s0, s1, s2, s3, z


@njit(inline="always", cache=True)
def _sample_jump(s0, s1, s2, s3, eps, rho, alpha):
    # tail of the claim Levy measure above eps factorises into survival
    # functions, P(J > x) = (x/eps)^{-rho-1} * e^{-alpha(x-eps)}, so the
    # exact draw is the minimum of a Pareto and a shifted exponential
    s0, s1, s2, s3, u1 = _uniform(s0, s1, s2, s3)
    x = eps * u1 ** (-1.0 / (rho + 1.0))
    s0, s1, s2, s3, u2 = _uniform(s0, s1, s2, s3)
    e = eps - math.log(u2) / alpha
    return s0, s1, s2, s3, x if x < e else e


@njit(inline="always", cache=True)
def _bridge_max(s0, s1, s2, s3, x0, x1, var):
    # maximum of a Brownian bridge between (0, x0) and (h, x1) with total
    # variance var = sigma^2 h; exact in law, independent of drift
    s0, s1, s2, s3, u = _uniform(s0, s1, s2, s3)
    d = x1 - x0
    m = 0.5 * (x0 + x1 + math.sqrt(d * d - 2.0 * var * math.log(u)))
    return s0, s1, s2, s3, m


@njit(cache=True, parallel=True)
def run_first_passage(seed, path_offset, n, u,
                      lam_f, drift_f, sig2_f, eps_f,
                      lam_c, drift_c, sig2_c, eps_c,
                      band, rho, alpha,
                      barrier, horizon, seg_cap,
                      ruined, crept, censored, tau, over, under, maxu):
    for i in prange(n):
        s0, s1, s2, s3 = _seed_state(seed, path_offset + i)
        x = 0.0
        xmax = 0.0
        t = 0.0
        r_flag = False
        c_flag = False
        z_flag = False
        r_tau = 0.0
        r_over = 0.0
        r_under = 0.0
        r_maxu = 0.0
        while True:
            fine = (u - x) <= band
            if fine:
                lam = lam_f
                drift = drift_f
                sig2 = sig2_f
                eps = eps_f
            else:
                lam = lam_c
                drift = drift_c
                sig2 = sig2_c
                eps = eps_c
            s0, s1, s2, s3, uw = _uniform(s0, s1, s2, s3)
            w = -math.log(uw) / lam
            jump_due = True
            if w > seg_cap:
                w = seg_cap
                jump_due = False
            if t + w > horizon:
                w = horizon - t
                jump_due = False
            # diffusion segment of length w
            if sig2 > 0.0 and w > 0.0:
                s0, s1, s2, s3, z = _normal(s0, s1, s2, s3)
                xe = x + drift * w + math.sqrt(sig2 * w) * z
                s0, s1, s2, s3, m = _bridge_max(s0, s1, s2, s3, x, xe, sig2 * w)
            else:
                xe = x + drift * w
                m = x if x > xe else xe
            if m > u:
                # continuous crossing: creep, all three ruin gaps are zero
                r_flag = True
                c_flag = True
                frac = 1.0
                if m > x:
                    frac = (u - x) / (m - x)
                r_tau = t + w * frac
                break
            if m > xmax:
                xmax = m
            x = xe
            t += w
            if jump_due:
                s0, s1, s2, s3, j = _sample_jump(s0, s1, s2, s3, eps, rho, alpha)
                if x + j > u:
                    r_flag = True
                    r_tau = t
                    r_over = x + j - u
                    r_under = u - x
                    r_maxu = u - xmax
                    break
                x += j
                if x > xmax:
                    xmax = x
            if x < -barrier:
                break
            if t >= horizon:
                z_flag = True
                break
        ruined[i] = r_flag
        crept[i] = c_flag
        censored[i] = z_flag
        tau[i] = r_tau
        over[i] = r_over
        under[i] = r_under
        maxu[i] = r_maxu


@njit(cache=True, parallel=True)
def run_terminal_value(seed, path_offset, n, t_end,
                       lam, drift, sig2, eps, rho, alpha, out):
    """X_{t_end} per path under the same jump-diffusion scheme (no barrier)."""
    for i in prange(n):
        s0, s1, s2, s3 = _seed_state(seed, path_offset + i)
        x = 0.0
        t = 0.0
        while t < t_end:
            s0, s1, s2, s3, uw = _uniform(s0, s1, s2, s3)
            w = -math.log(uw) / lam
            jump_due = True
            if t + w > t_end:
                w = t_end - t
                jump_due = False
            if sig2 > 0.0 and w > 0.0:
                s0, s1, s2, s3, z = _normal(s0, s1, s2, s3)
                x += drift * w + math.sqrt(sig2 * w) * z
            else:
                x += drift * w
            t += w
            if jump_due:
                s0, s1, s2, s3, j = _sample_jump(s0, s1, s2, s3, eps, rho, alpha)
                x += j
        out[i] = x


@njit(cache=True)
def sample_jumps(seed, n, eps, rho, alpha, out):
    """n tail-jump sizes from one stream (for the sampler's own tests)."""
    s0, s1, s2, s3 = _seed_state(seed, 0)
    for i in range(n):
        s0, s1, s2, s3, j = _sample_jump(s0, s1, s2, s3, eps, rho, alpha)
        out[i] = j
