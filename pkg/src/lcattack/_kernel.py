"""Compiled RK4 segment integrator for the classical swing model."""

from __future__ import annotations

import numpy as np
from numba import njit

REACHED = 0
LEFT_BAND = 1
UFLS_STOP = 2


@njit(cache=True)
def _pe(delta, e, G, B, out):
    n = delta.shape[0]
    for i in range(n):
        acc = 0.0
        for j in range(n):
            d = delta[i] - delta[j]
            acc += e[j] * (G[i, j] * np.cos(d) + B[i, j] * np.sin(d))
        out[i] = e[i] * acc


@njit(cache=True)
def _rhs(x, n, e, G, B, two_h, damp, pm_ref, gov_k, gov_tc, governor, ws, pe, dx):
    _pe(x[:n], e, G, B, pe)
    for i in range(n):
        dev = x[n + i] - ws
        dx[i] = dev
        dx[n + i] = ws * (x[2 * n + i] - pe[i] - damp[i] * dev / ws) / two_h[i]
        if governor:
            dx[2 * n + i] = (pm_ref[i] - x[2 * n + i] - gov_k[i] * dev / ws) / gov_tc
        else:
            dx[2 * n + i] = 0.0


@njit(cache=True)
def integrate_segment(x, k0, k1, dt, e, G, B, two_h, damp, pm_ref, gov_k, gov_tc, governor,
                      ws, hw, lo, hi, stop_f, delta_out, omega_out, pe_out, pm_out):
    """Record samples k0..k1 and step between them; ``x`` is updated in place.

    State layout is ``[delta(n), omega(n), pm(n)]``. Returns ``(k, status)``:
    ``REACHED`` at ``k1`` without stepping past it, ``LEFT_BAND`` when a speed
    leaves ``lo..hi`` at sample ``k``, ``UFLS_STOP`` when the centre-of-inertia
    frequency (Hz) falls to ``stop_f`` at a sample after ``k0``.
    """
    n = e.shape[0]
    m = x.shape[0]
    pe = np.empty(n)
    k1v = np.empty(m)
    k2v = np.empty(m)
    k3v = np.empty(m)
    k4v = np.empty(m)
    tmp = np.empty(m)
    two_pi = 2.0 * np.pi
    k = k0
    while True:
        _pe(x[:n], e, G, B, pe)
        out_of_band = False
        f = 0.0
        for i in range(n):
            delta_out[k, i] = x[i]
            omega_out[k, i] = x[n + i]
            pe_out[k, i] = pe[i]
            pm_out[k, i] = x[2 * n + i]
            if x[n + i] < lo or x[n + i] > hi:
                out_of_band = True
            f += hw[i] * x[n + i]
        if out_of_band:
            return k, LEFT_BAND
        if k == k1:
            return k, REACHED
        if k > k0 and f / two_pi <= stop_f:
            return k, UFLS_STOP
        _rhs(x, n, e, G, B, two_h, damp, pm_ref, gov_k, gov_tc, governor, ws, pe, k1v)
        for i in range(m):
            tmp[i] = x[i] + 0.5 * dt * k1v[i]
        _rhs(tmp, n, e, G, B, two_h, damp, pm_ref, gov_k, gov_tc, governor, ws, pe, k2v)
        for i in range(m):
            tmp[i] = x[i] + 0.5 * dt * k2v[i]
        _rhs(tmp, n, e, G, B, two_h, damp, pm_ref, gov_k, gov_tc, governor, ws, pe, k3v)
        for i in range(m):
            tmp[i] = x[i] + dt * k3v[i]
        _rhs(tmp, n, e, G, B, two_h, damp, pm_ref, gov_k, gov_tc, governor, ws, pe, k4v)
        for i in range(m):
            x[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i])
        k += 1
