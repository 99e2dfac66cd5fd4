"""Fused numba kernels for the optimizer's inner loop.

The public layer functions in ``engine`` are the readable reference path;
these kernels compute the same quantities without per-layer Python overhead.
All loops run in a fixed order, so results are bitwise reproducible.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _phase(psi, energies, table):
    for z in range(psi.size):
        psi[z] *= table[energies[z]]


@njit(cache=True)
def _mixer(psi, n, c, s):
    # exp(-i beta X) = c I + s X with c = cos(beta), s = -i sin(beta)
    dim = psi.size
    for l in range(n):
        stride = 1 << l
        for base in range(0, dim, 2 * stride):
            for i in range(base, base + stride):
                a = psi[i]
                b = psi[i + stride]
                psi[i] = c * a + s * b
                psi[i + stride] = c * b + s * a


@njit(cache=True)
def _phase_table(gamma, emax):
    table = np.empty(emax + 1, dtype=np.complex128)
    for k in range(emax + 1):
        table[k] = np.exp(-1j * gamma * k)
    return table


@njit(cache=True)
def _forward(energies, n, gammas, betas):
    dim = 1 << n
    emax = energies.max()
    psi = np.full(dim, 2.0 ** (-n / 2) + 0j)
    for k in range(gammas.size):
        _phase(psi, energies, _phase_table(gammas[k], emax))
        _mixer(psi, n, np.cos(betas[k]), -1j * np.sin(betas[k]))
    return psi


@njit(cache=True)
def energy(energies, n, gammas, betas):
    psi = _forward(energies, n, gammas, betas)
    e = 0.0
    for z in range(psi.size):
        e += (psi[z].real ** 2 + psi[z].imag ** 2) * energies[z]
    return e


@njit(cache=True)
def energy_and_gradient(energies, n, gammas, betas):
    p = gammas.size
    emax = energies.max()
    psi = _forward(energies, n, gammas, betas)
    dim = psi.size
    lam = np.empty(dim, dtype=np.complex128)
    e = 0.0
    for z in range(dim):
        e += (psi[z].real ** 2 + psi[z].imag ** 2) * energies[z]
        lam[z] = energies[z] * psi[z]

    grad = np.zeros(2 * p)
    for k in range(p - 1, -1, -1):
        # d/d beta_k: 2 Im <lam| H_x |psi>, H_x commutes with the mixer
        acc = 0.0
        for z in range(dim):
            xs = 0j
            for l in range(n):
                xs += psi[z ^ (1 << l)]
            v = lam[z].conjugate() * xs
            acc += v.imag
        grad[p + k] = 2.0 * acc
        c = np.cos(betas[k])
        s = 1j * np.sin(betas[k])
        _mixer(psi, n, c, s)
        _mixer(lam, n, c, s)

        acc = 0.0
        for z in range(dim):
            v = lam[z].conjugate() * psi[z]
            acc += v.imag * energies[z]
        grad[k] = 2.0 * acc
        inv = _phase_table(-gammas[k], emax)
        _phase(psi, energies, inv)
        _phase(lam, energies, inv)
    return e, grad
