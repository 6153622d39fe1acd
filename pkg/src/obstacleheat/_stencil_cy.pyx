# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stencil kernels.

Same contract as the numpy fallback: out = alpha*u + beta*(lap(u) - lam*kill*u)
with the reflection (insulated-wall) Laplacian.  Neighbor indices are clamped
at the walls, which reproduces the ghost-cell reflection exactly.
"""

import numpy as np

cimport cython


def apply_shifted_1d(double[::1] out, double[::1] u,
                     const unsigned char[::1] kill, double lam,
                     double wx, double alpha, double beta):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, im, ip
    cdef double lap
    with nogil:
        for i in range(n):
            im = i - 1 if i > 0 else 0
            ip = i + 1 if i < n - 1 else n - 1
            lap = wx * (u[im] - 2.0 * u[i] + u[ip])
            if kill[i]:
                lap -= lam * u[i]
            out[i] = alpha * u[i] + beta * lap
    return np.asarray(out)


def apply_shifted_2d(double[:, ::1] out, double[:, ::1] u,
                     const unsigned char[:, ::1] kill, double lam,
                     double wx, double wy, double alpha, double beta):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef Py_ssize_t i, j, im, ip
    cdef double lap, uc
    with nogil:
        for i in range(nx):
            im = i - 1 if i > 0 else 0
            ip = i + 1 if i < nx - 1 else nx - 1
            # j = 0 (reflected left wall)
            uc = u[i, 0]
            lap = wx * (u[im, 0] - 2.0 * uc + u[ip, 0]) + wy * (u[i, 1 if ny > 1 else 0] - uc)
            if kill[i, 0]:
                lap -= lam * uc
            out[i, 0] = alpha * uc + beta * lap
            for j in range(1, ny - 1):
                uc = u[i, j]
                lap = (wx * (u[im, j] - 2.0 * uc + u[ip, j])
                       + wy * (u[i, j - 1] - 2.0 * uc + u[i, j + 1]))
                if kill[i, j]:
                    lap -= lam * uc
                out[i, j] = alpha * uc + beta * lap
            if ny > 1:
                uc = u[i, ny - 1]
                lap = wx * (u[im, ny - 1] - 2.0 * uc + u[ip, ny - 1]) + wy * (u[i, ny - 2] - uc)
                if kill[i, ny - 1]:
                    lap -= lam * uc
                out[i, ny - 1] = alpha * uc + beta * lap
    return np.asarray(out)


def apply_shifted_3d(double[:, :, ::1] out, double[:, :, ::1] u,
                     const unsigned char[:, :, ::1] kill, double lam,
                     double wx, double wy, double wz, double alpha, double beta):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nz = u.shape[2]
    cdef Py_ssize_t i, j, k, im, ip, jm, jp
    cdef double lap, uc
    with nogil:
        for i in range(nx):
            im = i - 1 if i > 0 else 0
            ip = i + 1 if i < nx - 1 else nx - 1
            for j in range(ny):
                jm = j - 1 if j > 0 else 0
                jp = j + 1 if j < ny - 1 else ny - 1
                # k = 0
                uc = u[i, j, 0]
                lap = (wx * (u[im, j, 0] - 2.0 * uc + u[ip, j, 0])
                       + wy * (u[i, jm, 0] - 2.0 * uc + u[i, jp, 0])
                       + wz * (u[i, j, 1 if nz > 1 else 0] - uc))
                if kill[i, j, 0]:
                    lap -= lam * uc
                out[i, j, 0] = alpha * uc + beta * lap
                for k in range(1, nz - 1):
                    uc = u[i, j, k]
                    lap = (wx * (u[im, j, k] - 2.0 * uc + u[ip, j, k])
                           + wy * (u[i, jm, k] - 2.0 * uc + u[i, jp, k])
                           + wz * (u[i, j, k - 1] - 2.0 * uc + u[i, j, k + 1]))
                    if kill[i, j, k]:
                        lap -= lam * uc
                    out[i, j, k] = alpha * uc + beta * lap
                if nz > 1:
                    uc = u[i, j, nz - 1]
                    lap = (wx * (u[im, j, nz - 1] - 2.0 * uc + u[ip, j, nz - 1])
                           + wy * (u[i, jm, nz - 1] - 2.0 * uc + u[i, jp, nz - 1])
                           + wz * (u[i, j, nz - 2] - uc))
                    if kill[i, j, nz - 1]:
                        lap -= lam * uc
                    out[i, j, nz - 1] = alpha * uc + beta * lap
    return np.asarray(out)
