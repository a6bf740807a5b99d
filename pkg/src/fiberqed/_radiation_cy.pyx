# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled radiation-mode dyad kernel (Cython backend).

Same contract and algorithm as _radiation_py: Bessel tables by two-term
recurrences seeded with exact scipy values, signed-order mode sum over
(m, l) with the azimuthal phase folded in, Y-overflow masking.  The
per-theta work runs in plain C loops instead of numpy whole-table
operations, avoiding the (m_cut x n_theta) temporaries.
"""

import math

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, cos, sin, sqrt, fabs, isfinite, M_PI
from scipy.special.cython_special cimport jv as c_jv
from scipy.special.cython_special cimport yv as c_yv

cdef extern from "<complex.h>" nogil:
    double complex csqrt(double complex)

cnp.import_array()

BACKEND = "cython"

__all__ = ["radiation_dyad", "radiation_theta_kernel", "BACKEND"]

cdef double _Y_OVERFLOW = 1e280

ctypedef double complex dcomplex


cdef inline double cabs2(dcomplex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline dcomplex cexp_i(double phi) noexcept nogil:
    return cos(phi) + 1j * sin(phi)


cdef int _seed_order(int m_max, double ax) noexcept nogil:
    cdef double margin = 12.0
    cdef double alt = ceil((60.0 * sqrt(ax)) ** (2.0 / 3.0))
    if alt > margin:
        margin = alt
    cdef int seed = <int> (ceil(ax) + margin)
    if seed > m_max:
        seed = m_max
    return seed


cdef void _j_column_complex(int m_max, dcomplex x, dcomplex * out) noexcept:
    """J_m(x), m = 0..m_max, downward recurrence with a safe seed order."""
    cdef int m, m_seed
    cdef double ax = sqrt(cabs2(x))
    cdef dcomplex inv_x = 1.0 / x
    m_seed = _seed_order(m_max, ax)
    for m in range(m_seed + 1, m_max + 1):
        out[m] = 0.0
    out[m_seed] = c_jv(m_seed, x)
    if m_max == 0:
        return
    if m_seed >= 1:
        out[m_seed - 1] = c_jv(m_seed - 1, x)
    for m in range(m_seed - 1, 0, -1):
        out[m - 1] = (2.0 * m) * inv_x * out[m] - out[m + 1]


cdef void _hankel_column(int m_max, double x, dcomplex * h,
                         int * m_ok) noexcept:
    """H^(1)_m(x) = J_m + i Y_m, m = 0..m_max; m_ok = highest valid order
    (Y overflow invalidates everything above it)."""
    cdef int m, m_seed
    cdef double inv_x = 1.0 / x
    cdef double y_prev, y_cur, y_next
    # J part: downward recurrence in a temporary walk over h[].real slots
    m_seed = _seed_order(m_max, fabs(x))
    for m in range(m_max + 1):
        h[m] = 0.0
    h[m_seed] = c_jv(<double> m_seed, x)
    if m_seed >= 1:
        h[m_seed - 1] = c_jv(<double> (m_seed - 1), x)
    for m in range(m_seed - 1, 0, -1):
        h[m - 1] = (2.0 * m) * inv_x * h[m] - h[m + 1]
    # Y part: upward recurrence, saturating at the overflow guard
    m_ok[0] = m_max
    y_prev = c_yv(0.0, x)
    y_cur = c_yv(1.0, x)
    h[0] = h[0] + 1j * y_prev
    if m_max >= 1:
        h[1] = h[1] + 1j * y_cur
    for m in range(1, m_max):
        y_next = (2.0 * m) * inv_x * y_cur - y_prev
        if not isfinite(y_next) or fabs(y_next) > _Y_OVERFLOW:
            if m + 1 <= m_ok[0]:
                m_ok[0] = m
            # keep recursing with clamped values to avoid inf*0 noise
            y_next = _Y_OVERFLOW if y_next > 0 else -_Y_OVERFLOW
        h[m + 1] = h[m + 1] + 1j * y_next
        y_prev = y_cur
        y_cur = y_next
    # orders m and m+1 both enter the derivative; drop the last good one
    if m_ok[0] < m_max:
        m_ok[0] -= 1
        if m_ok[0] < 0:
            m_ok[0] = 0


def radiation_theta_kernel(double k, object n1, double r_f, double r_a,
                           double r_b, double dphi, int m_cut,
                           object nodes, int chunk=4096):
    """Theta-resolved mode-sum accumulant, shape (3, 3, n_theta).

    Matches _radiation_py.radiation_theta_kernel; see there for the
    contraction contract (chunking is irrelevant here: memory per node
    is O(m_cut)).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] theta = \
        np.ascontiguousarray(nodes, dtype=np.float64)
    cdef Py_ssize_t nt = theta.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] kern = \
        np.zeros((3, 3, nt), dtype=np.complex128)
    cdef dcomplex n1sq = complex(n1) ** 2
    cdef bint same_radius = (r_a == r_b)

    cdef Py_ssize_t t
    cdef int m, mm, sgn, l, i, j, m_ok_f, m_ok_a, m_ok_b, m_ok, mtab
    cdef double ct, st, beta, q, qrf, qra, qrb, ms
    cdef double eta, norm_scale, amp2, amp
    cdef dcomplex kappa, xf, inv_kappa, inv_q
    cdef dcomplex vb_base, vb, v1, v2, m1, m2, l1, l2, pref
    cdef dcomplex c1, c2, d1, d2, c1n, c2n, d1n, d2n
    cdef dcomplex jm, jmp, h1f_m, h1fp_m, h2f_m, h2fp_m
    cdef dcomplex h1a_m, h1ap_m, h1b_m, h1bp_m
    cdef dcomplex pc, pcp, pd, pdp, phase
    cdef dcomplex ea0, ea1, ea2, eb0, eb1, eb2
    cdef dcomplex[3] ea
    cdef dcomplex[3] eb

    mtab = m_cut + 1  # one extra order for the derivative recurrences
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] jxf_arr = \
        np.empty(mtab + 1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] hf_arr = \
        np.empty(mtab + 1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] ha_arr = \
        np.empty(mtab + 1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] hb_arr = \
        np.empty(mtab + 1, dtype=np.complex128)
    cdef dcomplex * jxf = <dcomplex *> jxf_arr.data
    cdef dcomplex * hf = <dcomplex *> hf_arr.data
    cdef dcomplex * ha = <dcomplex *> ha_arr.data
    cdef dcomplex * hb = <dcomplex *> hb_arr.data
    cdef dcomplex * kp = <dcomplex *> kern.data

    for t in range(nt):
        ct = cos(theta[t])
        st = sin(theta[t])
        beta = k * ct
        q = k * st
        kappa = k * csqrt(n1sq - ct * ct)
        xf = kappa * r_f
        qrf = q * r_f
        qra = q * r_a
        qrb = q * r_b
        inv_kappa = 1.0 / kappa
        inv_q = 1.0 / q

        _j_column_complex(mtab, xf, jxf)
        _hankel_column(mtab, qrf, hf, &m_ok_f)
        _hankel_column(mtab, qra, ha, &m_ok_a)
        if same_radius:
            for m in range(mtab + 1):
                hb[m] = ha[m]
            m_ok_b = m_ok_a
        else:
            _hankel_column(mtab, qrb, hb, &m_ok_b)
        m_ok = m_ok_f
        if m_ok_a < m_ok:
            m_ok = m_ok_a
        if m_ok_b < m_ok:
            m_ok = m_ok_b
        if m_ok > m_cut:
            m_ok = m_cut

        vb_base = k * beta * (1.0 - n1sq) / (r_f * kappa * kappa * q * q)
        pref = 1j * M_PI * q * q * r_f / 4.0
        norm_scale = 8.0 * M_PI * M_PI * k * k / (q * q * q)

        for m in range(m_ok + 1):
            jm = jxf[m]
            # f'_m = f_{m-1} - (m/x) f_m ; f'_0 = -f_1
            if m == 0:
                jmp = -jxf[1]
                h1fp_m = -hf[1]
                h1ap_m = -ha[1]
                h1bp_m = -hb[1]
            else:
                jmp = jxf[m - 1] - m * jxf[m] / xf
                h1fp_m = hf[m - 1] - m * hf[m] / qrf
                h1ap_m = ha[m - 1] - m * ha[m] / qra
                h1bp_m = hb[m - 1] - m * hb[m] / qrb
            h1f_m = hf[m]
            h2f_m = h1f_m.conjugate()
            h2fp_m = h1fp_m.conjugate()
            h1a_m = ha[m]
            h1b_m = hb[m]

            m1 = jmp * h2f_m * inv_kappa - jm * h2fp_m * inv_q
            m2 = jmp * h1f_m * inv_kappa - jm * h1fp_m * inv_q
            l1 = n1sq * jmp * h2f_m * inv_kappa - jm * h2fp_m * inv_q
            l2 = n1sq * jmp * h1f_m * inv_kappa - jm * h1fp_m * inv_q
            vb = vb_base * jm

            for sgn in range(1, -2, -2):
                if sgn == -1 and m == 0:
                    continue
                ms = sgn * m
                v1 = ms * vb * h2f_m
                v2 = ms * vb * h1f_m
                eta = sqrt((cabs2(v1) + cabs2(l1))
                           / (cabs2(v1) + cabs2(m1)))
                phase = cexp_i(ms * dphi)
                for l in range(-1, 2, 2):
                    c1 = -pref * (l1 - l * eta * v1)
                    c2 = pref * (l2 - l * eta * v2)
                    d1 = pref * 1j * (v1 - l * eta * m1)
                    d2 = -pref * 1j * (v2 - l * eta * m2)
                    amp2 = norm_scale * (cabs2(c1) + cabs2(c2)
                                         + cabs2(d1) + cabs2(d2))
                    amp = 1.0 / sqrt(amp2)
                    c1n = amp * c1
                    c2n = amp * c2
                    d1n = amp * d1
                    d2n = amp * d2

                    pc = c1n * h1a_m + c2n * h1a_m.conjugate()
                    pcp = c1n * h1ap_m + c2n * h1ap_m.conjugate()
                    pd = d1n * h1a_m + d2n * h1a_m.conjugate()
                    pdp = d1n * h1ap_m + d2n * h1ap_m.conjugate()
                    ea[0] = (1j * beta * inv_q) * pcp \
                        - (ms * k / (q * q * r_a)) * pd
                    ea[1] = -(ms * beta / (q * q * r_a)) * pc \
                        - (1j * k * inv_q) * pdp
                    ea[2] = pc

                    pc = c1n * h1b_m + c2n * h1b_m.conjugate()
                    pcp = c1n * h1bp_m + c2n * h1bp_m.conjugate()
                    pd = d1n * h1b_m + d2n * h1b_m.conjugate()
                    pdp = d1n * h1bp_m + d2n * h1bp_m.conjugate()
                    eb[0] = (1j * beta * inv_q) * pcp \
                        - (ms * k / (q * q * r_b)) * pd
                    eb[1] = -(ms * beta / (q * q * r_b)) * pc \
                        - (1j * k * inv_q) * pdp
                    eb[2] = pc

                    if not (isfinite(ea[0].real + ea[0].imag)
                            and isfinite(ea[1].real + ea[1].imag)
                            and isfinite(ea[2].real + ea[2].imag)
                            and isfinite(eb[0].real + eb[0].imag)
                            and isfinite(eb[1].real + eb[1].imag)
                            and isfinite(eb[2].real + eb[2].imag)):
                        continue
                    for i in range(3):
                        for j in range(3):
                            kp[(i * 3 + j) * nt + t] = \
                                kp[(i * 3 + j) * nt + t] \
                                + phase * ea[i] * eb[j].conjugate()
    return kern


def radiation_dyad(double k, object n1, double r_f, double r_a,
                   double phi_a, double z_a, double r_b, double phi_b,
                   double z_b, int m_cut, object nodes, object weights):
    """Im{G^rd} dyad (Cartesian, 3x3 complex); matches _radiation_py."""
    from ._radiation_py import contract_theta_kernel
    kern = radiation_theta_kernel(k, n1, r_f, r_a, r_b, phi_a - phi_b,
                                  m_cut, nodes)
    return contract_theta_kernel(kern, k, nodes, weights, z_a - z_b,
                                 phi_a, phi_b)
