"""Pure-numpy radiation-mode dyad kernel (fallback backend).

Assembles Im{G^rd}(r_a, r_b, omega) as the (m, l, theta) mode sum of
outer products of transverse radiation profiles.  Bessel tables for all
orders 0..m_cut are built by two-term recurrences seeded with exact
scipy values (downward for J, upward for Y), vectorized over the theta
quadrature nodes, so the cost per node is O(m_cut) flops instead of
O(m_cut) special-function calls.

The interior index n1 may be complex.  A small positive imaginary part
(material loss) broadens the whispering-gallery resonances of the
cylinder, which otherwise appear as needle-thin peaks in theta that no
fixed quadrature can resolve at large k r_f.

Y_m(q r) overflows at high order for the near-axial nodes (q -> 0);
those (m, theta) entries describe centrifugally suppressed modes whose
true contribution is below double precision, and they are masked to
zero before assembly.

The Cython backend (_radiation_cy) implements the identical contract.
"""

import math

import numpy as np
from scipy import special as sp

BACKEND = "python"

__all__ = ["radiation_dyad", "radiation_theta_kernel", "BACKEND"]

# |Y_m| beyond this marks a centrifugally dead (m, theta) entry; the mode
# amplitude there is ~ (Y at the emitter)/(Y at the surface) with tens of
# orders of magnitude of suppression on top of the 1/|Y| normalization.
_Y_OVERFLOW = 1e280


def _j_table(m_max, x):
    """J_m(x) for m = 0..m_max, downward recurrence from exact seeds.

    Seeding at m_max directly fails for small arguments, where J_{m_max}
    underflows and the whole column would collapse to zero.  Instead each
    column is seeded at min(m_max, ceil(|x|) + margin): high enough that
    every dropped order is far below double precision, low enough that
    the seed values themselves stay representable.
    """
    ax = np.abs(x)
    out = np.zeros((m_max + 1, x.size), dtype=x.dtype)
    margin = np.maximum(12, np.ceil((60.0 * np.sqrt(ax)) ** (2.0 / 3.0)))
    m_seed = np.minimum(m_max, (np.ceil(ax) + margin).astype(int))
    cols = np.arange(x.size)
    out[m_seed, cols] = sp.jv(m_seed, x)
    if m_max == 0:
        return out
    out[m_seed - 1, cols] = sp.jv(m_seed - 1, x)
    inv_x = 1.0 / x
    for m in range(m_max - 1, 0, -1):
        upd = (m + 1) <= m_seed
        if not upd.any():
            continue
        new = (2.0 * m) * inv_x * out[m] - out[m + 1]
        out[m - 1] = np.where(upd, new, out[m - 1])
    return out


def _y_table(m_max, x):
    """Y_m(x) for m = 0..m_max (real x), upward recurrence from exact seeds.

    Overflow saturates to +-inf; callers mask via _Y_OVERFLOW.
    """
    out = np.empty((m_max + 1, x.size))
    out[0] = sp.yv(0, x)
    if m_max == 0:
        return out
    out[1] = sp.yv(1, x)
    inv_x = 1.0 / x
    with np.errstate(over="ignore", invalid="ignore"):
        for m in range(1, m_max):
            out[m + 1] = (2.0 * m) * inv_x * out[m] - out[m - 1]
    return out


def _deriv(table, x):
    """f'_m from f_{m-1} - (m/x) f_m; f'_0 = -f_1.  Shapes (M+1, n)."""
    m_max = table.shape[0] - 1
    out = np.empty_like(table)
    out[0] = -table[1] if m_max >= 1 else -sp.jv(1, x)
    if m_max >= 1:
        marr = np.arange(1, m_max + 1)[:, None]
        with np.errstate(over="ignore", invalid="ignore"):
            out[1:] = table[:-1] - marr / x * table[1:]
    return out


def _hankel_tables(m_max, x):
    """H^(1)_m and derivative for m = 0..m_max plus a validity mask."""
    j = _j_table(m_max + 1, x)
    y = _y_table(m_max + 1, x)
    with np.errstate(invalid="ignore"):
        h = j + 1j * y
        hp = _deriv(h, x)
    ok = np.isfinite(y) & (np.abs(y) < _Y_OVERFLOW)
    return h[:-1], hp[:-1], ok[:-1] & ok[1:]


def _rotation(phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _profiles(ms, beta, q, k, r, h1, h1p, c1n, c2n, d1n, d2n):
    """Signed-order exterior profile components, shape (M, 3, n).

    The integer-order parity factor H_{-m} = (-1)^m H_m multiplies every
    component linearly and cancels between the two profiles of the outer
    product, so it is omitted.  H^(2) = conj(H^(1)) (real exterior args).
    """
    h2 = np.conj(h1)
    h2p = np.conj(h1p)
    pc = c1n * h1 + c2n * h2
    pcp = c1n * h1p + c2n * h2p
    pd = d1n * h1 + d2n * h2
    pdp = d1n * h1p + d2n * h2p
    e_r = (1j * beta / q) * pcp - (ms * k / (q * q * r)) * pd
    e_phi = -(ms * beta / (q * q * r)) * pc - (1j * k / q) * pdp
    e_z = pc
    return np.stack([e_r, e_phi, e_z], axis=1)


def radiation_theta_kernel(k, n1, r_f, r_a, r_b, dphi, m_cut, nodes,
                           chunk=4096):
    """Theta-resolved mode-sum accumulant for a pair of radii.

    Returns kern with shape (3, 3, n_theta): the sum over signed orders
    ms and polarizations l of e(r_a) e*(r_b) outer products (local
    cylindrical components) with the azimuthal phase e^{i ms dphi}
    folded in.  The dyad for any axial separation dz follows by
    contracting with quadrature weights and e^{i beta(theta) dz}, so one
    kernel serves every pair of a chain sharing (r_a, r_b, dphi); see
    contract_theta_kernel.

    Node batches of `chunk` bound the working set (the Bessel tables are
    (m_cut, n_nodes) arrays).
    """
    theta = np.asarray(nodes, dtype=float)
    if theta.size > chunk:
        parts = [
            _theta_kernel_block(k, n1, r_f, r_a, r_b, dphi, m_cut,
                                theta[i:i + chunk])
            for i in range(0, theta.size, chunk)
        ]
        return np.concatenate(parts, axis=2)
    return _theta_kernel_block(k, n1, r_f, r_a, r_b, dphi, m_cut, theta)


def _theta_kernel_block(k, n1, r_f, r_a, r_b, dphi, m_cut, nodes):
    theta = np.asarray(nodes, dtype=float)
    ct = np.cos(theta)
    st = np.sin(theta)
    beta = k * ct
    q = k * st
    n1sq = complex(n1) ** 2
    kappa = k * np.sqrt(n1sq - ct * ct + 0j)
    xf = kappa * r_f
    same_radius = (r_a == r_b)

    jxf = _j_table(m_cut + 1, xf)
    jxfp = _deriv(jxf, xf)[:-1]
    jxf = jxf[:-1]
    h1f, h1fp, okf = _hankel_tables(m_cut, q * r_f)
    h1a, h1ap, oka = _hankel_tables(m_cut, q * r_a)
    if same_radius:
        h1b, h1bp, okb = h1a, h1ap, oka
    else:
        h1b, h1bp, okb = _hankel_tables(m_cut, q * r_b)
    ok = okf & oka & okb

    marr = np.arange(m_cut + 1, dtype=float)[:, None]
    h2f = np.conj(h1f)
    h2fp = np.conj(h1fp)
    # j = 1 constituents carry H^(2)(q r_f), j = 2 carry H^(1)(q r_f); the
    # interior factors (J at complex argument, n1^2) are common to both
    with np.errstate(over="ignore", invalid="ignore"):
        vb = (k * beta * (1.0 - n1sq) / (r_f * kappa**2 * q**2)) * jxf
        v1b = vb * h2f
        v2b = vb * h1f
        m1 = jxfp * h2f / kappa - jxf * h2fp / q
        m2 = jxfp * h1f / kappa - jxf * h1fp / q
        l1 = n1sq * jxfp * h2f / kappa - jxf * h2fp / q
        l2 = n1sq * jxfp * h1f / kappa - jxf * h1fp / q
    pref = 1j * math.pi * q * q * r_f / 4.0
    norm_scale = 8.0 * math.pi**2 * k * k / q**3

    kern = np.zeros((3, 3, theta.size), dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for sgn in (1, -1):
            rows = slice(0, m_cut + 1) if sgn == 1 else slice(1, m_cut + 1)
            ms = sgn * marr[rows]
            phase_m = np.exp(1j * ms * dphi)
            v1 = ms * v1b[rows]
            v2 = ms * v2b[rows]
            absv2 = np.abs(v1) ** 2
            eta = np.sqrt((absv2 + np.abs(l1[rows]) ** 2)
                          / (absv2 + np.abs(m1[rows]) ** 2))
            for l in (-1, 1):
                c1 = -pref * (l1[rows] - l * eta * v1)
                c2 = pref * (l2[rows] - l * eta * v2)
                d1 = pref * 1j * (v1 - l * eta * m1[rows])
                d2 = -pref * 1j * (v2 - l * eta * m2[rows])
                amp = 1.0 / np.sqrt(norm_scale * (
                    np.abs(c1) ** 2 + np.abs(c2) ** 2
                    + np.abs(d1) ** 2 + np.abs(d2) ** 2))
                ea = _profiles(ms, beta, q, k, r_a, h1a[rows], h1ap[rows],
                               amp * c1, amp * c2, amp * d1, amp * d2)
                if same_radius:
                    eb = ea
                else:
                    eb = _profiles(ms, beta, q, k, r_b, h1b[rows], h1bp[rows],
                                   amp * c1, amp * c2, amp * d1, amp * d2)
                # overflow chains (Y blowup of centrifugally dead modes)
                # surface as non-finite profile entries; zero them out
                bad = ~ok[rows] | ~np.isfinite(ea).all(axis=1) \
                    | ~np.isfinite(eb).all(axis=1)
                if bad.any():
                    ea = np.where(bad[:, None, :], 0.0, ea)
                    if same_radius:
                        eb = ea
                    else:
                        eb = np.where(bad[:, None, :], 0.0, eb)
                kern += np.einsum("mt,mit,mjt->ijt", phase_m, ea,
                                  np.conj(eb))
    return kern


def radiation_dyad(k, n1, r_f, r_a, phi_a, z_a, r_b, phi_b, z_b,
                   m_cut, nodes, weights):
    """Im{G^rd} dyad (Cartesian, 3x3 complex) for one frequency and pair.

    nodes/weights: quadrature rule on theta in (0, pi), endpoints excluded.
    The sum runs over m in [-m_cut, m_cut] and l = +-1.
    """
    kern = radiation_theta_kernel(k, n1, r_f, r_a, r_b, phi_a - phi_b,
                                  m_cut, nodes)
    return contract_theta_kernel(kern, k, nodes, weights, z_a - z_b,
                                 phi_a, phi_b)


def contract_theta_kernel(kern, k, nodes, weights, dz, phi_a=0.0, phi_b=0.0):
    """Contract a theta-resolved kernel with weights and the axial phase."""
    theta = np.asarray(nodes, dtype=float)
    w = np.asarray(weights, dtype=float)
    beta = k * np.cos(theta)
    acc = kern @ (w * np.exp(1j * beta * dz))
    rot_a = _rotation(phi_a)
    rot_b = _rotation(phi_b)
    return (math.pi / 2.0) * (rot_a @ acc @ rot_b.T)
