"""Compiled sequential-impulse contact solver (numba).

Velocity pass with accumulated clamped impulses (normal + two friction
directions, restitution with a threshold), then a split-impulse position
pass (linearized non-penetration correction applied to pseudo-displacements
so resting bodies keep near-zero true velocities and can be declared
settled).  Contacts are iterated in the caller's fixed order; the solver is
single-threaded for determinism.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _cross(ax, ay, az, bx, by, bz):
    return ay * bz - az * by, az * bx - ax * bz, ax * by - ay * bx


@njit(cache=True, inline="always")
def _apply_inertia(inv_i, x, y, z):
    return (inv_i[0, 0] * x + inv_i[0, 1] * y + inv_i[0, 2] * z,
            inv_i[1, 0] * x + inv_i[1, 1] * y + inv_i[1, 2] * z,
            inv_i[2, 0] * x + inv_i[2, 1] * y + inv_i[2, 2] * z)


@njit(cache=True)
def solve_contacts(pos, vel, omega, inv_mass, inv_inertia,
                   ca, cb, cpoint, cnormal, cdepth,
                   dt, restitution, rest_threshold, friction, slop, baumgarte,
                   vel_iters, pos_iters, dpos, dtheta):
    """Mutates vel/omega (velocity pass) and dpos/dtheta (position pass).

    Static anchors use the extra body slot with zero inverse mass/inertia.
    """
    n_c = ca.shape[0]
    if n_c == 0:
        return

    # per-contact precomputation
    rax = np.empty(n_c); ray = np.empty(n_c); raz = np.empty(n_c)
    rbx = np.empty(n_c); rby = np.empty(n_c); rbz = np.empty(n_c)
    t1 = np.empty((n_c, 3)); t2 = np.empty((n_c, 3))
    mn = np.empty(n_c); mt1 = np.empty(n_c); mt2 = np.empty(n_c)
    bounce = np.empty(n_c)
    acc_n = np.zeros(n_c); acc_t1 = np.zeros(n_c); acc_t2 = np.zeros(n_c)

    for c in range(n_c):
        a = ca[c]
        b = cb[c]
        nx, ny, nz = cnormal[c, 0], cnormal[c, 1], cnormal[c, 2]
        rax[c] = cpoint[c, 0] - pos[a, 0]
        ray[c] = cpoint[c, 1] - pos[a, 1]
        raz[c] = cpoint[c, 2] - pos[a, 2]
        rbx[c] = cpoint[c, 0] - pos[b, 0]
        rby[c] = cpoint[c, 1] - pos[b, 1]
        rbz[c] = cpoint[c, 2] - pos[b, 2]

        # deterministic tangent basis: cross the normal with the axis of its
        # smallest component
        axn = abs(nx); ayn = abs(ny); azn = abs(nz)
        if axn <= ayn and axn <= azn:
            hx, hy, hz = 1.0, 0.0, 0.0
        elif ayn <= azn:
            hx, hy, hz = 0.0, 1.0, 0.0
        else:
            hx, hy, hz = 0.0, 0.0, 1.0
        ux, uy, uz = _cross(nx, ny, nz, hx, hy, hz)
        ul = np.sqrt(ux * ux + uy * uy + uz * uz)
        ux /= ul; uy /= ul; uz /= ul
        vx, vy, vz = _cross(nx, ny, nz, ux, uy, uz)
        t1[c, 0], t1[c, 1], t1[c, 2] = ux, uy, uz
        t2[c, 0], t2[c, 1], t2[c, 2] = vx, vy, vz

        def _k(dx, dy, dz):
            # effective mass denominator along direction d (closure-free numba)
            return 0.0

        # normal effective mass
        cx, cy, cz = _cross(rax[c], ray[c], raz[c], nx, ny, nz)
        iax, iay, iaz = _apply_inertia(inv_inertia[a], cx, cy, cz)
        gx, gy, gz = _cross(iax, iay, iaz, rax[c], ray[c], raz[c])
        cx2, cy2, cz2 = _cross(rbx[c], rby[c], rbz[c], nx, ny, nz)
        ibx, iby, ibz = _apply_inertia(inv_inertia[b], cx2, cy2, cz2)
        hx2, hy2, hz2 = _cross(ibx, iby, ibz, rbx[c], rby[c], rbz[c])
        kn = (inv_mass[a] + inv_mass[b]
              + nx * (gx + hx2) + ny * (gy + hy2) + nz * (gz + hz2))
        mn[c] = 1.0 / kn if kn > 0 else 0.0

        for which in range(2):
            tx = t1[c, 0] if which == 0 else t2[c, 0]
            ty = t1[c, 1] if which == 0 else t2[c, 1]
            tz = t1[c, 2] if which == 0 else t2[c, 2]
            cx, cy, cz = _cross(rax[c], ray[c], raz[c], tx, ty, tz)
            iax, iay, iaz = _apply_inertia(inv_inertia[a], cx, cy, cz)
            gx, gy, gz = _cross(iax, iay, iaz, rax[c], ray[c], raz[c])
            cx2, cy2, cz2 = _cross(rbx[c], rby[c], rbz[c], tx, ty, tz)
            ibx, iby, ibz = _apply_inertia(inv_inertia[b], cx2, cy2, cz2)
            hx2, hy2, hz2 = _cross(ibx, iby, ibz, rbx[c], rby[c], rbz[c])
            kt = (inv_mass[a] + inv_mass[b]
                  + tx * (gx + hx2) + ty * (gy + hy2) + tz * (gz + hz2))
            if which == 0:
                mt1[c] = 1.0 / kt if kt > 0 else 0.0
            else:
                mt2[c] = 1.0 / kt if kt > 0 else 0.0

        # restitution from pre-solve approach speed
        vnx = (vel[b, 0] + omega[b, 1] * rbz[c] - omega[b, 2] * rby[c]
               - vel[a, 0] - (omega[a, 1] * raz[c] - omega[a, 2] * ray[c]))
        vny = (vel[b, 1] + omega[b, 2] * rbx[c] - omega[b, 0] * rbz[c]
               - vel[a, 1] - (omega[a, 2] * rax[c] - omega[a, 0] * raz[c]))
        vnz = (vel[b, 2] + omega[b, 0] * rby[c] - omega[b, 1] * rbx[c]
               - vel[a, 2] - (omega[a, 0] * ray[c] - omega[a, 1] * rax[c]))
        vn0 = vnx * nx + vny * ny + vnz * nz
        bounce[c] = restitution * (-vn0) if -vn0 > rest_threshold else 0.0

    # velocity iterations
    for _ in range(vel_iters):
        for c in range(n_c):
            a = ca[c]
            b = cb[c]
            nx, ny, nz = cnormal[c, 0], cnormal[c, 1], cnormal[c, 2]

            # relative velocity at contact
            wax, way, waz = omega[a, 0], omega[a, 1], omega[a, 2]
            wbx, wby, wbz = omega[b, 0], omega[b, 1], omega[b, 2]
            cax, cay, caz = _cross(wax, way, waz, rax[c], ray[c], raz[c])
            cbx, cby, cbz = _cross(wbx, wby, wbz, rbx[c], rby[c], rbz[c])
            rvx = vel[b, 0] + cbx - vel[a, 0] - cax
            rvy = vel[b, 1] + cby - vel[a, 1] - cay
            rvz = vel[b, 2] + cbz - vel[a, 2] - caz

            vn = rvx * nx + rvy * ny + rvz * nz
            dl = mn[c] * (bounce[c] - vn)
            new_acc = acc_n[c] + dl
            if new_acc < 0.0:
                new_acc = 0.0
            dl = new_acc - acc_n[c]
            acc_n[c] = new_acc
            px, py, pz = dl * nx, dl * ny, dl * nz
            vel[a, 0] -= inv_mass[a] * px; vel[a, 1] -= inv_mass[a] * py; vel[a, 2] -= inv_mass[a] * pz
            cx, cy, cz = _cross(rax[c], ray[c], raz[c], px, py, pz)
            ix, iy, iz = _apply_inertia(inv_inertia[a], cx, cy, cz)
            omega[a, 0] -= ix; omega[a, 1] -= iy; omega[a, 2] -= iz
            vel[b, 0] += inv_mass[b] * px; vel[b, 1] += inv_mass[b] * py; vel[b, 2] += inv_mass[b] * pz
            cx, cy, cz = _cross(rbx[c], rby[c], rbz[c], px, py, pz)
            ix, iy, iz = _apply_inertia(inv_inertia[b], cx, cy, cz)
            omega[b, 0] += ix; omega[b, 1] += iy; omega[b, 2] += iz

            # friction along both tangents
            max_f = friction * acc_n[c]
            for which in range(2):
                tx = t1[c, 0] if which == 0 else t2[c, 0]
                ty = t1[c, 1] if which == 0 else t2[c, 1]
                tz = t1[c, 2] if which == 0 else t2[c, 2]
                wax, way, waz = omega[a, 0], omega[a, 1], omega[a, 2]
                wbx, wby, wbz = omega[b, 0], omega[b, 1], omega[b, 2]
                cax, cay, caz = _cross(wax, way, waz, rax[c], ray[c], raz[c])
                cbx, cby, cbz = _cross(wbx, wby, wbz, rbx[c], rby[c], rbz[c])
                rvx = vel[b, 0] + cbx - vel[a, 0] - cax
                rvy = vel[b, 1] + cby - vel[a, 1] - cay
                rvz = vel[b, 2] + cbz - vel[a, 2] - caz
                vt = rvx * tx + rvy * ty + rvz * tz
                mt = mt1[c] if which == 0 else mt2[c]
                dlt = -mt * vt
                acc = acc_t1[c] if which == 0 else acc_t2[c]
                new_acc = acc + dlt
                if new_acc > max_f:
                    new_acc = max_f
                elif new_acc < -max_f:
                    new_acc = -max_f
                dlt = new_acc - acc
                if which == 0:
                    acc_t1[c] = new_acc
                else:
                    acc_t2[c] = new_acc
                px, py, pz = dlt * tx, dlt * ty, dlt * tz
                vel[a, 0] -= inv_mass[a] * px; vel[a, 1] -= inv_mass[a] * py; vel[a, 2] -= inv_mass[a] * pz
                cx, cy, cz = _cross(rax[c], ray[c], raz[c], px, py, pz)
                ix, iy, iz = _apply_inertia(inv_inertia[a], cx, cy, cz)
                omega[a, 0] -= ix; omega[a, 1] -= iy; omega[a, 2] -= iz
                vel[b, 0] += inv_mass[b] * px; vel[b, 1] += inv_mass[b] * py; vel[b, 2] += inv_mass[b] * pz
                cx, cy, cz = _cross(rbx[c], rby[c], rbz[c], px, py, pz)
                ix, iy, iz = _apply_inertia(inv_inertia[b], cx, cy, cz)
                omega[b, 0] += ix; omega[b, 1] += iy; omega[b, 2] += iz

    # position (split-impulse) iterations over pseudo-displacements
    for _ in range(pos_iters):
        for c in range(n_c):
            a = ca[c]
            b = cb[c]
            nx, ny, nz = cnormal[c, 0], cnormal[c, 1], cnormal[c, 2]
            tax, tay, taz = _cross(dtheta[a, 0], dtheta[a, 1], dtheta[a, 2],
                                   rax[c], ray[c], raz[c])
            tbx, tby, tbz = _cross(dtheta[b, 0], dtheta[b, 1], dtheta[b, 2],
                                   rbx[c], rby[c], rbz[c])
            moved = ((dpos[b, 0] + tbx - dpos[a, 0] - tax) * nx
                     + (dpos[b, 1] + tby - dpos[a, 1] - tay) * ny
                     + (dpos[b, 2] + tbz - dpos[a, 2] - taz) * nz)
            err = (cdepth[c] - moved) - slop
            if err <= 0.0:
                continue
            lam = baumgarte * err * mn[c]
            px, py, pz = lam * nx, lam * ny, lam * nz
            dpos[a, 0] -= inv_mass[a] * px; dpos[a, 1] -= inv_mass[a] * py; dpos[a, 2] -= inv_mass[a] * pz
            cx, cy, cz = _cross(rax[c], ray[c], raz[c], px, py, pz)
            ix, iy, iz = _apply_inertia(inv_inertia[a], cx, cy, cz)
            dtheta[a, 0] -= ix; dtheta[a, 1] -= iy; dtheta[a, 2] -= iz
            dpos[b, 0] += inv_mass[b] * px; dpos[b, 1] += inv_mass[b] * py; dpos[b, 2] += inv_mass[b] * pz
            cx, cy, cz = _cross(rbx[c], rby[c], rbz[c], px, py, pz)
            ix, iy, iz = _apply_inertia(inv_inertia[b], cx, cy, cz)
            dtheta[b, 0] += ix; dtheta[b, 1] += iy; dtheta[b, 2] += iz
