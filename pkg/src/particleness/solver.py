"""Primal-dual interior-point solver for tiny conic programs.

Solves
    minimize    <C, X> + c_l . x_l
    subject to  <A_m, X> + (A_l x_l)_m = b_m,   m = 1..M
                X in (PSD Hermitian)^nb,  x_l >= 0

where X is a stack of `nb` Hermitian d x d blocks.  The cone sizes here are
single digits, so everything is dense and batched over the Hermitian blocks.
The method is the standard infeasible-start Mehrotra predictor-corrector
with Nesterov-Todd scaling; the returned complementarity gap <x, s> is the
solution certificate.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import SolverNotConvergedError
from .linalg import adjoint

_SQRT2 = np.sqrt(2.0)


@functools.lru_cache(maxsize=None)
def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal basis of d x d Hermitian matrices under <A,B> = Tr(AB).

    Layout: d diagonal units, then real and imaginary off-diagonal pairs in
    row-major upper-triangle order.  Shape (d*d, d, d), read-only.
    """
    basis = np.zeros((d * d, d, d), dtype=complex)
    for i in range(d):
        basis[i, i, i] = 1.0
    k = d
    iu, ju = np.triu_indices(d, k=1)
    for i, j in zip(iu, ju):
        basis[k, i, j] = 1 / _SQRT2
        basis[k, j, i] = 1 / _SQRT2
        k += 1
    for i, j in zip(iu, ju):
        basis[k, i, j] = 1j / _SQRT2
        basis[k, j, i] = -1j / _SQRT2
        k += 1
    basis.flags.writeable = False
    return basis


def svec(m: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix in `hermitian_basis` order."""
    d = m.shape[-1]
    return np.real(np.einsum("kij,...ji->...k", hermitian_basis(d), m))


def smat(v: np.ndarray, d: int) -> np.ndarray:
    """Inverse of `svec`."""
    return np.einsum("...k,kij->...ij", v, hermitian_basis(d))


@dataclass
class ConicProgram:
    """Problem data; `a_herm` has shape (m, nb, d, d), `a_lin` (m, k)."""

    a_herm: np.ndarray
    a_lin: np.ndarray
    b: np.ndarray
    c_herm: np.ndarray
    c_lin: np.ndarray

    @property
    def m(self) -> int:
        return self.b.shape[0]

    @property
    def nb(self) -> int:
        return self.a_herm.shape[1]

    @property
    def d(self) -> int:
        return self.a_herm.shape[2]

    @property
    def k(self) -> int:
        return self.a_lin.shape[1]


@dataclass
class ConicResult:
    x_herm: np.ndarray
    x_lin: np.ndarray
    y: np.ndarray
    pobj: float
    dobj: float
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int
    converged: bool


def _herm(m: np.ndarray) -> np.ndarray:
    return (m + adjoint(m)) / 2


def _eig_apply(w: np.ndarray, v: np.ndarray, f) -> np.ndarray:
    """v diag(f(w)) v† for batched eigendecompositions."""
    return _herm(np.einsum("...ik,...k,...jk->...ij", v, f(w), np.conj(v)))


def _min_step_eig(vm12: np.ndarray, delta: np.ndarray) -> float:
    """Smallest eigenvalue of Vm12 . delta . Vm12 across the block stack."""
    m = _herm(vm12 @ delta @ vm12)
    if not np.all(np.isfinite(m)):
        return -np.inf
    return float(np.min(np.linalg.eigvalsh(m)))


def _max_step(vm12, delta_hat, vl, delta_l) -> float:
    """Largest alpha keeping V + alpha*delta in the cone (both block kinds)."""
    alpha = np.inf
    if vm12 is not None and vm12.size:
        lam = _min_step_eig(vm12, delta_hat)
        if lam == -np.inf:
            return 0.0
        if lam < 0:
            alpha = min(alpha, -1.0 / lam)
    if vl is not None and delta_l.size:
        neg = delta_l < 0
        if np.any(neg):
            alpha = min(alpha, float(np.min(-vl[neg] / delta_l[neg])))
    return alpha


def _solve_schur(schur: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve the (possibly ill-conditioned) Schur system with refinement."""
    n = schur.shape[0]
    scale = float(np.mean(np.abs(np.diag(schur)))) or 1.0
    for jitter in (0.0, 1e-14, 1e-11, 1e-8):
        a = schur + (jitter * scale) * np.eye(n) if jitter else schur
        try:
            dy = np.linalg.solve(a, rhs)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(dy)):
            dy = dy + np.linalg.solve(a, rhs - schur @ dy)
            if np.all(np.isfinite(dy)):
                return dy
    try:
        return np.linalg.lstsq(schur, rhs, rcond=None)[0]
    except np.linalg.LinAlgError:
        return np.full_like(rhs, np.nan)  # caught by the finiteness stall check


# Non-finite intermediates are detected explicitly and handled as stalls.
@np.errstate(over="ignore", invalid="ignore", divide="ignore")
def solve_conic(
    prog: ConicProgram,
    gap_tol: float = 1e-9,
    feas_tol: float = 1e-8,
    max_iter: int = 100,
    accept_gap: float = 1e-8,
) -> ConicResult:
    """Run the predictor-corrector loop until the gap certificate is met.

    A stalled run (no further float64 progress possible) is still accepted
    when its best iterate certifies a gap within `accept_gap`; otherwise
    SolverNotConvergedError carries the best iterate and its gap.
    """
    ah, al, b = prog.a_herm, prog.a_lin, prog.b
    ch, cl = prog.c_herm, prog.c_lin
    m, nb, d, k = prog.m, prog.nb, prog.d, prog.k
    nu = nb * d + k

    eye = np.broadcast_to(np.eye(d, dtype=complex), (nb, d, d)).copy()
    xs, ss = eye.copy(), eye.copy()
    xl, sl = np.ones(k), np.ones(k)
    y = np.zeros(m)

    def apply_a(xh, xlin):
        out = np.real(np.einsum("mbij,bji->m", ah, xh))
        if k:
            out = out + al @ xlin
        return out

    def apply_at(vec):
        return np.einsum("m,mbij->bij", vec, ah), (al.T @ vec if k else np.zeros(0))

    b_scale = 1.0 + float(np.max(np.abs(b))) if m else 1.0
    c_scale = 1.0 + max(
        float(np.max(np.abs(ch))) if ch.size else 0.0,
        float(np.max(np.abs(cl))) if cl.size else 0.0,
    )

    best = None
    for it in range(1, max_iter + 1):
        r_p = apply_a(xs, xl) - b
        at_y, at_y_l = apply_at(y)
        rd_h = at_y + ss - ch
        rd_l = at_y_l + sl - cl
        gap = float(np.real(np.einsum("bij,bji->", xs, ss))) + float(xl @ sl)
        mu = gap / nu
        pobj = float(np.real(np.einsum("bij,bji->", ch, xs))) + float(cl @ xl)
        dobj = float(b @ y)
        pres = float(np.max(np.abs(r_p))) if m else 0.0
        dres = max(
            float(np.max(np.abs(rd_h))) if rd_h.size else 0.0,
            float(np.max(np.abs(rd_l))) if rd_l.size else 0.0,
        )
        cert_gap = max(gap, abs(pobj - dobj))
        state = ConicResult(
            x_herm=xs.copy(), x_lin=xl.copy(), y=y.copy(),
            pobj=pobj, dobj=dobj, gap=cert_gap,
            primal_residual=pres, dual_residual=dres,
            iterations=it - 1, converged=False,
        )
        if best is None or cert_gap + pres + dres < best.gap + best.primal_residual + best.dual_residual:
            best = state
        if pres <= feas_tol * b_scale and dres <= feas_tol * c_scale and cert_gap <= gap_tol:
            state.converged = True
            return state

        # Nesterov-Todd scaling per Hermitian block: W s W = x, R = W^{1/2}.
        try:
            wx, vx = np.linalg.eigh(_herm(xs))
            wx = np.maximum(wx, 1e-100)
            x_half = _eig_apply(wx, vx, np.sqrt)
            t = _herm(x_half @ ss @ x_half)
            wt, vt = np.linalg.eigh(t)
            wt = np.maximum(wt, 1e-100)
            t_m12 = _eig_apply(wt, vt, lambda u: 1.0 / np.sqrt(u))
            w_nt = _herm(x_half @ t_m12 @ x_half)
            ww, vw = np.linalg.eigh(w_nt)
            ww = np.maximum(ww, 1e-100)
            r_nt = _eig_apply(ww, vw, np.sqrt)
            r_inv = _eig_apply(ww, vw, lambda u: 1.0 / np.sqrt(u))
            v_pt = _herm(r_nt @ ss @ r_nt)
            lam, u_v = np.linalg.eigh(v_pt)
            lam = np.maximum(lam, 1e-100)
            v_m12 = _eig_apply(lam, u_v, lambda u: 1.0 / np.sqrt(u))
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(w_nt)) or not np.all(np.isfinite(v_m12)):
            break
        # Linear block scaling.
        wl = np.sqrt(xl / sl) if k else np.zeros(0)
        vl = np.sqrt(xl * sl) if k else np.zeros(0)

        # Schur complement A W^2 A^T, shared by both solves this iteration.
        a_w = _herm(np.einsum("bac,mbcd,bde->mbae", w_nt, ah, w_nt))
        schur = np.real(np.einsum("mbij,nbji->mn", a_w, ah))
        if k:
            schur += (al * (wl * wl)) @ al.T

        lam_sum = lam[:, :, None] + lam[:, None, :]

        def solve_lv(dh, dl):
            """Solve V o Z = D in the Jordan frame of V."""
            dt = np.einsum("bki,bkl,blj->bij", np.conj(u_v), dh, u_v)
            z = 2.0 * dt / lam_sum
            g_h = _herm(np.einsum("bik,bkl,bjl->bij", u_v, z, np.conj(u_v)))
            g_l = dl / vl if k else np.zeros(0)
            return g_h, g_l

        def solve_kkt(bp, bd_h, bd_l, g_h, g_l):
            rgr = _herm(r_nt @ g_h @ r_nt)
            rhs = bp - np.real(np.einsum("mbij,bji->m", ah, rgr))
            rhs += np.real(np.einsum("mbij,bji->m", a_w, bd_h))
            if k:
                rhs += al @ (wl * wl * bd_l) - al @ (wl * g_l)
            dy = _solve_schur(schur, rhs)
            at_dy, at_dy_l = apply_at(dy)
            ds_h = bd_h - at_dy
            ds_l = bd_l - at_dy_l if k else np.zeros(0)
            dx_h = rgr - _herm(w_nt @ ds_h @ w_nt)
            dx_l = wl * g_l - wl * wl * ds_l if k else np.zeros(0)
            return dx_h, dx_l, dy, ds_h, ds_l

        def finite(*arrays):
            return all(np.all(np.isfinite(a)) for a in arrays if a.size)

        # Predictor (affine scaling) direction.
        d_aff_h = -(v_pt @ v_pt)
        d_aff_l = -(vl * vl)
        g_h, g_l = solve_lv(_herm(d_aff_h), d_aff_l)
        dx_h, dx_l, dy, ds_h, ds_l = solve_kkt(-r_p, -rd_h, -rd_l, g_h, g_l)
        if not finite(dx_h, dx_l, dy, ds_h, ds_l):
            break

        dx_hat = _herm(r_inv @ dx_h @ r_inv)
        ds_hat = _herm(r_nt @ ds_h @ r_nt)
        dx_hat_l = dx_l / wl if k else np.zeros(0)
        ds_hat_l = wl * ds_l if k else np.zeros(0)

        a_x = _max_step(v_m12, dx_hat, vl, dx_hat_l)
        a_s = _max_step(v_m12, ds_hat, vl, ds_hat_l)
        alpha_aff = min(1.0, a_x, a_s)
        gap_aff = float(
            np.real(np.einsum("bij,bji->", xs + alpha_aff * dx_h, ss + alpha_aff * ds_h))
        ) + float((xl + alpha_aff * dx_l) @ (sl + alpha_aff * ds_l))
        sigma = min(1.0, max(0.0, gap_aff / gap)) ** 3

        # Combined (centering + corrector) direction.
        ident = np.broadcast_to(np.eye(d, dtype=complex), (nb, d, d))
        cross = _herm(dx_hat @ ds_hat)
        d_comb_h = sigma * mu * ident - v_pt @ v_pt - cross
        d_comb_l = sigma * mu - vl * vl - dx_hat_l * ds_hat_l
        g_h, g_l = solve_lv(_herm(d_comb_h), d_comb_l)
        dx_h, dx_l, dy, ds_h, ds_l = solve_kkt(-r_p, -rd_h, -rd_l, g_h, g_l)
        if not finite(dx_h, dx_l, dy, ds_h, ds_l):
            break

        dx_hat = _herm(r_inv @ dx_h @ r_inv)
        ds_hat = _herm(r_nt @ ds_h @ r_nt)
        dx_hat_l = dx_l / wl if k else np.zeros(0)
        ds_hat_l = wl * ds_l if k else np.zeros(0)
        a_x = _max_step(v_m12, dx_hat, vl, dx_hat_l)
        a_s = _max_step(v_m12, ds_hat, vl, ds_hat_l)
        alpha = min(1.0, 0.99 * min(a_x, a_s))
        if alpha < 1e-12:
            break

        xs = _herm(xs + alpha * dx_h)
        ss = _herm(ss + alpha * ds_h)
        xl = xl + alpha * dx_l
        sl = sl + alpha * ds_l
        y = y + alpha * dy

    if (
        best.gap <= accept_gap
        and best.primal_residual <= 10 * feas_tol * b_scale
        and best.dual_residual <= 10 * feas_tol * c_scale
    ):
        best.converged = True
        return best
    raise SolverNotConvergedError(
        f"interior-point stalled after {best.iterations} iterations "
        f"(gap {best.gap:.3e}, residuals {best.primal_residual:.1e}/{best.dual_residual:.1e})",
        best=best,
        gap=best.gap,
        iterations=best.iterations,
    )
