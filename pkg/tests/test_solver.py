"""Checks of the conic core against independently solvable problems."""

import numpy as np
import pytest
from scipy.optimize import linprog

from particleness.solver import ConicProgram, hermitian_basis, smat, solve_conic, svec

try:
    import cvxpy as cp

    HAVE_CVXPY = True
except ImportError:
    HAVE_CVXPY = False


def rand_hermitian(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2


def test_hermitian_basis_orthonormal():
    for d in (2, 3, 5):
        bas = hermitian_basis(d)
        gram = np.real(np.einsum("kij,lji->kl", bas, bas))
        assert np.allclose(gram, np.eye(d * d), atol=1e-14)


def test_svec_smat_round_trip():
    rng = np.random.default_rng(0)
    m = rand_hermitian(rng, 4)
    assert np.allclose(smat(svec(m), 4), m, atol=1e-14)
    # inner products preserved
    n = rand_hermitian(rng, 4)
    assert abs(svec(m) @ svec(n) - np.trace(m @ n).real) < 1e-12


def test_minimum_eigenvalue_problem():
    # min <C,X> s.t. tr X = 1, X psd  ->  lambda_min(C)
    rng = np.random.default_rng(1)
    for d in (2, 3, 6):
        c = rand_hermitian(rng, d)
        ah = np.zeros((1, 1, d, d), dtype=complex)
        ah[0, 0] = np.eye(d)
        prog = ConicProgram(
            a_herm=ah, a_lin=np.zeros((1, 0)), b=np.array([1.0]),
            c_herm=c[None], c_lin=np.zeros(0),
        )
        res = solve_conic(prog)
        assert res.converged
        assert res.gap <= 1e-8
        assert abs(res.pobj - np.linalg.eigvalsh(c)[0]) < 1e-7


def test_linear_program_block():
    # pure nonnegative-orthant problem vs scipy linprog
    rng = np.random.default_rng(2)
    m_rows, n_vars = 3, 6
    a = rng.standard_normal((m_rows, n_vars))
    x_feas = rng.random(n_vars) + 0.1
    b = a @ x_feas
    c = rng.random(n_vars)
    prog = ConicProgram(
        a_herm=np.zeros((m_rows, 0, 1, 1), dtype=complex),
        a_lin=a, b=b,
        c_herm=np.zeros((0, 1, 1), dtype=complex), c_lin=c,
    )
    res = solve_conic(prog)
    ref = linprog(c, A_eq=a, b_eq=b, bounds=[(0, None)] * n_vars, method="highs")
    assert res.converged
    assert abs(res.pobj - ref.fun) < 1e-7


def test_gap_certificate_honest():
    rng = np.random.default_rng(3)
    c = rand_hermitian(rng, 3)
    ah = np.zeros((1, 1, 3, 3), dtype=complex)
    ah[0, 0] = np.eye(3)
    prog = ConicProgram(
        a_herm=ah, a_lin=np.zeros((1, 0)), b=np.array([1.0]),
        c_herm=c[None], c_lin=np.zeros(0),
    )
    res = solve_conic(prog, gap_tol=1e-10)
    assert abs(res.pobj - res.dobj) <= res.gap + 1e-14


@pytest.mark.skipif(not HAVE_CVXPY, reason="cvxpy not installed")
def test_against_cvxpy_trace_norm_projection():
    # min ||rho - sigma||_1 over states with an energy cap, random instances
    rng = np.random.default_rng(4)
    d = 3
    h = np.diag(np.arange(float(d)))
    bas = hermitian_basis(d)
    for _ in range(5):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        if np.trace(rho @ h).real <= 1.0:
            continue
        m = d * d + 2
        ah = np.zeros((m, 3, d, d), dtype=complex)
        al = np.zeros((m, 1))
        b = np.zeros(m)
        ah[: d * d, 0] = bas
        ah[: d * d, 1] = -bas
        ah[: d * d, 2] = bas
        b[: d * d] = svec(rho)
        ah[d * d, 2] = np.eye(d)
        b[d * d] = 1.0
        ah[d * d + 1, 2] = h
        al[d * d + 1, 0] = 1.0
        b[d * d + 1] = 1.0
        eye = np.eye(d, dtype=complex)
        prog = ConicProgram(
            a_herm=ah, a_lin=al, b=b,
            c_herm=np.stack([eye, eye, np.zeros((d, d), complex)]),
            c_lin=np.zeros(1),
        )
        res = solve_conic(prog)

        sig = cp.Variable((d, d), hermitian=True)
        prob = cp.Problem(
            cp.Minimize(cp.normNuc(rho - sig)),
            [sig >> 0, cp.real(cp.trace(sig)) == 1, cp.real(cp.trace(sig @ h)) <= 1.0],
        )
        prob.solve(solver=cp.SCS, eps=1e-9)
        assert abs(res.pobj - prob.value) < 1e-6
