"""Conditional min-entropy by a primal log-det barrier method.

The primal problem is ``min Tr(sigma) s.t. I_R ⊗ sigma >= rho`` over Hermitian
``sigma`` on B; its value is ``2^(-Hmin(R|B))``. The dual is
``max Tr(rho Y) s.t. Y >= 0, Tr_R Y = I_B``, and an optimal ``Y`` is the Choi
matrix of the adjoint of an optimal decoder B -> R.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .quantum_core import (
    Channel, DensityOperator, channel_from_choi, dag, maximally_entangled_ket, singlet_fraction,
)

log = logging.getLogger(__name__)

MAX_DIM = 64
MAX_ITER = 500
MU_FACTOR = 0.2


@dataclass
class SdpSolution:
    sigma: np.ndarray
    y: np.ndarray
    primal_value: float
    dual_value: float
    gap: float
    iterations: int
    status: str
    dims: tuple[int, int] = (0, 0)
    primal_residual: float = 0.0
    dual_residual: float = 0.0

    @property
    def hmin(self) -> float:
        return float(-np.log2(self.primal_value))

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _infeasible(dims, msg: str) -> SdpSolution:
    log.warning("solve_hmin: %s", msg)
    nan = float("nan")
    return SdpSolution(np.full((dims[1],) * 2, np.nan), np.full((dims[0] * dims[1],) * 2, np.nan),
                       nan, nan, nan, 0, "infeasible_input", tuple(dims))


def _tr_r(m: np.ndarray, d_r: int, d_b: int) -> np.ndarray:
    return np.einsum("ibic->bc", m.reshape(d_r, d_b, d_r, d_b))


def _inv_sqrt_psd(t: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh((t + dag(t)) / 2)
    return (u / np.sqrt(w)) @ dag(u)


def _certificate(rho, sigma, s_inv, mu, d_r, d_b):
    """Project ``mu S^-1`` onto the dual feasible set and score both sides."""
    y = mu * s_inv
    t = _tr_r(y, d_r, d_b)
    k = np.kron(np.eye(d_r), _inv_sqrt_psd(t))
    y = k @ y @ dag(k)
    y = (y + dag(y)) / 2
    primal = float(np.trace(sigma).real)
    dual = float(np.real(np.vdot(y, rho)))  # Tr(rho Y), both Hermitian
    return y, primal, dual


def solve_hmin(rho: DensityOperator | np.ndarray, dims: tuple[int, int] | None = None,
               tol: float = 1e-8, max_iter: int = MAX_ITER) -> SdpSolution:
    """Solve the min-entropy SDP for a state on R ⊗ B to duality gap ``tol``."""
    if isinstance(rho, DensityOperator):
        m, dims = rho.matrix, rho.dims
    else:
        m = np.asarray(rho, dtype=complex)
    if dims is None or len(dims) != 2:
        raise InvalidInput("solve_hmin needs a bipartite state with dims (d_R, d_B)")
    d_r, d_b = (int(d) for d in dims)
    n = d_r * d_b
    if m.shape != (n, n):
        raise InvalidInput("state shape does not match dims")
    if n > MAX_DIM:
        raise InvalidInput(f"d_R * d_B = {n} exceeds {MAX_DIM}")
    if tol < 1e-9:
        raise InvalidInput("tol must be at least 1e-9")
    if np.max(np.abs(m - dag(m))) > 1e-10:
        return _infeasible((d_r, d_b), "state is not Hermitian")
    m = (m + dag(m)) / 2
    w = np.linalg.eigvalsh(m)
    if w.min() < -1e-10:
        return _infeasible((d_r, d_b), "state is not positive semidefinite")

    eye_r = np.eye(d_r)
    sigma = (w.max() + 1.0) * np.eye(d_b, dtype=complex)
    mu = float(np.trace(sigma).real) / n
    it = 0
    best = None

    def barrier(sig, mu_):
        s = np.kron(eye_r, sig) - m
        try:
            c = np.linalg.cholesky(s)
        except np.linalg.LinAlgError:
            return np.inf
        return float(np.trace(sig).real) - mu_ * 2.0 * float(np.log(np.abs(np.diag(c))).sum())

    while it < max_iter:
        # centering
        while it < max_iter:
            s = np.kron(eye_r, sigma) - m
            ws, us = np.linalg.eigh(s)
            s_inv = (us / ws) @ dag(us)
            grad = np.eye(d_b) - mu * _tr_r(s_inv, d_r, d_b)
            t4 = s_inv.reshape(d_r, d_b, d_r, d_b)
            hess = mu * np.einsum("rbsc,sdre->becd", t4, t4).reshape(d_b * d_b, d_b * d_b)
            try:
                step = np.linalg.solve(hess, -grad.reshape(-1)).reshape(d_b, d_b)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(hess, -grad.reshape(-1), rcond=None)[0].reshape(d_b, d_b)
            step = (step + dag(step)) / 2
            dec2 = float(-np.real(np.vdot(grad, step)))
            it += 1
            if dec2 <= 0:
                break
            f0 = barrier(sigma, mu)
            t = 1.0 if dec2 < 0.25 else 1.0 / (1.0 + np.sqrt(dec2))
            while t > 1e-12:
                f1 = barrier(sigma + t * step, mu)
                if f1 <= f0 - 0.25 * t * dec2 or (dec2 < 1e-14 and np.isfinite(f1)):
                    break
                t *= 0.5
            if t <= 1e-12:
                break
            sigma = sigma + t * step
            sigma = (sigma + dag(sigma)) / 2
            if dec2 < 1e-10:
                break

        s = np.kron(eye_r, sigma) - m
        ws, us = np.linalg.eigh(s)
        if ws.min() <= 0:
            break
        s_inv = (us / ws) @ dag(us)
        if np.linalg.eigvalsh(_tr_r(s_inv, d_r, d_b)).min() <= 0:
            break
        y, primal, dual = _certificate(m, sigma, s_inv, mu, d_r, d_b)
        gap = primal - dual
        if best is None or gap < best[3]:
            best = (sigma.copy(), y, primal, gap, dual)
        log.debug("mu=%.2e primal=%.12f dual=%.12f gap=%.2e iters=%d", mu, primal, dual, gap, it)
        if gap <= tol:
            break
        # the gap tracks mu * n; far below tol only roundoff is left
        if mu * n < 1e-4 * tol:
            break
        mu *= MU_FACTOR

    if best is None:
        return _infeasible((d_r, d_b), "barrier iteration broke down")
    sigma, y, primal, gap, dual = best
    s_min = float(np.linalg.eigvalsh(np.kron(eye_r, sigma) - m).min())
    y_min = float(np.linalg.eigvalsh(y).min())
    dual_res = float(np.max(np.abs(_tr_r(y, d_r, d_b) - np.eye(d_b))))
    status = "optimal" if gap <= tol else "max_iterations"
    return SdpSolution(sigma, y, primal, dual, gap, it, status, (d_r, d_b),
                       primal_residual=max(-s_min, 0.0),
                       dual_residual=max(dual_res, -y_min, 0.0))


def max_singlet_fraction(rho: DensityOperator, tol: float = 1e-8) -> float:
    """``max_D q(R|B) = 2^(-Hmin(R|B))``."""
    sol = solve_hmin(rho, tol=tol)
    if sol.status == "infeasible_input":
        raise InvalidInput("state rejected by the min-entropy solver")
    return sol.primal_value


def channel_from_dual(sol: SdpSolution, d_r: int | None = None, d_b: int | None = None,
                      rho: DensityOperator | None = None, atol: float = 1e-8) -> Channel:
    """Decoder ``D: B -> R`` whose adjoint has Choi matrix ``sol.y``.

    If ``rho`` is given, the decoder's singlet fraction on it is checked
    against the dual value.
    """
    d_r = sol.dims[0] if d_r is None else d_r
    d_b = sol.dims[1] if d_b is None else d_b
    if sol.status != "optimal":
        raise InvalidInput(f"solution status is {sol.status!r}")
    y = sol.y
    if np.linalg.eigvalsh(y).min() < -atol or np.max(np.abs(_tr_r(y, d_r, d_b) - np.eye(d_b))) > atol:
        raise InvalidInput("dual variable is not feasible")
    # <i|D(|b><b'|)|j> = Y[(j, b'), (i, b)]
    choi = y.reshape(d_r, d_b, d_r, d_b).transpose(3, 2, 1, 0).reshape(d_b * d_r, d_b * d_r)
    dec = channel_from_choi(choi, d_b, d_r, atol=atol)
    if rho is not None:
        q = singlet_fraction(rho, dec)
        if abs(q - sol.dual_value) > max(10 * sol.gap, 1e-8):
            raise InvalidInput(f"recovered decoder attains {q}, dual value {sol.dual_value}")
    return dec


def pure_state_hmin_oracle(psi: DensityOperator) -> float:
    """``2^(-Hmin)`` of a pure bipartite state: squared sum of Schmidt coefficients."""
    if len(psi.dims) != 2:
        raise InvalidInput("oracle needs a bipartite state")
    w, u = np.linalg.eigh(psi.matrix)
    if w[-1] < 1 - 1e-9:
        raise InvalidInput("oracle needs a pure state")
    amp = u[:, -1].reshape(psi.dims)
    s = np.linalg.svd(amp, compute_uv=False)
    return float(s.sum() ** 2)


def bell_state() -> DensityOperator:
    return DensityOperator.from_ket(maximally_entangled_ket(2), (2, 2))
