"""Frame operators, optimal frame bounds and reconstruction for finite families.

For a family {F_k} the coefficient of f is the s x s matrix <f, F_k> and
the frame operator is S f = sum_k <f, F_k> F_k. Its quadratic form is the
coefficient energy, tr<Sf, f> = sum_k ||<f, F_k>||_F^2, so the optimal
frame bounds are the extreme eigenvalues of S.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import operators as ops
from .errors import DimensionError, MissingDualError
from .operators import LinOp
from .riesz import RieszBasis, _module_span_rank, dual_basis
from .space import MatFn, frob_norm, stack

FRAME_THRESHOLD = 1e-9


@dataclass
class FrameReport:
    lower_bound: float
    upper_bound: float
    is_frame: bool
    completeness_defect: int
    parseval_distance: float
    reconstruction_error: Optional[float] = None
    witness: Optional[MatFn] = None
    riesz_bounds: Optional[tuple] = None
    verdicts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> dict:
        out = {
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "is_frame": self.is_frame,
            "completeness_defect": self.completeness_defect,
            "parseval_distance": self.parseval_distance,
            "reconstruction_error": self.reconstruction_error,
        }
        if self.riesz_bounds is not None:
            out["riesz_bounds"] = list(self.riesz_bounds)
        if self.verdicts:
            out["verdicts"] = dict(self.verdicts)
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def _family(family) -> list:
    fs = list(family)
    if not fs:
        raise DimensionError("empty family")
    return fs


def analysis_matrix(family) -> np.ndarray:
    """Matrix C of shape (N s^2, D) with C @ vec(f) = the stacked entries of <f, F_k>.

    Row (k, p, q) reads <f, F_k>[p, q] = sum_l f[p, l] conj(F_k[q, l]).
    """
    F = stack(_family(family))  # (N, s, L)
    N, s, L = F.shape
    C = np.zeros((N, s, s, s, L), dtype=complex)
    for p in range(s):
        C[:, p, :, p, :] = F.conj()
    return C.reshape(N * s * s, s * L)


def coefficient_energy(f: MatFn, family) -> float:
    """sum_k ||<f, F_k>||_F^2."""
    F = stack(_family(family))
    coeffs = np.einsum("pl,kql->kpq", f.rows, F.conj())
    return float(np.sum(np.abs(coeffs) ** 2))


def frame_operator(family) -> LinOp:
    fs = _family(family)
    C = analysis_matrix(fs)
    S = C.conj().T @ C
    return LinOp(fs[0].spec, 0.5 * (S + S.conj().T))


def _spectrum(family):
    S = frame_operator(family)
    return np.linalg.eigh(S.matrix), S.spec


def optimal_frame_bounds(family) -> tuple:
    (lam, _), _ = _spectrum(family)
    return max(float(lam[0]), 0.0), float(lam[-1])


def completeness_defect(family) -> int:
    fs = _family(family)
    return fs[0].spec.dim - _module_span_rank(fs)


def frame_witness(family) -> MatFn:
    """Unit-norm eigenvector of the frame operator for its smallest eigenvalue."""
    (lam, V), spec = _spectrum(family)
    return MatFn(spec, V[:, 0])


def synthesize(coeffs, family) -> MatFn:
    """sum_k C_k F_k for s x s matrix coefficients C_k."""
    F = stack(_family(family))
    coeffs = np.asarray(coeffs, dtype=complex)
    rows = np.einsum("kpq,kql->pl", coeffs, F)
    spec = family[0].spec
    return MatFn(spec, rows.reshape(spec.shape))


def reconstruct(f: MatFn, rb: RieszBasis):
    """``(f_hat, relative_error)`` with f_hat = sum_k <f, g_k> f_k."""
    if rb.dual_functions is None:
        raise MissingDualError("reconstruction needs the dual basis; call dual_basis first")
    G = stack(rb.dual_functions)
    coeffs = np.einsum("pl,kql->kpq", f.rows, G.conj())
    fhat = synthesize(coeffs, list(rb.functions))
    err = frob_norm(f - fhat) / max(frob_norm(f), 1e-300)
    return fhat, err


def frame_report(family, threshold: float = FRAME_THRESHOLD) -> FrameReport:
    fs = _family(family)
    (lam, V), spec = _spectrum(fs)
    lower, upper = max(float(lam[0]), 0.0), float(lam[-1])
    is_frame = lower > threshold * upper
    return FrameReport(
        lower_bound=lower,
        upper_bound=upper,
        is_frame=is_frame,
        completeness_defect=completeness_defect(fs),
        parseval_distance=max(abs(lower - 1.0), abs(upper - 1.0)),
        witness=None if is_frame else MatFn(spec, V[:, 0]),
    )


def verify_riesz(rb: RieszBasis, tol: float = 1e-8, seed: int = 0,
                 recon_tol: float = 1e-8) -> FrameReport:
    """Frame report for a Riesz basis, checked against [||U^-1||^-2, ||U||^2]."""
    report = frame_report(rb.functions)
    sv = ops.singular_values(rb.generator)
    lo, hi = float(sv[-1]) ** 2, float(sv[0]) ** 2
    report.riesz_bounds = (lo, hi)
    dual_basis(rb)
    probe = MatFn.random(rb.spec, np.random.default_rng(seed))
    _, err = reconstruct(probe, rb)
    report.reconstruction_error = err
    report.verdicts = {
        "lower_bound": report.lower_bound >= (1.0 - tol) * lo,
        "upper_bound": report.upper_bound <= (1.0 + tol) * hi,
        "is_frame": report.is_frame,
        "complete": report.completeness_defect == 0,
        "reconstruction": err <= recon_tol,
    }
    return report
