"""Matrix-valued orthonormal bases, Riesz bases and their generators.

A Riesz basis is the image {U E_k} of an orthonormal basis under a
bijective operator U that is adjointable for the matrix-valued inner
product. ``apply_generator`` is the single validated path from an operator
to a ``RieszBasis``; the ``build_*`` functions only produce generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import operators as ops
from .errors import (AdjointabilityError, CommutationError, MvFrameError, NormConditionError,
                     PositivityError, SelfAdjointnessError, UnsupportedShapeError, ZeroNormError)
from .group import scalar_onb
from .operators import LinOp
from .space import MatFn, SpaceSpec, gram_blocks, stack

TOL = ops.DEFAULT_TOL


@dataclass(frozen=True)
class MatONB:
    spec: SpaceSpec
    functions: tuple

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, k):
        return self.functions[k]

    def gram_defect(self) -> float:
        """max_{k,j} |<E_k, E_j> - delta_kj I|."""
        G = gram_blocks(self.functions, self.functions)
        N, s = len(self), self.spec.s
        target = np.einsum("kj,pq->kjpq", np.eye(N), np.eye(s))
        return float(np.abs(G - target).max())

    def module_span_rank(self) -> int:
        return _module_span_rank(self.functions)


@dataclass
class RieszBasis:
    onb: MatONB
    generator: LinOp
    functions: tuple
    dual_functions: Optional[tuple] = field(default=None)

    @property
    def spec(self) -> SpaceSpec:
        return self.onb.spec

    def __len__(self):
        return len(self.functions)

    def to_dict(self, include_functions: bool = False) -> dict:
        out = {
            "generator": self.generator.to_dict(),
            "onb": {"group": list(self.spec.group.orders), "s": self.spec.s, "r": self.spec.r,
                    "construction": "canonical"},
        }
        if include_functions:
            out["functions"] = [f.to_dict() for f in self.functions]
            if self.dual_functions is not None:
                out["dual"] = [g.to_dict() for g in self.dual_functions]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> RieszBasis:
        U = LinOp.from_dict(data["generator"])
        rb = apply_generator(U, canonical_onb(U.spec))
        if "dual" in data:
            rb.dual_functions = tuple(MatFn.from_dict(g, U.spec.group) for g in data["dual"])
        return rb


def _module_span_rank(fs, rel_tol: float = 1e-9) -> int:
    """Complex rank of {left_mul(E_pq, F) : p, q, F in fs}."""
    F = stack(fs)  # (N, s, L)
    N, s, L = F.shape
    # left_mul(E_pq, F) has row p equal to row q of F and zeros elsewhere
    V = np.zeros((N, s, s, s, L), dtype=complex)
    for p in range(s):
        V[:, p, :, p, :] = F
    sv = np.linalg.svd(V.reshape(N * s * s, s * L), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


# orthonormal bases -----------------------------------------------------------

def canonical_onb(spec: SpaceSpec) -> MatONB:
    """E_(n,c)(x) = e_n(x) S_c, S_c = [0 .. I_s .. 0] selecting column block c.

    Requires s | r. Index order is n outer, c inner; N = |G| r / s.
    """
    s, r, n = spec.shape
    if r % s:
        raise UnsupportedShapeError(f"canonical orthonormal basis needs s | r (s={s}, r={r})")
    e = scalar_onb(spec.group)
    funcs = []
    for k in range(n):
        for c in range(r // s):
            vals = np.zeros(spec.shape, dtype=complex)
            for i in range(s):
                vals[i, c * s + i] = e[k]
            funcs.append(MatFn(spec, vals))
    return MatONB(spec, tuple(funcs))


# generators --------------------------------------------------------------

def validate_generator(U: LinOp, tol: float = TOL) -> None:
    ok, witness = ops.is_matrix_adjointable(U, tol)
    if not ok:
        raise AdjointabilityError("generator is not adjointable for the matrix-valued inner product",
                                  witness)
    ops.invert(U)


def apply_generator(U: LinOp, onb: MatONB, tol: float = TOL) -> RieszBasis:
    if U.spec != onb.spec:
        raise ops.DimensionError(f"generator acts on {U.spec}, basis lives in {onb.spec}")
    validate_generator(U, tol)
    return RieszBasis(onb, U, tuple(ops.apply(U, E) for E in onb))


def _require_adjointable(T: LinOp, name: str, tol: float) -> None:
    ok, witness = ops.is_matrix_adjointable(T, tol)
    if not ok:
        raise AdjointabilityError(f"{name} is not adjointable for the matrix-valued inner product",
                                  witness)


def _require_psd_module(T: LinOp, name: str, tol: float) -> None:
    ok, lam = ops.is_positive(T, tol)
    if not ok:
        raise PositivityError(f"{name} is not positive (min eigenvalue {lam:.3e})", lam)
    _require_adjointable(T, name, tol)


def _require_self_adjoint(T: LinOp, tol: float) -> None:
    if not ops.is_trace_self_adjoint(T, tol):
        raise SelfAdjointnessError("operator is not self-adjoint")


def build_positive_classes(T: LinOp, S: LinOp | None = None, n: int | None = None,
                           product: bool | None = None, tol: float = TOL) -> dict:
    """Generators I+T, I+S, I+T+S, I+TS and I+T+...+T^n for positive T, S.

    ``product`` controls I+TS: None includes it only when TS = ST, True
    demands it (raising CommutationError otherwise), False omits it.
    """
    _require_psd_module(T, "T", tol)
    I = ops.identity(T.spec)
    out = {"I+T": I + T}
    if S is not None:
        _require_psd_module(S, "S", tol)
        out["I+S"] = I + S
        out["I+T+S"] = I + T + S
        if product is not False:
            comm = ops.distance(T @ S, S @ T)
            if comm <= tol * max(1.0, ops.op_norm(T) * ops.op_norm(S)):
                out["I+TS"] = I + T @ S
            elif product:
                raise CommutationError(f"I+TS needs TS = ST (||TS - ST|| = {comm:.3e})")
    if n is not None:
        if n < 1:
            raise ValueError("n must be at least 1")
        acc, Tk = I, I
        for _ in range(n):
            Tk = Tk @ T
            acc = acc + Tk
        out[f"I+T+...+T^{n}"] = acc
    for U in out.values():
        validate_generator(U, tol)
    return out


def neumann_partial_sum(T: LinOp, n: int) -> LinOp:
    """sum_{m=0}^{n} T^m."""
    acc = Tk = ops.identity(T.spec)
    for _ in range(n):
        Tk = Tk @ T
        acc = acc + Tk
    return acc


def build_neumann(T: LinOp, tol: float = TOL) -> LinOp:
    """(I - T)^{-1} = I + T + T^2 + ... for ||T|| < 1.

    The returned inverse is cross-checked against a partial sum long enough
    that the geometric tail bound ||T||^{n+1} / (1 - ||T||) is below 1e-12.
    """
    nrm = ops.op_norm(T)
    if nrm >= 1.0:
        raise NormConditionError(f"Neumann series needs ||T|| < 1, got {nrm:.6g}")
    _require_adjointable(T, "T", tol)
    limit = ops.invert(ops.identity(T.spec) - T)
    n_terms = 0 if nrm == 0.0 else int(np.ceil(np.log(1e-12 * (1.0 - nrm)) / np.log(nrm)))
    gap = ops.distance(neumann_partial_sum(T, n_terms), limit)
    bound = nrm ** (n_terms + 1) / (1.0 - nrm)
    if gap > bound + 1e-9 * ops.op_norm(limit):
        raise MvFrameError(f"Neumann partial sums do not approach (I-T)^-1 (gap {gap:.3e})")
    validate_generator(limit, tol)
    return limit


def build_sqrt_chain(T: LinOp, n: int, tol: float = TOL) -> LinOp:
    """T^{1/2^n}: n repeated positive square roots."""
    if n < 1:
        raise ValueError("n must be at least 1")
    _require_psd_module(T, "T", tol)
    ops.invert(T)
    W = T
    for _ in range(n):
        W = ops.sqrt_psd(W, tol)
    validate_generator(W, tol)
    return W


def jordan_decomposition(T: LinOp, tol: float = TOL):
    """Positive P1, P2 with T = P1 - P2 and P1 P2 = 0, via |T| = (T^2)^{1/2}."""
    _require_self_adjoint(T, tol)
    absT = ops.sqrt_psd(T @ T, tol)
    P1 = 0.5 * (absT + T)
    P2 = 0.5 * (absT - T)
    scale = max(1.0, ops.op_norm(T)) ** 2
    if ops.op_norm(P1 @ P2) > 1e-9 * scale or ops.distance(P1 - P2, T) > 1e-9 * scale:
        raise MvFrameError("positive/negative part split failed to verify")
    return P1, P2


def build_jordan_parts(T: LinOp, tol: float = TOL):
    """(I + P1, I + P2) from the positive and negative parts of self-adjoint T."""
    _require_self_adjoint(T, tol)
    _require_adjointable(T, "T", tol)
    P1, P2 = jordan_decomposition(T, tol)
    I = ops.identity(T.spec)
    out = (I + P1, I + P2)
    for U in out:
        validate_generator(U, tol)
    return out


def _unitary_pair(A: LinOp, tol: float):
    """(1/||A||)(A +/- i (||A||^2 I - A^2)^{1/2}) for self-adjoint A != 0."""
    nrm = ops.op_norm(A)
    root = ops.sqrt_psd(nrm ** 2 * ops.identity(A.spec) - A @ A, tol)
    return (1.0 / nrm) * (A + 1j * root), (1.0 / nrm) * (A - 1j * root)


def build_unitary_parts(T: LinOp, tol: float = TOL):
    """Two unitaries whose average is T / ||T|| for self-adjoint T."""
    _require_self_adjoint(T, tol)
    _require_adjointable(T, "T", tol)
    if ops.op_norm(T) == 0.0:
        raise ZeroNormError("T = 0 has no unitary splitting")
    out = _unitary_pair(T, tol)
    for U in out:
        validate_generator(U, tol)
    return out


def build_cartesian_unitaries(T: LinOp, tol: float = TOL):
    """The four unitaries Omega_1..Omega_4 built from the Cartesian parts of T.

    Omega_1,2 come from A = T + T*; Omega_3,4 from K = T - T* via
    (-i/||K||)(K -/+ (||K||^2 I + K^2)^{1/2}). Entries are None when the
    corresponding part vanishes.
    """
    _require_adjointable(T, "T", tol)
    Ts = ops.trace_adjoint(T)
    zero_thr = 1e-12 * max(1.0, ops.op_norm(T))
    out = [None, None, None, None]
    A = T + Ts
    if ops.op_norm(A) > zero_thr:
        out[0], out[1] = _unitary_pair(A, tol)
    K = T - Ts
    kn = ops.op_norm(K)
    if kn > zero_thr:
        root = ops.sqrt_psd(kn ** 2 * ops.identity(T.spec) + K @ K, tol)
        out[2] = (-1j / kn) * (K - root)
        out[3] = (-1j / kn) * (K + root)
    for U in out:
        if U is not None:
            validate_generator(U, tol)
    return tuple(out)


def build_dominating(T: LinOp, Omega: LinOp, tol: float = TOL) -> LinOp:
    """Validate Omega as a generator given tr<Tf,f> <= tr<Omega f,f> and T invertible."""
    _require_psd_module(T, "T", tol)
    _require_psd_module(Omega, "Omega", tol)
    ops.invert(T)
    ok, lam = ops.is_positive(Omega - T, tol)
    if not ok:
        raise PositivityError(f"Omega - T is not positive (min eigenvalue {lam:.3e})", lam)
    validate_generator(Omega, tol)
    return Omega


# duals and the positivity characterization ----------------------------------

def dual_basis(rb: RieszBasis) -> tuple:
    """g_k = (U^{-1})^* E_k, stored on ``rb``."""
    if rb.dual_functions is None:
        Vs = ops.trace_adjoint(ops.invert(rb.generator))
        rb.dual_functions = tuple(ops.apply(Vs, E) for E in rb.onb)
    return rb.dual_functions


def biorthogonality_defect(rb: RieszBasis) -> float:
    G = gram_blocks(rb.functions, dual_basis(rb))
    N, s = len(rb), rb.spec.s
    return float(np.abs(G - np.einsum("kj,pq->kjpq", np.eye(N), np.eye(s))).max())


def dual_of_dual(rb: RieszBasis) -> RieszBasis:
    """The dual family as a Riesz basis in its own right (generator (U^{-1})^*)."""
    Vs = ops.trace_adjoint(ops.invert(rb.generator))
    return apply_generator(Vs, rb.onb)


def holub_residual(T: LinOp, rb: RieszBasis) -> float:
    """max_k ||T f_k - g_k||."""
    g = dual_basis(rb)
    return max(float(np.linalg.norm(ops.apply(T, f).vector - gk.vector))
               for f, gk in zip(rb.functions, g))


def holub_map(rb: RieszBasis, tol: float = 1e-8) -> LinOp:
    """The operator (U^{-1})^* U^{-1} sending each f_k to its dual g_k."""
    Ui = ops.invert(rb.generator)
    T = ops.trace_adjoint(Ui) @ Ui
    resid = holub_residual(T, rb)
    if resid > tol * max(1.0, ops.op_norm(T)):
        raise MvFrameError(f"T f_k != g_k (residual {resid:.3e})")
    ok, lam = ops.is_positive(T)
    if not ok:
        raise MvFrameError(f"(U^-1)^* U^-1 failed the positivity check (min eigenvalue {lam:.3e})")
    return T


@dataclass
class HolubCheck:
    maps_to_dual: bool
    is_positive: bool
    is_matrix_adjointable: bool
    residual: float
    min_eigenvalue: float
    witness: Optional[MatFn] = None

    @property
    def passed(self) -> bool:
        return self.maps_to_dual and self.is_positive and self.is_matrix_adjointable

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in ("maps_to_dual", "is_positive", "is_matrix_adjointable",
                                             "residual", "min_eigenvalue")}
        out["passed"] = self.passed
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def holub_forward_check(T: LinOp, rb: RieszBasis, tol: float = 1e-8) -> HolubCheck:
    """Does T map rb onto its dual, and is it then positive?

    On failure of positivity the witness is an eigenvector for the most
    negative eigenvalue of the Hermitian part, so tr<Tf, f> < 0.
    """
    resid = holub_residual(T, rb)
    pos, lam = ops.is_positive(T, tol)
    adj, _ = ops.is_matrix_adjointable(T, tol)
    witness = None
    if not pos:
        A = T.matrix
        _, V = np.linalg.eigh(0.5 * (A + A.conj().T))
        witness = MatFn(T.spec, V[:, 0])
    return HolubCheck(resid <= tol * max(1.0, ops.op_norm(T)), pos, adj, resid, lam, witness)


def holub_basis_for_positive(T: LinOp, onb: MatONB, tol: float = 1e-8):
    """Riesz basis q_k = (T^{1/2})^{-1} E_k and its dual h_k = T^{1/2} E_k.

    T maps each q_k to h_k. Returns ``(rb, h)`` with ``rb.dual_functions = h``.
    """
    _require_psd_module(T, "T", TOL)
    ops.invert(T)
    R = ops.sqrt_psd(T)
    rb = apply_generator(ops.invert(R), onb)
    h = tuple(ops.apply(R, E) for E in onb)
    rb.dual_functions = h
    resid = holub_residual(T, rb)
    if resid > tol * max(1.0, ops.op_norm(T)):
        raise MvFrameError(f"T q_k != h_k (residual {resid:.3e})")
    return rb, h
