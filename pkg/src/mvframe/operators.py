"""Bounded operators on L^2(G, C^{s x r}) as dense D x D complex matrices.

The matrix acts on the coordinate vector of a MatFn (see ``space``), so
the Hilbert adjoint for the trace inner product is the conjugate transpose.
Matrix-adjointability (``<Uf, g> = <f, U*g>`` as s x s matrices) is a much
stronger condition; it is tested directly on coordinate basis pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, IterationError, PositivityError, SingularOperatorError
from .space import MatFn, SpaceSpec

STRUCTURE_TAGS = ("general", "module_map", "multiplication", "permutation")

DEFAULT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LinOp:
    spec: SpaceSpec
    matrix: np.ndarray
    tag: str = "general"
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        D = self.spec.dim
        if m.shape != (D, D):
            raise DimensionError(f"operator matrix must be {D}x{D}, got {m.shape}")
        if self.tag not in STRUCTURE_TAGS:
            raise ValueError(f"unknown structure tag {self.tag!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.spec.dim

    def __call__(self, f: MatFn) -> MatFn:
        return apply(self, f)

    def __matmul__(self, other: LinOp) -> LinOp:
        return compose(self, other)

    def __add__(self, other: LinOp) -> LinOp:
        return add(self, other)

    def __sub__(self, other: LinOp) -> LinOp:
        return add(self, scale(-1, other))

    def __rmul__(self, c) -> LinOp:
        return scale(c, self)

    def __neg__(self) -> LinOp:
        return scale(-1, self)

    @property
    def H(self) -> LinOp:
        return trace_adjoint(self)

    def __repr__(self):
        return f"LinOp(D={self.dim}, tag={self.tag!r})"

    def to_dict(self) -> dict:
        out = {
            "dim": self.dim,
            "matrix": _pairs(self.matrix.reshape(-1)),
            "kind": self.tag,
            "space": {"group": list(self.spec.group.orders), "s": self.spec.s, "r": self.spec.r},
        }
        if "phi" in self.data:
            out["phi"] = _pairs(self.data["phi"])
        if "B" in self.data:
            out["B"] = _pairs(np.asarray(self.data["B"]).reshape(-1))
        return out

    @classmethod
    def from_dict(cls, data: dict) -> LinOp:
        sp = data["space"]
        spec = SpaceSpec.of(tuple(sp["group"]), sp["s"], sp["r"])
        if int(data["dim"]) != spec.dim:
            raise DimensionError(f"dim {data['dim']} inconsistent with space of dimension {spec.dim}")
        kind = data.get("kind", "general")
        if kind == "multiplication" and "phi" in data:
            return multiplication(spec, _unpairs(data["phi"]))
        if kind == "module_map" and "B" in data:
            L = spec.row_dim
            return row_lift(spec, _unpairs(data["B"]).reshape(L, L))
        m = _unpairs(data["matrix"]).reshape(spec.dim, spec.dim)
        return cls(spec, m, kind)


def _pairs(v) -> list:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.stack([v.real, v.imag], axis=1).tolist()


def _unpairs(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    return a[:, 0] + 1j * a[:, 1]


@dataclass
class OpReport:
    is_trace_self_adjoint: bool
    is_matrix_adjointable: bool
    is_positive: bool
    min_eigenvalue: float
    operator_norm: float
    witness: Optional[tuple] = None

    def to_dict(self) -> dict:
        out = {
            "is_trace_self_adjoint": self.is_trace_self_adjoint,
            "is_matrix_adjointable": self.is_matrix_adjointable,
            "is_positive": self.is_positive,
            "min_eigenvalue": self.min_eigenvalue,
            "operator_norm": self.operator_norm,
        }
        if self.witness is not None:
            out["witness"] = [w.to_dict() for w in self.witness]
        return out


def _check_spec(a: LinOp, b) -> None:
    if a.spec != b.spec:
        raise DimensionError(f"space mismatch: {a.spec} vs {b.spec}")


def _join_tags(a: LinOp, b: LinOp) -> str:
    if a.tag == b.tag and a.tag in ("module_map", "multiplication"):
        return a.tag
    if {a.tag, b.tag} <= {"module_map", "multiplication"}:
        return "module_map"
    return "general"


# construction --------------------------------------------------------------

def from_matrix(spec: SpaceSpec, matrix, tag: str = "general") -> LinOp:
    return LinOp(spec, matrix, tag)


def identity(spec: SpaceSpec) -> LinOp:
    return LinOp(spec, np.eye(spec.dim, dtype=complex), "module_map",
                 {"B": np.eye(spec.row_dim, dtype=complex)})


def zero(spec: SpaceSpec) -> LinOp:
    return LinOp(spec, np.zeros((spec.dim, spec.dim), dtype=complex), "module_map")


def multiplication(spec: SpaceSpec, phi) -> LinOp:
    """(M_phi f)(x) = phi(x) f(x) for a scalar function phi on G."""
    phi = np.broadcast_to(np.asarray(phi, dtype=complex), (spec.n,)).copy()
    diag = np.tile(phi, spec.s * spec.r)
    return LinOp(spec, np.diag(diag), "multiplication", {"phi": phi})


def row_lift(spec: SpaceSpec, B) -> LinOp:
    """Apply the (r|G|) x (r|G|) matrix B to every row of f.

    In the fixed vectorization this is the Kronecker product I_s (x) B.
    """
    B = np.asarray(B, dtype=complex)
    L = spec.row_dim
    if B.shape != (L, L):
        raise DimensionError(f"row operator must be {L}x{L}, got {B.shape}")
    return LinOp(spec, np.kron(np.eye(spec.s), B), "module_map", {"B": B.copy()})


def entry_permutation(spec: SpaceSpec, mapping) -> LinOp:
    """Pointwise entry shuffle: ``(Uf)_{ij}(x) = f_{mapping[i, j]}(x)``.

    ``mapping`` maps each output position (i, j) to a source position.
    Positions absent from the mapping are copied unchanged.
    """
    s, r, n = spec.shape
    P = np.zeros((spec.dim, spec.dim), dtype=complex)
    x = np.arange(n)
    for i in range(s):
        for j in range(r):
            si, sj = mapping.get((i, j), (i, j))
            P[(i * r + j) * n + x, (si * r + sj) * n + x] = 1.0
    return LinOp(spec, P, "permutation")


# algebra -------------------------------------------------------------------

def apply(op: LinOp, f: MatFn) -> MatFn:
    _check_spec(op, f)
    return MatFn(op.spec, op.matrix @ f.vector)


def compose(a: LinOp, b: LinOp) -> LinOp:
    """The operator f -> a(b(f))."""
    _check_spec(a, b)
    return LinOp(a.spec, a.matrix @ b.matrix, _join_tags(a, b))


def add(a: LinOp, b: LinOp) -> LinOp:
    _check_spec(a, b)
    return LinOp(a.spec, a.matrix + b.matrix, _join_tags(a, b))


def scale(c, a: LinOp) -> LinOp:
    tag = a.tag if a.tag in ("module_map", "multiplication") else "general"
    return LinOp(a.spec, complex(c) * a.matrix, tag)


def power(a: LinOp, k: int) -> LinOp:
    if k < 0:
        raise ValueError("negative powers: use invert")
    return LinOp(a.spec, np.linalg.matrix_power(a.matrix, k), a.tag if a.tag != "permutation" else "general")


def trace_adjoint(op: LinOp) -> LinOp:
    """Hilbert adjoint for the trace inner product (conjugate transpose)."""
    return LinOp(op.spec, op.matrix.conj().T, op.tag)


def op_norm(op: LinOp) -> float:
    """Operator norm for the Frobenius norm, i.e. the largest singular value."""
    return float(np.linalg.norm(op.matrix, 2))


def singular_values(op: LinOp) -> np.ndarray:
    return np.linalg.svd(op.matrix, compute_uv=False)


def distance(a: LinOp, b: LinOp) -> float:
    """Operator-norm distance ||a - b||."""
    _check_spec(a, b)
    return float(np.linalg.norm(a.matrix - b.matrix, 2))


def allclose(a: LinOp, b: LinOp, atol: float = DEFAULT_TOL) -> bool:
    return distance(a, b) <= atol


# adjointability ------------------------------------------------------------

def _blocks(op: LinOp) -> np.ndarray:
    """Matrix viewed as A4[p, l, p', l'] over (row, position-in-row) pairs."""
    s, L = op.spec.s, op.spec.row_dim
    return op.matrix.reshape(s, L, s, L)


def matrix_adjointness_defect(op: LinOp):
    """Largest entry of <U e_a, e_b> - <e_a, U* e_b> over coordinate basis pairs.

    Returns ``(defect, (a, b))`` with the worst pair of coordinate indices.
    For unit vectors e_a = unit at (pa, la), e_b at (pb, lb):

        <U e_a, e_b>[p, q]  = [q == pb] * U[(p, lb), (pa, la)]
        <e_a, U* e_b>[p, q] = [p == pa] * conj(U*[(q, la), (pb, lb)])
    """
    s, L = op.spec.s, op.spec.row_dim
    A4 = _blocks(op)
    Ah4 = _blocks(trace_adjoint(op))
    eye = np.eye(s)
    worst, arg = -1.0, (0, 0)
    for pa in range(s):
        for pb in range(s):
            # lhs[la, lb, p, q], rhs[la, lb, p, q]
            lhs = np.einsum("plm,q->mlpq", A4[:, :, pa, :], eye[pb])
            rhs = np.einsum("qml,p->mlpq", Ah4[:, :, pb, :].conj(), eye[pa])
            diff = np.abs(lhs - rhs).max(axis=(2, 3))
            idx = np.unravel_index(np.argmax(diff), diff.shape)
            if diff[idx] > worst:
                worst = float(diff[idx])
                arg = (pa * L + int(idx[0]), pb * L + int(idx[1]))
    return worst, arg


def _scale(op: LinOp) -> float:
    return 1.0 + float(np.abs(op.matrix).max(initial=0.0))


def is_matrix_adjointable(op: LinOp, tol: float = DEFAULT_TOL):
    """Check ``<U f, g> = <f, U* g>`` on all coordinate basis pairs.

    Both sides are sesquilinear in (f, g), so equality on basis pairs is
    equivalent to equality for all f, g. Returns ``(ok, witness)`` where
    ``witness`` is ``None`` or the first violating pair ``(e_a, e_b)``.
    """
    defect, (a, b) = matrix_adjointness_defect(op)
    if defect <= tol * _scale(op):
        return True, None
    eye = np.eye(op.dim, dtype=complex)
    return False, (MatFn(op.spec, eye[a]), MatFn(op.spec, eye[b]))


def check_module_map(op: LinOp, tol: float = DEFAULT_TOL) -> bool:
    """Does ``op(E_pq f) = E_pq op(f)`` hold for every matrix unit and basis function?

    Evaluated for all coordinate basis functions at once: the columns of
    ``op.matrix @ (E_pq (x) I)`` against ``(E_pq (x) I) @ op.matrix``.
    """
    s = op.spec.s
    A4 = _blocks(op)
    thr = tol * _scale(op)
    for p in range(s):
        for q in range(s):
            E = np.zeros((s, s))
            E[p, q] = 1.0
            # op applied to left_mul(E, e_a), for every a
            left = np.einsum("PlRm,Rc->Plcm", A4, E)
            # left_mul(E, op(e_a)), for every a
            right = np.einsum("cP,Plqm->clqm", E, A4)
            if np.abs(left - right).max(initial=0.0) > thr:
                return False
    return True


def recover_row_lift(op: LinOp):
    """Average the diagonal row blocks into B and measure ``||op - I (x) B||_max``."""
    s = op.spec.s
    A4 = _blocks(op)
    B = sum(A4[p, :, p, :] for p in range(s)) / s
    resid = float(np.abs(op.matrix - np.kron(np.eye(s), B)).max(initial=0.0))
    return B, resid


def is_row_lift(op: LinOp, tol: float = DEFAULT_TOL) -> bool:
    _, resid = recover_row_lift(op)
    return resid <= tol * _scale(op)


# positivity and functional calculus -----------------------------------------

def is_trace_self_adjoint(op: LinOp, tol: float = DEFAULT_TOL) -> bool:
    A = op.matrix
    return float(np.abs(A - A.conj().T).max(initial=0.0)) <= tol * _scale(op)


def hermitian_eigvals(op: LinOp) -> np.ndarray:
    A = op.matrix
    return np.linalg.eigvalsh(0.5 * (A + A.conj().T))


def is_positive(op: LinOp, tol: float = DEFAULT_TOL):
    """``(ok, min_eigenvalue)``: self-adjoint with spectrum >= -tol*||op||."""
    lam_min = float(hermitian_eigvals(op)[0])
    ok = is_trace_self_adjoint(op, tol) and lam_min >= -tol * op_norm(op)
    return ok, lam_min


def _require_positive(op: LinOp, tol: float) -> None:
    ok, lam = is_positive(op, tol)
    if not ok:
        raise PositivityError(f"operator is not positive (min eigenvalue {lam:.3e})", lam)


def _result_tag(op: LinOp) -> str:
    return op.tag if op.tag in ("module_map", "multiplication") else "general"


def sqrt_psd(op: LinOp, tol: float = DEFAULT_TOL) -> LinOp:
    """Unique positive square root via Hermitian eigendecomposition."""
    _require_positive(op, tol)
    A = op.matrix
    lam, V = np.linalg.eigh(0.5 * (A + A.conj().T))
    # eigenvalues within roundoff of zero are zeroed; sqrt would amplify them
    lam = np.where(lam <= 1e-12 * max(abs(lam[-1]), abs(lam[0])), 0.0, lam)
    W = (V * np.sqrt(lam)) @ V.conj().T
    return LinOp(op.spec, 0.5 * (W + W.conj().T), _result_tag(op))


def denman_beavers(A: np.ndarray, tol: float = 1e-12, max_iter: int = 100):
    """Square root of a matrix with no eigenvalues on the closed negative axis.

    Coupled iteration Y -> A^{1/2}, Z -> A^{-1/2}, with the scalar
    acceleration mu = (|Y^-1| |Z^-1| / (|Y| |Z|))^{1/4} (Frobenius norms)
    until mu is within 1% of one. Stops once successive Y iterates differ by
    at most ``tol * max(1, ||Y||)`` in the spectral norm.

    Returns ``(root, iterations)``.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    Y = A.copy()
    Z = np.eye(n, dtype=complex)
    scaling = True
    diff = np.inf
    for k in range(1, max_iter + 1):
        Yi = np.linalg.inv(Y)
        Zi = np.linalg.inv(Z)
        mu = 1.0
        if scaling:
            mu = (np.linalg.norm(Yi) * np.linalg.norm(Zi)
                  / (np.linalg.norm(Y) * np.linalg.norm(Z))) ** 0.25
            if abs(mu - 1.0) < 1e-2:
                scaling = False
        Y_next = 0.5 * (mu * Y + Zi / mu)
        Z = 0.5 * (mu * Z + Yi / mu)
        delta = Y_next - Y
        Y = Y_next
        thr = tol * max(1.0, np.linalg.norm(Y, 2))
        fro = np.linalg.norm(delta)
        # ||.||_2 <= ||.||_F, and ||.||_2 >= ||.||_F / sqrt(n)
        if fro <= thr or (fro <= np.sqrt(n) * thr and np.linalg.norm(delta, 2) <= thr):
            return Y, k
        diff = fro
    raise IterationError(f"Denman-Beavers did not converge in {max_iter} iterations "
                         f"(last step {diff:.3e})", residual=diff, iterations=max_iter)


def sqrt_iterative(op: LinOp, tol: float = 1e-12, max_iter: int = 100) -> LinOp:
    """Positive square root as the limit of a coupled Newton-type iteration."""
    _require_positive(op, DEFAULT_TOL)
    lam_min = float(hermitian_eigvals(op)[0])
    if lam_min <= DEFAULT_TOL * max(op_norm(op), 1e-300):
        raise SingularOperatorError("iterative square root needs an invertible operator", lam_min)
    Y, _ = denman_beavers(op.matrix, tol, max_iter)
    return LinOp(op.spec, 0.5 * (Y + Y.conj().T), _result_tag(op))


def invert(op: LinOp) -> LinOp:
    sv = singular_values(op)
    if sv[0] == 0.0 or sv[-1] <= 1e-10 * sv[0]:
        raise SingularOperatorError(f"operator is singular (smallest singular value {sv[-1]:.3e})",
                                    float(sv[-1]))
    return LinOp(op.spec, np.linalg.inv(op.matrix), _result_tag(op))


def polar(op: LinOp):
    """``(W, P)`` with P = (U*U)^{1/2} and W = U P^{-1} unitary."""
    invert(op)  # rejects singular input before the square root
    P = sqrt_psd(compose(trace_adjoint(op), op))
    W = compose(op, invert(P))
    return W, P


def is_unitary(op: LinOp, tol: float = 1e-8) -> bool:
    A = op.matrix
    return float(np.linalg.norm(A.conj().T @ A - np.eye(op.dim), 2)) <= tol


def op_report(op: LinOp, tol: float = DEFAULT_TOL) -> OpReport:
    adj, witness = is_matrix_adjointable(op, tol)
    pos, lam = is_positive(op, tol)
    return OpReport(
        is_trace_self_adjoint=is_trace_self_adjoint(op, tol),
        is_matrix_adjointable=adj,
        is_positive=pos,
        min_eigenvalue=lam,
        operator_norm=op_norm(op),
        witness=witness,
    )
