import json

import numpy as np
import pytest

from mvframe import operators as ops
from mvframe import riesz, sampling
from mvframe.counterexamples import entry_swap, pointwise_transpose
from mvframe.errors import (AdjointabilityError, CommutationError, NormConditionError,
                            PositivityError, SelfAdjointnessError, SingularOperatorError,
                            UnsupportedShapeError, ZeroNormError)
from mvframe.group import scalar_onb
from mvframe.space import MatFn, SpaceSpec, mat_inner


@pytest.mark.parametrize("shape", [((4,), 2, 2), ((3,), 1, 2), ((2, 3), 2, 4), ((2,), 3, 6)])
def test_canonical_onb(shape):
    spec = SpaceSpec.of(*shape)
    onb = riesz.canonical_onb(spec)
    assert len(onb) == spec.n * spec.r // spec.s
    assert onb.gram_defect() < 1e-14
    assert onb.module_span_rank() == spec.dim


def test_canonical_onb_literal_entries():
    spec = SpaceSpec.of((3,), 1, 2)
    onb = riesz.canonical_onb(spec)
    e = scalar_onb(spec.group)
    # n outer, column block inner
    assert np.allclose(onb[3].values[0, 1], e[1]) and np.allclose(onb[3].values[0, 0], 0)
    assert np.allclose(onb[4].values[0, 0], e[2])


def test_onb_needs_divisibility():
    with pytest.raises(UnsupportedShapeError):
        riesz.canonical_onb(SpaceSpec.of((2,), 2, 3))


def test_apply_generator_rejects_bad_operators(z4_22):
    onb = riesz.canonical_onb(z4_22)
    with pytest.raises(AdjointabilityError) as exc:
        riesz.apply_generator(entry_swap(z4_22), onb)
    assert exc.value.witness is not None
    with pytest.raises(SingularOperatorError):
        riesz.apply_generator(ops.zero(z4_22), onb)


def test_positive_classes(z4_22, rng):
    Q = sampling.random_unitary(rng, 8)
    T = sampling.random_psd_module_map(z4_22, rng, eigvecs=Q)
    S = sampling.random_psd_module_map(z4_22, rng, eigvecs=Q)
    gens = riesz.build_positive_classes(T, S, n=3)
    assert set(gens) == {"I+T", "I+S", "I+T+S", "I+TS", "I+T+...+T^3"}
    I = ops.identity(z4_22)
    assert ops.allclose(gens["I+T+...+T^3"], I + T + T @ T + T @ T @ T)
    for U in gens.values():
        assert ops.singular_values(U)[-1] >= 1 - 1e-12


def test_positive_classes_noncommuting(z4_22, rng):
    T = sampling.random_psd_module_map(z4_22, rng)
    S = sampling.random_psd_module_map(z4_22, rng)
    assert "I+TS" not in riesz.build_positive_classes(T, S)
    assert "I+TS" not in riesz.build_positive_classes(T, S, product=False)
    with pytest.raises(CommutationError):
        riesz.build_positive_classes(T, S, product=True)
    with pytest.raises(PositivityError):
        riesz.build_positive_classes(-1 * T)


def test_neumann(z4_22, rng):
    T = 0.5 * ops.identity(z4_22)
    assert ops.allclose(riesz.build_neumann(T), 2 * ops.identity(z4_22))
    assert ops.allclose(riesz.neumann_partial_sum(T, 2), 1.75 * ops.identity(z4_22))
    C = sampling.random_contraction(z4_22, rng, 0.9)
    limit = riesz.build_neumann(C)
    assert ops.distance((ops.identity(z4_22) - C) @ limit, ops.identity(z4_22)) < 1e-10
    with pytest.raises(NormConditionError):
        riesz.build_neumann(1.01 * ops.identity(z4_22))


def test_sqrt_chain_diagonal(z4_22):
    lam = np.array([1, 2, 3, 4, 1.5, 2.5, 3.5, 4.0])
    T = ops.row_lift(z4_22, np.diag(lam))
    for n in (1, 2, 5):
        W = riesz.build_sqrt_chain(T, n)
        assert np.allclose(np.diag(W.matrix)[:8], lam ** (1 / 2 ** n))
    with pytest.raises(ValueError):
        riesz.build_sqrt_chain(T, 0)
    with pytest.raises(SingularOperatorError):
        riesz.build_sqrt_chain(ops.row_lift(z4_22, np.diag([0.0] + [1] * 7)), 1)


def test_jordan_closed_form(z4_22):
    T = ops.row_lift(z4_22, np.diag([2, -3, 0, 1, -1, 0.5, 0, 0]))
    P1, P2 = riesz.jordan_decomposition(T)
    assert np.allclose(np.diag(P1.matrix)[:8], [2, 0, 0, 1, 0, 0.5, 0, 0])
    assert np.allclose(np.diag(P2.matrix)[:8], [0, 3, 0, 0, 1, 0, 0, 0])
    G1, G2 = riesz.build_jordan_parts(T)
    assert ops.allclose(G1 - G2, T)
    with pytest.raises(SelfAdjointnessError):
        riesz.jordan_decomposition(ops.row_lift(z4_22, np.triu(np.ones((8, 8)))))


def test_unitary_parts(z4_22, rng):
    D = ops.row_lift(z4_22, np.diag([1, -1, 1, 1, -1, -1, 1, 1.0]))
    Vp, Vm = riesz.build_unitary_parts(D)
    # ||D|| = 1 and D^2 = I, so the root vanishes and both parts equal D
    assert ops.allclose(Vp, D) and ops.allclose(Vm, D)
    T = sampling.random_self_adjoint_module_map(z4_22, rng)
    Vp, Vm = riesz.build_unitary_parts(T)
    assert ops.is_unitary(Vp) and ops.is_unitary(Vm)
    assert ops.distance(0.5 * (Vp + Vm), (1 / ops.op_norm(T)) * T) < 1e-12
    with pytest.raises(ZeroNormError):
        riesz.build_unitary_parts(ops.zero(z4_22))


def test_cartesian_unitaries(z4_22, rng):
    T = sampling.random_module_map(z4_22, rng)
    O1, O2, O3, O4 = riesz.build_cartesian_unitaries(T)
    for O in (O1, O2, O3, O4):
        assert ops.is_unitary(O) and ops.is_matrix_adjointable(O)[0]
    A, K = T + T.H, T - T.H
    rebuilt = (ops.op_norm(A) / 4) * (O1 + O2) + (1j * ops.op_norm(K) / 4) * (O3 + O4)
    assert ops.distance(rebuilt, T) < 1e-12 * ops.op_norm(T)


def test_cartesian_degenerate_parts(z4_22):
    # T = iI: A = 0, K = 2iI and ||K||^2 I + K^2 = 0, so Omega_3 = Omega_4 = I
    out = riesz.build_cartesian_unitaries(1j * ops.identity(z4_22))
    assert out[0] is None and out[1] is None
    assert ops.allclose(out[2], ops.identity(z4_22)) and ops.allclose(out[3], ops.identity(z4_22))
    out = riesz.build_cartesian_unitaries(ops.identity(z4_22))
    assert out[2] is None and out[3] is None


def test_dominating(z4_22, rng):
    T = sampling.random_psd_module_map(z4_22, rng)
    Om = T + sampling.random_psd_module_map(z4_22, rng, eig_range=(0, 1))
    assert riesz.build_dominating(T, Om) is Om
    with pytest.raises(PositivityError):
        riesz.build_dominating(Om, T)


def test_dual_basis(z4_22, rng):
    U = sampling.random_module_map(z4_22, rng)
    rb = riesz.apply_generator(U, riesz.canonical_onb(z4_22))
    assert riesz.biorthogonality_defect(rb) < 1e-12
    dd = riesz.dual_of_dual(rb)
    assert riesz.biorthogonality_defect(dd) < 1e-12
    # dual of the dual family is the original family
    for f, g in zip(riesz.dual_basis(dd), rb.functions):
        assert np.allclose(f.vector, g.vector)


def test_holub_forward_closed_form(z4_22):
    lam = np.array([1, 2, 3, 4, 5, 6, 7, 8.0])
    U = ops.row_lift(z4_22, np.diag(lam))
    rb = riesz.apply_generator(U, riesz.canonical_onb(z4_22))
    T = riesz.holub_map(rb)
    assert np.allclose(np.diag(T.matrix)[:8], 1 / lam ** 2)
    chk = riesz.holub_forward_check(T, rb)
    assert chk.passed and chk.min_eigenvalue * ops.op_norm(U) ** 2 == pytest.approx(1.0)


def test_holub_forward_rejects_transpose(z4_22):
    rb = riesz.apply_generator(ops.identity(z4_22), riesz.canonical_onb(z4_22))
    V = pointwise_transpose(z4_22)
    chk = riesz.holub_forward_check(V, rb)
    # the diagonal basis is its own dual and V fixes it, yet V is not positive
    assert chk.maps_to_dual and not chk.is_positive and not chk.passed
    w = chk.witness
    assert np.trace(mat_inner(V(w), w)).real < -0.5
    json.dumps(chk.to_dict())


def test_holub_converse(z4_22, rng):
    T = sampling.random_psd_module_map(z4_22, rng)
    rb, h = riesz.holub_basis_for_positive(T, riesz.canonical_onb(z4_22))
    assert riesz.holub_residual(T, rb) < 1e-12 * ops.op_norm(T)
    assert riesz.biorthogonality_defect(rb) < 1e-12


def test_riesz_basis_round_trip(z4_22, rng):
    rb = riesz.apply_generator(sampling.random_module_map(z4_22, rng), riesz.canonical_onb(z4_22))
    riesz.dual_basis(rb)
    data = json.loads(json.dumps(rb.to_dict(include_functions=True)))
    back = riesz.RieszBasis.from_dict(data)
    assert np.array_equal(back.generator.matrix, rb.generator.matrix)
    assert all(np.array_equal(a.vector, b.vector) for a, b in zip(back.dual_functions, rb.dual_functions))
    assert np.allclose(MatFn.from_dict(data["functions"][0], z4_22.group).vector, rb.functions[0].vector)
