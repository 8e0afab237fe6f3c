"""Acceptance criteria 1-10; each test prints and records one PASS/FAIL line."""

import math
import time

import numpy as np

from conftest import ACCEPTANCE
from mvframe import frames, lab, riesz, sampling
from mvframe import operators as ops
from mvframe.counterexamples import entry_swap, lower_left_witness, pointwise_transpose, transpose_witness
from mvframe.group import scalar_onb
from mvframe.space import SpaceSpec, frob_norm, trace_inner

TRIALS = 100
_T0 = time.perf_counter()


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def trial_rng(tag, k):
    return np.random.default_rng([tag, k])


def test_criterion_01_entry_swap_not_adjointable():
    t0 = time.perf_counter()
    spec = SpaceSpec.of((4,), 2, 2)
    U = entry_swap(spec)
    adj, witness = ops.is_matrix_adjointable(U)
    exact = np.array_equal(ops.trace_adjoint(U).matrix, U.matrix)
    module = ops.check_module_map(U)
    dt = time.perf_counter() - t0
    ok = (not adj) and witness is not None and exact and not module and dt < 1.0
    record(1, ok, f"adjointable={adj} witness={'yes' if witness else 'no'} U*==U:{exact} "
                  f"module_map={module} {dt * 1e3:.1f} ms")


def test_criterion_02_swapped_basis_not_a_frame():
    t0 = time.perf_counter()
    spec = SpaceSpec.of((4,), 2, 2)
    U = entry_swap(spec)
    fam = [U(E) for E in riesz.canonical_onb(spec)]
    rep = frames.frame_report(fam)
    energy = frames.coefficient_energy(lower_left_witness(spec, scalar_onb(spec.group)[0]), fam)
    dt = time.perf_counter() - t0
    ok = rep.lower_bound <= 1e-10 and rep.completeness_defect >= 1 and energy <= 1e-20 and dt < 1.0
    record(2, ok, f"lower={rep.lower_bound:.2e} defect={rep.completeness_defect} "
                  f"witness energy={energy:.2e} {dt * 1e3:.1f} ms")


def test_criterion_03_transpose_not_positive():
    t0 = time.perf_counter()
    spec = SpaceSpec.of((4,), 2, 2)
    V = pointwise_transpose(spec)
    h = scalar_onb(spec.group)[0]
    f = transpose_witness(spec, h)
    value = trace_inner(V(f), f)
    target = -float(np.sum(np.abs(h) ** 2))
    fixes = max(frob_norm(V(E) - E) for E in riesz.canonical_onb(spec))
    dt = time.perf_counter() - t0
    ok = abs(value - target) <= 1e-10 and fixes == 0.0 and dt < 1.0
    record(3, ok, f"tr<Vf,f>={value.real:+.12f} (target {target:+.1f}) "
                  f"max||V f_k - f_k||={fixes:.1e} {dt * 1e3:.1f} ms")


def test_criterion_04_optimal_bounds_law():
    t0 = time.perf_counter()
    worst_rel, worst_box, max_dim = 0.0, 0.0, 0
    for k in range(TRIALS):
        rng = trial_rng(4, k)
        spec = sampling.random_space(rng, 256)
        max_dim = max(max_dim, spec.dim)
        U = sampling.random_module_map(spec, rng)
        fam = [U(E) for E in riesz.canonical_onb(spec)]
        lo, hi = frames.optimal_frame_bounds(fam)
        sv = ops.singular_values(U)
        worst_rel = max(worst_rel, abs(lo - sv[-1] ** 2) / sv[-1] ** 2, abs(hi - sv[0] ** 2) / sv[0] ** 2)
        # interval [||U^-1||^-2, ||U||^2] from independently computed norms
        inv_norm = ops.op_norm(ops.invert(U))
        a, b = inv_norm ** -2, ops.op_norm(U) ** 2
        worst_box = max(worst_box, (a - lo) / a, (hi - b) / b)
    dt = time.perf_counter() - t0
    ok = worst_rel <= 1e-8 and worst_box <= 1e-8 and dt < 60
    record(4, ok, f"{TRIALS} maps, D<={max_dim}: max rel err={worst_rel:.2e}, "
                  f"max interval excess={max(worst_box, 0):.2e}, {dt:.1f} s")


def test_criterion_05_parseval_convergence():
    spec = SpaceSpec.of((4,), 2, 2)
    rng = np.random.default_rng(5)
    T = sampling.random_psd_module_map(spec, rng, eig_range=(1.0, 4.0), norm=4.0)
    sv = ops.singular_values(T)
    onb = riesz.canonical_onb(spec)
    worst, dist8 = 0.0, None
    for n in range(1, 9):
        W = riesz.build_sqrt_chain(T, n)
        rep = frames.frame_report([W(E) for E in onb])
        e = 1 / 2 ** (n - 1)
        worst = max(worst, abs(rep.lower_bound - sv[-1] ** e), abs(rep.upper_bound - sv[0] ** e))
        dist8 = rep.parseval_distance
    limit = 4 ** (1 / 128) - 1 + 1e-7
    ok = abs(sv[0] - 4) < 1e-12 and worst <= 1e-7 and dist8 <= limit
    record(5, ok, f"||T||={sv[0]:.12f} max bound err n=1..8: {worst:.2e}; "
                  f"parseval distance n=8: {dist8:.10f} <= {limit:.10f}")


def test_criterion_06_sqrt_battery():
    w_sq = w_it = w_norm = w_adj = 0.0
    all_adj = True
    for k in range(TRIALS):
        rng = trial_rng(6, k)
        spec = sampling.random_space(rng, 256)
        T = sampling.random_psd_module_map(spec, rng)
        R = ops.sqrt_psd(T)
        nT = ops.op_norm(T)
        w_sq = max(w_sq, ops.distance(R @ R, T) / nT)
        w_it = max(w_it, ops.distance(ops.sqrt_iterative(T), R))
        w_norm = max(w_norm, abs(ops.op_norm(R) - math.sqrt(nT)) / (1 + nT))
        if ops.is_matrix_adjointable(T)[0]:
            all_adj &= ops.is_matrix_adjointable(R)[0]
            w_adj = max(w_adj, ops.matrix_adjointness_defect(R)[0])
    ok = w_sq <= 1e-10 and w_it <= 1e-8 and w_norm <= 1e-8 and all_adj
    record(6, ok, f"{TRIALS} maps: ||R^2-T||/||T||={w_sq:.2e} ||DB-eig||={w_it:.2e} "
                  f"norm law={w_norm:.2e} adjointable={all_adj} (defect {w_adj:.1e})")


def test_criterion_07_holub_both_directions():
    w_fwd, w_conv, all_pos = math.inf, 0.0, True
    for k in range(TRIALS):
        rng = trial_rng(7, k)
        spec = sampling.random_space(rng, 256)
        onb = riesz.canonical_onb(spec)
        U = sampling.random_module_map(spec, rng)
        rb = riesz.apply_generator(U, onb)
        T = riesz.holub_map(rb)
        pos, lam = ops.is_positive(T)
        all_pos &= pos
        w_fwd = min(w_fwd, lam * ops.op_norm(U) ** 2)
        P = sampling.random_psd_module_map(spec, rng)
        rbq, _ = riesz.holub_basis_for_positive(P, onb)
        w_conv = max(w_conv, riesz.holub_residual(P, rbq) / ops.op_norm(P))
    ok = all_pos and w_fwd >= 1 - 1e-6 and w_conv <= 1e-8
    record(7, ok, f"{TRIALS} seeds: forward min_eig*||U||^2 >= {w_fwd:.12f} positive={all_pos}; "
                  f"converse max||Tq_k-h_k||/||T||={w_conv:.2e}")


def _generators(spec, rng):
    Q = sampling.random_unitary(rng, spec.row_dim)
    T = sampling.random_psd_module_map(spec, rng, eigvecs=Q)
    S = sampling.random_psd_module_map(spec, rng, eigvecs=Q)
    out = [(name, U, False) for name, U in riesz.build_positive_classes(T, S, n=4).items()]
    out.append(("neumann", riesz.build_neumann(sampling.random_contraction(spec, rng, 0.9)), False))
    for n in (1, 3, 6):
        out.append((f"sqrt_chain{n}", riesz.build_sqrt_chain(T, n), False))
    H = sampling.random_self_adjoint_module_map(spec, rng)
    out += [(f"jordan{i}", U, False) for i, U in enumerate(riesz.build_jordan_parts(H))]
    out += [(f"unitary{i}", U, True) for i, U in enumerate(riesz.build_unitary_parts(H))]
    cart = riesz.build_cartesian_unitaries(sampling.random_module_map(spec, rng))
    out += [(f"omega{i + 1}", U, True) for i, U in enumerate(cart) if U is not None]
    return out


def test_criterion_08_constructor_battery():
    shapes = [((4,), 2, 2), ((2, 3), 2, 4), ((5,), 1, 3), ((3,), 3, 3), ((8,), 2, 2)]
    count, w_rec, w_pars, bad = 0, 0.0, 0.0, []
    for k, shape in enumerate(shapes * 2):
        spec = SpaceSpec.of(*shape)
        rng = trial_rng(8, k)
        onb = riesz.canonical_onb(spec)
        for name, U, unitary in _generators(spec, rng):
            rep = frames.verify_riesz(riesz.apply_generator(U, onb))
            count += 1
            w_rec = max(w_rec, rep.reconstruction_error)
            if not rep.passed or rep.completeness_defect != 0:
                bad.append(f"{shape}:{name}")
            if unitary:
                w_pars = max(w_pars, rep.parseval_distance)
                if rep.parseval_distance > 1e-8:
                    bad.append(f"{shape}:{name}:parseval")
    ok = not bad and w_rec <= 1e-8 and w_pars <= 1e-8
    record(8, ok, f"{count} generators: max recon err={w_rec:.2e} max unitary parseval distance="
                  f"{w_pars:.2e} failures={bad[:5]}")


def test_criterion_09_polar():
    w_wp = w_unit = 0.0
    bad = 0
    for k in range(TRIALS):
        rng = trial_rng(9, k)
        spec = sampling.random_space(rng, 256)
        U = sampling.random_module_map(spec, rng)
        W, P = ops.polar(U)
        w_wp = max(w_wp, ops.distance(W @ P, U) / ops.op_norm(U))
        w_unit = max(w_unit, ops.distance(W.H @ W, ops.identity(spec)))
        onb = riesz.canonical_onb(spec)
        for G in (W, P):
            bad += not frames.verify_riesz(riesz.apply_generator(G, onb)).passed
    ok = w_wp <= 1e-8 and w_unit <= 1e-8 and bad == 0
    record(9, ok, f"{TRIALS} seeds: ||WP-U||/||U||={w_wp:.2e} ||W*W-I||={w_unit:.2e} "
                  f"verify_riesz failures={bad}")


def test_criterion_10_wall_clock(tmp_path):
    # criteria 1-9 above plus the CLI-level suites at default scale
    t0 = time.perf_counter()
    props = lab.suite_random_properties(seed=0, trials=TRIALS, max_dim=256)
    cx = lab.suite_counterexamples((4,))
    sweep = lab.sweep_sqrt_chain(n_max=8, output=str(tmp_path / "sweep"))
    runs = [lab.run_experiment(lab.parse_config({"group": [4, 4], "s": 3, "r": 6,
                                                 "construction": c, "seed": 1}), write=False)
            for c in lab.CONSTRUCTIONS if c != "counterexamples"]
    suites = time.perf_counter() - t0
    total = time.perf_counter() - _T0
    passed = props.passed and cx.passed and sweep.passed and all(r.passed for r in runs)
    ok = passed and total <= 300
    record(10, ok, f"acceptance module {total:.1f} s (CLI suites {suites:.1f} s, all passed={passed}); "
                   f"limit 300 s")
