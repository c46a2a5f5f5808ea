import numpy as np
import pytest

from reluspline import deep, net2
from reluspline.deep import (ParallelDeepNet, SphereFactoredNet,
                             align_to_sphere, bridge_penalty, check_alignment,
                             cost_CL, from_alpha, improving_direction,
                             parallel_eval, sparsify_support)


def random_net(rng, L, m, k, d):
    subnets = []
    for _ in range(k):
        if L == 2:
            mats = [rng.standard_normal((1, d))]
        else:
            mats = [rng.standard_normal((m, d))]
            mats += [rng.standard_normal((m, m)) for _ in range(L - 3)]
            mats.append(rng.standard_normal((1, m)))
        subnets.append(tuple(mats))
    return ParallelDeepNet(tuple(subnets), rng.standard_normal(k))


def random_sphere_net(rng, k, d):
    subnets = []
    for _ in range(k):
        w = rng.standard_normal((1, d))
        subnets.append((w / np.linalg.norm(w),))
    return SphereFactoredNet(tuple(subnets), rng.standard_normal(k))


class TestConstruction:
    def test_top_length_mismatch(self):
        with pytest.raises(ValueError):
            ParallelDeepNet(((np.ones((1, 2)),),), [1.0, 2.0])

    def test_last_matrix_must_be_row(self):
        with pytest.raises(ValueError):
            ParallelDeepNet(((np.ones((2, 2)),),), [1.0])

    def test_sphere_net_requires_unit_norm(self):
        with pytest.raises(ValueError):
            SphereFactoredNet(((2.0 * np.ones((1, 2)),),), [1.0])

    def test_json_round_trip(self):
        rng = np.random.default_rng(41)
        net = random_net(rng, 3, 2, 3, 2)
        back = ParallelDeepNet.from_json(net.to_json())
        assert back.depth == net.depth
        x = rng.standard_normal(2)
        assert parallel_eval(back, x) == pytest.approx(parallel_eval(net, x))


class TestEval:
    def test_zero_top(self):
        rng = np.random.default_rng(42)
        net = random_net(rng, 3, 3, 2, 2)
        zeroed = ParallelDeepNet(net.subnets, np.zeros(2))
        assert parallel_eval(zeroed, rng.standard_normal(2)) == 0.0

    def test_scalar_chain_composition(self):
        # depth 4, all 1x1 positive weights: value is the product on x > 0
        net = ParallelDeepNet(
            (((np.array([[2.0]]), np.array([[3.0]]), np.array([[0.5]]))),),
            [4.0])
        assert parallel_eval(net, np.array([1.5])) == pytest.approx(
            4.0 * 0.5 * 3.0 * 2.0 * 1.5)
        assert parallel_eval(net, np.array([-1.0])) == 0.0

    def test_depth2_matches_biasless_two_layer(self):
        rng = np.random.default_rng(43)
        net = random_net(rng, 2, 1, 5, 1)
        w1 = np.array([s[0][0, 0] for s in net.subnets])
        ref = net2.TwoLayerNet(w1, np.zeros(5), net.top, 0.0)
        for x in rng.standard_normal(10):
            assert parallel_eval(net, np.array([x])) == pytest.approx(
                net2.net_eval(ref, x), abs=1e-12)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(44)
        net = random_net(rng, 3, 2, 1, 3)
        with pytest.raises(ValueError):
            parallel_eval(net, np.zeros(2))


class TestCost:
    def test_simple_values(self):
        net = ParallelDeepNet(((np.array([[1.0, 0.0]]),),), [1.0])
        assert cost_CL(net) == pytest.approx(1.0)

    def test_three_layer_arithmetic(self):
        first = np.sqrt(2.0) * np.eye(2)  # Frobenius norm 2
        net = ParallelDeepNet(((first, np.array([[2.0, 0.0]])),
                               (first, np.array([[0.0, 2.0]]))), [3.0, 3.0])
        assert cost_CL(net) == pytest.approx((18 + 2 * (4 + 4)) / 3)

    def test_zero_net(self):
        net = ParallelDeepNet(((np.zeros((1, 2)),),), [0.0])
        assert cost_CL(net) == 0.0


class TestAlignment:
    def test_simple_factorization(self):
        net = ParallelDeepNet(((np.array([[2.0, 0.0]]),),), [3.0])
        s = align_to_sphere(net)
        assert s.alpha[0] == pytest.approx(6.0)
        assert np.allclose(s.subnets[0][0], [[1.0, 0.0]])

    def test_zero_subnet_gets_zero_alpha(self):
        net = ParallelDeepNet(((np.zeros((1, 2)),),), [3.0])
        assert align_to_sphere(net).alpha[0] == 0.0

    def test_eval_preserved(self):
        rng = np.random.default_rng(45)
        for L in (2, 3, 4):
            net = random_net(rng, L, 3, 4, 2)
            s = align_to_sphere(net)
            back = from_alpha(s)
            for _ in range(50):
                x = rng.standard_normal(2)
                v = parallel_eval(net, x)
                assert parallel_eval(s, x) == pytest.approx(v, abs=1e-10)
                assert parallel_eval(back, x) == pytest.approx(v, abs=1e-10)

    def test_from_alpha_cost_identity(self):
        rng = np.random.default_rng(46)
        for L in (2, 3, 4):
            net = random_net(rng, L, 8, 10, 4)
            s = align_to_sphere(net)
            realigned = from_alpha(s)
            penalty = bridge_penalty(s.alpha, L)
            assert abs(cost_CL(realigned) - penalty) < 1e-10
            assert penalty <= cost_CL(net) + 1e-10

    def test_am_gm_strict_when_unbalanced(self):
        rng = np.random.default_rng(47)
        net = random_net(rng, 3, 3, 2, 2)
        # scale one layer up, another down: same function, higher cost
        sub = list(net.subnets)
        mats = list(sub[0])
        mats[0] = 2.0 * mats[0]
        mats[1] = 0.5 * mats[1]
        sub[0] = tuple(mats)
        unbalanced = ParallelDeepNet(tuple(sub), net.top)
        report = check_alignment(unbalanced)
        assert report.max_deviation > 1e-6
        s = align_to_sphere(unbalanced)
        assert bridge_penalty(s.alpha, 3) < cost_CL(unbalanced) - 1e-9

    def test_from_alpha_output_is_aligned(self):
        rng = np.random.default_rng(48)
        net = from_alpha(align_to_sphere(random_net(rng, 4, 3, 5, 2)))
        assert check_alignment(net).aligned

    def test_zero_net_aligned(self):
        net = ParallelDeepNet(((np.zeros((1, 2)),),), [0.0])
        assert check_alignment(net).aligned


class TestBridgePenalty:
    def test_examples(self):
        assert bridge_penalty([1.0, 1.0], 2) == pytest.approx(2.0)
        assert bridge_penalty([8.0], 3) == pytest.approx(4.0)

    def test_depth2_is_l1(self):
        rng = np.random.default_rng(49)
        a = rng.standard_normal(10)
        assert bridge_penalty(a, 2) == pytest.approx(np.abs(a).sum())

    def test_depth4_is_sqrt_sum(self):
        rng = np.random.default_rng(50)
        a = rng.standard_normal(10)
        assert bridge_penalty(a, 4) == pytest.approx(
            np.sqrt(np.abs(a)).sum())

    def test_rejects_shallow(self):
        with pytest.raises(ValueError):
            bridge_penalty([1.0], 1)


class TestSparsify:
    def test_square_full_rank_unchanged(self):
        rng = np.random.default_rng(51)
        s = random_sphere_net(rng, 3, 3)
        X = rng.standard_normal((3, 3))
        out = sparsify_support(s, X)
        assert np.array_equal(out.alpha, s.alpha)

    def test_duplicate_subnets_merge(self):
        rng = np.random.default_rng(52)
        w = rng.standard_normal((1, 2))
        w /= np.linalg.norm(w)
        others = random_sphere_net(rng, 2, 2)
        subnets = ((w,), (w,)) + others.subnets
        s = SphereFactoredNet(subnets, [1.0, 2.0, 0.5, -0.5])
        X = rng.standard_normal((3, 2))
        out = sparsify_support(s, X)
        assert np.count_nonzero(out.alpha) <= 3
        for x in X:
            assert parallel_eval(out, x) == pytest.approx(
                parallel_eval(s, x), abs=1e-10)

    def test_overcomplete_random_instances(self):
        rng = np.random.default_rng(53)
        for _ in range(10):
            n = int(rng.integers(2, 5))
            s = random_sphere_net(rng, n + 3, 2)
            X = rng.standard_normal((n, 2))
            out = sparsify_support(s, X)
            assert np.count_nonzero(out.alpha) <= n
            assert np.abs(out.alpha).sum() <= np.abs(s.alpha).sum() + 1e-10
            for x in X:
                assert parallel_eval(out, x) == pytest.approx(
                    parallel_eval(s, x), abs=1e-10)

    def test_rejects_deep(self):
        rng = np.random.default_rng(54)
        net = align_to_sphere(random_net(rng, 3, 2, 3, 2))
        with pytest.raises(ValueError):
            sparsify_support(net, np.zeros((1, 2)))


class TestImprovingDirection:
    def _sphere_deep(self, rng, L, k, d, m=3):
        raw = random_net(rng, L, m, k, d)
        return align_to_sphere(raw)

    def test_returns_none_when_sparse_enough(self):
        rng = np.random.default_rng(55)
        s = self._sphere_deep(rng, 3, 2, 2)
        assert improving_direction(s, rng.standard_normal((5, 2))) is None

    def test_certificate_strictly_decreases(self):
        rng = np.random.default_rng(56)
        found = 0
        for _ in range(10):
            n = 3
            s = self._sphere_deep(rng, 3, n + 4, 2)
            X = rng.standard_normal((n, 2))
            out = improving_direction(s, X)
            if out is None:
                continue
            beta, rho = out
            found += 1
            alpha = np.asarray(s.alpha)
            base = bridge_penalty(alpha, 3)
            up = bridge_penalty(alpha + rho * beta, 3)
            down = bridge_penalty(alpha - rho * beta, 3)
            assert min(up, down) < base - 1e-12
            # signs preserved on the perturbed actives
            nz = beta != 0.0
            assert np.all(np.sign(alpha[nz] + rho * beta[nz])
                          == np.sign(alpha[nz]))
            assert np.all(np.sign(alpha[nz] - rho * beta[nz])
                          == np.sign(alpha[nz]))
            # predictions untouched in both directions
            for x in X:
                v0 = parallel_eval(s, x)
                for sgn in (1.0, -1.0):
                    pert = SphereFactoredNet(s.subnets,
                                             alpha + sgn * rho * beta)
                    assert parallel_eval(pert, x) == pytest.approx(v0,
                                                                   abs=1e-9)
        assert found >= 1

    def test_rejects_depth2(self):
        rng = np.random.default_rng(57)
        s = random_sphere_net(rng, 5, 2)
        with pytest.raises(ValueError):
            improving_direction(s, np.zeros((2, 2)))
