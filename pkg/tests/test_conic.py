import numpy as np
import pytest
import scipy.sparse as sp

from rendopt.conic import (
    Cone,
    ConeBlock,
    ConicProgram,
    Status,
    parse,
    serialize,
    solve,
    validate,
)


def block(A, b, cone):
    return ConeBlock(A=sp.csr_matrix(np.atleast_2d(A)), b=np.atleast_1d(b), cone=cone)


class TestValidate:
    def test_empty_program_ok(self):
        assert validate(ConicProgram(n=0, c=np.zeros(0))) == []

    def test_soc_dim_one_rejected(self):
        p = ConicProgram(
            n=1, c=np.zeros(1), blocks=[block([[1.0]], [0.0], Cone.SOC)]
        )
        assert any("SOC" in e for e in validate(p))

    def test_nan_rejected(self):
        p = ConicProgram(
            n=1, c=np.zeros(1), blocks=[block([[np.nan]], [0.0], Cone.NONNEG)]
        )
        assert any("non-finite" in e for e in validate(p))

    def test_shape_mismatch(self):
        p = ConicProgram(
            n=2, c=np.zeros(2), blocks=[block([[1.0]], [0.0], Cone.NONNEG)]
        )
        assert any("shape" in e for e in validate(p))


class TestSolve:
    def test_linear_bound(self):
        # min x subject to x - 1 >= 0
        p = ConicProgram(
            n=1,
            c=np.array([1.0]),
            blocks=[block([[1.0]], [-1.0], Cone.NONNEG)],
        )
        res = solve(p)
        assert res.status is Status.OPTIMAL
        assert res.x[0] == pytest.approx(1.0, abs=1e-8)
        assert res.objective == pytest.approx(1.0, abs=1e-8)

    def test_second_order_cone(self):
        # min t subject to (t, 3, 4) in SOC
        A = np.array([[1.0], [0.0], [0.0]])
        b = np.array([0.0, 3.0, 4.0])
        p = ConicProgram(n=1, c=np.array([1.0]), blocks=[block(A, b, Cone.SOC)])
        res = solve(p)
        assert res.status is Status.OPTIMAL
        assert res.x[0] == pytest.approx(5.0, abs=1e-7)

    def test_one_norm_epigraph(self):
        # ||(2, -3)||_1 via slack pairs: variables (s1+, s1-, s2+, s2-)
        # with s+ - s- = value, all slacks nonnegative
        c = np.ones(4)
        rows = [
            block([[1.0, -1.0, 0.0, 0.0]], [-2.0], Cone.ZERO),
            block([[0.0, 0.0, 1.0, -1.0]], [3.0], Cone.ZERO),
            block(np.eye(4), np.zeros(4), Cone.NONNEG),
        ]
        p = ConicProgram(n=4, c=c, blocks=rows)
        res = solve(p)
        assert res.status is Status.OPTIMAL
        assert res.objective == pytest.approx(5.0, abs=1e-7)

    def test_infeasible_detected(self):
        # x >= 1 and -x >= 1 simultaneously
        p = ConicProgram(
            n=1,
            c=np.array([1.0]),
            blocks=[
                block([[1.0]], [-1.0], Cone.NONNEG),
                block([[-1.0]], [-1.0], Cone.NONNEG),
            ],
        )
        res = solve(p)
        assert res.status is Status.INFEASIBLE

    def test_objective_identity_and_gap(self):
        rng = np.random.default_rng(0)
        A = rng.normal(size=(3, 5))
        x_feas = rng.uniform(0.5, 1.5, 5)
        p = ConicProgram(
            n=5,
            c=rng.uniform(0.5, 2.0, 5),
            blocks=[
                block(A, -A @ x_feas, Cone.ZERO),
                block(np.eye(5), np.zeros(5), Cone.NONNEG),
            ],
        )
        res = solve(p)
        assert res.status is Status.OPTIMAL
        assert res.objective == pytest.approx(
            float(p.c @ res.x), rel=1e-8, abs=1e-10
        )
        assert res.duality_gap is not None and res.duality_gap <= 1e-6

    def test_invalid_program_raises(self):
        p = ConicProgram(
            n=1, c=np.zeros(1), blocks=[block([[np.nan]], [0.0], Cone.NONNEG)]
        )
        with pytest.raises(ValueError):
            solve(p)


class TestSerialization:
    def build_program(self):
        rng = np.random.default_rng(7)
        A1 = sp.random(4, 6, density=0.4, random_state=3, format="csr")
        blocks = [
            ConeBlock(A=A1, b=rng.normal(size=4), cone=Cone.ZERO),
            block(np.eye(6) * np.pi, rng.normal(size=6), Cone.NONNEG),
            block(rng.normal(size=(3, 6)), rng.normal(size=3), Cone.SOC),
        ]
        return ConicProgram(n=6, c=rng.normal(size=6), blocks=blocks)

    def test_round_trip_bit_exact(self):
        p = self.build_program()
        q = parse(serialize(p))
        assert q.n == p.n
        assert np.array_equal(q.c, p.c)
        assert len(q.blocks) == len(p.blocks)
        for bp, bq in zip(p.blocks, q.blocks):
            assert bq.cone is bp.cone
            assert np.array_equal(bq.b, bp.b)
            assert np.array_equal(
                bq.A.toarray(), bp.A.toarray()
            )

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse("not a program")
