import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from polylin import LinearizationKind, MatrixPolynomial, Pencil, linearization_directory
from polylin.exceptions import InvalidArgumentException


class TestLinearizationKind:
    @pytest.mark.parametrize("text,kind", [("t", LinearizationKind.T), (" DK ", LinearizationKind.Dk), ("c1", LinearizationKind.C1)])
    def test_parse(self, text, kind):
        assert LinearizationKind.parse(text) is kind

    def test_parse_unknown(self):
        with pytest.raises(InvalidArgumentException):
            LinearizationKind.parse("C2")

    def test_str(self):
        assert str(LinearizationKind.D1) == "D1"


class TestLinearizationDirectory:
    def test_every_kind_is_registered(self):
        expected = [LinearizationKind.T, LinearizationKind.R, LinearizationKind.D1, LinearizationKind.Dk, LinearizationKind.C1]
        for role in linearization_directory.ROLES:
            assert linearization_directory.kinds(role) == expected

    def test_lookup_by_name(self):
        assert linearization_directory["c1", "build"] is linearization_directory[LinearizationKind.C1, "build"]
        assert ("dk", "left") in linearization_directory

    def test_unknown_pair(self, caplog):
        with pytest.raises(KeyError):
            linearization_directory[LinearizationKind.CUSTOM, "build"]
        assert "No linearization function found" in caplog.text

    def test_unknown_kind(self):
        with pytest.raises(KeyError):
            linearization_directory["Q", "build"]

    def test_register_rejects_unknown_role(self):
        with pytest.raises(ValueError):
            linearization_directory.register(LinearizationKind.T, "middle")


class TestPencil:
    def test_defaults(self):
        L = Pencil(np.eye(2), np.diag([1.0, 2.0]))
        assert (L.n, L.k, L.m) == (2, 1, 2)
        assert L.kind is LinearizationKind.CUSTOM
        assert str(L) == "<Pencil(kind=custom, n=2, k=1)>"

    def test_size_must_factor(self):
        with pytest.raises(InvalidArgumentException):
            Pencil(np.eye(4), np.eye(4), n=3, k=1)

    def test_shapes_must_agree(self):
        with pytest.raises(InvalidArgumentException):
            Pencil(np.eye(2), np.eye(3))

    def test_eval(self):
        L = Pencil(np.eye(2), np.diag([1.0, 2.0]))
        assert_array_equal(L.eval(0), -L.L0)
        assert_array_equal(L.eval(1), L.L1 - L.L0)

    def test_reversal(self):
        L = Pencil(np.eye(2), np.diag([1.0, 2.0]))
        z = 0.5 - 0.25j
        assert_allclose(L.reversal().eval(z), L.L1 - z * L.L0, rtol=1e-15)

    def test_as_polynomial_evaluates_like_pencil(self):
        L = Pencil([[1, 2], [3, 4]], [[0, 1j], [1, 0]])
        z = 1.5 + 0.5j
        assert_allclose(L.as_polynomial.eval(z), L.eval(z), rtol=1e-15)
        assert isinstance(L.as_polynomial, MatrixPolynomial)

    def test_norms(self):
        L = Pencil(np.diag([3.0, -4.0]), np.eye(2))
        assert L.norms == pytest.approx((4.0, 1.0))

    def test_hermitian(self):
        assert Pencil([[1, 1j], [-1j, 2]], np.eye(2)).is_hermitian
        assert not Pencil([[1, 1j], [1j, 2]], np.eye(2)).is_hermitian

    def test_dict_round_trip(self):
        L = Pencil(np.eye(3), np.ones((3, 3)), kind="C1", n=1, k=3)
        M = Pencil.from_dict(L.to_dict())
        assert (M.kind, M.n, M.k) == (LinearizationKind.C1, 1, 3)
        assert_array_equal(M.L0, L.L0)

    def test_from_dict_checks_size(self):
        data = Pencil(np.eye(2), np.eye(2)).to_dict()
        data["m"] = 3
        with pytest.raises(InvalidArgumentException):
            Pencil.from_dict(data)
