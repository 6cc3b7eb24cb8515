import numpy as np
import pytest

from conftest import NEG, chain, z_line
from tropmartin.core import TropicalMatrix, TropicalVector, mat_mul
from tropmartin.martin import (
    DivergentStar,
    NoMinimalSpace,
    NotFullSupport,
    NotHarmonic,
    NotNormalized,
    NotSuperharmonic,
    PiSpec,
    RepresentingMeasure,
    UnboundedDensity,
    decompose_harmonic,
    is_extremal,
    is_harmonic,
    is_integrable,
    is_superharmonic,
    martin_data,
    minimal_martin_finite,
    mu,
    rebase_column,
    reconstruct,
    validate_pi,
)


@pytest.fixture
def md_ex1():
    return martin_data(chain(4), PiSpec.basepoint(0))


@pytest.fixture
def md_ex2():
    return martin_data(chain(4, zero_loop=True), PiSpec.basepoint(0))


@pytest.fixture
def md_z():
    return martin_data(z_line(3), PiSpec.basepoint(0))


def two_class_kernel():
    """Two zero loops at 0 and 2 joined through 1 in both directions."""
    W = np.full((3, 3), NEG)
    W[0, 0] = W[2, 2] = 0
    W[0, 1] = W[1, 0] = W[1, 2] = W[2, 1] = -1
    return TropicalMatrix.from_dense(W)


class TestValidatePi:
    def test_chain_basepoint_row(self):
        pi = validate_pi(chain(4), PiSpec.basepoint("0"))
        assert pi.resolved.values.tolist() == [0, 0, 0, 0]

    def test_divergent(self):
        with pytest.raises(DivergentStar):
            validate_pi(TropicalMatrix.from_dense([[1]]), PiSpec.basepoint("0"))

    def test_basepoint_without_access(self):
        A = TropicalMatrix.from_dense([[NEG, NEG], [0, NEG]])
        with pytest.raises(NotFullSupport):
            validate_pi(A, PiSpec.basepoint("0"))

    def test_explicit_not_superharmonic(self):
        A = TropicalMatrix.from_dense([[NEG, 0], [0, NEG]])
        with pytest.raises(NotSuperharmonic) as exc:
            validate_pi(A, PiSpec.explicit(TropicalVector(("0", "1"), [0, -1])))
        assert exc.value.witness == ("0", "1")

    def test_sigma_row(self):
        A = z_line(2)
        sigma = TropicalVector(("-2", "2"), [0, 0])
        pi = validate_pi(A, PiSpec.sigma(sigma)).resolved
        assert pi.values.tolist() == [0, -1, -2, -1, 0]


class TestMartinData:
    def test_z_kernel_closed_form(self, md_z):
        nodes = range(-3, 4)
        expected = np.array([[abs(j) - abs(i - j) for j in nodes] for i in nodes], dtype=float)
        assert np.array_equal(md_z.K, expected)

    def test_h_diagonal_is_one(self, md_z, md_ex1, md_ex2):
        for md in (md_z, md_ex1, md_ex2):
            assert np.all(np.diag(md.H) == 0)

    def test_hflat_diagonal_chain_loop(self, md_ex2):
        d = np.diag(md_ex2.Hflat)
        assert d[0] == 0 and np.all(d[1:] < 0)

    def test_kernel_bound(self, md_z):
        assert np.all(md_z.K <= -md_z.pi_values[:, None])

    def test_kflat_is_a_times_k(self, md_ex2):
        AK = mat_mul(md_ex2.A, TropicalMatrix.from_dense(md_ex2.K, md_ex2.labels)).dense()
        assert np.array_equal(AK, md_ex2.Kflat)

    def test_zero_cycle_merges_columns(self):
        md = martin_data(TropicalMatrix.from_dense([[NEG, 0], [0, NEG]]), PiSpec.basepoint("0"))
        assert md.column_classes == (("0", "1"),)
        assert minimal_martin_finite(md) == ["0"]

    def test_minimal(self, md_ex1, md_ex2):
        assert minimal_martin_finite(md_ex2) == ["0"]
        assert minimal_martin_finite(md_ex1) == []

    def test_two_classes_minimal(self):
        md = martin_data(two_class_kernel(), PiSpec.basepoint("0"))
        assert minimal_martin_finite(md) == ["0", "2"]

    def test_rebase_column(self, md_z):
        w = md_z.column("2")
        assert rebase_column(w, md_z, "1")[md_z.A.index("1")] == 0


class TestHarmonicity:
    def test_recurrent_column_harmonic(self, md_ex2):
        assert is_harmonic(md_ex2, md_ex2.column("0"))

    def test_zero_vector(self, md_ex2):
        z = np.full(4, NEG)
        assert is_superharmonic(md_ex2, z) and is_harmonic(md_ex2, z)

    def test_star_column_superharmonic_only(self, md_ex1):
        col = md_ex1.star.dense()[:, 2]
        assert is_superharmonic(md_ex1, col)
        assert not is_harmonic(md_ex1, col)

    def test_integrable(self, md_z):
        assert is_integrable(md_z, np.arange(-3, 4, dtype=float))

    def test_posinf_rejected(self, md_z):
        with pytest.raises(Exception):
            is_superharmonic(md_z, np.full(7, np.inf))


class TestRepresentation:
    def test_mu_of_recurrent_column(self, md_ex2):
        assert mu(md_ex2, md_ex2.column("0")).density["0"] == 0

    def test_mu_homogeneous(self, md_z):
        u = np.arange(-3, 4, dtype=float)
        a, b = mu(md_z, u), mu(md_z, u + 2.5)
        assert all(b.density[k] == a.density[k] + 2.5 for k in a.support)

    def test_mu_linear_vector(self, md_z):
        nu = mu(md_z, np.arange(-3, 4, dtype=float))
        for j in range(-3, 4):
            assert nu.density[str(j)] == -abs(j) + j

    def test_round_trip(self, md_z):
        u = np.arange(-3, 4, dtype=float)
        assert reconstruct(md_z, mu(md_z, u)).values.tolist() == u.tolist()

    def test_empty_density(self, md_z):
        nu = RepresentingMeasure(("0",), {"0": NEG})
        assert np.all(np.isneginf(reconstruct(md_z, nu).values))

    def test_singleton(self, md_z):
        nu = RepresentingMeasure(("2",), {"2": 0.0})
        assert reconstruct(md_z, nu) == md_z.column("2")

    def test_unbounded_density(self):
        with pytest.raises(UnboundedDensity):
            RepresentingMeasure(("0",), {"0": np.inf})

    def test_mu_needs_superharmonic(self, md_z):
        with pytest.raises(NotSuperharmonic):
            mu(md_z, np.array([0, 0, 0, 5, 0, 0, 0], dtype=float))


class TestDecompose:
    def test_recurrent_column_is_dirac(self, md_ex2):
        nu = decompose_harmonic(md_ex2, md_ex2.column("0"))
        assert nu.support == ("0",) and nu.density == {"0": 0.0}

    def test_chain_has_no_finite_harmonic(self, md_ex1):
        with pytest.raises((NotHarmonic, NoMinimalSpace)):
            decompose_harmonic(md_ex1, np.zeros(4))

    def test_two_class_round_trip(self):
        md = martin_data(two_class_kernel(), PiSpec.basepoint("0"))
        gen = RepresentingMeasure(("0", "2"), {"0": -1.0, "2": 0.5})
        u = reconstruct(md, gen)
        nu = decompose_harmonic(md, u)
        assert reconstruct(md, nu) == u
        assert all(nu.density[k] >= gen.density[k] for k in gen.support)

    def test_zero_vector_excluded(self, md_ex2):
        with pytest.raises(NotHarmonic):
            decompose_harmonic(md_ex2, np.full(4, NEG))


class TestExtremality:
    def test_columns_are_extremal(self, md_z):
        for j in md_z.labels:
            assert is_extremal(md_z, md_z.column(j))

    def test_two_term_supremum(self, md_z):
        u = np.fmax(md_z.K[:, 0], md_z.K[:, 6])
        u = u - (md_z.pi_values + u).max()
        ext = is_extremal(md_z, u)
        assert not ext
        v1, v2 = ext.witness
        assert np.array_equal(np.fmax(v1.values, v2.values), u)
        assert not np.array_equal(v1.values, u) and not np.array_equal(v2.values, u)
        assert is_superharmonic(md_z, v1) and is_superharmonic(md_z, v2)

    def test_unnormalised_rejected(self, md_z):
        with pytest.raises(NotNormalized):
            is_extremal(md_z, md_z.K[:, 0] + 1)
