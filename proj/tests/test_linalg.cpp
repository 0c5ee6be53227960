#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "uhlsim/linalg.hpp"
#include "uhlsim/rng.hpp"
#include "uhlsim/states.hpp"

using namespace uhlsim;

TEST_CASE("sign_sv on diagonal and permutation structure") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 0.5;
    Matrix s = sign_sv(m);
    CHECK(std::abs(s(0, 0).real() - 1.0) < 1e-12);
    CHECK(std::abs(s(1, 1)) < 1e-12);

    Matrix p = Matrix::Zero(2, 2);
    p(0, 1) = 0.3;
    p(1, 0) = 0.7;
    Matrix sp = sign_sv(p);
    CHECK(std::abs(sp(0, 1).real() - 1.0) < 1e-12);
    CHECK(std::abs(sp(1, 0).real() - 1.0) < 1e-12);
    CHECK(std::abs(sp(0, 0)) < 1e-12);
}

TEST_CASE("sign_sv equals the polar factor U V^+ from an independent route") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = rng.complex_gaussian();
        // polar oracle: M (M^+ M)^{-1/2} via the Hermitian square root
        Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
        RealVector inv_root = es.eigenvalues().cwiseMax(1e-30).cwiseSqrt().cwiseInverse();
        Matrix polar = m * es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().adjoint();
        CHECK((sign_sv(m) - polar).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("sign_sv is idempotent as a partial isometry") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix m(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m(i, j) = rng.complex_gaussian();
        Matrix v = sign_sv(m);
        CHECK((v * v.adjoint() * v - v).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("poly_sv identity and square") {
    Rng rng(7);
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = 0.4 * rng.complex_gaussian();
    while (operator_norm(m) > 1.0) m *= 0.5;
    Matrix identity_applied = poly_sv([](double x) { return x; }, -1, m);
    CHECK((identity_applied - m).cwiseAbs().maxCoeff() < 1e-12);
    Matrix square_applied = poly_sv([](double x) { return x * x; }, 1, m);
    CHECK((square_applied - m.adjoint() * m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("poly_sv rejects indefinite parity and oversized norm") {
    Matrix m = 2.0 * Matrix::Identity(2, 2);
    CHECK_THROWS(poly_sv([](double x) { return x; }, 0, Matrix::Identity(2, 2)));
    CHECK_THROWS(poly_sv([](double x) { return x; }, -1, m));
}

TEST_CASE("partial trace of a product input and of a maximally entangled state") {
    Rng rng(3);
    Matrix rho = rng.random_density(2);
    Matrix sig = rng.random_density(3);
    DimLayout lay = DimLayout::single("A", 2).tensor(DimLayout::single("B", 3));
    Matrix joint = tensor(rho, sig);
    CHECK((partial_trace(joint, lay, {"B"}) - rho).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((partial_trace(joint, lay, {"A"}) - sig).cwiseAbs().maxCoeff() < 1e-12);

    Vector gamma = Vector::Zero(4);
    gamma(0) = gamma(3) = 1.0 / std::sqrt(2.0);
    DimLayout ab = DimLayout::single("A", 2).tensor(DimLayout::single("B", 2));
    Matrix ent = gamma * gamma.adjoint();
    Matrix red = partial_trace(ent, ab, {"A"});
    CHECK((red - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS(partial_trace(ent, ab, {"X"}));
}

TEST_CASE("partial trace preserves trace and Hermiticity") {
    Rng rng(13);
    DimLayout lay = DimLayout::single("A", 2)
                        .tensor(DimLayout::single("B", 3))
                        .tensor(DimLayout::single("C", 2));
    for (int trial = 0; trial < 30; ++trial) {
        Matrix rho = rng.random_density(12);
        Matrix red = partial_trace(rho, lay, {"B"});
        CHECK(std::abs(red.trace().real() - 1.0) < 1e-12);
        CHECK((red - red.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("cross partial trace matches the Schmidt-sum oracle") {
    Rng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        Vector rho_v = rng.random_state_vector(4);
        Vector sig_v = rng.random_state_vector(4);
        Matrix m = cross_partial_trace_first(sig_v, rho_v, 2, 2);
        // oracle: independent Schmidt decompositions,
        // sum_{k,l} sqrt(p_k) sqrt(q_l) <e_k|g_l> |h_l><f_k|
        Schmidt r = schmidt_decomposition(rho_v, 2, 2);
        Schmidt s = schmidt_decomposition(sig_v, 2, 2);
        Matrix oracle = Matrix::Zero(2, 2);
        for (Index k = 0; k < r.coefficients.size(); ++k)
            for (Index l = 0; l < s.coefficients.size(); ++l) {
                Complex ov = (r.left.col(k).adjoint() * s.left.col(l))(0, 0);
                oracle += r.coefficients(k) * s.coefficients(l) * ov *
                          (s.right.col(l) * r.right.col(k).adjoint());
            }
        CHECK((m - oracle).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("dilate_contraction basics") {
    Matrix id2 = Matrix::Identity(2, 2);
    Matrix u = dilate_contraction(id2);
    CHECK((u.topLeftCorner(2, 2) - id2).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((u.bottomLeftCorner(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    Matrix z = Matrix::Zero(2, 2);
    Matrix uz = dilate_contraction(z);
    CHECK(uz.topLeftCorner(2, 2).cwiseAbs().maxCoeff() < 1e-12);
    Matrix ll = uz.bottomLeftCorner(2, 2);
    CHECK((ll.adjoint() * ll - id2).cwiseAbs().maxCoeff() < 1e-10);

    Matrix a = 0.6 * Matrix::Identity(2, 2);
    Matrix ua = dilate_contraction(a);
    CHECK((ua.bottomLeftCorner(2, 2) - 0.8 * id2).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ua.adjoint() * ua - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dilate_contraction unitarity on random contractions") {
    Rng rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        Index r = 2 + static_cast<Index>(rng.integer(3));
        Index c = 2 + static_cast<Index>(rng.integer(3));
        Matrix a(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) a(i, j) = 0.3 * rng.complex_gaussian();
        while (operator_norm(a) > 1.0) a *= 0.7;
        Matrix u = dilate_contraction(a);
        CHECK((u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <
              1e-10);
        CHECK((u.topLeftCorner(r, c) - a).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("min singular value of a product dominates the product of minima") {
    // supp-compatible PSD pairs
    Rng rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
        Index d = 2 + static_cast<Index>(rng.integer(3));
        Matrix a = rng.random_density(d);
        Matrix b = rng.random_density(d);
        Svd da = svd(a), db = svd(b), dab = svd(a * b);
        double smin_a = da.s(da.rank() - 1);
        double smin_b = db.s(db.rank() - 1);
        double smin_ab = dab.s(dab.rank() - 1);
        CHECK(smin_ab >= smin_a * smin_b - 1e-10);
    }
}

TEST_CASE("exponential of Hermitian matrices is Lipschitz in the generator") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        Index d = 2 + static_cast<Index>(rng.integer(3));
        Matrix a(d, d), e(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j) {
                a(i, j) = rng.complex_gaussian();
                e(i, j) = 0.1 * rng.complex_gaussian();
            }
        a = (a + a.adjoint()) / 2.0;
        e = (e + e.adjoint()) / 2.0;
        Matrix b = a + e;
        double t = -4.0 + 8.0 * rng.uniform();
        double lhs = operator_norm(exp_i_hermitian(a, t) - exp_i_hermitian(b, t));
        double rhs = std::abs(t) * operator_norm(a - b);
        CHECK(lhs <= rhs + 1e-10);
    }
}

TEST_CASE("swap operator and embed") {
    DimLayout lay = DimLayout::single("A", 2).tensor(DimLayout::single("B", 2));
    Matrix f = swap_operator(lay, "A", "B");
    Rng rng(37);
    Vector a = rng.random_state_vector(2), b = rng.random_state_vector(2);
    Vector ab = tensor(a, b), ba = tensor(b, a);
    CHECK((f * ab - ba).cwiseAbs().maxCoeff() < 1e-12);

    // embed acts on the named factor only
    DimLayout big = DimLayout::single("X", 2).tensor(DimLayout::single("Y", 3));
    Matrix op(2, 2);
    op << 0, 1, 1, 0;
    Matrix e = embed(op, big, {"X"});
    Matrix expect = tensor(op, Matrix::Identity(3, 3));
    CHECK((e - expect).cwiseAbs().maxCoeff() < 1e-12);
}
