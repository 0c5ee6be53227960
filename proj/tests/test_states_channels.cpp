#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uhlsim/channels.hpp"
#include "uhlsim/metrics.hpp"
#include "uhlsim/rng.hpp"
#include "uhlsim/states.hpp"

using namespace uhlsim;

TEST_CASE("canonical purification of simple states") {
    DimLayout a = DimLayout::single("A", 2);
    Matrix pure = Matrix::Zero(2, 2);
    pure(0, 0) = 1.0;
    PureState c1 = canonical_purification_exact(DensityMatrix(pure, a));
    CHECK(std::abs(std::abs(c1.amplitudes(0)) - 1.0) < 1e-12);  // |00>

    PureState c2 = canonical_purification_exact(DensityMatrix(Matrix::Identity(2, 2) / 2.0, a));
    CHECK(std::abs(std::abs(c2.amplitudes(0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(std::abs(c2.amplitudes(3)) - 1.0 / std::sqrt(2.0)) < 1e-12);

    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 0.3;
    diag(1, 1) = 0.7;
    PureState c3 = canonical_purification_exact(DensityMatrix(diag, a));
    CHECK(std::abs(std::abs(c3.amplitudes(0)) - std::sqrt(0.3)) < 1e-12);
    CHECK(std::abs(std::abs(c3.amplitudes(3)) - std::sqrt(0.7)) < 1e-12);
}

TEST_CASE("canonical purification marginals are omega and omega transpose") {
    Rng rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        Index d = trial % 2 == 0 ? 2 : 3;
        DensityMatrix omega(rng.random_density(d), DimLayout::single("A", d));
        PureState c = canonical_purification_exact(omega);
        Matrix on_a = c.reduced({"B"});
        Matrix on_b = c.reduced({"A"});
        CHECK((on_a - omega.matrix).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((on_b - omega.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("choi states of named channels") {
    QuantumChannel id = QuantumChannel::identity(DimLayout::single("A", 2));
    Matrix choi_id = id.choi();
    Vector gamma(4);
    gamma << 1, 0, 0, 1;
    CHECK((choi_id - gamma * gamma.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    QuantumChannel dep = QuantumChannel::depolarizing(1.0, 2);
    CHECK((dep.choi() / 2.0 - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-12);

    // amplitude damping Choi matches the direct Kraus computation
    QuantumChannel ad = QuantumChannel::amplitude_damping(0.4);
    Matrix direct = Matrix::Zero(4, 4);
    Matrix e = Matrix::Zero(2, 2);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) {
            e(i, j) = 1.0;
            direct.block(i * 2, j * 2, 2, 2) = ad.apply(e);
            e(i, j) = 0.0;
        }
    CHECK((ad.choi() - direct).cwiseAbs().maxCoeff() < 1e-12);
    // Choi positivity and normalized trace
    CHECK(std::abs(ad.choi().trace().real() - 2.0) < 1e-10);
}

TEST_CASE("kraus and stinespring evaluations agree") {
    Rng rng(43);
    QuantumChannel ad = QuantumChannel::amplitude_damping(0.3);
    QuantumChannel st = ad.with_stinespring();
    for (int trial = 0; trial < 100; ++trial) {
        Matrix rho = rng.random_density(2);
        CHECK((ad.apply(rho) - st.apply(rho)).cwiseAbs().maxCoeff() < 1e-10);
    }
    Matrix v = st.stinespring_isometry();
    CHECK((v.adjoint() * v - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("complementary channel basics") {
    // identity channel with trivial environment: complementary is constant
    QuantumChannel id = QuantumChannel::identity(DimLayout::single("A", 2)).with_stinespring();
    QuantumChannel comp = id.complementary();
    Rng rng(47);
    Matrix out1 = comp.apply(rng.random_density(2));
    Matrix out2 = comp.apply(rng.random_density(2));
    CHECK((out1 - out2).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(out1(0, 0).real() - 1.0) < 1e-10);

    // dephasing via a 2-dim environment: complementary Choi rank is 2
    QuantumChannel deph = QuantumChannel::dephasing(0.5).with_stinespring();
    QuantumChannel comp2 = deph.complementary();
    Svd d = svd(comp2.choi());
    CHECK(d.rank() == 2);

    // Kraus-only channel must be converted before asking for the complementary
    QuantumChannel plain = QuantumChannel::dephasing(0.5);
    CHECK_THROWS(plain.complementary());

    // partial-trace channel: complementary of tr_B is tr_A
    DimLayout ab = DimLayout::single("A", 2).tensor(DimLayout::single("B", 2));
    QuantumChannel tr_b = QuantumChannel::partial_trace_channel(ab, {"B"}).with_stinespring();
    QuantumChannel comp3 = tr_b.complementary();
    Matrix rho = rng.random_density(4);
    Matrix expect = partial_trace(rho, ab, {"A"});
    Matrix got = comp3.apply(rho);
    // complementary output equals tr_A up to the dilation's basis choice:
    // compare spectra
    Svd se = svd(expect), sg = svd(got);
    CHECK((se.s - sg.s).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fidelity basics and the Bhattacharyya example") {
    Rng rng(53);
    Matrix rho = rng.random_density(3);
    CHECK(std::abs(fidelity_pair(rho, rho).fidelity - 1.0) < 1e-10);

    Matrix zero = Matrix::Zero(2, 2), one = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    one(1, 1) = 1.0;
    CHECK(fidelity_pair(zero, one).fidelity < 1e-12);

    Matrix d1 = Matrix::Zero(2, 2), d2 = Matrix::Zero(2, 2);
    d1(0, 0) = 0.3;
    d1(1, 1) = 0.7;
    d2(0, 0) = 0.6;
    d2(1, 1) = 0.4;
    double expect = std::pow(std::sqrt(0.18) + std::sqrt(0.28), 2.0);
    CHECK(std::abs(fidelity_pair(d1, d2).fidelity - expect) < 1e-12);
    // symmetry
    CHECK(std::abs(fidelity_pair(d2, d1).fidelity - expect) < 1e-12);
}

TEST_CASE("spectrum stats of simple pairs") {
    Matrix half = Matrix::Identity(2, 2) / 2.0;
    SpectrumStats st = spectrum_stats(half, half);
    CHECK(st.r == 2);
    CHECK(st.s_min.has_value());
    CHECK(std::abs(*st.s_min - 0.5) < 1e-10);
    CHECK(std::abs(st.sqrt_fidelity - 1.0) < 1e-10);

    Matrix zero = Matrix::Zero(2, 2), one = Matrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    one(1, 1) = 1.0;
    SpectrumStats orth = spectrum_stats(zero, one);
    CHECK(orth.r == 0);
    CHECK(!orth.s_min.has_value());
}

TEST_CASE("spectrum stats invariants on random pairs") {
    Rng rng(59);
    for (int trial = 0; trial < 200; ++trial) {
        Matrix rho = rng.random_density(3);
        Matrix sig = rng.random_density(3);
        SpectrumStats st = spectrum_stats(rho, sig);
        CHECK(st.r <= std::min(st.r_rho, st.r_sigma));
        if (st.s_min) CHECK(static_cast<double>(st.r) * *st.s_min <= st.sqrt_fidelity + 1e-9);
        CHECK(st.sqrt_fidelity <= 1.0 + 1e-9);
        // Appendix F: singular values of tr_A'[|sigma_c><rho_c|] match sqrt(sigma)sqrt(rho)
        DimLayout a = DimLayout::single("A", 3);
        PureState rc = canonical_purification_exact(DensityMatrix(rho, a));
        PureState sc = canonical_purification_exact(DensityMatrix(sig, a));
        Matrix m = cross_partial_trace_first(sc.amplitudes, rc.amplitudes, 3, 3);
        Svd dm = svd(m);
        Svd ds = svd(sqrt_psd(sig) * sqrt_psd(rho));
        CHECK((dm.s - ds.s).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("fuchs-van de graaf and powers-stormer") {
    Rng rng(61);
    for (int trial = 0; trial < 1000; ++trial) {
        Index d = 2 + static_cast<Index>(rng.integer(3));
        Matrix rho = rng.random_density(d);
        Matrix sig = rng.random_density(d);
        double td = trace_distance(rho, sig);
        FidelityResult f = fidelity_pair(rho, sig);
        CHECK(1.0 - f.sqrt_fidelity <= td + 1e-9);
        CHECK(td <= std::sqrt(std::max(0.0, 1.0 - f.fidelity)) + 1e-9);

        // Powers-Stormer on PSD pairs
        Matrix a = rho, b = sig;
        double lhs = (sqrt_psd(a) - sqrt_psd(b)).norm();  // Frobenius = Schatten-2
        double rhs = std::sqrt(trace_norm(a - b));
        CHECK(lhs <= rhs + 1e-9);
    }
}

TEST_CASE("fidelity monotone under partial trace") {
    Rng rng(67);
    DimLayout lay = DimLayout::single("A", 2)
                        .tensor(DimLayout::single("B", 2))
                        .tensor(DimLayout::single("C", 2));
    for (int trial = 0; trial < 500; ++trial) {
        Matrix rho = rng.random_density(8);
        Matrix sig = rng.random_density(8);
        double f_abc = fidelity_pair(rho, sig).fidelity;
        double f_ab = fidelity_pair(partial_trace(rho, lay, {"C"}), partial_trace(sig, lay, {"C"}))
                          .fidelity;
        CHECK(f_ab >= f_abc - 1e-9);
    }
}
