#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uhlsim/metrics.hpp"
#include "uhlsim/rng.hpp"
#include "uhlsim/uhlmann.hpp"

using namespace uhlsim;

namespace {

PureState random_pair_state(Rng& rng, Index d_a, Index d_b) {
    DimLayout lay = DimLayout::single("A", d_a).tensor(DimLayout::single("B", d_b));
    return PureState(rng.random_state_vector(d_a * d_b), lay);
}

double fidelity_of_marginals(const PureState& rho, const PureState& sigma) {
    return fidelity_pair(rho.reduced({"B"}), sigma.reduced({"B"})).fidelity;
}

// F(V|rho>, |sigma>) = |<sigma|(I x V)|rho>|^2
double post_isometry_fidelity(const Matrix& v, const PureState& rho, const PureState& sigma) {
    DimLayout lay = rho.layout;
    Matrix lifted = embed(v, lay, {lay.factor(1).label});
    Complex overlap = (sigma.amplitudes.adjoint() * lifted * rho.amplitudes)(0, 0);
    return std::norm(overlap);
}

}  // namespace

TEST_CASE("exact uhlmann isometry reaches the marginal fidelity") {
    Rng rng(201);
    for (int trial = 0; trial < 200; ++trial) {
        Index d = 2 + trial % 3;
        PureState rho = random_pair_state(rng, d, d);
        PureState sigma = random_pair_state(rng, d, d);
        Matrix v = exact_uhlmann_isometry(rho, sigma);
        double achieved = post_isometry_fidelity(v, rho, sigma);
        double target = fidelity_of_marginals(rho, sigma);
        CHECK(std::abs(achieved - target) <= 1e-9);
    }
}

TEST_CASE("exact uhlmann isometry on equal and orthogonal inputs") {
    Rng rng(203);
    PureState psi = random_pair_state(rng, 2, 2);
    Matrix v = exact_uhlmann_isometry(psi, psi);
    // acts as the identity on supp(rho^B)
    Matrix rho_b = psi.reduced({"A"});
    CHECK((v * rho_b - rho_b).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(post_isometry_fidelity(v, psi, psi) - 1.0) < 1e-9);

    DimLayout lay = DimLayout::single("A", 2).tensor(DimLayout::single("B", 2));
    Vector v00 = Vector::Zero(4);
    v00(0) = 1.0;
    Vector v1p = Vector::Zero(4);
    v1p(2) = v1p(3) = 1.0 / std::sqrt(2.0);
    Matrix v0 = exact_uhlmann_isometry(PureState(v00, lay), PureState(v1p, lay));
    CHECK(v0.cwiseAbs().maxCoeff() < 1e-9);  // orthogonal marginals, V = 0 admissible
}

TEST_CASE("no unitary on B beats the uhlmann isometry") {
    Rng rng(207);
    PureState rho = random_pair_state(rng, 2, 2);
    PureState sigma = random_pair_state(rng, 2, 2);
    double best = post_isometry_fidelity(exact_uhlmann_isometry(rho, sigma), rho, sigma);
    for (int trial = 0; trial < 1000; ++trial) {
        Matrix u = rng.random_unitary(2);
        CHECK(post_isometry_fidelity(u, rho, sigma) <= best + 1e-9);
    }
}

TEST_CASE("purified difference encoding block matches the cross partial trace") {
    Rng rng(211);
    PureState rho = random_pair_state(rng, 2, 3);
    PureState sigma = random_pair_state(rng, 2, 3);
    StatePrepOracle ur = StatePrepOracle::preparing(rho, "Urho");
    StatePrepOracle us = StatePrepOracle::preparing(sigma, "Usigma");
    ResourceLedger ledger;
    BlockEncoding w = build_purified_difference_encoding(ur, us, ledger);
    CHECK(ledger.count("Usigma.queries") == 1);
    CHECK(ledger.count("Urho.inverse_queries") == 1);
    Matrix m = cross_partial_trace_first(sigma.amplitudes, rho.amplitudes, 2, 3);
    CHECK((w.block() - m).cwiseAbs().maxCoeff() < 1e-10);
    // singular values of the block equal those of sqrt(sigma^A) sqrt(rho^A)
    Svd dm = svd(m);
    Svd dr = svd(sqrt_psd(sigma.reduced({"B"})) * sqrt_psd(rho.reduced({"B"})));
    CHECK((dm.s.head(dr.s.size()) - dr.s).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("qsvt ledger accounting at degree 231") {
    Rng rng(213);
    PureState rho = random_pair_state(rng, 2, 2);
    PureState sigma = random_pair_state(rng, 2, 2);
    StatePrepOracle ur = StatePrepOracle::preparing(rho, "Urho");
    StatePrepOracle us = StatePrepOracle::preparing(sigma, "Usigma");
    ResourceLedger scratch, ledger;
    BlockEncoding w = build_purified_difference_encoding(ur, us, scratch);
    SignPolynomial p = synthesize_sign_polynomial(0.5, 0.01);
    REQUIRE(p.degree == 231);
    qsvt_apply(w, p, ledger);
    // 116 uses of W (1 Usigma + 1 Urho^+) and 115 of W^+
    CHECK(ledger.count("Usigma.queries") == 116);
    CHECK(ledger.count("Urho.inverse_queries") == 116);
    CHECK(ledger.count("Usigma.inverse_queries") == 115);
    CHECK(ledger.count("Urho.queries") == 115);
}

TEST_CASE("product of encodings composes blocks and certificates") {
    Rng rng(217);
    Matrix a1 = 0.5 * rng.random_unitary(2);
    Matrix a2 = 0.4 * rng.random_unitary(2);
    BlockEncoding b1 = make_block_encoding(dilate_contraction(a1), 2, 2, 1.0, 1, a1, 1e-10);
    BlockEncoding b2 = make_block_encoding(dilate_contraction(a2), 2, 2, 1.0, 1, a2, 1e-10);
    BlockEncoding prod = product_encodings(b1, b2);
    CHECK((prod.block() - a1 * a2).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(prod.alpha == 1.0);
    // epsilon composition per the lemma
    b1.eps = 0.01;
    b2.eps = 0.02;
    BlockEncoding prod2 = product_encodings(b1, b2);
    CHECK(std::abs(prod2.eps - 0.03) < 1e-12);
    // identity x identity stays exact
    Matrix id = Matrix::Identity(2, 2);
    BlockEncoding bi = make_block_encoding(dilate_contraction(id), 2, 2, 1.0, 1, id, 1e-12);
    BlockEncoding pid = product_encodings(bi, bi);
    CHECK((pid.block() - id).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(pid.eps <= 1e-9);
}

TEST_CASE("qsvt robustness property") {
    Rng rng(219);
    SignPolynomial p = synthesize_sign_polynomial(0.4, 0.2);
    for (int trial = 0; trial < 40; ++trial) {
        Matrix m(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = 0.2 * rng.complex_gaussian();
        while (operator_norm(m) > 0.6) m *= 0.5;
        Matrix pert(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) pert(i, j) = rng.complex_gaussian();
        pert *= 0.01 / operator_norm(pert);
        Matrix mt = m + pert;
        double eta = operator_norm(m - mt);
        double mid = operator_norm((m + mt) / 2.0);
        if (eta + mid * mid > 1.0 || mid * mid > 0.5) continue;  // lemma precondition
        Matrix pm = poly_sv([&](double x) { return p(x); }, -1, m);
        Matrix pmt = poly_sv([&](double x) { return p(x); }, -1, mt);
        CHECK(operator_norm(pm - pmt) <=
              2.0 * static_cast<double>(p.degree) * eta + 1e-8);
    }
}

TEST_CASE("algorithm 1 fidelity mode guarantee and ledger") {
    Rng rng(223);
    const double delta = 0.1;
    for (int trial = 0; trial < 8; ++trial) {
        PureState rho = random_pair_state(rng, 2, 2);
        PureState sigma = random_pair_state(rng, 2, 2);
        StatePrepOracle ur = StatePrepOracle::preparing(rho, "Urho");
        StatePrepOracle us = StatePrepOracle::preparing(sigma, "Usigma");
        ResourceLedger ledger;
        UhlmannQueryResult res =
            uhlmann_purified_query(ur, us, delta, AccuracyMode::fidelity, ledger);

        // branch formula
        CHECK(res.branch.delta1 == delta / 4.0);
        CHECK(res.branch.u == sign_degree_bound(res.branch.beta, res.branch.delta1));
        std::int64_t total = ledger.count("Usigma.queries") + ledger.count("Usigma.inverse_queries");
        CHECK(total == res.poly.degree);
        CHECK(ledger.within_bounds());

        // guarantee: F(T(rho), |sigma>) >= F - delta with T = tr_D o W~ o P0
        DimLayout joint = DimLayout::single("A", 2)
                              .tensor(DimLayout::single("D", res.d_flag))
                              .tensor(DimLayout::single("B", 2));
        Matrix zero_d = Matrix::Zero(res.d_flag, res.d_flag);
        zero_d(0, 0) = 1.0;
        DimLayout build = DimLayout::single("A", 2)
                              .tensor(DimLayout::single("B", 2))
                              .tensor(DimLayout::single("D", res.d_flag));
        Matrix init = tensor(rho.density(), zero_d);
        Matrix perm = permute_factors(build, {"A", "D", "B"});
        Matrix state = perm * init * perm.adjoint();
        Matrix w_emb = embed(res.w_tilde, joint, {"D", "B"});
        Matrix evolved = w_emb * state * w_emb.adjoint();
        Matrix out_ab = partial_trace(evolved, joint, {"D"});
        double post = fidelity_to_pure(out_ab, sigma.amplitudes);
        double target = fidelity_of_marginals(rho, sigma);
        CHECK(post >= target - delta - 1e-9);
    }
}

TEST_CASE("algorithm 1 diamond mode meets the bound") {
    Rng rng(227);
    const double delta = 0.3;
    PureState rho = random_pair_state(rng, 2, 2);
    PureState sigma = random_pair_state(rng, 2, 2);
    StatePrepOracle ur = StatePrepOracle::preparing(rho, "Urho");
    StatePrepOracle us = StatePrepOracle::preparing(sigma, "Usigma");
    ResourceLedger ledger;
    UhlmannQueryResult res = uhlmann_purified_query(ur, us, delta, AccuracyMode::diamond, ledger);
    CHECK(res.branch.delta1 == (delta / 3.0) * (delta / 3.0));
    DiamondResult d = diamond_distance(query_result_channel(res), query_ideal_channel(res));
    REQUIRE(d.exact.has_value());
    CHECK(*d.exact <= delta);
}

TEST_CASE("algorithm 2 fidelity guarantee and sample ledger") {
    Rng rng(229);
    const double delta = 0.2;
    for (int trial = 0; trial < 3; ++trial) {
        PureState rho = random_pair_state(rng, 2, 2);
        PureState sigma = random_pair_state(rng, 2, 2);
        ResourceLedger ledger;
        UhlmannSampleResult res =
            uhlmann_purified_sample(rho, sigma, delta, AccuracyMode::fidelity, ledger);

        CHECK(res.branch.delta1 == delta / 8.0);
        CHECK(ledger.count("upsilon.samples") == res.poly.degree * res.m_dmesub);
        CHECK(res.m_dmesub == static_cast<std::int64_t>(std::ceil(16.0 / res.delta2)));
        CHECK(ledger.within_bounds());

        Matrix out_ab = apply_sample_transformation(res, rho.density(), 2);
        double post = fidelity_to_pure(out_ab, sigma.amplitudes);
        double target = fidelity_of_marginals(rho, sigma);
        CHECK(post >= target - delta - 1e-9);
    }
}

TEST_CASE("block encoding of the square root of a state") {
    ResourceLedger ledger;
    const double delta = 0.1;
    SUBCASE("maximally mixed") {
        SqrtStateEncoding enc =
            block_enc_sqrt_state(Matrix::Identity(2, 2) / 2.0, delta, ledger, "omega");
        Matrix expect = Matrix::Identity(2, 2) / 4.0;  // sqrt(I/2)/(2 sqrt 2) = I/4
        CHECK((enc.encoding.block() - expect).cwiseAbs().maxCoeff() <= delta);
        CHECK(enc.realized_error <= delta);
    }
    SUBCASE("pure state") {
        Matrix pure = Matrix::Zero(2, 2);
        pure(0, 0) = 1.0;
        SqrtStateEncoding enc = block_enc_sqrt_state(pure, delta, ledger, "omega");
        Matrix expect = Matrix::Zero(2, 2);
        expect(0, 0) = 1.0 / (2.0 * std::sqrt(2.0));
        CHECK((enc.encoding.block() - expect).cwiseAbs().maxCoeff() <= delta);
    }
    SUBCASE("direct certificate for a random qubit state") {
        Rng rng(233);
        Matrix omega = rng.random_density(2);
        SqrtStateEncoding enc = block_enc_sqrt_state(omega, delta, ledger, "omega");
        Matrix ideal = sqrt_psd(omega) / (2.0 * std::sqrt(2.0));
        CHECK(operator_norm(enc.encoding.block() - ideal) <= delta);
    }
}

TEST_CASE("canonical purification algorithm on qubit targets") {
    const double delta = 0.2;
    DimLayout a = DimLayout::single("A", 2);
    auto run = [&](const Matrix& omega) {
        ResourceLedger ledger;
        DensityMatrix om(omega, a);
        CanonicalPurificationResult res = canonical_purification_alg(om, delta, ledger, "omega");
        PureState exact = canonical_purification_exact(om);
        double dist = trace_distance(res.state.matrix, exact.density());
        CHECK(dist <= delta);
        CHECK(res.q == res.sqrt_encoding.h * res.u);
        return res;
    };
    Matrix pure = Matrix::Zero(2, 2);
    pure(0, 0) = 1.0;
    run(pure);
    run(Matrix::Identity(2, 2) / 2.0);
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 0.3;
    diag(1, 1) = 0.7;
    run(diag);
}

TEST_CASE("canonical purification amplification degree grows with sqrt(dA)") {
    DimLayout a2 = DimLayout::single("A", 2);
    DimLayout a4 = DimLayout::single("A", 4);
    ResourceLedger l2, l4;
    CanonicalPurificationResult r2 =
        canonical_purification_alg(DensityMatrix(Matrix::Identity(2, 2) / 2.0, a2), 0.2, l2, "w");
    CanonicalPurificationResult r4 =
        canonical_purification_alg(DensityMatrix(Matrix::Identity(4, 4) / 4.0, a4), 0.2, l4, "w");
    // beta scales as 1/sqrt(dA), so u scales by about sqrt(2)
    double ratio = static_cast<double>(r4.u) / static_cast<double>(r2.u);
    CHECK(ratio > 1.3);
    CHECK(ratio < 1.6);
}

TEST_CASE("algorithm 3 fidelity guarantee on full-rank qubit pairs") {
    Rng rng(239);
    const double delta = 0.25;
    Matrix rho = rng.random_full_rank_density(2, 0.15);
    Matrix sigma = rng.random_full_rank_density(2, 0.15);
    DimLayout a = DimLayout::single("A", 2);
    ResourceLedger ledger;
    UhlmannMixedResult res = uhlmann_mixed_sample(DensityMatrix(rho, a), DensityMatrix(sigma, a),
                                                  delta, AccuracyMode::fidelity, ledger);
    PureState rho_c = canonical_purification_exact(DensityMatrix(rho, a));
    Matrix out = apply_sample_transformation(res.inner, rho_c.density(), 2);
    PureState sigma_c = canonical_purification_exact(DensityMatrix(sigma, a));
    double post = fidelity_to_pure(out, sigma_c.amplitudes);
    double target = fidelity_pair(rho, sigma).fidelity;
    CHECK(post >= target - delta - 1e-9);
    CHECK(res.zeta > 0);
    CHECK(ledger.within_bounds());
}

TEST_CASE("algorithm 5 guarantee, identity case, and the sample advantage") {
    Rng rng(241);
    const double delta = 0.25;
    DimLayout a = DimLayout::single("A", 2);

    // rho = sigma: the variant acts as the identity on the support
    Matrix rho_eq = rng.random_full_rank_density(2, 0.2);
    ResourceLedger l_eq;
    VariantUhlmannResult req = variant_uhlmann_mixed(DensityMatrix(rho_eq, a),
                                                     DensityMatrix(rho_eq, a), delta,
                                                     AccuracyMode::fidelity, l_eq);
    PureState rc_eq = canonical_purification_exact(DensityMatrix(rho_eq, a));
    Matrix out_eq = apply_variant_transformation(req, rc_eq.density(), 2);
    CHECK(fidelity_to_pure(out_eq, rc_eq.amplitudes) >= 1.0 - delta - 1e-9);

    // random full-rank pair
    Matrix rho = rng.random_full_rank_density(2, 0.15);
    Matrix sigma = rng.random_full_rank_density(2, 0.15);
    ResourceLedger ledger;
    VariantUhlmannResult res = variant_uhlmann_mixed(DensityMatrix(rho, a), DensityMatrix(sigma, a),
                                                     delta, AccuracyMode::fidelity, ledger);
    PureState rho_c = canonical_purification_exact(DensityMatrix(rho, a));
    PureState sigma_c = canonical_purification_exact(DensityMatrix(sigma, a));
    Matrix out = apply_variant_transformation(res, rho_c.density(), 2);
    double post = fidelity_to_pure(out, sigma_c.amplitudes);
    double target = fidelity_pair(rho, sigma).fidelity;
    CHECK(post >= target - delta - 1e-9);

    // the variant needs fewer samples than algorithm 3 on the same instance
    ResourceLedger l3;
    UhlmannMixedResult r3 = uhlmann_mixed_sample(DensityMatrix(rho, a), DensityMatrix(sigma, a),
                                                 delta, AccuracyMode::fidelity, l3);
    CHECK(res.zeta < r3.zeta);
}
