#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uhlsim/dme.hpp"
#include "uhlsim/metrics.hpp"
#include "uhlsim/rng.hpp"

using namespace uhlsim;

namespace {

PureState random_pair_state(Rng& rng, Index d_a, Index d_b) {
    DimLayout lay = DimLayout::single("A", d_a).tensor(DimLayout::single("B", d_b));
    return PureState(rng.random_state_vector(d_a * d_b), lay);
}

// one literal DMESUB step: adjoin a fresh copy of Upsilon, apply the
// controlled partial swap, trace the copy
Matrix brute_force_step(const Matrix& x, const Matrix& upsilon, double dt, int sign) {
    const Index body = x.rows();
    // registers [body, C2', copy]
    DimLayout lay = DimLayout::single("S", body)
                        .tensor(DimLayout::single("Cp", 2))
                        .tensor(DimLayout::single("T", body));
    Matrix f = swap_operator(lay.without({"Cp"}), "S", "T");
    DimLayout st = DimLayout::single("S", body).tensor(DimLayout::single("T", body));
    Matrix ef = exp_i_hermitian(f, sign * dt);
    Matrix ef_inv = exp_i_hermitian(f, -sign * dt);
    // W = |0><0|_{Cp} x e^{i dt F} + |1><1|_{Cp} x e^{-i dt F}, with Cp in the middle
    Matrix w = Matrix::Zero(body * 2 * body, body * 2 * body);
    for (Index s = 0; s < body; ++s)
        for (Index t = 0; t < body; ++t)
            for (Index s2 = 0; s2 < body; ++s2)
                for (Index t2 = 0; t2 < body; ++t2) {
                    w(s * 2 * body + 0 * body + t, s2 * 2 * body + 0 * body + t2) =
                        ef(s * body + t, s2 * body + t2);
                    w(s * 2 * body + 1 * body + t, s2 * 2 * body + 1 * body + t2) =
                        ef_inv(s * body + t, s2 * body + t2);
                }
    // fresh copy state on [Cp, T] reordered to x x (Cp,T)
    Matrix joint = tensor(x, upsilon);
    Matrix out = w * joint * w.adjoint();
    return partial_trace(out, lay, {"Cp", "T"});
}

}  // namespace

TEST_CASE("dme plan arithmetic") {
    CHECK(make_dme_plan(0.05, 0.2).m == 1);  // t = delta/4
    CHECK(make_dme_plan(2.0, 0.1).m == 160);
    CHECK(make_dme_plan(2.0, 0.25).m == 64);
    CHECK_THROWS(make_dme_plan(0.01, 0.2));  // t < delta/4
}

TEST_CASE("upsilon state closed block form") {
    Rng rng(101);
    SUBCASE("equal states") {
        PureState psi = random_pair_state(rng, 2, 2);
        UpsilonState up = prepare_upsilon(psi, psi);
        CHECK(std::abs(up.state.matrix.trace().real() - 1.0) < 1e-10);
        // off-diagonal C3 blocks of xi equal (1/2)|sigma><sigma| x M with
        // M = tr_A |sigma><sigma| = sigma^B
        const Index half = up.body_dim / 2;
        Matrix block10 = up.xi.block(half, 0, half, half);
        Matrix sig_b = psi.reduced({"A"});
        Matrix expect = 0.5 * tensor(psi.density(), sig_b);
        CHECK((block10 - expect).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("orthogonal marginals kill the off-diagonal blocks") {
        DimLayout lay = DimLayout::single("A", 2).tensor(DimLayout::single("B", 2));
        Vector v0 = Vector::Zero(4), v1 = Vector::Zero(4);
        v0(0) = 1.0;                    // |0>|0>
        v1(2) = 1.0 / std::sqrt(2.0);   // |1>(|0>+|1>)/sqrt2
        v1(3) = 1.0 / std::sqrt(2.0);
        UpsilonState up = prepare_upsilon(PureState(v0, lay), PureState(v1, lay));
        const Index half = up.body_dim / 2;
        CHECK(up.xi.block(half, 0, half, half).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(up.k_generator.cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("generic pair matches the paper's xi blocks") {
        PureState rho = random_pair_state(rng, 2, 2);
        PureState sig = random_pair_state(rng, 2, 2);
        UpsilonState up = prepare_upsilon(rho, sig);
        const Index half = up.body_dim / 2;
        Matrix m = cross_partial_trace_first(sig.amplitudes, rho.amplitudes, 2, 2);
        Matrix b00 = 0.5 * tensor(sig.density(), rho.reduced({"A"}));
        Matrix b11 = 0.5 * tensor(rho.density(), sig.reduced({"A"}));
        Matrix b10 = 0.5 * tensor(rho.amplitudes * sig.amplitudes.adjoint(), m);
        CHECK((up.xi.block(0, 0, half, half) - b00).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((up.xi.block(half, half, half, half) - b11).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((up.xi.block(half, 0, half, half) - b10).cwiseAbs().maxCoeff() < 1e-10);
        // K has zero diagonal blocks and the L off-diagonal
        CHECK(up.k_generator.block(0, 0, half, half).cwiseAbs().maxCoeff() < 1e-10);
        Matrix l = tensor(rho.amplitudes * sig.amplitudes.adjoint(), m);
        CHECK((up.k_generator.block(half, 0, half, half) - l).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("closed-form mixer equals literal step iteration") {
    Rng rng(103);
    PureState rho = random_pair_state(rng, 2, 2);
    PureState sig = random_pair_state(rng, 2, 2);
    UpsilonState up = prepare_upsilon(rho, sig);
    const Index body = up.body_dim;
    const std::int64_t m = 3;
    const double t = 0.7, dt = t / m;
    Matrix x = rng.random_density(body);

    for (int sign : {+1, -1}) {
        Matrix xi0 = up.state.matrix.topLeftCorner(body, body);
        Matrix xi1 = up.state.matrix.bottomRightCorner(body, body);
        PartialSwapMixer mixer(xi0 - xi1, xi0 + xi1, dt, m,
                               sign > 0 ? Direction::forward : Direction::inverse);
        Matrix brute = x;
        for (int step = 0; step < m; ++step) brute = brute_force_step(brute, up.state.matrix, dt, sign);
        CHECK((mixer.apply(x) - brute).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("plain dme closed form matches the uncontrolled literal iteration") {
    Rng rng(107);
    Matrix rho = rng.random_density(3);
    Matrix x = rng.random_density(3);
    const std::int64_t m = 4;
    const double t = 1.1, dt = t / m;
    // uncontrolled brute force: adjoin rho, apply e^{i dt F}, trace copy
    DimLayout lay = DimLayout::single("S", 3).tensor(DimLayout::single("T", 3));
    Matrix f = swap_operator(lay, "S", "T");
    Matrix ef = exp_i_hermitian(f, dt);
    Matrix brute = x;
    for (int step = 0; step < m; ++step)
        brute = partial_trace(ef * tensor(brute, rho) * ef.adjoint(), lay, {"T"});
    PartialSwapMixer mixer(rho, rho, dt, m, Direction::forward);
    CHECK((mixer.apply(x) - brute).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dme channel approximates the exact rotation and its error halves") {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    ResourceLedger ledger;
    DmePlan plan = make_dme_plan(1.0, 0.2);
    DmeChannel dme = dme_exponentiate(rho, plan, ledger);
    CHECK(ledger.count("rho.samples") == plan.m);

    // |+> evolves to e^{i rho}|+> = (e^i|0> + |1>)/sqrt(2)
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    Matrix exact = exp_i_hermitian(rho, 1.0);
    Vector target = exact * plus;
    Matrix out = dme.channel.apply(plus * plus.adjoint());
    CHECK(trace_distance(out, target * target.adjoint()) <= 0.2);

    // exact diamond distance obeys the planned bound and halves with 2m
    QuantumChannel ideal = QuantumChannel::from_unitary(exact, DimLayout::single("A", 2));
    DiamondResult d1 = diamond_distance(dme.channel, ideal);
    REQUIRE(d1.exact.has_value());
    CHECK(*d1.exact <= 0.2);

    ResourceLedger l2;
    DmePlan plan2 = plan;
    plan2.m *= 2;
    plan2.step = plan2.t / static_cast<double>(plan2.m);
    DmeChannel dme2 = dme_exponentiate(rho, plan2, l2);
    DiamondResult d2 = diamond_distance(dme2.channel, ideal);
    REQUIRE(d2.exact.has_value());
    CHECK(*d2.exact < *d1.exact);
}

TEST_CASE("dmesub limit structure and the inverse direction") {
    Rng rng(109);
    PureState rho = random_pair_state(rng, 2, 2);
    PureState sig = random_pair_state(rng, 2, 2);
    UpsilonState up = prepare_upsilon(rho, sig);
    ResourceLedger ledger;
    DmesubChannel fwd = dmesub(up, 0.25, 2.0, Direction::forward, ledger);
    CHECK(fwd.plan.m == 64);
    CHECK(ledger.count("upsilon.samples") == 64);

    // limiting unitary e^{iK} has the cos/sin block structure
    const Index half = up.body_dim / 2;
    Matrix l = up.k_generator.block(half, 0, half, half);
    Matrix e_ik = exp_i_hermitian(up.k_generator, 1.0);
    CHECK((e_ik - exp_ik_block_form(l)).cwiseAbs().maxCoeff() < 1e-9);

    // eigenvector check: (|0>|r_j> +- |1>|l_j>)/sqrt2 with eigenvalues +-s_j
    Svd dl = svd(l);
    for (Index j = 0; j < dl.rank(); ++j) {
        Vector psi_plus(up.body_dim), psi_minus(up.body_dim);
        psi_plus.head(half) = dl.v.col(j) / std::sqrt(2.0);
        psi_plus.tail(half) = dl.u.col(j) / std::sqrt(2.0);
        psi_minus.head(half) = dl.v.col(j) / std::sqrt(2.0);
        psi_minus.tail(half) = -dl.u.col(j) / std::sqrt(2.0);
        CHECK((up.k_generator * psi_plus - dl.s(j) * psi_plus).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((up.k_generator * psi_minus + dl.s(j) * psi_minus).cwiseAbs().maxCoeff() < 1e-9);
    }

    // inverse direction approximates e^{-iK}
    ResourceLedger l2;
    DmesubChannel inv = dmesub(up, 0.25, 2.0, Direction::inverse, l2);
    Matrix x = rng.random_density(up.body_dim);
    Matrix expect = exp_i_hermitian(up.k_generator, -1.0);
    CHECK(trace_distance(inv.channel.apply(x), expect * x * expect.adjoint()) <= 0.3);
}

TEST_CASE("dmesub of equal-block upsilon approximates the identity") {
    Rng rng(113);
    PureState psi = random_pair_state(rng, 2, 2);
    // build an artificial Upsilon with xi0 = xi1 (zero generator)
    UpsilonState up = prepare_upsilon(psi, psi);
    const Index body = up.body_dim;
    Matrix xi0 = up.state.matrix.topLeftCorner(body, body);
    Matrix sym = Matrix::Zero(2 * body, 2 * body);
    sym.topLeftCorner(body, body) = xi0;
    sym.bottomRightCorner(body, body) = xi0;
    UpsilonState up2 = up;
    up2.state = DensityMatrix(sym / sym.trace().real(), up.state.layout, 1e-7);
    ResourceLedger ledger;
    DmesubChannel ch = dmesub(up2, 0.25, 2.0, Direction::forward, ledger);
    Matrix x = rng.random_density(body);
    CHECK(trace_distance(ch.channel.apply(x), x) <= 0.25);
}

TEST_CASE("dmesub error decreases monotonically as m doubles") {
    Rng rng(127);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix rho = rng.random_density(2);
        Matrix exact = exp_i_hermitian(rho, 2.0);
        QuantumChannel ideal = QuantumChannel::from_unitary(exact, DimLayout::single("A", 2));
        double prev = 1e9;
        for (std::int64_t m : {16, 32, 64}) {
            PartialSwapMixer mixer(rho, rho, 2.0 / m, m, Direction::forward);
            QuantumChannel chan = QuantumChannel::from_applier(
                [mixer](const Matrix& x) { return mixer.apply(x); }, DimLayout::single("A", 2),
                DimLayout::single("A", 2));
            DiamondResult d = diamond_distance(chan, ideal);
            double err = d.exact ? *d.exact : d.upper_bound;
            CHECK(err <= prev * 1.1);
            prev = err;
        }
    }
}
