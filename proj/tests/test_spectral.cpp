#include <doctest.h>

#include <random>

#include "qac/spectral.hpp"

using namespace qac;

namespace {

const char* kReferenceClauses = "1 2 5; 2 3 6; 3 4 6; 1 3 5; 2 5 6";

Model tls_model(double b_x = 1.0, double j0 = 0.1) {
    ModelSpec s;
    s.kind = ModelKind::Tls;
    s.b_x = b_x;
    s.j0 = j0;
    s.n_qubits = 1;
    return make_model(s);
}

Model ec_model() {
    ModelSpec s;
    s.kind = ModelKind::ExactCover;
    s.b_x = 0.5;
    s.j0 = 0.25;
    s.n_qubits = 6;
    s.clauses = parse_ec_clauses(kReferenceClauses, 6).clauses;
    return make_model(s);
}

Model tfim_model(int n = 120, double b_x = 1.95, double j0 = 1.0) {
    ModelSpec s;
    s.kind = ModelKind::Tfim;
    s.b_x = b_x;
    s.j0 = j0;
    s.n_qubits = n;
    return make_model(s);
}

}  // namespace

TEST_CASE("eigh basics and self-test") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    const Spectrum s = eigh(d);
    CHECK(s.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(1.0));

    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    for (int dim : {5, 24, 60}) {
        Eigen::MatrixXd a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a(i, j) = gauss(rng);
        Eigen::MatrixXd h = 0.5 * (a + a.transpose());
        const Spectrum sp = eigh(h);
        const double hnorm = h.cwiseAbs().maxCoeff();
        for (int i = 0; i < dim; ++i) {
            const double resid =
                (h * sp.eigenvectors.col(i) - sp.eigenvalues(i) * sp.eigenvectors.col(i))
                    .norm();
            CHECK(resid <= 1e-10 * std::max(1.0, hnorm));
        }
        const double ortho =
            (sp.eigenvectors.transpose() * sp.eigenvectors -
             Eigen::MatrixXd::Identity(dim, dim))
                .cwiseAbs()
                .maxCoeff();
        CHECK(ortho <= 1e-10);
        CHECK(std::is_sorted(sp.eigenvalues.data(), sp.eigenvalues.data() + dim));
    }

    Eigen::MatrixXd bad(2, 2);
    bad << 0.0, 1.0, 0.5, 0.0;
    CHECK_THROWS_AS(eigh(bad), InvalidInput);
}

TEST_CASE("TLS spectral landmarks") {
    const Model m = tls_model();
    const Spectrum s = eigh(m.dense->hs(0.5));
    CHECK(s.eigenvalues(1) - s.eigenvalues(0) == doctest::Approx(0.1).epsilon(1e-12));

    const GroundObservables g = ground_observables(m, 0.5);
    CHECK(std::abs(g.x_ss) < 1e-12);
    CHECK(g.gap == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(g.x_ss_prime == doctest::Approx(20.0).epsilon(1e-6));
    CHECK(!g.degenerate);
    CHECK(g.fd_drift < 1e-6);
}

TEST_CASE("EC reference instance: ground level and curvature") {
    const Model m = ec_model();
    const Spectrum s = eigh(m.dense->ht_coeff * m.dense->ht);
    CHECK(s.eigenvalues(0) == doctest::Approx(0.0));
    CHECK(s.eigenvalues(1) > 1e-6);  // unique solution -> nondegenerate floor

    // 2 * sum over single flips of 1/(J0 * violations) = 17/(3 J0).
    CHECK(xss_prime_perturbative(m, 0.0) ==
          doctest::Approx(17.0 / 0.75).epsilon(1e-9));
    const GroundObservables g = ground_observables(m, 0.0);
    CHECK(std::abs(g.x_ss) < 1e-10);
    CHECK(g.x_ss_prime == doctest::Approx(17.0 / 0.75).epsilon(1e-5));
}

TEST_CASE("TFIM closed-form observables") {
    const Model m = tfim_model();
    CHECK(std::abs(xss(m, 0.0)) < 1e-12);
    CHECK(xss_prime_perturbative(m, 0.0) == doctest::Approx(60.0).epsilon(1e-12));
    const GroundObservables g = ground_observables(m, 0.0);
    CHECK(g.x_ss_prime == doctest::Approx(60.0).epsilon(1e-7));
    CHECK(g.gap == doctest::Approx(tfim_quasiparticle_energy(M_PI / 120, 0.0, 1.0)));

    // Paramagnetic saturation.
    CHECK(xss(m, 8.0) / 120.0 > 0.99);
    CHECK(xss(m, 8.0) < 120.0);
}

TEST_CASE("TLS analytic Xss matches dense diagonalization") {
    CHECK(tls_xss_analytic(0.5, 1.0, 0.1) == doctest::Approx(0.0));
    CHECK(tls_xss_analytic(1.0, 1.0, 0.1) ==
          doctest::Approx(1.0 / std::sqrt(1.01)).epsilon(1e-12));
    CHECK(tls_xss_analytic(0.0, 1.0, 0.1) ==
          doctest::Approx(-1.0 / std::sqrt(1.01)).epsilon(1e-12));

    const Model m = tls_model();
    for (int i = 0; i <= 40; ++i) {
        const double b = i / 40.0;
        CHECK(std::abs(xss(m, b) - tls_xss_analytic(b, 1.0, 0.1)) < 1e-10);
    }
}

TEST_CASE("finite-difference derivative agrees with perturbation theory") {
    const Model tls = tls_model();
    const Model ec = ec_model();
    const Model tfim = tfim_model();
    for (const Model* m : {&tls, &ec, &tfim}) {
        for (int i = 1; i <= 50; ++i) {
            const double b = m->spec.b_x * i / 50.0;
            const double fd = ground_observables(*m, b).x_ss_prime;
            const double pt = xss_prime_perturbative(*m, b);
            CHECK(std::abs(fd - pt) <= std::max(1e-6, 1e-3 * std::abs(pt)));
        }
    }
}

TEST_CASE("Xss is monotone in the effective field") {
    const Model tls = tls_model();
    const Model ec = ec_model();
    const Model tfim = tfim_model();
    for (const Model* m : {&tls, &ec, &tfim}) {
        double prev = xss(*m, 0.0);
        for (int i = 1; i <= 60; ++i) {
            const double b = 1.2 * m->spec.b_x * i / 60.0;
            const double x = xss(*m, b);
            CHECK(x > prev);
            prev = x;
        }
    }
}

TEST_CASE("positivity: Xss' > 0 wherever the gap is open") {
    const Model ec = ec_model();
    for (int i = 0; i <= 30; ++i) {
        const double b = 0.5 * i / 30.0;
        CHECK(xss_prime_perturbative(ec, b) > 0.0);
    }
}

TEST_CASE("gap location per model") {
    const Model tls = tls_model();
    const GapPoint gt = gap_location(tls, 0.0, 1.0, 101);
    CHECK(gt.interior);
    CHECK(gt.b_gap == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(gt.gap_min == doctest::Approx(0.1).epsilon(1e-9));

    // Frozen from an independent dense-ED scan of the reference instance.
    const Model ec = ec_model();
    const GapPoint ge = gap_location(ec, 1e-6, 0.5, 201);
    CHECK(ge.interior);
    CHECK(ge.b_gap == doctest::Approx(0.1178).epsilon(0.02));
    CHECK(ge.gap_min == doctest::Approx(0.09763).epsilon(0.002));

    const Model tfim = tfim_model();
    const GapPoint gf = gap_location(tfim, 1e-6, 1.95, 301);
    CHECK(gf.interior);
    CHECK(std::abs(gf.b_gap - 1.0) < 1e-3);
    CHECK(gf.gap_min == doctest::Approx(2.0 * std::sin(M_PI / 120)).epsilon(1e-6));

    // Monotone gap over a range away from the minimum -> endpoint flagged.
    const GapPoint mono = gap_location(tls, 0.6, 1.0, 51);
    CHECK(!mono.interior);
    CHECK(mono.b_gap == doctest::Approx(0.6));
}

TEST_CASE("BdG ground energy and Xss match dense diagonalization at small N") {
    for (int n : {2, 4, 6, 8}) {
        ModelSpec s;
        s.kind = ModelKind::Tfim;
        s.b_x = 1.95;
        s.j0 = 1.0;
        s.n_qubits = n;
        const Model bdg = make_model(s);
        const Model dense = make_tfim_dense_model(s);
        for (double b : {0.35, 0.8, 1.0, 1.4, 1.95}) {
            double e_bdg = 0.0;
            for (double k : bdg.bdg->modes) e_bdg -= tfim_quasiparticle_energy(k, b, 1.0);
            const Spectrum sp = eigh(dense.dense->hs(b));
            CHECK(std::abs(e_bdg - sp.eigenvalues(0)) <= 1e-8 * n);
            CHECK(std::abs(xss(bdg, b) - xss(dense, b)) <= 1e-8 * n);
        }
    }
}

TEST_CASE("degenerate ground state is flagged and guarded") {
    // Two decoupled qubits: sigma_x sum with no target term has a doubly
    // degenerate spectrum at b = 0 after adding a zero ht.
    ModelSpec s;
    s.kind = ModelKind::Tfim;
    s.b_x = 1.0;
    s.j0 = 1.0;
    s.n_qubits = 4;
    Model dense = make_tfim_dense_model(s);
    dense.dense->ht_coeff = 0.0;  // H = -b * h0, fourfold-degenerate at b = 0... flat
    CHECK_THROWS_AS(xss_prime_perturbative(dense, 0.0), DegenerateGround);
    const GroundObservables g = ground_observables(dense, 0.0);
    CHECK(g.degenerate);
}

TEST_CASE("observables grid is ordered and dense") {
    const Model tls = tls_model();
    const auto rows = observables_grid(tls, 0.0, 1.0, 11);
    REQUIRE(rows.size() == 11);
    CHECK(rows.front().b_eff == doctest::Approx(0.0));
    CHECK(rows.back().b_eff == doctest::Approx(1.0));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].b_eff > rows[i - 1].b_eff);
}
