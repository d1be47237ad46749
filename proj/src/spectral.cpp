#include "qac/spectral.hpp"

#include <cmath>
#include <limits>

namespace qac {

namespace {

constexpr double kDegeneracyTol = 1e-9;  // relative to ||H||

double matrix_scale(const Eigen::MatrixXd& h) {
    return std::max(h.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
}

struct DenseGround {
    double e0, e1, x;
    bool degenerate;
};

DenseGround dense_ground(const DenseModel& dm, double b_eff) {
    Spectrum s = eigh(dm.hs(b_eff));
    const Eigen::VectorXd& g = s.eigenvectors.col(0);
    DenseGround r;
    r.e0 = s.eigenvalues(0);
    r.e1 = dm.dim > 1 ? s.eigenvalues(1) : s.eigenvalues(0);
    r.x = g.dot(dm.h0 * g);
    const double scale = std::max(std::abs(s.eigenvalues(0)),
                                  std::abs(s.eigenvalues(dm.dim - 1)));
    r.degenerate = dm.dim > 1 && (r.e1 - r.e0) < kDegeneracyTol * std::max(scale, 1e-300);
    return r;
}

double bdg_xss(const BdGModel& b, double b_eff) {
    double x = 0.0;
    for (double k : b.modes) {
        const double a = 2.0 * (b_eff - b.j0 * std::cos(k));
        const double eps = tfim_quasiparticle_energy(k, b_eff, b.j0);
        x += 2.0 * a / eps;
    }
    return x;
}

double bdg_xss_prime(const BdGModel& b, double b_eff) {
    // d(2a/eps)/db = 4 bb^2 / eps^3 per mode, bb = 2 j0 sin k.
    double xp = 0.0;
    for (double k : b.modes) {
        const double bb = 2.0 * b.j0 * std::sin(k);
        const double eps = tfim_quasiparticle_energy(k, b_eff, b.j0);
        xp += 4.0 * bb * bb / (eps * eps * eps);
    }
    return xp;
}

double bdg_gap(const BdGModel& b, double b_eff) {
    double g = std::numeric_limits<double>::infinity();
    for (double k : b.modes) g = std::min(g, tfim_quasiparticle_energy(k, b_eff, b.j0));
    return g;
}

}  // namespace

Spectrum eigh(const Eigen::MatrixXd& h) {
    if (h.rows() != h.cols()) throw InvalidInput("matrix must be square");
    const double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * matrix_scale(h))
        throw InvalidInput("matrix asymmetry beyond tolerance");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
    Spectrum s;
    s.eigenvalues = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors();
    return s;
}

double xss(const Model& model, double b_eff) {
    if (model.is_bdg()) return bdg_xss(*model.bdg, b_eff);
    return dense_ground(*model.dense, b_eff).x;
}

double gap_at(const Model& model, double b_eff) {
    if (model.is_bdg()) return bdg_gap(*model.bdg, b_eff);
    const DenseGround g = dense_ground(*model.dense, b_eff);
    return g.e1 - g.e0;
}

GroundObservables ground_observables(const Model& model, double b_eff, double fd_step) {
    if (fd_step <= 0.0) fd_step = 1e-4 * model.spec.j0;
    GroundObservables obs;
    obs.b_eff = b_eff;
    if (model.is_bdg()) {
        obs.x_ss = bdg_xss(*model.bdg, b_eff);
        obs.gap = bdg_gap(*model.bdg, b_eff);
    } else {
        const DenseGround g = dense_ground(*model.dense, b_eff);
        obs.x_ss = g.x;
        obs.gap = g.e1 - g.e0;
        obs.degenerate = g.degenerate;
    }
    auto fd = [&](double h) {
        return (xss(model, b_eff + h) - xss(model, b_eff - h)) / (2.0 * h);
    };
    const double d1 = fd(fd_step);
    const double d2 = fd(0.5 * fd_step);
    obs.x_ss_prime = d1;
    obs.fd_drift = std::abs(d2 - d1) / std::max(std::abs(d1), 1e-12);
    return obs;
}

double xss_prime_perturbative(const Model& model, double b_eff) {
    if (model.is_bdg()) return bdg_xss_prime(*model.bdg, b_eff);
    const DenseModel& dm = *model.dense;
    Spectrum s = eigh(dm.hs(b_eff));
    const double scale =
        std::max({std::abs(s.eigenvalues(0)), std::abs(s.eigenvalues(dm.dim - 1)), 1e-300});
    if (dm.dim > 1 && s.eigenvalues(1) - s.eigenvalues(0) < kDegeneracyTol * scale)
        throw DegenerateGround("ground state degenerate at b_eff = " + std::to_string(b_eff));
    const Eigen::VectorXd g = s.eigenvectors.col(0);
    const Eigen::VectorXd h0g = dm.h0 * g;
    double xp = 0.0;
    for (int n = 1; n < dm.dim; ++n) {
        const double me = s.eigenvectors.col(n).dot(h0g);
        xp += 2.0 * me * me / (s.eigenvalues(n) - s.eigenvalues(0));
    }
    return xp;
}

double tls_xss_analytic(double b_eff, double b_x, double j0) {
    const double u = 2.0 * b_eff - b_x;
    return u / std::sqrt(u * u + j0 * j0);
}

GapPoint gap_location(const Model& model, double b_lo, double b_hi, int n_samples) {
    if (n_samples < 3) throw InvalidSpec("gap scan needs n_samples >= 3");
    if (!(b_hi > b_lo)) throw InvalidSpec("gap scan needs b_hi > b_lo");
    std::vector<double> bs(n_samples), gs(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        bs[i] = b_lo + (b_hi - b_lo) * i / (n_samples - 1);
        gs[i] = gap_at(model, bs[i]);
    }
    int imin = 0;
    for (int i = 1; i < n_samples; ++i)
        if (gs[i] < gs[imin]) imin = i;

    GapPoint gp;
    if (imin == 0 || imin == n_samples - 1) {
        gp.interior = false;
        gp.b_gap = bs[imin];
        gp.gap_min = gs[imin];
        return gp;
    }
    // Golden-section on the bracketing interval.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = bs[imin - 1], b = bs[imin + 1];
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = gap_at(model, c), fd = gap_at(model, d);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(b_hi)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = gap_at(model, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = gap_at(model, d);
        }
    }
    gp.b_gap = 0.5 * (a + b);
    gp.gap_min = gap_at(model, gp.b_gap);
    gp.interior = true;
    return gp;
}

std::vector<GroundObservables> observables_grid(const Model& model, double b_lo,
                                                double b_hi, int n, double fd_step) {
    if (n < 2) throw InvalidSpec("grid needs n >= 2");
    std::vector<GroundObservables> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double b = b_lo + (b_hi - b_lo) * i / (n - 1);
        rows.push_back(ground_observables(model, b, fd_step));
    }
    return rows;
}

}  // namespace qac
