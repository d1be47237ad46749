#include "qac/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

namespace qac {

namespace {

/// Memoized Xss / Xss' lookups keyed on the field bit pattern. Root scans over
/// a control sweep revisit the same grid fields; dense models pay one
/// eigendecomposition per distinct field instead of one per evaluation.
class GroundCache {
public:
    explicit GroundCache(const Model& model) : model_(model) {}

    double xss(double b) {
        auto [it, inserted] = x_.try_emplace(key(b), 0.0);
        if (inserted) it->second = qac::xss(model_, b);
        return it->second;
    }

    double xp(double b) {
        auto [it, inserted] = xp_.try_emplace(key(b), 0.0);
        if (inserted) it->second = xss_prime_perturbative(model_, b);
        return it->second;
    }

private:
    static std::uint64_t key(double b) {
        std::uint64_t k;
        static_assert(sizeof(k) == sizeof(b));
        std::memcpy(&k, &b, sizeof(k));
        return k;
    }

    const Model& model_;
    std::unordered_map<std::uint64_t, double> x_;
    std::unordered_map<std::uint64_t, double> xp_;
};

Stability classify(double xp, double a, double g) {
    return (a - g * g * xp) >= 0.0 ? Stability::Stable : Stability::Unstable;
}

std::vector<StationaryPoint> scan_roots(const Model& model, const CavityParams& cavity,
                                        double a, double eps, const RootScanOptions& opt,
                                        GroundCache& cache) {
    const double bx = model.spec.b_x;
    const double g = cavity.g;
    std::vector<StationaryPoint> pts;

    if (g == 0.0) {
        StationaryPoint p;
        p.x_ss = eps / a;
        p.b_eff = bx;
        p.stability = Stability::Stable;
        p.residual = 0.0;
        pts.push_back(p);
        return pts;
    }

    auto f = [&](double x) { return a * x - eps + g * cache.xss(bx - g * x); };

    const double x_scale = bx / g;
    const double tol = opt.tol_scale * std::max(std::abs(eps), 1.0);
    int grid = opt.grid;
    for (int pass = 0; pass < 5; ++pass) {
        pts.clear();
        const double x_lo = opt.x_lo_frac * x_scale;
        const double x_hi = opt.x_hi_frac * x_scale;
        const double dx = (x_hi - x_lo) / grid;
        double xa = x_lo, fa = f(xa);
        for (int i = 1; i <= grid; ++i) {
            const double xb = x_lo + dx * i;
            double fb = f(xb);
            if (fa == 0.0 || fa * fb < 0.0) {
                double lo = xa, hi = xb, flo = fa;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = f(mid);
                    if (std::abs(fm) <= tol && (hi - lo) < 1e-9 * x_scale + 1e-12) {
                        lo = hi = mid;
                        break;
                    }
                    if (flo * fm <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                StationaryPoint p;
                p.x_ss = 0.5 * (lo + hi);
                p.b_eff = bx - g * p.x_ss;
                p.residual = std::abs(f(p.x_ss));
                p.stability = classify(cache.xp(p.b_eff), a, g);
                pts.push_back(p);
            }
            xa = xb;
            fa = fb;
        }
        // Adjacent roots closer than 3 cells can hide a sign wiggle; rescan finer.
        bool crowded = false;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (pts[i].x_ss - pts[i - 1].x_ss < 3.0 * dx) crowded = true;
        if (!crowded) break;
        grid *= 2;
    }
    return pts;
}

}  // namespace

double alpha(double delta_c, double kappa) {
    if (delta_c == 0.0) throw DivisionByZero("alpha undefined at delta_c = 0");
    return -(delta_c * delta_c + 0.25 * kappa * kappa) / (2.0 * delta_c);
}

std::pair<double, double> detuning_for_alpha(double a, double kappa) {
    const double half = 0.5 * kappa;
    if (a < half) throw InvalidSpec("alpha below its minimum kappa/2");
    const double root = std::sqrt(a * a - half * half);
    return {-a - root, -a + root};
}

std::vector<StationaryPoint> stationary_points(const Model& model,
                                               const CavityParams& cavity,
                                               const RootScanOptions& opt) {
    const double a = alpha(cavity.delta_c, cavity.kappa);
    if (!(a > 0.0)) throw InvalidSpec("stationary analysis requires alpha > 0");
    GroundCache cache(model);
    return scan_roots(model, cavity, a, cavity.epsilon, opt, cache);
}

std::vector<BifurcationPoint> bifurcation_points(const Model& model,
                                                 const CavityParams& cavity,
                                                 SweepControl control) {
    const double g = cavity.g;
    const double bx = model.spec.b_x;
    std::vector<BifurcationPoint> out;
    if (g == 0.0) return out;
    GroundCache cache(model);

    if (control == SweepControl::Epsilon) {
        const double a = alpha(cavity.delta_c, cavity.kappa);
        if (!(a > 0.0)) throw InvalidSpec("bifurcation analysis requires alpha > 0");
        const double target = a / (g * g);
        auto h = [&](double b) { return cache.xp(b) - target; };
        const int grid = 1200;
        const double b_lo = 1e-9 * bx;
        double ba = b_lo, ha = h(ba);
        for (int i = 1; i <= grid; ++i) {
            const double bb = b_lo + (bx - b_lo) * i / grid;
            const double hb = h(bb);
            if (ha * hb < 0.0) {
                double lo = ba, hi = bb, flo = ha;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = h(mid);
                    if (flo * fm <= 0.0)
                        hi = mid;
                    else {
                        lo = mid;
                        flo = fm;
                    }
                }
                BifurcationPoint p;
                p.b_eff = 0.5 * (lo + hi);
                p.x = (bx - p.b_eff) / g;
                p.control_value = a * p.x + g * cache.xss(p.b_eff);
                p.control_kind = SweepControl::Epsilon;
                out.push_back(p);
            }
            ba = bb;
            ha = hb;
        }
        std::sort(out.begin(), out.end(), [](const BifurcationPoint& l, const BifurcationPoint& r) {
            return l.control_value < r.control_value;
        });
        return out;
    }

    // Detuning control at fixed drive: turning points of delta along the
    // stationary branch, i.e. g^2 Xss'(b(x)) x = eps - g Xss(b(x)).
    const double eps = cavity.epsilon;
    auto h = [&](double x) {
        const double b = bx - g * x;
        return g * g * cache.xp(b) * x - (eps - g * cache.xss(b));
    };
    const int grid = 2000;
    const double x_lo = 1e-4 * bx / g, x_hi = 1.05 * bx / g;
    double xa = x_lo, ha = h(xa);
    for (int i = 1; i <= grid; ++i) {
        const double xb = x_lo + (x_hi - x_lo) * i / grid;
        const double hb = h(xb);
        if (ha * hb < 0.0) {
            double lo = xa, hi = xb, flo = ha;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = h(mid);
                if (flo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            const double x = 0.5 * (lo + hi);
            const double b = bx - g * x;
            const double a_req = (eps - g * cache.xss(b)) / x;
            if (a_req >= 0.5 * cavity.kappa) {
                BifurcationPoint p;
                p.b_eff = b;
                p.x = x;
                // Physical branch: the more-negative detuning (|delta| > kappa/2).
                p.control_value = detuning_for_alpha(a_req, cavity.kappa).first;
                p.control_kind = SweepControl::DeltaC;
                out.push_back(p);
            }
        }
        xa = xb;
        ha = hb;
    }
    std::sort(out.begin(), out.end(), [](const BifurcationPoint& l, const BifurcationPoint& r) {
        return l.control_value < r.control_value;
    });
    return out;
}

SecularFrequencies secular_frequencies(double x_ss_prime, const CavityParams& cavity) {
    const std::complex<double> radicand(
        -2.0 * cavity.delta_c * cavity.g * cavity.g * x_ss_prime -
            cavity.delta_c * cavity.delta_c,
        0.0);
    const std::complex<double> root = std::sqrt(radicand);
    SecularFrequencies w;
    w.omega_plus = -0.5 * cavity.kappa + root;
    w.omega_minus = -0.5 * cavity.kappa - root;
    return w;
}

Eigen::Matrix2d fluctuation_matrix(double x_ss_prime, const CavityParams& cavity) {
    Eigen::Matrix2d m;
    m << -0.5 * cavity.kappa, -cavity.delta_c,
        cavity.delta_c + 2.0 * cavity.g * cavity.g * x_ss_prime, -0.5 * cavity.kappa;
    return m;
}

std::vector<SweepRow> sweep_control(const Model& model, const CavityParams& cavity,
                                    SweepControl control, double lo, double hi, int n) {
    if (n < 2) throw InvalidSpec("sweep needs n >= 2");
    GroundCache cache(model);
    std::vector<SweepRow> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double c = lo + (hi - lo) * i / (n - 1);
        SweepRow row;
        row.control = c;
        CavityParams cp = cavity;
        if (control == SweepControl::Epsilon)
            cp.epsilon = c;
        else
            cp.delta_c = c;
        const double a = alpha(cp.delta_c, cp.kappa);
        if (a > 0.0) row.points = scan_roots(model, cp, a, cp.epsilon, {}, cache);
        rows.push_back(std::move(row));
    }
    return rows;
}

FeasibilityReport feasibility_check(const Model& model, const CavityParams& cavity) {
    FeasibilityReport rep;
    const double g = cavity.g;
    const double bx = model.spec.b_x;
    const double a = alpha(cavity.delta_c, cavity.kappa);
    rep.negative_detuning = cavity.delta_c < 0.0;
    rep.alpha_over_g2 = g != 0.0 ? a / (g * g) : std::numeric_limits<double>::infinity();
    rep.xp_at_zero = xss_prime_perturbative(model, 0.0);
    rep.xss_at_bx = xss(model, bx);

    // Xss' is sharply peaked in the gap region; refine the max scan there.
    const GapPoint gp = gap_location(model, 1e-6 * bx, bx, 201);
    double xp_max = 0.0;
    const int coarse = 400, fine = 200;
    for (int i = 0; i <= coarse; ++i)
        xp_max = std::max(xp_max, xss_prime_perturbative(model, bx * i / coarse));
    const double w = 0.05 * bx;
    for (int i = 0; i <= fine; ++i) {
        const double b = std::clamp(gp.b_gap - w + 2.0 * w * i / fine, 0.0, bx);
        xp_max = std::max(xp_max, xss_prime_perturbative(model, b));
    }
    rep.xp_max = xp_max;

    rep.bifurcation_window =
        rep.negative_detuning && rep.xp_at_zero < rep.alpha_over_g2 && rep.alpha_over_g2 < xp_max;
    rep.drive_order = rep.xss_at_bx / bx < rep.alpha_over_g2;
    rep.eps0 = g * rep.xss_at_bx;
    rep.eps_f = (g != 0.0 ? a * bx / g : 0.0) + g * xss(model, 0.0);
    if (rep.negative_detuning && g != 0.0)
        rep.bifurcations = bifurcation_points(model, cavity, SweepControl::Epsilon);
    return rep;
}

}  // namespace qac
