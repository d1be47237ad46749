#pragma once

#include <complex>
#include <vector>

#include "qac/spectral.hpp"

namespace qac {

/// Ancilla cavity parameters. epsilon is the base drive used by stationary
/// analysis; protocol drives live in Schedule.
struct CavityParams {
    double delta_c = -0.1;
    double kappa = 0.1;
    double g = 0.05;
    double epsilon = 0.0;
};

/// alpha = -(delta_c^2 + (kappa/2)^2) / (2 delta_c); positive iff delta_c < 0.
double alpha(double delta_c, double kappa);

/// The two detunings with a given alpha (roots of alpha(delta) = a for
/// delta < 0). Requires a >= kappa/2. .first is the more-negative root.
std::pair<double, double> detuning_for_alpha(double a, double kappa);

enum class Stability { Stable, Unstable };

struct StationaryPoint {
    double x_ss = 0.0;
    double b_eff = 0.0;  // B_x - g * x_ss
    Stability stability = Stability::Stable;
    double residual = 0.0;  // |alpha x - eps + g Xss(b_eff)|
};

enum class SweepControl { Epsilon, DeltaC };

struct BifurcationPoint {
    double b_eff = 0.0;
    double x = 0.0;
    double control_value = 0.0;  // eps_i or delta_i
    SweepControl control_kind = SweepControl::Epsilon;
};

struct SecularFrequencies {
    std::complex<double> omega_plus;
    std::complex<double> omega_minus;
};

/// Search window and grid for the self-consistency root scan.
struct RootScanOptions {
    double x_lo_frac = -0.05;  // bracket is [x_lo_frac, x_hi_frac] * B_x / g
    double x_hi_frac = 1.05;
    int grid = 2000;
    double tol_scale = 1e-10;  // residual target: tol_scale * max(eps, 1)
};

/// All self-consistent roots of alpha x - eps + g Xss(B_x - g x) = 0 on the
/// bracket, tagged stable/unstable by the sign of alpha - g^2 Xss'.
/// Returns the single linear root when g = 0. Empty result = no root found.
std::vector<StationaryPoint> stationary_points(const Model& model,
                                               const CavityParams& cavity,
                                               const RootScanOptions& opt = {});

/// Fields where Xss'(b) = alpha/g^2 (control = Epsilon, eps_i recovered from
/// the stationary relation and the list sorted by eps_i), or the turning
/// points of the detuning sweep at fixed cavity.epsilon (control = DeltaC,
/// sorted by delta_i).
std::vector<BifurcationPoint> bifurcation_points(const Model& model,
                                                 const CavityParams& cavity,
                                                 SweepControl control = SweepControl::Epsilon);

/// omega_pm = -kappa/2 +- sqrt(-2 delta_c g^2 Xss' - delta_c^2), principal
/// branch of the complex square root.
SecularFrequencies secular_frequencies(double x_ss_prime, const CavityParams& cavity);

/// Linearized dynamics of (delta x_a, delta p_a) about a stationary point:
///   [ -kappa/2              -delta_c ]
///   [ delta_c + 2 g^2 Xss'  -kappa/2 ]
/// whose eigenvalues are the secular frequencies above.
Eigen::Matrix2d fluctuation_matrix(double x_ss_prime, const CavityParams& cavity);

struct SweepRow {
    double control = 0.0;
    std::vector<StationaryPoint> points;
};

/// Stationary points per control value; alpha is recomputed per point when
/// sweeping the detuning. Rows ordered by control value.
std::vector<SweepRow> sweep_control(const Model& model, const CavityParams& cavity,
                                    SweepControl control, double lo, double hi, int n);

struct FeasibilityReport {
    bool negative_detuning = false;   // delta_c < 0
    bool bifurcation_window = false;  // Xss'(0) < alpha/g^2 < max Xss'
    bool drive_order = false;         // Xss(B_x)/B_x < alpha/g^2  (eps_i < eps_f)
    double alpha_over_g2 = 0.0;
    double xp_at_zero = 0.0;
    double xp_max = 0.0;
    double xss_at_bx = 0.0;
    double eps0 = 0.0;  // drive with x_ss = 0
    double eps_f = 0.0; // drive with x_ss = B_x / g
    std::vector<BifurcationPoint> bifurcations;

    bool all_pass() const { return negative_detuning && bifurcation_window && drive_order; }
};

FeasibilityReport feasibility_check(const Model& model, const CavityParams& cavity);

}  // namespace qac
