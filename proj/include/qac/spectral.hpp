#pragma once

#include <Eigen/Dense>

#include "qac/models.hpp"

namespace qac {

/// Full eigendecomposition of a real symmetric matrix, eigenvalues ascending.
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // orthonormal columns, aligned with eigenvalues
};

/// Dense symmetric eigensolver. Rejects matrices whose asymmetry exceeds
/// 1e-10 * max|H|.
Spectrum eigh(const Eigen::MatrixXd& h);

/// Ground-state quantities at one effective field.
struct GroundObservables {
    double b_eff = 0.0;
    double x_ss = 0.0;        // <psi_G | H_0 | psi_G>
    double x_ss_prime = 0.0;  // central finite difference of x_ss
    double gap = 0.0;         // E_1 - E_0 (dense) or min_k eps_k (BdG)
    bool degenerate = false;  // ground gap below the degeneracy tolerance
    double fd_drift = 0.0;    // relative step-halving drift of x_ss_prime
};

/// Ground-state expectation of H_0 at the given field.
double xss(const Model& model, double b_eff);

/// Model gap at one field: E_1 - E_0 for dense backends, min_k eps_k for BdG.
double gap_at(const Model& model, double b_eff);

/// x_ss plus its finite-difference derivative and the gap. fd_step <= 0 picks
/// the default 1e-4 * j0; the derivative is also recomputed at half the step
/// and the relative drift reported.
GroundObservables ground_observables(const Model& model, double b_eff,
                                     double fd_step = -1.0);

/// Second-order perturbation value 2 * sum_{n != G} |<n|H_0|G>|^2 / (E_n - E_G)
/// (closed form for the BdG backend). Throws DegenerateGround when the ground
/// state is degenerate within tolerance.
double xss_prime_perturbative(const Model& model, double b_eff);

/// Closed form for the TLS: (2 b - B_x) / sqrt((2 b - B_x)^2 + j0^2).
double tls_xss_analytic(double b_eff, double b_x, double j0);

struct GapPoint {
    double b_gap = 0.0;
    double gap_min = 0.0;
    bool interior = true;  // false when the gap is monotone over the range
};

/// Locate the gap minimum on [b_lo, b_hi]: coarse scan with n_samples points,
/// then golden-section refinement around the coarse minimum.
GapPoint gap_location(const Model& model, double b_lo, double b_hi, int n_samples);

/// Observables on a uniform field grid (rows ordered by b_eff).
std::vector<GroundObservables> observables_grid(const Model& model, double b_lo,
                                                double b_hi, int n,
                                                double fd_step = -1.0);

}  // namespace qac
