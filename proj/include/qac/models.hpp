#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qac/errors.hpp"

namespace qac {

enum class ModelKind { Tls, ExactCover, Tfim };

/// One Exact Cover clause: three distinct qubit indices (0-based).
struct Clause {
    std::array<int, 3> q;

    bool operator==(const Clause&) const = default;
};

/// Declarative description of one adiabatic model.
///
/// b_x and j0 are magnitudes (both > 0); the sign with which H_T enters the
/// assembled Hamiltonian is a per-kind convention handled by the builders.
struct ModelSpec {
    ModelKind kind = ModelKind::Tls;
    double b_x = 1.0;
    double j0 = 0.1;
    int n_qubits = 1;
    std::vector<Clause> clauses;             // EC only
    std::optional<std::uint64_t> seed;       // EC generation only
    int n_clauses = 0;                       // EC generation only
};

void validate(const ModelSpec& spec);

/// Exact Cover instance with its brute-forced solution set.
/// Assignments are bitmasks with bit j = qubit j (Q_{j+1} in 1-based notation).
struct ECInstance {
    int n_qubits = 0;
    std::vector<Clause> clauses;
    std::vector<std::uint32_t> solutions;
};

/// Number of clauses with Q_{i1}+Q_{i2}+Q_{i3} != 1 under `assignment`.
int count_violations(const ECInstance& instance, std::uint32_t assignment);
int count_violations(const ECInstance& instance, const std::vector<int>& bits);

/// Render an assignment as Q_1 Q_2 ... Q_N (leftmost character is qubit 1).
std::string assignment_string(std::uint32_t assignment, int n_qubits);

/// Parse a clause list: clauses separated by ';' or newlines, three 1-based
/// indices each, '#' starts a comment, an optional leading "n=<qubits>" pins
/// the qubit count (otherwise the largest index used is taken).
/// Solutions are filled by brute force over all 2^N assignments.
ECInstance parse_ec_clauses(const std::string& text,
                            std::optional<int> n_qubits = std::nullopt);

/// Draw `n_clauses` distinct clauses uniformly; with `require_unique` the draw
/// is repeated until the instance has exactly one satisfying assignment.
/// Deterministic for a fixed seed.
ECInstance generate_ec_instance(int n_qubits, int n_clauses, std::uint64_t seed,
                                bool require_unique,
                                int attempt_budget = 100000);

/// Dense representation: H_s(b_eff) = -b_eff * h0 + ht_coeff * ht.
/// ht_coeff is -j0 for TLS/TFIM and +j0 for EC (violations are penalized so
/// the EC ground state encodes the solution).
struct DenseModel {
    int dim = 0;
    Eigen::MatrixXd h0;
    Eigen::MatrixXd ht;
    double ht_coeff = 0.0;

    Eigen::MatrixXd hs(double b_eff) const { return -b_eff * h0 + ht_coeff * ht; }
};

/// Quasimomentum grid of the even-parity (antiperiodic) TFIM sector.
struct BdGModel {
    int n = 0;
    double j0 = 0.0;
    std::vector<double> modes;  // k = (2m-1)*pi/N, m = 1..N/2, ascending
};

DenseModel build_tls(const ModelSpec& spec);
DenseModel build_ec(const ECInstance& instance, const ModelSpec& spec);
DenseModel build_tfim_dense(const ModelSpec& spec);  // small-N oracle backend

std::vector<double> tfim_modes(int n);

/// eps_k = 2*sqrt(j0^2 + b_eff^2 - 2*b_eff*j0*cos k) >= 0.
double tfim_quasiparticle_energy(double k, double b_eff, double j0);

/// 2x2 block acting on (U_k, V_k):
///   [ -2(b_eff - j0 cos k)   -2 j0 sin k            ]
///   [ -2 j0 sin k            +2(b_eff - j0 cos k)   ]
/// with eigenvalues -eps_k (ground) and +eps_k.
Eigen::Matrix2d tfim_bdg_hamiltonian(double k, double b_eff, double j0);

/// Normalized ground pair (U_k, V_k) of the 2x2 block at (k, b_eff).
Eigen::Vector2d tfim_bdg_ground_pair(double k, double b_eff, double j0);

/// One adiabatic model with its backend payload. TLS and EC carry dense
/// matrices; TFIM carries the mode grid (use build_tfim_dense for the
/// small-N cross-check backend).
struct Model {
    ModelSpec spec;
    std::optional<DenseModel> dense;
    std::optional<BdGModel> bdg;
    std::optional<ECInstance> instance;

    bool is_bdg() const { return bdg.has_value(); }
    int n_qubits() const { return spec.n_qubits; }
};

/// Build the model described by `spec`. EC specs need either explicit clauses
/// or (seed, n_clauses) for generation.
Model make_model(const ModelSpec& spec);

/// Dense TFIM with the same Hamiltonian as the BdG backend (N <= 10).
Model make_tfim_dense_model(const ModelSpec& spec);

}  // namespace qac
