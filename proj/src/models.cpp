#include "qac/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace qac {

namespace {

constexpr int kMaxQubits = 10;  // dense dims capped at 2^10

std::uint64_t binom3(int n) {
    if (n < 3) return 0;
    return static_cast<std::uint64_t>(n) * (n - 1) * (n - 2) / 6;
}

std::vector<std::uint32_t> brute_force_solutions(int n_qubits,
                                                 const std::vector<Clause>& clauses) {
    std::vector<std::uint32_t> sols;
    const std::uint32_t dim = 1u << n_qubits;
    for (std::uint32_t m = 0; m < dim; ++m) {
        bool ok = true;
        for (const auto& c : clauses) {
            int s = ((m >> c.q[0]) & 1u) + ((m >> c.q[1]) & 1u) + ((m >> c.q[2]) & 1u);
            if (s != 1) {
                ok = false;
                break;
            }
        }
        if (ok) sols.push_back(m);
    }
    return sols;
}

Clause sorted(Clause c) {
    std::sort(c.q.begin(), c.q.end());
    return c;
}

}  // namespace

void validate(const ModelSpec& spec) {
    if (!(spec.b_x > 0.0) || !(spec.j0 > 0.0))
        throw InvalidSpec("b_x and j0 must be positive");
    switch (spec.kind) {
        case ModelKind::Tls:
            if (spec.n_qubits != 1) throw InvalidSpec("TLS requires n_qubits = 1");
            break;
        case ModelKind::ExactCover:
            if (spec.n_qubits < 3) throw InvalidSpec("EC requires n_qubits >= 3");
            if (spec.n_qubits > kMaxQubits)
                throw InvalidSpec("EC dense dimension capped at 2^" + std::to_string(kMaxQubits));
            if (spec.clauses.empty() && !spec.seed.has_value())
                throw InvalidSpec("EC requires clauses or a generation seed");
            break;
        case ModelKind::Tfim:
            if (spec.n_qubits < 2 || spec.n_qubits % 2 != 0)
                throw InvalidSpec("TFIM requires an even qubit count >= 2");
            break;
    }
}

int count_violations(const ECInstance& instance, std::uint32_t assignment) {
    if (instance.n_qubits < 32 && (assignment >> instance.n_qubits) != 0)
        throw InvalidSpec("assignment uses bits beyond n_qubits");
    int total = 0;
    for (const auto& c : instance.clauses) {
        int s = ((assignment >> c.q[0]) & 1u) + ((assignment >> c.q[1]) & 1u) +
                ((assignment >> c.q[2]) & 1u);
        total += (s != 1);
    }
    return total;
}

int count_violations(const ECInstance& instance, const std::vector<int>& bits) {
    if (static_cast<int>(bits.size()) != instance.n_qubits)
        throw InvalidSpec("assignment length mismatch");
    std::uint32_t mask = 0;
    for (int j = 0; j < instance.n_qubits; ++j)
        if (bits[j]) mask |= (1u << j);
    return count_violations(instance, mask);
}

std::string assignment_string(std::uint32_t assignment, int n_qubits) {
    std::string s(n_qubits, '0');
    for (int j = 0; j < n_qubits; ++j)
        if ((assignment >> j) & 1u) s[j] = '1';
    return s;
}

ECInstance parse_ec_clauses(const std::string& text, std::optional<int> n_qubits) {
    struct Token {
        std::string text;
        int line, column;
    };
    // Tokenize into clauses: ';' and newline end a clause, '#' comments to EOL.
    std::vector<std::vector<Token>> groups(1);
    int line = 1, column = 0;
    std::string cur;
    int tok_line = 1, tok_col = 1;
    auto flush_token = [&]() {
        if (!cur.empty()) {
            groups.back().push_back({cur, tok_line, tok_col});
            cur.clear();
        }
    };
    auto end_clause = [&]() {
        flush_token();
        if (!groups.back().empty()) groups.emplace_back();
    };
    bool in_comment = false;
    for (char ch : text) {
        ++column;
        if (ch == '\n') {
            in_comment = false;
            end_clause();
            ++line;
            column = 0;
            continue;
        }
        if (in_comment) continue;
        if (ch == '#') {
            in_comment = true;
            continue;
        }
        if (ch == ';') {
            end_clause();
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
            flush_token();
            continue;
        }
        if (cur.empty()) {
            tok_line = line;
            tok_col = column;
        }
        cur.push_back(ch);
    }
    end_clause();

    auto parse_int = [](const Token& t) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(t.text, &pos);
        } catch (const std::exception&) {
            throw ParseError("malformed token '" + t.text + "'", t.line, t.column);
        }
        if (pos != t.text.size())
            throw ParseError("malformed token '" + t.text + "'", t.line, t.column);
        return v;
    };

    ECInstance inst;
    int declared_n = n_qubits.value_or(0);
    std::set<std::array<int, 3>> seen;
    bool first_group = true;
    for (const auto& group : groups) {
        if (group.empty()) continue;
        // Optional "n=<qubits>" header on the first non-comment line.
        if (first_group && group.size() == 1 && group[0].text.rfind("n=", 0) == 0) {
            Token t = group[0];
            t.text = t.text.substr(2);
            declared_n = parse_int(t);
            first_group = false;
            continue;
        }
        first_group = false;
        if (group.size() != 3)
            throw ParseError("clause needs exactly 3 indices, got " +
                                 std::to_string(group.size()),
                             group[0].line, group[0].column);
        Clause c;
        for (int i = 0; i < 3; ++i) {
            int v = parse_int(group[i]);
            if (v < 1)
                throw ParseError("index must be >= 1", group[i].line, group[i].column);
            c.q[i] = v - 1;
        }
        if (c.q[0] == c.q[1] || c.q[0] == c.q[2] || c.q[1] == c.q[2])
            throw ParseError("repeated index within a clause", group[0].line,
                             group[0].column);
        if (!seen.insert(sorted(c).q).second)
            throw ParseError("duplicate clause", group[0].line, group[0].column);
        inst.clauses.push_back(c);
    }
    if (inst.clauses.empty()) throw ParseError("no clauses found", 1, 1);

    int max_index = 0;
    for (const auto& c : inst.clauses)
        max_index = std::max(max_index, *std::max_element(c.q.begin(), c.q.end()) + 1);
    inst.n_qubits = declared_n > 0 ? declared_n : max_index;
    if (max_index > inst.n_qubits)
        throw ParseError("index " + std::to_string(max_index) + " exceeds n=" +
                             std::to_string(inst.n_qubits),
                         1, 1);
    if (inst.n_qubits > kMaxQubits)
        throw ParseError("instance needs " + std::to_string(inst.n_qubits) +
                             " qubits, cap is " + std::to_string(kMaxQubits),
                         1, 1);
    inst.solutions = brute_force_solutions(inst.n_qubits, inst.clauses);
    return inst;
}

ECInstance generate_ec_instance(int n_qubits, int n_clauses, std::uint64_t seed,
                                bool require_unique, int attempt_budget) {
    if (n_qubits < 3) throw InvalidSpec("generation requires n_qubits >= 3");
    if (n_qubits > kMaxQubits)
        throw InvalidSpec("generation capped at " + std::to_string(kMaxQubits) + " qubits");
    if (n_clauses < 1) throw InvalidSpec("generation requires n_clauses >= 1");
    if (static_cast<std::uint64_t>(n_clauses) > binom3(n_qubits))
        throw GenerationFailed("only " + std::to_string(binom3(n_qubits)) +
                               " distinct clauses exist for " + std::to_string(n_qubits) +
                               " qubits");

    std::mt19937_64 rng(seed);
    auto draw_index = [&](int bound) {
        return static_cast<int>(rng() % static_cast<std::uint64_t>(bound));
    };

    for (int attempt = 0; attempt < attempt_budget; ++attempt) {
        ECInstance inst;
        inst.n_qubits = n_qubits;
        std::set<std::array<int, 3>> seen;
        long rejections = 0;
        while (static_cast<int>(inst.clauses.size()) < n_clauses) {
            Clause c;
            c.q[0] = draw_index(n_qubits);
            do {
                c.q[1] = draw_index(n_qubits);
            } while (c.q[1] == c.q[0]);
            do {
                c.q[2] = draw_index(n_qubits);
            } while (c.q[2] == c.q[0] || c.q[2] == c.q[1]);
            if (seen.insert(sorted(c).q).second) {
                inst.clauses.push_back(c);
            } else if (++rejections > 10000L * n_clauses) {
                break;  // pathological duplicate streak, restart the attempt
            }
        }
        if (static_cast<int>(inst.clauses.size()) < n_clauses) continue;
        inst.solutions = brute_force_solutions(n_qubits, inst.clauses);
        if (!require_unique || inst.solutions.size() == 1) return inst;
    }
    throw GenerationFailed("no suitable instance in " + std::to_string(attempt_budget) +
                           " attempts");
}

DenseModel build_tls(const ModelSpec& spec) {
    if (spec.kind != ModelKind::Tls) throw InvalidSpec("build_tls needs kind = TLS");
    validate(spec);
    DenseModel m;
    m.dim = 2;
    m.h0 = Eigen::MatrixXd::Zero(2, 2);
    m.h0(0, 1) = m.h0(1, 0) = 1.0;  // sigma_x
    // H_T = -(B_x / 2 j0) sigma_x + sigma_z / 2
    m.ht = Eigen::MatrixXd::Zero(2, 2);
    const double c = -spec.b_x / (2.0 * spec.j0);
    m.ht(0, 1) = m.ht(1, 0) = c;
    m.ht(0, 0) = 0.5;
    m.ht(1, 1) = -0.5;
    m.ht_coeff = -spec.j0;
    return m;
}

DenseModel build_ec(const ECInstance& instance, const ModelSpec& spec) {
    if (spec.kind != ModelKind::ExactCover) throw InvalidSpec("build_ec needs kind = EC");
    if (instance.n_qubits != spec.n_qubits)
        throw InvalidSpec("instance/spec qubit count mismatch");
    const int n = spec.n_qubits;
    const int dim = 1 << n;
    DenseModel m;
    m.dim = dim;
    m.h0 = Eigen::MatrixXd::Zero(dim, dim);
    m.ht = Eigen::MatrixXd::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
        for (int j = 0; j < n; ++j) m.h0(b ^ (1 << j), b) += 1.0;
        m.ht(b, b) = count_violations(instance, static_cast<std::uint32_t>(b));
    }
    m.ht_coeff = spec.j0;  // violations penalized
    return m;
}

DenseModel build_tfim_dense(const ModelSpec& spec) {
    if (spec.kind != ModelKind::Tfim) throw InvalidSpec("build_tfim_dense needs kind = TFIM");
    validate(spec);
    if (spec.n_qubits > kMaxQubits)
        throw InvalidSpec("dense TFIM capped at " + std::to_string(kMaxQubits) + " qubits");
    const int n = spec.n_qubits;
    const int dim = 1 << n;
    DenseModel m;
    m.dim = dim;
    m.h0 = Eigen::MatrixXd::Zero(dim, dim);
    m.ht = Eigen::MatrixXd::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
        for (int j = 0; j < n; ++j) m.h0(b ^ (1 << j), b) += 1.0;
        double zz = 0.0;
        for (int j = 0; j < n; ++j) {
            const int j2 = (j + 1) % n;  // periodic chain
            const int s1 = ((b >> j) & 1) ? -1 : 1;
            const int s2 = ((b >> j2) & 1) ? -1 : 1;
            zz += s1 * s2;
        }
        m.ht(b, b) = zz;
    }
    m.ht_coeff = -spec.j0;
    return m;
}

std::vector<double> tfim_modes(int n) {
    if (n < 2 || n % 2 != 0) throw InvalidSpec("mode grid requires even n >= 2");
    std::vector<double> ks(n / 2);
    for (int m = 1; m <= n / 2; ++m) ks[m - 1] = (2.0 * m - 1.0) * M_PI / n;
    return ks;
}

double tfim_quasiparticle_energy(double k, double b_eff, double j0) {
    return 2.0 * std::sqrt(j0 * j0 + b_eff * b_eff - 2.0 * b_eff * j0 * std::cos(k));
}

Eigen::Matrix2d tfim_bdg_hamiltonian(double k, double b_eff, double j0) {
    const double a = 2.0 * (b_eff - j0 * std::cos(k));
    const double b = 2.0 * j0 * std::sin(k);
    Eigen::Matrix2d h;
    h << -a, -b, -b, a;
    return h;
}

Eigen::Vector2d tfim_bdg_ground_pair(double k, double b_eff, double j0) {
    const double a = 2.0 * (b_eff - j0 * std::cos(k));
    const double b = 2.0 * j0 * std::sin(k);
    const double eps = std::sqrt(a * a + b * b);
    // Eigenvector of [[-a,-b],[-b,a]] at -eps; b > 0 for k in (0, pi), so the
    // (a + eps, b) form is never the null vector.
    Eigen::Vector2d v(a + eps, b);
    return v / v.norm();
}

Model make_model(const ModelSpec& spec) {
    validate(spec);
    Model m;
    m.spec = spec;
    switch (spec.kind) {
        case ModelKind::Tls:
            m.dense = build_tls(spec);
            break;
        case ModelKind::ExactCover: {
            ECInstance inst;
            if (!spec.clauses.empty()) {
                inst.n_qubits = spec.n_qubits;
                std::set<std::array<int, 3>> seen;
                for (const auto& c : spec.clauses) {
                    for (int idx : c.q)
                        if (idx < 0 || idx >= spec.n_qubits)
                            throw InvalidSpec("clause index out of range");
                    if (c.q[0] == c.q[1] || c.q[0] == c.q[2] || c.q[1] == c.q[2])
                        throw InvalidSpec("repeated index within a clause");
                    if (!seen.insert(sorted(c).q).second)
                        throw InvalidSpec("duplicate clause");
                    inst.clauses.push_back(c);
                }
                inst.solutions = brute_force_solutions(inst.n_qubits, inst.clauses);
            } else {
                inst = generate_ec_instance(spec.n_qubits, spec.n_clauses, *spec.seed,
                                            /*require_unique=*/true);
            }
            m.dense = build_ec(inst, spec);
            m.instance = std::move(inst);
            break;
        }
        case ModelKind::Tfim: {
            BdGModel b;
            b.n = spec.n_qubits;
            b.j0 = spec.j0;
            b.modes = tfim_modes(spec.n_qubits);
            m.bdg = std::move(b);
            break;
        }
    }
    return m;
}

Model make_tfim_dense_model(const ModelSpec& spec) {
    Model m;
    m.spec = spec;
    m.dense = build_tfim_dense(spec);
    return m;
}

}  // namespace qac
