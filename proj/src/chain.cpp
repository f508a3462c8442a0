#include "udyn/chain.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace udyn {

StateSpace::StateSpace(std::int64_t n) : n_(n), size_((n + 1) * (n + 2) / 2) {
    if (n < 1) throw std::invalid_argument("StateSpace: n must be >= 1");
}

std::int64_t StateSpace::index(std::int64_t a, std::int64_t b) const {
    // Row a holds the n+1-a states (a, 0..n-a).
    return a * (n_ + 1) - a * (a - 1) / 2 + b;
}

Configuration StateSpace::config(std::int64_t idx) const {
    std::int64_t a = 0;
    std::int64_t row_len = n_ + 1;
    while (idx >= row_len) {
        idx -= row_len;
        --row_len;
        ++a;
    }
    return Configuration{n_, a, idx};
}

namespace {

double binom_logpmf(std::int64_t k, std::int64_t m, double p) {
    if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
    if (p >= 1.0) return k == m ? 0.0 : -INFINITY;
    return std::lgamma(static_cast<double>(m + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(m - k + 1)) + static_cast<double>(k) * std::log(p) +
           static_cast<double>(m - k) * std::log1p(-p);
}

void check_cap(std::int64_t n, std::int64_t cap) {
    if (n > cap) {
        throw std::invalid_argument("exact chain: n=" + std::to_string(n) +
                                    " exceeds cap " + std::to_string(cap));
    }
}

}  // namespace

std::vector<double> one_step_distribution(const Configuration& cfg, std::int64_t cap) {
    require_valid(cfg);
    check_cap(cfg.n, cap);
    const std::int64_t n = cfg.n, a = cfg.a, b = cfg.b, q = cfg.q();
    const double dn = static_cast<double>(n);

    const StateSpace ss(n);
    std::vector<double> out(ss.size(), 0.0);

    const double pa = static_cast<double>(a + q) / dn;
    const double pb = static_cast<double>(b + q) / dn;
    std::vector<double> bin_a(a + 1), bin_b(b + 1);
    for (std::int64_t k = 0; k <= a; ++k) bin_a[k] = std::exp(binom_logpmf(k, a, pa));
    for (std::int64_t k = 0; k <= b; ++k) bin_b[k] = std::exp(binom_logpmf(k, b, pb));

    // Multinomial(q; a/n, b/n, q/n) joint over (q_to_a, q_to_b).
    const double lq = std::lgamma(static_cast<double>(q + 1));
    const double la = a > 0 ? std::log(static_cast<double>(a) / dn) : -INFINITY;
    const double lb = b > 0 ? std::log(static_cast<double>(b) / dn) : -INFINITY;
    const double lqq = q > 0 ? std::log(static_cast<double>(q) / dn) : -INFINITY;

    for (std::int64_t i = 0; i <= q; ++i) {
        if (a == 0 && i > 0) break;
        for (std::int64_t j = 0; j + i <= q; ++j) {
            if (b == 0 && j > 0) break;
            const std::int64_t r = q - i - j;
            if (q == 0 && r > 0) break;
            double lp = lq - std::lgamma(static_cast<double>(i + 1)) -
                        std::lgamma(static_cast<double>(j + 1)) -
                        std::lgamma(static_cast<double>(r + 1));
            if (i > 0) lp += static_cast<double>(i) * la;
            if (j > 0) lp += static_cast<double>(j) * lb;
            if (r > 0) lp += static_cast<double>(r) * lqq;
            const double m = std::exp(lp);
            if (m == 0.0) continue;
            for (std::int64_t ka = 0; ka <= a; ++ka) {
                const double ma = m * bin_a[ka];
                if (ma == 0.0) continue;
                for (std::int64_t kb = 0; kb <= b; ++kb) {
                    out[ss.index(ka + i, kb + j)] += ma * bin_b[kb];
                }
            }
        }
    }
    return out;
}

namespace {

// Largest q <= n/2 such that (s, q) is a lattice configuration, i.e.
// q <= n - |s| and n - q + s is even.
std::int64_t redirect_target_q(std::int64_t n, std::int64_t s) {
    std::int64_t qz = std::min(n / 2, n - std::abs(s));
    if (((n - qz + s) & 1) != 0) --qz;
    return qz;
}

}  // namespace

std::vector<double> pruned_one_step_distribution(const Configuration& cfg,
                                                 const PhaseParameters& params,
                                                 std::int64_t cap) {
    require_valid(cfg);
    check_cap(cfg.n, cap);
    if (cfg.n % 2 != 0) throw std::invalid_argument("pruned kernel requires even n");

    std::vector<double> row = one_step_distribution(cfg, cap);
    if (classify(cfg, params).label != RegionLabel::H2) return row;

    const std::int64_t n = cfg.n;
    const StateSpace ss(n);
    for (std::int64_t idx = 0; idx < ss.size(); ++idx) {
        if (row[idx] == 0.0) continue;
        const Configuration y = ss.config(idx);
        const std::int64_t qy = y.q();
        if (18 * qy >= n && 2 * qy <= n) continue;  // in [n/18, n/2], kept
        const std::int64_t sy = y.s();
        const std::int64_t qz = redirect_target_q(n, sy);
        const std::int64_t az = (n - qz + sy) / 2;
        const std::int64_t bz = n - qz - az;
        const std::int64_t zidx = ss.index(az, bz);
        if (zidx != idx) {
            row[zidx] += row[idx];
            row[idx] = 0.0;
        }
    }
    return row;
}

TransitionKernel build_kernel(std::int64_t n, KernelKind kind, double gamma,
                              std::int64_t cap) {
    check_cap(n, cap);
    TransitionKernel k(n);
    k.kind = kind;
    k.gamma = gamma;
    const PhaseParameters params{gamma};
    const StateSpace& ss = k.states();
    k.rows.reserve(ss.size());
    for (std::int64_t idx = 0; idx < ss.size(); ++idx) {
        const Configuration cfg = ss.config(idx);
        if (kind == KernelKind::Pruned) {
            k.rows.push_back(pruned_one_step_distribution(cfg, params, cap));
        } else {
            k.rows.push_back(one_step_distribution(cfg, cap));
        }
    }
    return k;
}

AbsorptionReport absorption(const TransitionKernel& kernel, const Configuration& start) {
    require_valid(start);
    if (start.n != kernel.n) throw std::invalid_argument("absorption: n mismatch");
    const StateSpace& ss = kernel.states();
    const std::int64_t n = kernel.n;

    const std::int64_t abs_alpha = ss.index(n, 0);
    const std::int64_t abs_beta = ss.index(0, n);
    const std::int64_t abs_undecided = ss.index(0, 0);

    AbsorptionReport r;
    const std::int64_t start_idx = ss.index(start.a, start.b);
    if (start_idx == abs_alpha) return {1, 0, 0, 0};
    if (start_idx == abs_beta) return {0, 1, 0, 0};
    if (start_idx == abs_undecided) return {0, 0, 1, 0};

    // Transient states are everything but the three absorbing ones.
    std::vector<std::int64_t> transient;
    std::vector<std::int64_t> pos(ss.size(), -1);
    for (std::int64_t idx = 0; idx < ss.size(); ++idx) {
        if (idx == abs_alpha || idx == abs_beta || idx == abs_undecided) continue;
        pos[idx] = static_cast<std::int64_t>(transient.size());
        transient.push_back(idx);
    }
    const auto m = static_cast<Eigen::Index>(transient.size());

    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 4);  // p_alpha, p_beta, p_und, time
    for (Eigen::Index i = 0; i < m; ++i) {
        const std::vector<double>& row = kernel.rows[transient[i]];
        for (std::int64_t j = 0; j < ss.size(); ++j) {
            const double p = row[j];
            if (p == 0.0) continue;
            if (j == abs_alpha) {
                rhs(i, 0) += p;
            } else if (j == abs_beta) {
                rhs(i, 1) += p;
            } else if (j == abs_undecided) {
                rhs(i, 2) += p;
            } else {
                sys(i, pos[j]) -= p;
            }
        }
        sys(i, i) += 1.0;
        rhs(i, 3) = 1.0;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    const Eigen::MatrixXd sol = lu.solve(rhs);
    const double residual = (sys * sol - rhs).cwiseAbs().maxCoeff();
    if (!std::isfinite(residual) || residual > 1e-8) {
        throw std::runtime_error("absorption: linear solve failed (residual " +
                                 std::to_string(residual) + ")");
    }

    const Eigen::Index si = pos[start_idx];
    r.p_alpha = sol(si, 0);
    r.p_beta = sol(si, 1);
    r.p_undecided = sol(si, 2);
    r.expected_rounds = sol(si, 3);
    return r;
}

void export_kernel_csv(const TransitionKernel& kernel, std::ostream& os) {
    const StateSpace& ss = kernel.states();
    os << "a,b,a_next,b_next,prob\n";
    std::ostringstream num;
    num.precision(17);
    for (std::int64_t i = 0; i < ss.size(); ++i) {
        const Configuration from = ss.config(i);
        const std::vector<double>& row = kernel.rows[i];
        for (std::int64_t j = 0; j < ss.size(); ++j) {
            if (row[j] == 0.0) continue;
            const Configuration to = ss.config(j);
            num.str("");
            num << row[j];
            os << from.a << ',' << from.b << ',' << to.a << ',' << to.b << ','
               << num.str() << '\n';
        }
    }
}

}  // namespace udyn
