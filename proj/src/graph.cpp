#include "udyn/graph.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace udyn {

namespace {

std::uint64_t edge_key(std::int64_t u, std::int64_t v) {
    if (u > v) std::swap(u, v);
    return static_cast<std::uint64_t>(u) << 32 | static_cast<std::uint64_t>(v);
}

Graph from_edges(std::int64_t n, std::int64_t d,
                 const std::vector<std::pair<std::int32_t, std::int32_t>>& edges) {
    Graph g;
    g.n = n;
    g.d = d;
    g.adjacency.assign(static_cast<std::size_t>(n), {});
    for (auto [u, v] : edges) {
        g.adjacency[static_cast<std::size_t>(u)].push_back(v);
        g.adjacency[static_cast<std::size_t>(v)].push_back(u);
    }
    return g;
}

}  // namespace

bool Graph::validate() const {
    if (n < 1 || static_cast<std::int64_t>(adjacency.size()) != n) return false;
    std::unordered_set<std::uint64_t> seen;
    for (std::int64_t u = 0; u < n; ++u) {
        const auto& nb = adjacency[static_cast<std::size_t>(u)];
        if (static_cast<std::int64_t>(nb.size()) != d) return false;
        for (std::int32_t v : nb) {
            if (v < 0 || v >= n || v == u) return false;
        }
    }
    for (std::int64_t u = 0; u < n; ++u) {
        std::set<std::int32_t> uniq(adjacency[static_cast<std::size_t>(u)].begin(),
                                    adjacency[static_cast<std::size_t>(u)].end());
        if (static_cast<std::int64_t>(uniq.size()) != d) return false;  // multi-edge
        for (std::int32_t v : uniq) {
            const auto& back = adjacency[static_cast<std::size_t>(v)];
            if (std::find(back.begin(), back.end(), static_cast<std::int32_t>(u)) == back.end()) {
                return false;  // asymmetric
            }
        }
    }
    return true;
}

Graph random_regular_graph(std::int64_t n, std::int64_t d, RandomSource& rng) {
    if (d < 1 || d >= n) throw std::invalid_argument("random_regular_graph: need 1 <= d < n");
    if ((n * d) % 2 != 0) throw std::invalid_argument("random_regular_graph: n*d must be even");

    // Pairing model: match stubs at random, then repair self-loops and
    // multi-edges by random double edge swaps (a full restart is hopeless for
    // non-trivial d).
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<std::int32_t> stubs(static_cast<std::size_t>(n * d));
        for (std::int64_t u = 0; u < n; ++u) {
            for (std::int64_t k = 0; k < d; ++k) {
                stubs[static_cast<std::size_t>(u * d + k)] = static_cast<std::int32_t>(u);
            }
        }
        std::shuffle(stubs.begin(), stubs.end(), rng.engine());

        std::vector<std::pair<std::int32_t, std::int32_t>> edges;
        edges.reserve(stubs.size() / 2);
        for (std::size_t i = 0; i < stubs.size(); i += 2) {
            edges.emplace_back(stubs[i], stubs[i + 1]);
        }

        std::unordered_set<std::uint64_t> present;
        auto bad = [&present](std::int32_t u, std::int32_t v) {
            return u == v || present.count(edge_key(u, v)) > 0;
        };
        std::vector<std::size_t> violations;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto [u, v] = edges[i];
            if (bad(u, v)) {
                violations.push_back(i);
            } else {
                present.insert(edge_key(u, v));
            }
        }

        bool ok = true;
        std::int64_t budget = 1000 * static_cast<std::int64_t>(violations.size()) + 10000;
        while (!violations.empty() && budget-- > 0) {
            const std::size_t vi = violations.back();
            auto [u, v] = edges[vi];
            const std::size_t oi =
                static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(edges.size()) - 1));
            if (oi == vi) continue;
            auto [x, y] = edges[oi];
            if (bad(u, x) || bad(v, y) || edge_key(u, x) == edge_key(v, y)) continue;
            if (present.erase(edge_key(x, y)) == 0) continue;  // partner itself violating
            edges[vi] = {u, x};
            edges[oi] = {v, y};
            present.insert(edge_key(u, x));
            present.insert(edge_key(v, y));
            violations.pop_back();
        }
        if (!violations.empty()) ok = false;
        if (!ok) continue;

        Graph g = from_edges(n, d, edges);
        if (g.validate()) return g;
    }
    throw std::runtime_error("random_regular_graph: failed to generate a simple graph");
}

void write_edge_list(const Graph& g, std::ostream& os) {
    for (std::int64_t u = 0; u < g.n; ++u) {
        for (std::int32_t v : g.adjacency[static_cast<std::size_t>(u)]) {
            if (v > u) os << u << ' ' << v << '\n';
        }
    }
}

Graph read_edge_list(std::istream& is) {
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    std::int64_t max_node = -1;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::int64_t u, v;
        if (!(ls >> u >> v)) throw std::runtime_error("edge list: malformed line: " + line);
        edges.emplace_back(static_cast<std::int32_t>(u), static_cast<std::int32_t>(v));
        max_node = std::max({max_node, u, v});
    }
    if (edges.empty()) throw std::runtime_error("edge list: no edges");
    const std::int64_t n = max_node + 1;
    const std::int64_t d = 2 * static_cast<std::int64_t>(edges.size()) / n;
    Graph g = from_edges(n, d, edges);
    if (!g.validate()) throw std::runtime_error("edge list: not a simple regular graph");
    return g;
}

Configuration GraphState::counts() const {
    Configuration c;
    c.n = static_cast<std::int64_t>(assignment.size());
    c.a = std::count(assignment.begin(), assignment.end(), NodeState::Alpha);
    c.b = std::count(assignment.begin(), assignment.end(), NodeState::Beta);
    return c;
}

GraphState GraphState::uniform_blocks(std::int64_t n, std::int64_t a, std::int64_t b) {
    if (a < 0 || b < 0 || a + b > n) throw std::invalid_argument("bad graph state counts");
    GraphState st;
    st.assignment.assign(static_cast<std::size_t>(n), NodeState::Undecided);
    for (std::int64_t i = 0; i < a; ++i) st.assignment[static_cast<std::size_t>(i)] = NodeState::Alpha;
    for (std::int64_t i = a; i < a + b; ++i) st.assignment[static_cast<std::size_t>(i)] = NodeState::Beta;
    return st;
}

GraphState GraphState::random_placement(std::int64_t n, std::int64_t a, std::int64_t b,
                                        RandomSource& rng) {
    GraphState st = uniform_blocks(n, a, b);
    std::shuffle(st.assignment.begin(), st.assignment.end(), rng.engine());
    return st;
}

GraphState graph_step(const Graph& g, const GraphState& st, RandomSource& rng) {
    if (static_cast<std::int64_t>(st.assignment.size()) != g.n) {
        throw std::invalid_argument("graph_step: state/graph size mismatch");
    }
    GraphState next;
    next.assignment.resize(st.assignment.size());
    for (std::int64_t u = 0; u < g.n; ++u) {
        const auto& nb = g.adjacency[static_cast<std::size_t>(u)];
        const std::int32_t pulled =
            nb[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(nb.size()) - 1))];
        const NodeState mine = st.assignment[static_cast<std::size_t>(u)];
        const NodeState theirs = st.assignment[static_cast<std::size_t>(pulled)];
        NodeState out;
        if (mine == NodeState::Undecided) {
            out = theirs;
        } else if (theirs == NodeState::Undecided || theirs == mine) {
            out = mine;
        } else {
            out = NodeState::Undecided;
        }
        next.assignment[static_cast<std::size_t>(u)] = out;
    }
    return next;
}

std::int64_t edge_count(const Graph& g, const std::vector<std::int32_t>& S,
                        const std::vector<std::int32_t>& T) {
    std::vector<char> in_t(static_cast<std::size_t>(g.n), 0);
    for (std::int32_t v : T) in_t[static_cast<std::size_t>(v)] = 1;
    std::int64_t count = 0;
    for (std::int32_t u : S) {
        for (std::int32_t v : g.adjacency[static_cast<std::size_t>(u)]) {
            count += in_t[static_cast<std::size_t>(v)];
        }
    }
    return count;
}

Discrepancy discrepancy(const Graph& g, const std::vector<std::int32_t>& S,
                        const std::vector<std::int32_t>& T, double lambda) {
    Discrepancy d;
    const double ss = static_cast<double>(S.size());
    const double ts = static_cast<double>(T.size());
    d.value = static_cast<double>(edge_count(g, S, T)) -
              static_cast<double>(g.d) * ss * ts / static_cast<double>(g.n);
    d.bound = lambda * std::sqrt(ss * ts);
    return d;
}

namespace {

bool connected(const Graph& g) {
    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    std::vector<std::int32_t> stack{0};
    seen[0] = 1;
    std::int64_t visited = 1;
    while (!stack.empty()) {
        const std::int32_t u = stack.back();
        stack.pop_back();
        for (std::int32_t v : g.adjacency[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++visited;
                stack.push_back(v);
            }
        }
    }
    return visited == g.n;
}

}  // namespace

double spectral_lambda(const Graph& g) {
    if (!connected(g)) throw std::invalid_argument("spectral_lambda: graph is disconnected");
    const auto n = static_cast<Eigen::Index>(g.n);

    if (g.n <= 4000) {
        Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
        for (std::int64_t u = 0; u < g.n; ++u) {
            for (std::int32_t v : g.adjacency[static_cast<std::size_t>(u)]) {
                adj(static_cast<Eigen::Index>(u), v) = 1.0;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(adj, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = solver.eigenvalues();  // ascending
        // Connected regular graph: the top eigenvalue is d with multiplicity 1.
        return std::max(std::abs(ev(0)), std::abs(ev(n - 2)));
    }

    // Power iteration on A restricted to the orthogonal complement of the
    // all-ones top eigenvector.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = std::cos(static_cast<double>(i) * 1.7) + 0.1;
    x.array() -= x.mean();
    x.normalize();
    double lambda = 0;
    Eigen::VectorXd y(n);
    for (int it = 0; it < 20000; ++it) {
        y.setZero();
        for (std::int64_t u = 0; u < g.n; ++u) {
            double acc = 0;
            for (std::int32_t v : g.adjacency[static_cast<std::size_t>(u)]) {
                acc += x(v);
            }
            y(static_cast<Eigen::Index>(u)) = acc;
        }
        y.array() -= y.mean();
        const double next = y.norm();
        y /= next;
        // |Ax| converges to max |lambda_i|, i >= 2; the sign flip of bipartite
        // spectra does not matter for the magnitude.
        if (it > 50 && std::abs(next - lambda) <= 1e-7 * std::max(1.0, lambda)) {
            lambda = next;
            break;
        }
        lambda = next;
        x.swap(y);
    }
    return lambda;
}

ExpanderReport expander_experiment(std::int64_t n, std::int64_t d, std::int64_t pairs,
                                   std::int64_t trials, RandomSource& rng) {
    ExpanderReport rep;
    rep.n = n;
    rep.d = d;
    const Graph g = random_regular_graph(n, d, rng);
    rep.lambda = spectral_lambda(g);

    std::vector<std::int32_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::int64_t p = 0; p < pairs; ++p) {
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        const auto ks = rng.uniform_int(1, n - 1);
        const auto kt = rng.uniform_int(1, n - 1);
        std::vector<std::int32_t> S(perm.begin(), perm.begin() + ks);
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        std::vector<std::int32_t> T(perm.begin(), perm.begin() + kt);
        const Discrepancy disc = discrepancy(g, S, T, rep.lambda);
        ++rep.pairs_checked;
        if (std::abs(disc.value) > disc.bound + 1e-9) ++rep.mixing_violations;
        if (disc.bound > 0) {
            rep.max_ratio = std::max(rep.max_ratio, std::abs(disc.value) / disc.bound);
        }
    }

    // Biased starts: s = n/4, q = n/4, placed uniformly at random.
    const std::int64_t q0 = n / 4;
    const std::int64_t a0 = (n - q0) / 2 + n / 8;
    const std::int64_t b0 = n - q0 - a0;
    const std::int64_t horizon =
        static_cast<std::int64_t>(std::ceil(30.0 * std::log(static_cast<double>(n))));
    for (std::int64_t t = 0; t < trials; ++t) {
        RandomSource trial_rng = rng.derived(static_cast<std::uint64_t>(t) + 1);
        GraphState st = GraphState::random_placement(n, a0, b0, trial_rng);
        ++rep.trials;
        bool decided = false;
        for (std::int64_t r = 0; r < horizon; ++r) {
            const Configuration c = st.counts();
            if (c.a == n || c.b == n) {
                if (c.a == n) ++rep.majority_wins;
                decided = true;
                break;
            }
            st = graph_step(g, st, trial_rng);
        }
        if (!decided) {
            const Configuration c = st.counts();
            if (c.a == n) {
                ++rep.majority_wins;
            } else {
                ++rep.timeouts;
            }
        }
    }
    return rep;
}

ExpectedNext expected_next_graph(const Graph& g, const GraphState& st) {
    if (static_cast<std::int64_t>(st.assignment.size()) != g.n) {
        throw std::invalid_argument("expected_next_graph: state/graph size mismatch");
    }
    std::vector<std::int32_t> A, B, Q;
    for (std::int64_t u = 0; u < g.n; ++u) {
        switch (st.assignment[static_cast<std::size_t>(u)]) {
            case NodeState::Alpha: A.push_back(static_cast<std::int32_t>(u)); break;
            case NodeState::Beta: B.push_back(static_cast<std::int32_t>(u)); break;
            case NodeState::Undecided: Q.push_back(static_cast<std::int32_t>(u)); break;
        }
    }
    const double n = static_cast<double>(g.n);
    const double d = static_cast<double>(g.d);
    const double a = static_cast<double>(A.size());
    const double b = static_cast<double>(B.size());
    const double q = static_cast<double>(Q.size());

    auto delta = [&](const std::vector<std::int32_t>& S, const std::vector<std::int32_t>& T) {
        return static_cast<double>(edge_count(g, S, T)) -
               d * static_cast<double>(S.size()) * static_cast<double>(T.size()) / n;
    };
    const double d_ab = delta(A, B);
    const double d_aq = delta(A, Q);
    const double d_bq = delta(B, Q);
    const double d_qq = delta(Q, Q);

    ExpectedNext e;
    e.ea = a * (a + 2 * q) / n + (d_aq - d_ab) / d;
    e.eb = b * (b + 2 * q) / n + (d_bq - d_ab) / d;
    e.eq = (q * q + 2 * a * b) / n + (d_qq + 2 * d_ab) / d;
    e.es = e.ea - e.eb;
    return e;
}

}  // namespace udyn
