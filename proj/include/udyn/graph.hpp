#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "udyn/config.hpp"
#include "udyn/dynamics.hpp"
#include "udyn/random.hpp"

namespace udyn {

// Simple d-regular graph with explicit neighbor lists.
struct Graph {
    std::int64_t n = 0;
    std::int64_t d = 0;
    std::vector<std::vector<std::int32_t>> adjacency;

    bool validate() const;  // degrees, symmetry, no loops/multi-edges
};

// Pairing-model generator with edge-swap repair of self-loops and
// multi-edges. Requires n*d even and d < n.
Graph random_regular_graph(std::int64_t n, std::int64_t d, RandomSource& rng);

// Edge list, one "u v" per line, 0-indexed, undirected edges listed once.
void write_edge_list(const Graph& g, std::ostream& os);
Graph read_edge_list(std::istream& is);

enum class NodeState : std::uint8_t { Alpha = 0, Beta = 1, Undecided = 2 };

struct GraphState {
    std::vector<NodeState> assignment;

    Configuration counts() const;
    static GraphState uniform_blocks(std::int64_t n, std::int64_t a, std::int64_t b);
    // Random placement of a Alphas and b Betas among the n nodes.
    static GraphState random_placement(std::int64_t n, std::int64_t a, std::int64_t b,
                                       RandomSource& rng);
};

// One synchronous round: each node pulls a uniform neighbor (no self-pull,
// the graph has no loops) and applies the undecided-state update rule.
GraphState graph_step(const Graph& g, const GraphState& st, RandomSource& rng);

struct Discrepancy {
    double value = 0;  // E(S,T) - d|S||T|/n
    double bound = 0;  // lambda sqrt(|S||T|)
};

// Ordered-pair edge count: E(S,T) = #{(u,v) : u in S, v in T, uv an edge}, so
// an edge inside the intersection contributes twice. With this convention the
// regularity balance identities delta_{A,B}+delta_{A,Q}+delta_A = 0 hold
// exactly.
std::int64_t edge_count(const Graph& g, const std::vector<std::int32_t>& S,
                        const std::vector<std::int32_t>& T);

Discrepancy discrepancy(const Graph& g, const std::vector<std::int32_t>& S,
                        const std::vector<std::int32_t>& T, double lambda);

// max(|lambda_2|, |lambda_n|) of the adjacency matrix: dense symmetric solve
// for n <= 4000, power iteration on the top-eigenvector complement above.
// Rejects disconnected graphs.
double spectral_lambda(const Graph& g);

struct ExpanderReport {
    std::int64_t n = 0;
    std::int64_t d = 0;
    double lambda = 0;
    std::int64_t pairs_checked = 0;
    std::int64_t mixing_violations = 0;
    double max_ratio = 0;  // max |discrepancy| / bound over the tested pairs
    std::int64_t trials = 0;
    std::int64_t majority_wins = 0;  // biased starts absorbed at the majority in time
    std::int64_t timeouts = 0;
};

// Generate a random (n, d) graph, check the mixing-lemma inequality on
// `pairs` random set pairs, then run `trials` consensus runs from a biased
// start (s = n/4, q = n/4, randomly placed) with horizon 30 ln n.
ExpanderReport expander_experiment(std::int64_t n, std::int64_t d, std::int64_t pairs,
                                   std::int64_t trials, RandomSource& rng);

// The per-class expectations from the actual edge counts of the partition:
//   E[a'] = a(a+2q)/n + (delta_AQ - delta_AB)/d, mirrored for b',
//   E[q'] = (q^2+2ab)/n + (delta_Q + 2 delta_AB)/d, es = ea - eb.
ExpectedNext expected_next_graph(const Graph& g, const GraphState& st);

}  // namespace udyn
