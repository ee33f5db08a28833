#pragma once

#include "tumorgnn/nn/tensor.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tumorgnn::nn {

/// Several graphs stacked into one disjoint graph. Nodes of each graph are
/// contiguous; `offsets[g]..offsets[g+1]` are the rows of graph g.
struct GraphBatch {
    Matrix x;                                 // N_total x d
    std::vector<std::uint32_t> graph_id;      // per node, 0..B-1
    std::vector<std::size_t> offsets;         // B + 1 entries
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // undirected, stored once
    std::vector<double> edge_attr;            // per undirected edge
    std::vector<int> labels;                  // per graph

    // Incoming adjacency with self-loops, CSR by target node. Filled by finalize().
    std::vector<std::size_t> in_ptr;
    std::vector<std::uint32_t> in_src;
    std::vector<double> in_attr;

    std::size_t num_nodes() const { return x.rows; }
    std::size_t num_graphs() const { return offsets.empty() ? 0 : offsets.size() - 1; }

    /// Appends one graph; edge endpoints are local to the graph.
    void add_graph(const Matrix& features, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& local_edges,
                   const std::vector<double>& attr, int label);
    /// Builds the incoming CSR with a zero-attribute self-loop per node and
    /// validates ids. Must be called before message passing.
    void finalize();
};

/// y = x W^T + b with W: out x in, b: 1 x out.
Var dense(Var x, Var W, Var b);
Var dense(Var x, Var W);

/// Per-graph normalisation: gamma * (h - alpha*mu) / sqrt(var + eps) + beta,
/// where var is the mean of (h - alpha*mu)^2 within the graph.
/// gamma, beta, alpha are 1 x d.
Var graphnorm(Var x, Var gamma, Var beta, Var alpha, const std::vector<std::size_t>& offsets, double eps = 1e-5);

/// Attention over incoming neighbourhoods (self-loops included):
///   e_ij = LeakyReLU(a_dst.(W h_i) + a_src.(W h_j) + a_edge.(W_edge e_ij))
///   h'_i = sum_j softmax_j(e_ij) W h_j
/// computed per head on d'/heads wide slices and concatenated.
/// W: d' x d, W_edge: d' x 1, attn: heads x (3 d'/heads) laid out [dst | src | edge].
/// When `attention_out` is non-null it receives the coefficients, one row per
/// CSR slot and one column per head.
Var gat(Var x, Var W, Var W_edge, Var attn, const GraphBatch& batch, std::size_t heads, double leaky_slope = 0.2,
        Matrix* attention_out = nullptr);

/// While alive on the current thread, the first evaluation records which
/// side of the LeakyReLU kink every attention score falls on; after replay()
/// each further evaluation reuses those sides in the same order. Repeated
/// evaluations around the recorded point then follow one smooth branch,
/// which is what central-difference gradient checks need.
class BranchFreeze {
public:
    BranchFreeze();
    ~BranchFreeze();
    BranchFreeze(const BranchFreeze&) = delete;
    BranchFreeze& operator=(const BranchFreeze&) = delete;

    /// Stops recording and restarts from the first recorded decision.
    void replay();
    /// Recorded or replayed side for a score whose actual side is `positive`.
    bool side(bool positive);
    static BranchFreeze* active();

private:
    std::vector<std::uint8_t> sides_;
    std::size_t cursor_ = 0;
    bool recording_ = true;
    BranchFreeze* prev_ = nullptr;
};

/// tanh approximation by default; `exact` selects x * Phi(x).
Var gelu(Var x, bool exact = false);
double gelu_value(double x);
double gelu_exact(double x);

/// Inverted dropout: zeros with probability p and rescales survivors by
/// 1/(1-p) in training mode; identity otherwise.
Var dropout(Var x, double p, bool training, std::mt19937_64& rng);

/// Per-graph arithmetic mean of node rows: B x d.
Var mean_pool(Var x, const std::vector<std::size_t>& offsets);

/// Row i of the output is row graph_id[i] of g.
Var broadcast_to_nodes(Var g, const std::vector<std::uint32_t>& graph_id);

Var concat_cols(Var a, Var b);

/// Selects the given columns of x.
Var select_cols(Var x, const std::vector<std::size_t>& cols);

/// Mean over rows of -log softmax(logits)[label], via log-sum-exp.
Var cross_entropy(Var logits, const std::vector<int>& labels);

/// Row-wise softmax (no gradient).
Matrix softmax_rows(const Matrix& logits);

}  // namespace tumorgnn::nn
