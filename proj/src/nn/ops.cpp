#include "tumorgnn/nn/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tumorgnn::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

MapC view(const Matrix& m) { return MapC(m.data.data(), Eigen::Index(m.rows), Eigen::Index(m.cols)); }
Map view(Matrix& m) { return Map(m.data.data(), Eigen::Index(m.rows), Eigen::Index(m.cols)); }

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

constexpr double kSqrt2OverPi = 0.7978845608028654;
constexpr double kGeluCubic = 0.044715;

}  // namespace

// ---------------------------------------------------------------- batching

void GraphBatch::add_graph(const Matrix& features,
                           const std::vector<std::pair<std::uint32_t, std::uint32_t>>& local_edges,
                           const std::vector<double>& attr, int label) {
    require(features.rows > 0, "GraphBatch: zero-node graph");
    require(local_edges.size() == attr.size(), "GraphBatch: edge/attribute count mismatch");
    if (offsets.empty()) {
        offsets.push_back(0);
        x = Matrix(0, features.cols);
    }
    require(features.cols == x.cols, "GraphBatch: feature width mismatch");
    const auto base = static_cast<std::uint32_t>(x.rows);
    const auto g = static_cast<std::uint32_t>(labels.size());
    x.data.insert(x.data.end(), features.data.begin(), features.data.end());
    x.rows += features.rows;
    for (std::size_t i = 0; i < features.rows; ++i) graph_id.push_back(g);
    for (std::size_t e = 0; e < local_edges.size(); ++e) {
        auto [i, j] = local_edges[e];
        require(i < features.rows && j < features.rows && i != j, "GraphBatch: bad edge endpoint");
        edges.emplace_back(base + i, base + j);
        edge_attr.push_back(attr[e]);
    }
    offsets.push_back(x.rows);
    labels.push_back(label);
}

void GraphBatch::finalize() {
    const std::size_t n = x.rows;
    require(graph_id.size() == n, "GraphBatch: graph_id size mismatch");
    require(edges.size() == edge_attr.size(), "GraphBatch: edge_attr size mismatch");
    std::vector<std::size_t> deg(n, 1);
    for (auto [i, j] : edges) {
        require(i < n && j < n, "GraphBatch: edge endpoint out of range");
        ++deg[i];
        ++deg[j];
    }
    in_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) in_ptr[i + 1] = in_ptr[i] + deg[i];
    in_src.assign(in_ptr[n], 0);
    in_attr.assign(in_ptr[n], 0.0);
    std::vector<std::size_t> fill(in_ptr.begin(), in_ptr.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        in_src[fill[i]] = static_cast<std::uint32_t>(i);
        in_attr[fill[i]++] = 0.0;
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [i, j] = edges[e];
        in_src[fill[i]] = j;
        in_attr[fill[i]++] = edge_attr[e];
        in_src[fill[j]] = i;
        in_attr[fill[j]++] = edge_attr[e];
    }
}

// ---------------------------------------------------------------- dense

Var dense(Var x, Var W, Var b) {
    Tape& t = *x.tape;
    const Matrix& X = x.value();
    const Matrix& Wm = W.value();
    const Matrix& B = b.value();
    require(X.cols == Wm.cols, "dense: input width does not match W");
    require(B.rows == 1 && B.cols == Wm.rows, "dense: bias shape mismatch");
    Matrix Y(X.rows, Wm.rows);
    view(Y).noalias() = view(X) * view(Wm).transpose();
    view(Y).rowwise() += view(B).row(0);
    return t.record(std::move(Y), [x, W, b](Tape& t, Var out) {
        const Matrix& G = t.grad(out);
        if (t.needs_grad(x)) view(t.grad(x)).noalias() += view(G) * view(W.value());
        if (t.needs_grad(W)) view(t.grad(W)).noalias() += view(G).transpose() * view(x.value());
        if (t.needs_grad(b)) view(t.grad(b)).row(0) += view(G).colwise().sum();
    });
}

Var dense(Var x, Var W) {
    Tape& t = *x.tape;
    const Matrix& X = x.value();
    const Matrix& Wm = W.value();
    require(X.cols == Wm.cols, "dense: input width does not match W");
    Matrix Y(X.rows, Wm.rows);
    view(Y).noalias() = view(X) * view(Wm).transpose();
    return t.record(std::move(Y), [x, W](Tape& t, Var out) {
        const Matrix& G = t.grad(out);
        if (t.needs_grad(x)) view(t.grad(x)).noalias() += view(G) * view(W.value());
        if (t.needs_grad(W)) view(t.grad(W)).noalias() += view(G).transpose() * view(x.value());
    });
}

// ---------------------------------------------------------------- graphnorm

Var graphnorm(Var x, Var gamma, Var beta, Var alpha, const std::vector<std::size_t>& offsets, double eps) {
    Tape& t = *x.tape;
    const Matrix& X = x.value();
    const std::size_t d = X.cols;
    require(gamma.value().size() == d && beta.value().size() == d && alpha.value().size() == d,
            "graphnorm: parameter width mismatch");
    require(!offsets.empty() && offsets.back() == X.rows, "graphnorm: offsets do not cover the input");
    require(eps > 0.0, "graphnorm: eps must be > 0");
    const std::size_t B = offsets.size() - 1;

    auto mu = std::make_shared<Matrix>(B, d);
    auto inv_std = std::make_shared<Matrix>(B, d);
    Matrix Y(X.rows, d);
    const Matrix& ga = gamma.value();
    const Matrix& be = beta.value();
    const Matrix& al = alpha.value();
    for (std::size_t g = 0; g < B; ++g) {
        const std::size_t lo = offsets[g], hi = offsets[g + 1];
        require(hi > lo, "graphnorm: empty graph");
        const double n = static_cast<double>(hi - lo);
        for (std::size_t j = 0; j < d; ++j) {
            double m = 0.0;
            for (std::size_t i = lo; i < hi; ++i) m += X(i, j);
            m /= n;
            const double c = al.data[j] * m;
            double v = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                double xc = X(i, j) - c;
                v += xc * xc;
            }
            v /= n;
            const double is = 1.0 / std::sqrt(v + eps);
            (*mu)(g, j) = m;
            (*inv_std)(g, j) = is;
            for (std::size_t i = lo; i < hi; ++i) Y(i, j) = ga.data[j] * (X(i, j) - c) * is + be.data[j];
        }
    }
    return t.record(std::move(Y), [x, gamma, beta, alpha, offsets, mu, inv_std](Tape& t, Var out) {
        const Matrix& G = t.grad(out);
        const Matrix& X = x.value();
        const Matrix& ga = gamma.value();
        const Matrix& al = alpha.value();
        const std::size_t d = X.cols;
        const std::size_t B = offsets.size() - 1;
        Matrix* gx = t.needs_grad(x) ? &t.grad(x) : nullptr;
        Matrix* gg = t.needs_grad(gamma) ? &t.grad(gamma) : nullptr;
        Matrix* gb = t.needs_grad(beta) ? &t.grad(beta) : nullptr;
        Matrix* ga_ = t.needs_grad(alpha) ? &t.grad(alpha) : nullptr;
        std::vector<double> gxc;
        for (std::size_t g = 0; g < B; ++g) {
            const std::size_t lo = offsets[g], hi = offsets[g + 1];
            const double n = static_cast<double>(hi - lo);
            gxc.resize(hi - lo);
            for (std::size_t j = 0; j < d; ++j) {
                const double m = (*mu)(g, j);
                const double c = al.data[j] * m;
                const double is = (*inv_std)(g, j);
                double sum_g = 0.0, sum_gx = 0.0;
                for (std::size_t i = lo; i < hi; ++i) {
                    sum_g += G(i, j);
                    sum_gx += G(i, j) * (X(i, j) - c);
                }
                if (gb) gb->data[j] += sum_g;
                if (gg) gg->data[j] += sum_gx * is;
                // d/dxc_i of gamma*xc*is, including the path through the variance.
                const double k = ga.data[j] * sum_gx * is * is * is / n;
                double sum_gxc = 0.0;
                for (std::size_t i = lo; i < hi; ++i) {
                    double v = ga.data[j] * G(i, j) * is - k * (X(i, j) - c);
                    gxc[i - lo] = v;
                    sum_gxc += v;
                }
                if (ga_) ga_->data[j] += -m * sum_gxc;
                if (gx) {
                    const double shift = al.data[j] * sum_gxc / n;
                    for (std::size_t i = lo; i < hi; ++i) (*gx)(i, j) += gxc[i - lo] - shift;
                }
            }
        }
    });
}

// ---------------------------------------------------------------- GAT

namespace {
thread_local BranchFreeze* g_active_freeze = nullptr;
}

BranchFreeze::BranchFreeze() : prev_(g_active_freeze) { g_active_freeze = this; }

BranchFreeze::~BranchFreeze() { g_active_freeze = prev_; }

BranchFreeze* BranchFreeze::active() { return g_active_freeze; }

void BranchFreeze::replay() {
    recording_ = false;
    cursor_ = 0;
}

bool BranchFreeze::side(bool positive) {
    if (recording_) {
        sides_.push_back(positive ? 1 : 0);
        return positive;
    }
    if (cursor_ >= sides_.size()) throw std::logic_error("BranchFreeze: replay ran past the recorded evaluation");
    return sides_[cursor_++] != 0;
}

Var gat(Var x, Var W, Var W_edge, Var attn, const GraphBatch& batch, std::size_t heads, double leaky_slope,
        Matrix* attention_out) {
    Tape& t = *x.tape;
    const Matrix& X = x.value();
    const Matrix& Wm = W.value();
    const Matrix& We = W_edge.value();
    const Matrix& A = attn.value();
    const std::size_t n = X.rows;
    const std::size_t dp = Wm.rows;
    require(heads >= 1 && dp % heads == 0, "gat: output width must be divisible by heads");
    const std::size_t dh = dp / heads;
    require(X.cols == Wm.cols, "gat: input width does not match W");
    require(We.rows == dp && We.cols == 1, "gat: W_edge must be d' x 1");
    require(A.rows == heads && A.cols == 3 * dh, "gat: attention must be heads x 3(d'/heads)");
    require(batch.in_ptr.size() == n + 1, "gat: batch not finalized or size mismatch");
    const std::size_t slots = batch.in_src.size();

    struct Cache {
        Matrix Z;       // n x d'
        Matrix sdst;    // n x heads
        Matrix ssrc;    // n x heads
        std::vector<double> cedge;  // heads
        Matrix slope;   // slots x heads, LeakyReLU derivative at the score
        Matrix alpha;   // slots x heads
    };
    auto c = std::make_shared<Cache>();
    c->Z = Matrix(n, dp);
    view(c->Z).noalias() = view(X) * view(Wm).transpose();
    c->sdst = Matrix(n, heads);
    c->ssrc = Matrix(n, heads);
    c->cedge.assign(heads, 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
        const double* a = A.row(h);
        for (std::size_t k = 0; k < dh; ++k) c->cedge[h] += a[2 * dh + k] * We.data[h * dh + k];
        for (std::size_t i = 0; i < n; ++i) {
            const double* z = c->Z.row(i) + h * dh;
            double sd = 0.0, ss = 0.0;
            for (std::size_t k = 0; k < dh; ++k) {
                sd += a[k] * z[k];
                ss += a[dh + k] * z[k];
            }
            c->sdst(i, h) = sd;
            c->ssrc(i, h) = ss;
        }
    }
    c->slope = Matrix(slots, heads);
    c->alpha = Matrix(slots, heads);
    Matrix Y(n, dp);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = batch.in_ptr[i], hi = batch.in_ptr[i + 1];
        for (std::size_t h = 0; h < heads; ++h) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t s = lo; s < hi; ++s) {
                double p = c->sdst(i, h) + c->ssrc(batch.in_src[s], h) + batch.in_attr[s] * c->cedge[h];
                const bool positive = BranchFreeze::active() ? BranchFreeze::active()->side(p > 0.0) : p > 0.0;
                c->slope(s, h) = positive ? 1.0 : leaky_slope;
                double e = c->slope(s, h) * p;
                c->alpha(s, h) = e;
                mx = std::max(mx, e);
            }
            double z = 0.0;
            for (std::size_t s = lo; s < hi; ++s) {
                double e = std::exp(c->alpha(s, h) - mx);
                c->alpha(s, h) = e;
                z += e;
            }
            double* y = Y.row(i) + h * dh;
            for (std::size_t s = lo; s < hi; ++s) {
                double a = c->alpha(s, h) / z;
                c->alpha(s, h) = a;
                const double* zj = c->Z.row(batch.in_src[s]) + h * dh;
                for (std::size_t k = 0; k < dh; ++k) y[k] += a * zj[k];
            }
        }
    }
    if (attention_out) *attention_out = c->alpha;

    const GraphBatch* bp = &batch;
    return t.record(std::move(Y), [x, W, W_edge, attn, bp, heads, dh, c](Tape& t, Var out) {
        const GraphBatch& batch = *bp;
        const Matrix& G = t.grad(out);
        const Matrix& A = attn.value();
        const Matrix& We = W_edge.value();
        const std::size_t n = G.rows;
        const std::size_t dp = G.cols;
        Matrix dZ(n, dp);
        Matrix dsdst(n, heads), dssrc(n, heads);
        std::vector<double> dcedge(heads, 0.0);
        std::vector<double> dalpha;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = batch.in_ptr[i], hi = batch.in_ptr[i + 1];
            dalpha.resize(hi - lo);
            for (std::size_t h = 0; h < heads; ++h) {
                const double* gi = G.row(i) + h * dh;
                double dot = 0.0;
                for (std::size_t s = lo; s < hi; ++s) {
                    const std::size_t j = batch.in_src[s];
                    const double* zj = c->Z.row(j) + h * dh;
                    double* dzj = dZ.row(j) + h * dh;
                    const double a = c->alpha(s, h);
                    double da = 0.0;
                    for (std::size_t k = 0; k < dh; ++k) {
                        da += gi[k] * zj[k];
                        dzj[k] += a * gi[k];
                    }
                    dalpha[s - lo] = da;
                    dot += a * da;
                }
                for (std::size_t s = lo; s < hi; ++s) {
                    const double a = c->alpha(s, h);
                    double de = a * (dalpha[s - lo] - dot);
                    double dp_ = c->slope(s, h) * de;
                    dsdst(i, h) += dp_;
                    dssrc(batch.in_src[s], h) += dp_;
                    dcedge[h] += dp_ * batch.in_attr[s];
                }
            }
        }
        Matrix* gA = t.needs_grad(attn) ? &t.grad(attn) : nullptr;
        Matrix* gWe = t.needs_grad(W_edge) ? &t.grad(W_edge) : nullptr;
        for (std::size_t h = 0; h < heads; ++h) {
            const double* a = A.row(h);
            for (std::size_t i = 0; i < n; ++i) {
                const double* z = c->Z.row(i) + h * dh;
                double* dz = dZ.row(i) + h * dh;
                const double gd = dsdst(i, h), gs = dssrc(i, h);
                for (std::size_t k = 0; k < dh; ++k) {
                    dz[k] += gd * a[k] + gs * a[dh + k];
                    if (gA) {
                        gA->row(h)[k] += gd * z[k];
                        gA->row(h)[dh + k] += gs * z[k];
                    }
                }
            }
            for (std::size_t k = 0; k < dh; ++k) {
                if (gA) gA->row(h)[2 * dh + k] += dcedge[h] * We.data[h * dh + k];
                if (gWe) gWe->data[h * dh + k] += dcedge[h] * a[2 * dh + k];
            }
        }
        if (t.needs_grad(x)) view(t.grad(x)).noalias() += view(dZ) * view(W.value());
        if (t.needs_grad(W)) view(t.grad(W)).noalias() += view(dZ).transpose() * view(x.value());
    });
}

// ---------------------------------------------------------------- elementwise

double gelu_value(double x) {
    return 0.5 * x * (1.0 + std::tanh(kSqrt2OverPi * (x + kGeluCubic * x * x * x)));
}

double gelu_exact(double x) { return 0.5 * x * std::erfc(-x / std::sqrt(2.0)); }

Var gelu(Var x, bool exact) {
    Tape& t = *x.tape;
    const Matrix& X = x.value();
    Matrix Y(X.rows, X.cols);
    for (std::size_t i = 0; i < X.size(); ++i) Y.data[i] = exact ? gelu_exact(X.data[i]) : gelu_value(X.data[i]);
    return t.record(std::move(Y), [x, exact](Tape& t, Var out) {
        if (!t.needs_grad(x)) return;
        const Matrix& G = t.grad(out);
        const Matrix& X = x.value();
        Matrix& gx = t.grad(x);
        for (std::size_t i = 0; i < X.size(); ++i) {
            const double v = X.data[i];
            double d;
            if (exact) {
                d = 0.5 * std::erfc(-v / std::sqrt(2.0)) + v * std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
            } else {
                const double th = std::tanh(kSqrt2OverPi * (v + kGeluCubic * v * v * v));
                const double dth = (1.0 - th * th) * kSqrt2OverPi * (1.0 + 3.0 * kGeluCubic * v * v);
                d = 0.5 * (1.0 + th) + 0.5 * v * dth;
            }
            gx.data[i] += G.data[i] * d;
        }
    });
}

Var dropout(Var x, double p, bool training, std::mt19937_64& rng) {
    require(p >= 0.0 && p < 1.0, "dropout: p must lie in [0,1)");
    if (!training || p == 0.0) return x;
    Tape& t = *x.tape;
    const Matrix& X = x.value();
    auto mask = std::make_shared<std::vector<double>>(X.size());
    std::bernoulli_distribution drop(p);
    const double scale = 1.0 / (1.0 - p);
    Matrix Y(X.rows, X.cols);
    for (std::size_t i = 0; i < X.size(); ++i) {
        (*mask)[i] = drop(rng) ? 0.0 : scale;
        Y.data[i] = X.data[i] * (*mask)[i];
    }
    return t.record(std::move(Y), [x, mask](Tape& t, Var out) {
        if (!t.needs_grad(x)) return;
        const Matrix& G = t.grad(out);
        Matrix& gx = t.grad(x);
        for (std::size_t i = 0; i < G.size(); ++i) gx.data[i] += G.data[i] * (*mask)[i];
    });
}

// ---------------------------------------------------------------- pooling / reshaping

Var mean_pool(Var x, const std::vector<std::size_t>& offsets) {
    Tape& t = *x.tape;
    const Matrix& X = x.value();
    require(!offsets.empty() && offsets.back() == X.rows, "mean_pool: offsets do not cover the input");
    const std::size_t B = offsets.size() - 1;
    Matrix Y(B, X.cols);
    for (std::size_t g = 0; g < B; ++g) {
        const std::size_t lo = offsets[g], hi = offsets[g + 1];
        require(hi > lo, "mean_pool: empty graph");
        double* y = Y.row(g);
        for (std::size_t i = lo; i < hi; ++i) {
            const double* r = X.row(i);
            for (std::size_t k = 0; k < X.cols; ++k) y[k] += r[k];
        }
        const double inv = 1.0 / static_cast<double>(hi - lo);
        for (std::size_t k = 0; k < X.cols; ++k) y[k] *= inv;
    }
    return t.record(std::move(Y), [x, offsets](Tape& t, Var out) {
        if (!t.needs_grad(x)) return;
        const Matrix& G = t.grad(out);
        Matrix& gx = t.grad(x);
        for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
            const std::size_t lo = offsets[g], hi = offsets[g + 1];
            const double inv = 1.0 / static_cast<double>(hi - lo);
            for (std::size_t i = lo; i < hi; ++i)
                for (std::size_t k = 0; k < G.cols; ++k) gx(i, k) += G(g, k) * inv;
        }
    });
}

Var broadcast_to_nodes(Var g, const std::vector<std::uint32_t>& graph_id) {
    Tape& t = *g.tape;
    const Matrix& Gv = g.value();
    Matrix Y(graph_id.size(), Gv.cols);
    for (std::size_t i = 0; i < graph_id.size(); ++i) {
        require(graph_id[i] < Gv.rows, "broadcast_to_nodes: graph id out of range");
        std::copy_n(Gv.row(graph_id[i]), Gv.cols, Y.row(i));
    }
    return t.record(std::move(Y), [g, graph_id](Tape& t, Var out) {
        if (!t.needs_grad(g)) return;
        const Matrix& G = t.grad(out);
        Matrix& gg = t.grad(g);
        for (std::size_t i = 0; i < graph_id.size(); ++i)
            for (std::size_t k = 0; k < G.cols; ++k) gg(graph_id[i], k) += G(i, k);
    });
}

Var concat_cols(Var a, Var b) {
    Tape& t = *a.tape;
    const Matrix& A = a.value();
    const Matrix& Bm = b.value();
    require(A.rows == Bm.rows, "concat_cols: row count mismatch");
    Matrix Y(A.rows, A.cols + Bm.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        std::copy_n(A.row(i), A.cols, Y.row(i));
        std::copy_n(Bm.row(i), Bm.cols, Y.row(i) + A.cols);
    }
    return t.record(std::move(Y), [a, b](Tape& t, Var out) {
        const Matrix& G = t.grad(out);
        const std::size_t ca = a.value().cols;
        if (t.needs_grad(a)) {
            Matrix& ga = t.grad(a);
            for (std::size_t i = 0; i < G.rows; ++i)
                for (std::size_t k = 0; k < ca; ++k) ga(i, k) += G(i, k);
        }
        if (t.needs_grad(b)) {
            Matrix& gb = t.grad(b);
            for (std::size_t i = 0; i < G.rows; ++i)
                for (std::size_t k = 0; k < gb.cols; ++k) gb(i, k) += G(i, ca + k);
        }
    });
}

Var select_cols(Var x, const std::vector<std::size_t>& cols) {
    Tape& t = *x.tape;
    const Matrix& X = x.value();
    for (std::size_t c : cols) require(c < X.cols, "select_cols: column out of range");
    Matrix Y(X.rows, cols.size());
    for (std::size_t i = 0; i < X.rows; ++i)
        for (std::size_t k = 0; k < cols.size(); ++k) Y(i, k) = X(i, cols[k]);
    return t.record(std::move(Y), [x, cols](Tape& t, Var out) {
        if (!t.needs_grad(x)) return;
        const Matrix& G = t.grad(out);
        Matrix& gx = t.grad(x);
        for (std::size_t i = 0; i < G.rows; ++i)
            for (std::size_t k = 0; k < cols.size(); ++k) gx(i, cols[k]) += G(i, k);
    });
}

// ---------------------------------------------------------------- loss

Var cross_entropy(Var logits, const std::vector<int>& labels) {
    Tape& t = *logits.tape;
    const Matrix& L = logits.value();
    require(L.rows == labels.size() && L.rows > 0, "cross_entropy: label count mismatch");
    auto probs = std::make_shared<Matrix>(L.rows, L.cols);
    double total = 0.0;
    for (std::size_t i = 0; i < L.rows; ++i) {
        require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < L.cols, "cross_entropy: label out of range");
        const double* r = L.row(i);
        double mx = *std::max_element(r, r + L.cols);
        double z = 0.0;
        for (std::size_t k = 0; k < L.cols; ++k) z += std::exp(r[k] - mx);
        const double lse = mx + std::log(z);
        total += lse - r[labels[i]];
        for (std::size_t k = 0; k < L.cols; ++k) (*probs)(i, k) = std::exp(r[k] - lse);
    }
    Matrix Y(1, 1, total / static_cast<double>(L.rows));
    return t.record(std::move(Y), [logits, labels, probs](Tape& t, Var out) {
        if (!t.needs_grad(logits)) return;
        const double g = t.grad(out).data[0] / static_cast<double>(labels.size());
        Matrix& gl = t.grad(logits);
        for (std::size_t i = 0; i < gl.rows; ++i)
            for (std::size_t k = 0; k < gl.cols; ++k)
                gl(i, k) += g * ((*probs)(i, k) - (static_cast<int>(k) == labels[i] ? 1.0 : 0.0));
    });
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix P(logits.rows, logits.cols);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        const double* r = logits.row(i);
        double mx = *std::max_element(r, r + logits.cols);
        double z = 0.0;
        for (std::size_t k = 0; k < logits.cols; ++k) z += (P(i, k) = std::exp(r[k] - mx));
        for (std::size_t k = 0; k < logits.cols; ++k) P(i, k) /= z;
    }
    return P;
}

}  // namespace tumorgnn::nn
