#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <span>
#include <vector>

#include "ddopt/common.hpp"
#include "ddopt/graph.hpp"

// Action-value approximator over (graph, inserted-set, candidate-vertex):
// an iterative neighborhood-aggregation embedding with a two-head readout.
// The recursion, with per-vertex tag x_v = [v inserted] and scaled edge
// weight hw = w * weight_scale:
//
//   mu_v^0     = 0
//   mu_v^(t+1) = relu( tag_weight * x_v
//                    + neighbor_mix * sum_{u in N(v)} mu_u^t
//                    + edge_mix * sum_{u in N(v)} relu(edge_lift * hw(v,u)) )
//
//   Q(s, v) = readout . relu( [ pooled_head * sum_u mu_u^T ;
//                               candidate_head * mu_v^T ] )
//
// Gradients of the TD squared loss are exact reverse-mode, with the target
// treated as a constant (semi-gradient; no backprop through the max).

namespace ddopt {

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> a;
    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}
    double* row(int r) { return a.data() + std::size_t(r) * cols; }
    const double* row(int r) const { return a.data() + std::size_t(r) * cols; }
};

struct QParams {
    int p = 64;      // embedding dimension
    int depth = 4;   // recursion depth T
    std::vector<double> tag_weight;   // p
    Matrix neighbor_mix;              // p x p
    Matrix edge_mix;                  // p x p
    std::vector<double> edge_lift;    // p
    std::vector<double> readout;      // 2p
    Matrix pooled_head;               // p x p
    Matrix candidate_head;            // p x p

    QParams() = default;
    QParams(int p_, int depth_) : p(p_), depth(depth_) {
        tag_weight.assign(p, 0.0);
        neighbor_mix = Matrix(p, p);
        edge_mix = Matrix(p, p);
        edge_lift.assign(p, 0.0);
        readout.assign(2 * std::size_t(p), 0.0);
        pooled_head = Matrix(p, p);
        candidate_head = Matrix(p, p);
    }

    // Fixed tensor order used by the optimizer and the model file.
    std::array<std::span<double>, 7> tensors() {
        return {std::span(tag_weight), std::span(neighbor_mix.a), std::span(edge_mix.a),
                std::span(edge_lift),  std::span(readout),       std::span(pooled_head.a),
                std::span(candidate_head.a)};
    }
    std::array<std::span<const double>, 7> tensors() const {
        return {std::span(tag_weight), std::span(neighbor_mix.a), std::span(edge_mix.a),
                std::span(edge_lift),  std::span(readout),       std::span(pooled_head.a),
                std::span(candidate_head.a)};
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto t : tensors()) c += t.size();
        return c;
    }
};

// Seeded init, uniform in [-0.01, 0.01].
inline QParams init_qparams(int p, int depth, std::uint64_t seed) {
    QParams q(p, depth);
    Rng rng(seed);
    for (auto t : q.tensors())
        for (double& x : t) x = rng.unit() * 0.02 - 0.01;
    return q;
}

namespace detail {

inline double dot(const double* a, const double* b, int n) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}
inline void axpy(double* y, double c, const double* x, int n) {
    for (int i = 0; i < n; ++i) y[i] += c * x[i];
}
// y += M x
inline void matvec_add(const Matrix& m, const double* x, double* y) {
    for (int r = 0; r < m.rows; ++r) y[r] += dot(m.row(r), x, m.cols);
}
// y += M^T x
inline void matvec_t_add(const Matrix& m, const double* x, double* y) {
    for (int r = 0; r < m.rows; ++r) axpy(y, x[r], m.row(r), m.cols);
}
// G += u v^T
inline void outer_add(Matrix& g, const double* u, const double* v) {
    for (int r = 0; r < g.rows; ++r) axpy(g.row(r), u[r], v, g.cols);
}

}  // namespace detail

// Forward-pass intermediates kept for backprop.
struct EmbedCache {
    int n = 0, p = 0, depth = 0;
    const Graph* g = nullptr;
    Bitset inserted;
    double weight_scale = 1.0;
    std::vector<double> mu;      // (depth+1) * n * p
    std::vector<double> pre;     // depth * n * p, pre-activations
    std::vector<double> ew;      // n * p, summed lifted edge weights per vertex
    std::vector<double> pooled;  // p
    std::vector<double> zp;      // p, pooled_head * pooled (shared by all candidates)

    double* mu_at(int t, int v) { return mu.data() + (std::size_t(t) * n + v) * p; }
    const double* mu_at(int t, int v) const { return mu.data() + (std::size_t(t) * n + v) * p; }
    double* pre_at(int t, int v) { return pre.data() + (std::size_t(t) * n + v) * p; }
    const double* pre_at(int t, int v) const { return pre.data() + (std::size_t(t) * n + v) * p; }
    double* ew_at(int v) { return ew.data() + std::size_t(v) * p; }
    const double* ew_at(int v) const { return ew.data() + std::size_t(v) * p; }
};

inline void embed_forward(const QParams& q, const Graph& g, const Bitset& inserted,
                          double weight_scale, EmbedCache& c) {
    const int n = g.n(), p = q.p, T = q.depth;
    c.n = n;
    c.p = p;
    c.depth = T;
    c.g = &g;
    c.inserted = inserted;
    c.weight_scale = weight_scale;
    c.mu.assign(std::size_t(T + 1) * n * p, 0.0);
    c.pre.assign(std::size_t(T) * n * p, 0.0);
    c.ew.assign(std::size_t(n) * p, 0.0);
    c.pooled.assign(p, 0.0);
    c.zp.assign(p, 0.0);

    std::vector<double> lifted(p);
    for (const auto& e : g.edges()) {
        const double hw = e.w * weight_scale;
        for (int i = 0; i < p; ++i) lifted[i] = std::max(0.0, q.edge_lift[i] * hw);
        detail::axpy(c.ew_at(e.u), 1.0, lifted.data(), p);
        detail::axpy(c.ew_at(e.v), 1.0, lifted.data(), p);
    }

    // tag and edge terms do not change across iterations
    std::vector<double> base(std::size_t(n) * p, 0.0);
    for (int v = 0; v < n; ++v) {
        double* bv = base.data() + std::size_t(v) * p;
        if (inserted.test(v)) detail::axpy(bv, 1.0, q.tag_weight.data(), p);
        detail::matvec_add(q.edge_mix, c.ew_at(v), bv);
    }

    std::vector<double> nsum(std::size_t(n) * p);
    for (int t = 0; t < T; ++t) {
        std::fill(nsum.begin(), nsum.end(), 0.0);
        for (const auto& e : g.edges()) {
            detail::axpy(nsum.data() + std::size_t(e.u) * p, 1.0, c.mu_at(t, e.v), p);
            detail::axpy(nsum.data() + std::size_t(e.v) * p, 1.0, c.mu_at(t, e.u), p);
        }
        for (int v = 0; v < n; ++v) {
            double* pv = c.pre_at(t, v);
            std::memcpy(pv, base.data() + std::size_t(v) * p, sizeof(double) * p);
            detail::matvec_add(q.neighbor_mix, nsum.data() + std::size_t(v) * p, pv);
            double* mv = c.mu_at(t + 1, v);
            for (int i = 0; i < p; ++i) mv[i] = pv[i] > 0 ? pv[i] : 0.0;
        }
    }

    for (int v = 0; v < n; ++v) detail::axpy(c.pooled.data(), 1.0, c.mu_at(T, v), p);
    detail::matvec_add(q.pooled_head, c.pooled.data(), c.zp.data());
}

// Q value of one candidate from a prepared cache.
inline double qvalue_from_cache(const QParams& q, const EmbedCache& c, int v) {
    const int p = q.p;
    std::vector<double> zc(p, 0.0);
    detail::matvec_add(q.candidate_head, c.mu_at(c.depth, v), zc.data());
    double out = 0;
    for (int i = 0; i < p; ++i)
        if (c.zp[i] > 0) out += q.readout[i] * c.zp[i];
    for (int i = 0; i < p; ++i)
        if (zc[i] > 0) out += q.readout[p + i] * zc[i];
    return out;
}

// Per-vertex embeddings mu^T as an n x p matrix.
inline Matrix embed(const QParams& q, const Graph& g, const Bitset& inserted,
                    double weight_scale = 1.0) {
    EmbedCache c;
    embed_forward(q, g, inserted, weight_scale, c);
    Matrix out(g.n(), q.p);
    std::memcpy(out.a.data(), c.mu_at(q.depth, 0), sizeof(double) * out.a.size());
    return out;
}

// Q values for every candidate (vertex not yet inserted), sorted by vertex.
inline std::vector<std::pair<int, double>> qvalues(const QParams& q, const Graph& g,
                                                   const Bitset& inserted,
                                                   double weight_scale = 1.0) {
    EmbedCache c;
    embed_forward(q, g, inserted, weight_scale, c);
    std::vector<std::pair<int, double>> out;
    out.reserve(g.n() - inserted.count());
    for (int v = 0; v < g.n(); ++v)
        if (!inserted.test(v)) out.emplace_back(v, qvalue_from_cache(q, c, v));
    return out;
}

// Greedy action: argmax Q over candidates, lowest id on ties.
inline int greedy_action(const QParams& q, const Graph& g, const Bitset& inserted,
                         double weight_scale = 1.0) {
    auto qs = qvalues(q, g, inserted, weight_scale);
    if (qs.empty()) throw ConfigError("greedy_action: no candidates left");
    int best = qs[0].first;
    double best_q = qs[0].second;
    for (const auto& [v, val] : qs)
        if (val > best_q) {
            best = v;
            best_q = val;
        }
    return best;
}

// ---------------------------------------------------------------
// TD loss and gradient
// ---------------------------------------------------------------

// One replayed transition, fully reconstructible: the successor state's
// inserted set is `inserted` plus `action`.
struct TdSample {
    const Graph* g = nullptr;
    Bitset inserted;  // before the action
    int action = -1;
    double reward = 0.0;
    bool terminal = false;
    double weight_scale = 1.0;
};

namespace detail {

// Backprop coeff * dQ(s, action)/dparams into grad, reusing the cache.
inline void qvalue_backward(const QParams& q, const EmbedCache& c, int action, double coeff,
                            QParams& grad) {
    const int n = c.n, p = q.p, T = q.depth;
    const Graph& g = *c.g;

    std::vector<double> zc(p, 0.0);
    matvec_add(q.candidate_head, c.mu_at(T, action), zc.data());

    std::vector<double> dzp(p), dzc(p);
    for (int i = 0; i < p; ++i) {
        grad.readout[i] += coeff * (c.zp[i] > 0 ? c.zp[i] : 0.0);
        grad.readout[p + i] += coeff * (zc[i] > 0 ? zc[i] : 0.0);
        dzp[i] = c.zp[i] > 0 ? coeff * q.readout[i] : 0.0;
        dzc[i] = zc[i] > 0 ? coeff * q.readout[p + i] : 0.0;
    }

    std::vector<double> dmu(std::size_t(T + 1) * n * p, 0.0);
    auto dmu_at = [&](int t, int v) { return dmu.data() + (std::size_t(t) * n + v) * p; };

    outer_add(grad.pooled_head, dzp.data(), c.pooled.data());
    std::vector<double> dpooled(p, 0.0);
    matvec_t_add(q.pooled_head, dzp.data(), dpooled.data());

    outer_add(grad.candidate_head, dzc.data(), c.mu_at(T, action));
    matvec_t_add(q.candidate_head, dzc.data(), dmu_at(T, action));

    for (int v = 0; v < n; ++v) axpy(dmu_at(T, v), 1.0, dpooled.data(), p);

    std::vector<double> nsum(std::size_t(n) * p);
    std::vector<double> dpre(std::size_t(n) * p);
    std::vector<double> dew(std::size_t(n) * p, 0.0);
    std::vector<double> ds(p);

    for (int t = T - 1; t >= 0; --t) {
        std::fill(nsum.begin(), nsum.end(), 0.0);
        for (const auto& e : g.edges()) {
            axpy(nsum.data() + std::size_t(e.u) * p, 1.0, c.mu_at(t, e.v), p);
            axpy(nsum.data() + std::size_t(e.v) * p, 1.0, c.mu_at(t, e.u), p);
        }
        for (int v = 0; v < n; ++v) {
            const double* pv = c.pre_at(t, v);
            const double* up = dmu_at(t + 1, v);
            double* dp = dpre.data() + std::size_t(v) * p;
            for (int i = 0; i < p; ++i) dp[i] = pv[i] > 0 ? up[i] : 0.0;

            if (c.inserted.test(v)) axpy(grad.tag_weight.data(), 1.0, dp, p);
            outer_add(grad.neighbor_mix, dp, nsum.data() + std::size_t(v) * p);
            outer_add(grad.edge_mix, dp, c.ew_at(v));
            matvec_t_add(q.edge_mix, dp, dew.data() + std::size_t(v) * p);
        }
        if (t > 0) {
            for (int v = 0; v < n; ++v) {
                std::fill(ds.begin(), ds.end(), 0.0);
                matvec_t_add(q.neighbor_mix, dpre.data() + std::size_t(v) * p, ds.data());
                for (auto [u, w] : g.adjacent(v)) axpy(dmu_at(t, u), 1.0, ds.data(), p);
            }
        }
    }

    for (const auto& e : g.edges()) {
        const double hw = e.w * c.weight_scale;
        const double* du = dew.data() + std::size_t(e.u) * p;
        const double* dv = dew.data() + std::size_t(e.v) * p;
        for (int i = 0; i < p; ++i) {
            if (q.edge_lift[i] * hw > 0) grad.edge_lift[i] += (du[i] + dv[i]) * hw;
        }
    }
}

}  // namespace detail

// TD targets y_j = r_j (+ gamma * max_a' Q(s_{j+1}, a') when not terminal),
// evaluated under the given parameters.
inline std::vector<double> td_targets(const QParams& q, std::span<const TdSample> batch,
                                      double gamma) {
    std::vector<double> out;
    out.reserve(batch.size());
    EmbedCache c;
    for (const auto& s : batch) {
        double y = s.reward;
        if (!s.terminal) {
            Bitset next = s.inserted;
            next.set(s.action);
            embed_forward(q, *s.g, next, s.weight_scale, c);
            double best = -std::numeric_limits<double>::infinity();
            for (int v = 0; v < s.g->n(); ++v)
                if (!next.test(v)) best = std::max(best, qvalue_from_cache(q, c, v));
            y += gamma * best;
        }
        out.push_back(y);
    }
    return out;
}

// Mean squared TD error against fixed targets (no 1/2 factor).
inline double td_loss_with_targets(const QParams& q, std::span<const TdSample> batch,
                                   std::span<const double> targets) {
    double loss = 0;
    EmbedCache c;
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const auto& s = batch[j];
        embed_forward(q, *s.g, s.inserted, s.weight_scale, c);
        const double diff = targets[j] - qvalue_from_cache(q, c, s.action);
        loss += diff * diff;
    }
    return loss / double(batch.size());
}

// Returns the mean squared TD loss and fills `grad` with the gradient of
// (1/(2N)) * sum_j (y_j - Q(s_j, a_j))^2, targets held constant.
inline double td_loss_grad(const QParams& q, std::span<const TdSample> batch, double gamma,
                           QParams& grad) {
    if (batch.empty()) throw ConfigError("td_loss_grad: empty batch");
    grad = QParams(q.p, q.depth);
    const auto targets = td_targets(q, batch, gamma);
    const double inv_n = 1.0 / double(batch.size());
    double loss = 0;
    EmbedCache c;
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const auto& s = batch[j];
        embed_forward(q, *s.g, s.inserted, s.weight_scale, c);
        const double qv = qvalue_from_cache(q, c, s.action);
        const double diff = targets[j] - qv;
        loss += diff * diff;
        detail::qvalue_backward(q, c, s.action, (qv - targets[j]) * inv_n, grad);
    }
    return loss * inv_n;
}

// ---------------------------------------------------------------
// Adaptive-moment optimizer
// ---------------------------------------------------------------

struct AdamState {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long step = 0;
    std::vector<double> m, v;

    AdamState() = default;
    AdamState(std::size_t count, double alpha_) : alpha(alpha_), m(count, 0.0), v(count, 0.0) {}
};

inline void adam_step(QParams& params, AdamState& st, const QParams& grad) {
    st.step += 1;
    const double c1 = 1.0 - std::pow(st.beta1, double(st.step));
    const double c2 = 1.0 - std::pow(st.beta2, double(st.step));
    std::size_t off = 0;
    auto pt = params.tensors();
    auto gt = grad.tensors();
    for (std::size_t k = 0; k < pt.size(); ++k) {
        double* p = pt[k].data();
        const double* g = gt[k].data();
        const std::size_t sz = pt[k].size();
        for (std::size_t i = 0; i < sz; ++i) {
            double& m = st.m[off + i];
            double& v = st.v[off + i];
            m = st.beta1 * m + (1.0 - st.beta1) * g[i];
            v = st.beta2 * v + (1.0 - st.beta2) * g[i] * g[i];
            p[i] -= st.alpha * (m / c1) / (std::sqrt(v / c2) + st.eps);
        }
        off += sz;
    }
}

}  // namespace ddopt
