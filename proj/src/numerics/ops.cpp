// SPDX-License-Identifier: Apache-2.0

#include "lamm/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

#include "lamm/errors.hpp"

namespace lamm::num {

namespace {

Tape& tape_of(Var a) {
    if (!a.tape) throw UsageError("operation on an empty Var");
    return *a.tape;
}

Tape& tape_of(Var a, Var b) {
    if (a.tape != b.tape || !a.tape) throw UsageError("operands recorded on different tapes");
    return *a.tape;
}

void require_rank2(const Tensor& t, const char* op) {
    if (t.rank() != 2) throw UsageError(std::string(op) + ": expected a rank-2 tensor, got " + shape_str(t.shape()));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw UsageError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
}

}  // namespace

Var add(Var a, Var b) {
    auto& tape = tape_of(a, b);
    const auto& x = a.value();
    const auto& y = b.value();
    require_same_shape(x, y, "add");
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
    return tape.record(std::move(out), tape.needs_grad(a) || tape.needs_grad(b),
                       [a, b](Tape& t, Var, std::span<const double> g) {
                           t.accumulate(a, g);
                           t.accumulate(b, g);
                       });
}

Var sub(Var a, Var b) {
    auto& tape = tape_of(a, b);
    const auto& x = a.value();
    const auto& y = b.value();
    require_same_shape(x, y, "sub");
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
    return tape.record(std::move(out), tape.needs_grad(a) || tape.needs_grad(b),
                       [a, b](Tape& t, Var, std::span<const double> g) {
                           t.accumulate(a, g);
                           if (!t.needs_grad(b)) return;
                           std::vector<double> neg(g.begin(), g.end());
                           for (auto& v : neg) v = -v;
                           t.accumulate(b, neg);
                       });
}

Var mul(Var a, Var b) {
    auto& tape = tape_of(a, b);
    const auto& x = a.value();
    const auto& y = b.value();
    require_same_shape(x, y, "mul");
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
    return tape.record(std::move(out), tape.needs_grad(a) || tape.needs_grad(b),
                       [a, b](Tape& t, Var, std::span<const double> g) {
                           const auto& x = t.value(a);
                           const auto& y = t.value(b);
                           std::vector<double> buf(g.size());
                           if (t.needs_grad(a)) {
                               for (std::size_t i = 0; i < g.size(); ++i) buf[i] = g[i] * y[i];
                               t.accumulate(a, buf);
                           }
                           if (t.needs_grad(b)) {
                               for (std::size_t i = 0; i < g.size(); ++i) buf[i] = g[i] * x[i];
                               t.accumulate(b, buf);
                           }
                       });
}

Var add_row(Var a, Var b) {
    auto& tape = tape_of(a, b);
    const auto& x = a.value();
    const auto& y = b.value();
    require_rank2(x, "add_row");
    const auto m = x.rows();
    const auto n = x.cols();
    if (y.size() != n) throw UsageError("add_row: bias of " + shape_str(y.shape()) + " for " + shape_str(x.shape()));
    Tensor out(x.shape());
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) out[r * n + c] = x[r * n + c] + y[c];
    return tape.record(std::move(out), tape.needs_grad(a) || tape.needs_grad(b),
                       [a, b, m, n](Tape& t, Var, std::span<const double> g) {
                           t.accumulate(a, g);
                           if (!t.needs_grad(b)) return;
                           std::vector<double> gb(n, 0.0);
                           for (std::size_t r = 0; r < m; ++r)
                               for (std::size_t c = 0; c < n; ++c) gb[c] += g[r * n + c];
                           t.accumulate(b, gb);
                       });
}

Var scale(Var a, double s) {
    auto& tape = tape_of(a);
    const auto& x = a.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * s;
    return tape.record(std::move(out), tape.needs_grad(a), [a, s](Tape& t, Var, std::span<const double> g) {
        std::vector<double> buf(g.begin(), g.end());
        for (auto& v : buf) v *= s;
        t.accumulate(a, buf);
    });
}

Var add_scalar(Var a, double s) {
    auto& tape = tape_of(a);
    const auto& x = a.value();
    Tensor out(x.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + s;
    return tape.record(std::move(out), tape.needs_grad(a),
                       [a](Tape& t, Var, std::span<const double> g) { t.accumulate(a, g); });
}

Var matmul(Var a, Var b) {
    auto& tape = tape_of(a, b);
    const auto& x = a.value();
    const auto& y = b.value();
    require_rank2(x, "matmul");
    require_rank2(y, "matmul");
    const auto m = x.rows();
    const auto k = x.cols();
    const auto n = y.cols();
    if (y.rows() != k) throw UsageError("matmul: " + shape_str(x.shape()) + " x " + shape_str(y.shape()));
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double xv = x[i * k + p];
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += xv * y[p * n + j];
        }
    return tape.record(std::move(out), tape.needs_grad(a) || tape.needs_grad(b),
                       [a, b, m, k, n](Tape& t, Var, std::span<const double> g) {
                           const auto& x = t.value(a);
                           const auto& y = t.value(b);
                           if (t.needs_grad(a)) {
                               std::vector<double> ga(m * k, 0.0);
                               for (std::size_t i = 0; i < m; ++i)
                                   for (std::size_t p = 0; p < k; ++p) {
                                       double s = 0.0;
                                       for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * y[p * n + j];
                                       ga[i * k + p] = s;
                                   }
                               t.accumulate(a, ga);
                           }
                           if (t.needs_grad(b)) {
                               std::vector<double> gb(k * n, 0.0);
                               for (std::size_t i = 0; i < m; ++i)
                                   for (std::size_t p = 0; p < k; ++p) {
                                       const double xv = x[i * k + p];
                                       for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += xv * g[i * n + j];
                                   }
                               t.accumulate(b, gb);
                           }
                       });
}

Var transpose(Var a) {
    auto& tape = tape_of(a);
    const auto& x = a.value();
    require_rank2(x, "transpose");
    const auto m = x.rows();
    const auto n = x.cols();
    Tensor out({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = x[i * n + j];
    return tape.record(std::move(out), tape.needs_grad(a), [a, m, n](Tape& t, Var, std::span<const double> g) {
        std::vector<double> ga(m * n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) ga[i * n + j] = g[j * m + i];
        t.accumulate(a, ga);
    });
}

Var layer_norm(Var x, Var gain, Var bias, double eps) {
    auto& tape = tape_of(x, gain);
    tape_of(x, bias);
    const auto& in = x.value();
    require_rank2(in, "layer_norm");
    const auto m = in.rows();
    const auto n = in.cols();
    if (gain.value().size() != n || bias.value().size() != n) throw UsageError("layer_norm: affine size mismatch");
    const auto& gv = gain.value();
    const auto& bv = bias.value();

    Tensor out({m, n});
    // xhat and 1/sigma per row are needed by the backward pass.
    auto xhat = std::make_shared<std::vector<double>>(m * n);
    auto inv_std = std::make_shared<std::vector<double>>(m);
    for (std::size_t r = 0; r < m; ++r) {
        double mu = 0.0;
        for (std::size_t c = 0; c < n; ++c) mu += in[r * n + c];
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double d = in[r * n + c] - mu;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double is = 1.0 / std::sqrt(var + eps);
        (*inv_std)[r] = is;
        for (std::size_t c = 0; c < n; ++c) {
            const double h = (in[r * n + c] - mu) * is;
            (*xhat)[r * n + c] = h;
            out[r * n + c] = gv[c] * h + bv[c];
        }
    }
    const bool ng = tape.needs_grad(x) || tape.needs_grad(gain) || tape.needs_grad(bias);
    return tape.record(std::move(out), ng, [x, gain, bias, m, n, xhat, inv_std](Tape& t, Var, std::span<const double> g) {
        const auto& gv = t.value(gain);
        if (t.needs_grad(x)) {
            std::vector<double> gx(m * n);
            std::vector<double> dh(n);
            for (std::size_t r = 0; r < m; ++r) {
                double mean_dh = 0.0;
                double mean_dh_h = 0.0;
                for (std::size_t c = 0; c < n; ++c) {
                    dh[c] = g[r * n + c] * gv[c];
                    mean_dh += dh[c];
                    mean_dh_h += dh[c] * (*xhat)[r * n + c];
                }
                mean_dh /= static_cast<double>(n);
                mean_dh_h /= static_cast<double>(n);
                for (std::size_t c = 0; c < n; ++c)
                    gx[r * n + c] = (*inv_std)[r] * (dh[c] - mean_dh - (*xhat)[r * n + c] * mean_dh_h);
            }
            t.accumulate(x, gx);
        }
        if (t.needs_grad(gain) || t.needs_grad(bias)) {
            std::vector<double> gg(n, 0.0);
            std::vector<double> gb(n, 0.0);
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < n; ++c) {
                    gg[c] += g[r * n + c] * (*xhat)[r * n + c];
                    gb[c] += g[r * n + c];
                }
            t.accumulate(gain, gg);
            t.accumulate(bias, gb);
        }
    });
}

Var gelu(Var x) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    Tensor out(in.shape());
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double v = in[i];
        out[i] = 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2));
    }
    return tape.record(std::move(out), tape.needs_grad(x), [x](Tape& t, Var, std::span<const double> g) {
        const auto& in = t.value(x);
        const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        std::vector<double> gx(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double v = in[i];
            const double cdf = 0.5 * (1.0 + std::erf(v / std::numbers::sqrt2));
            const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
            gx[i] = g[i] * (cdf + v * pdf);
        }
        t.accumulate(x, gx);
    });
}

Var attention(Var q, Var k, Var v, std::size_t n_heads) {
    auto& tape = tape_of(q, k);
    tape_of(q, v);
    const auto& Q = q.value();
    const auto& K = k.value();
    const auto& V = v.value();
    require_rank2(Q, "attention");
    require_same_shape(Q, K, "attention");
    require_same_shape(Q, V, "attention");
    const auto T = Q.rows();
    const auto d = Q.cols();
    if (n_heads == 0 || d % n_heads != 0) throw UsageError("attention: width not divisible by head count");
    const auto dh = d / n_heads;
    const double s = 1.0 / std::sqrt(static_cast<double>(dh));

    // probs[h][i][j]
    auto probs = std::make_shared<std::vector<double>>(n_heads * T * T);
    Tensor out({T, d});
    for (std::size_t h = 0; h < n_heads; ++h) {
        const auto off = h * dh;
        for (std::size_t i = 0; i < T; ++i) {
            double* p = probs->data() + (h * T + i) * T;
            double mx = -INFINITY;
            for (std::size_t j = 0; j < T; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < dh; ++c) acc += Q[i * d + off + c] * K[j * d + off + c];
                p[j] = acc * s;
                mx = std::max(mx, p[j]);
            }
            double z = 0.0;
            for (std::size_t j = 0; j < T; ++j) {
                p[j] = std::exp(p[j] - mx);
                z += p[j];
            }
            for (std::size_t j = 0; j < T; ++j) p[j] /= z;
            for (std::size_t j = 0; j < T; ++j)
                for (std::size_t c = 0; c < dh; ++c) out[i * d + off + c] += p[j] * V[j * d + off + c];
        }
    }
    const bool ng = tape.needs_grad(q) || tape.needs_grad(k) || tape.needs_grad(v);
    return tape.record(std::move(out), ng, [q, k, v, T, d, dh, n_heads, s, probs](Tape& t, Var, std::span<const double> g) {
        const auto& Q = t.value(q);
        const auto& K = t.value(k);
        const auto& V = t.value(v);
        std::vector<double> gq(T * d, 0.0), gk(T * d, 0.0), gv(T * d, 0.0);
        std::vector<double> dp(T), ds(T);
        for (std::size_t h = 0; h < n_heads; ++h) {
            const auto off = h * dh;
            for (std::size_t i = 0; i < T; ++i) {
                const double* p = probs->data() + (h * T + i) * T;
                double dot_pdp = 0.0;
                for (std::size_t j = 0; j < T; ++j) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < dh; ++c) {
                        acc += g[i * d + off + c] * V[j * d + off + c];
                        gv[j * d + off + c] += p[j] * g[i * d + off + c];
                    }
                    dp[j] = acc;
                    dot_pdp += p[j] * acc;
                }
                for (std::size_t j = 0; j < T; ++j) ds[j] = p[j] * (dp[j] - dot_pdp) * s;
                for (std::size_t j = 0; j < T; ++j)
                    for (std::size_t c = 0; c < dh; ++c) {
                        gq[i * d + off + c] += ds[j] * K[j * d + off + c];
                        gk[j * d + off + c] += ds[j] * Q[i * d + off + c];
                    }
            }
        }
        t.accumulate(q, gq);
        t.accumulate(k, gk);
        t.accumulate(v, gv);
    });
}

Var l2_normalize_rows(Var x) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    const auto m = in.rows();
    const auto n = in.cols();
    auto norms = std::make_shared<std::vector<double>>(m);
    Tensor out(in.shape());
    for (std::size_t r = 0; r < m; ++r) {
        const double nr = l2_norm(in.row(r));
        if (nr == 0.0) throw DomainError("l2_normalize_rows: row " + std::to_string(r) + " has zero norm");
        (*norms)[r] = nr;
        for (std::size_t c = 0; c < n; ++c) out[r * n + c] = in[r * n + c] / nr;
    }
    return tape.record(std::move(out), tape.needs_grad(x), [x, m, n, norms](Tape& t, Var self, std::span<const double> g) {
        const auto& y = t.value(self);
        std::vector<double> gx(m * n);
        for (std::size_t r = 0; r < m; ++r) {
            double yg = 0.0;
            for (std::size_t c = 0; c < n; ++c) yg += y[r * n + c] * g[r * n + c];
            for (std::size_t c = 0; c < n; ++c) gx[r * n + c] = (g[r * n + c] - y[r * n + c] * yg) / (*norms)[r];
        }
        t.accumulate(x, gx);
    });
}

Var cosine_sim(Var a, Var b) {
    auto& tape = tape_of(a, b);
    const auto& x = a.value();
    const auto& y = b.value();
    if (x.size() != y.size() || x.size() == 0) throw UsageError("cosine_sim: operands must have equal, nonzero length");
    const double sx = dot(x.data(), x.data());
    const double sy = dot(y.data(), y.data());
    if (sx == 0.0) throw DomainError("cosine_sim: first operand has zero norm");
    if (sy == 0.0) throw DomainError("cosine_sim: second operand has zero norm");
    const double nx = std::sqrt(sx);
    const double ny = std::sqrt(sy);
    // Single rounding of the norm product, so cosine_sim(a, a) is exactly 1.
    const double c = dot(x.data(), y.data()) / std::sqrt(sx * sy);
    return tape.record(Tensor::scalar(c), tape.needs_grad(a) || tape.needs_grad(b),
                       [a, b, nx, ny, c](Tape& t, Var, std::span<const double> g) {
                           const auto& x = t.value(a);
                           const auto& y = t.value(b);
                           std::vector<double> buf(x.size());
                           if (t.needs_grad(a)) {
                               for (std::size_t i = 0; i < buf.size(); ++i)
                                   buf[i] = g[0] * (y[i] / (nx * ny) - c * x[i] / (nx * nx));
                               t.accumulate(a, buf);
                           }
                           if (t.needs_grad(b)) {
                               for (std::size_t i = 0; i < buf.size(); ++i)
                                   buf[i] = g[0] * (x[i] / (nx * ny) - c * y[i] / (ny * ny));
                               t.accumulate(b, buf);
                           }
                       });
}

std::vector<double> softmax(std::span<const double> logits, double tau) {
    if (!(tau > 0.0)) throw DomainError("softmax: temperature must be positive");
    if (logits.empty()) throw UsageError("softmax: empty logits");
    double mx = -INFINITY;
    for (double v : logits) mx = std::max(mx, v / tau);
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] / tau - mx);
        z += p[i];
    }
    for (auto& v : p) v /= z;
    return p;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double sa = dot(a, a);
    const double sb = dot(b, b);
    if (sa == 0.0) throw DomainError("cosine: first operand has zero norm");
    if (sb == 0.0) throw DomainError("cosine: second operand has zero norm");
    return dot(a, b) / std::sqrt(sa * sb);
}

Var softmax_rows(Var x, double tau) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    const auto m = in.rows();
    const auto n = in.cols();
    Tensor out(in.shape());
    for (std::size_t r = 0; r < m; ++r) {
        auto p = softmax(in.row(r), tau);
        std::copy(p.begin(), p.end(), out.row(r).begin());
    }
    return tape.record(std::move(out), tape.needs_grad(x), [x, m, n, tau](Tape& t, Var self, std::span<const double> g) {
        const auto& p = t.value(self);
        std::vector<double> gx(m * n);
        for (std::size_t r = 0; r < m; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += g[r * n + c] * p[r * n + c];
            for (std::size_t c = 0; c < n; ++c) gx[r * n + c] = p[r * n + c] * (g[r * n + c] - s) / tau;
        }
        t.accumulate(x, gx);
    });
}

Var log_softmax_rows(Var x, double tau) {
    if (!(tau > 0.0)) throw DomainError("log_softmax: temperature must be positive");
    auto& tape = tape_of(x);
    const auto& in = x.value();
    const auto m = in.rows();
    const auto n = in.cols();
    Tensor out(in.shape());
    for (std::size_t r = 0; r < m; ++r) {
        double mx = -INFINITY;
        for (std::size_t c = 0; c < n; ++c) mx = std::max(mx, in[r * n + c] / tau);
        double z = 0.0;
        for (std::size_t c = 0; c < n; ++c) z += std::exp(in[r * n + c] / tau - mx);
        const double lse = mx + std::log(z);
        for (std::size_t c = 0; c < n; ++c) out[r * n + c] = in[r * n + c] / tau - lse;
    }
    return tape.record(std::move(out), tape.needs_grad(x), [x, m, n, tau](Tape& t, Var self, std::span<const double> g) {
        const auto& l = t.value(self);
        std::vector<double> gx(m * n);
        for (std::size_t r = 0; r < m; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += g[r * n + c];
            for (std::size_t c = 0; c < n; ++c) gx[r * n + c] = (g[r * n + c] - std::exp(l[r * n + c]) * s) / tau;
        }
        t.accumulate(x, gx);
    });
}

Var log(Var x) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    Tensor out(in.shape());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (!(in[i] > 0.0)) throw DomainError("log: non-positive argument at index " + std::to_string(i));
        out[i] = std::log(in[i]);
    }
    return tape.record(std::move(out), tape.needs_grad(x), [x](Tape& t, Var, std::span<const double> g) {
        const auto& in = t.value(x);
        std::vector<double> gx(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] = g[i] / in[i];
        t.accumulate(x, gx);
    });
}

Var square(Var x) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    Tensor out(in.shape());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * in[i];
    return tape.record(std::move(out), tape.needs_grad(x), [x](Tape& t, Var, std::span<const double> g) {
        const auto& in = t.value(x);
        std::vector<double> gx(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] = 2.0 * in[i] * g[i];
        t.accumulate(x, gx);
    });
}

Var sum(Var x) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    double s = 0.0;
    for (double v : in.data()) s += v;
    const auto n = in.size();
    return tape.record(Tensor::scalar(s), tape.needs_grad(x), [x, n](Tape& t, Var, std::span<const double> g) {
        std::vector<double> gx(n, g[0]);
        t.accumulate(x, gx);
    });
}

Var mean(Var x) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    const auto n = in.size();
    if (n == 0) throw UsageError("mean of an empty tensor");
    double s = 0.0;
    for (double v : in.data()) s += v;
    return tape.record(Tensor::scalar(s / static_cast<double>(n)), tape.needs_grad(x),
                       [x, n](Tape& t, Var, std::span<const double> g) {
                           std::vector<double> gx(n, g[0] / static_cast<double>(n));
                           t.accumulate(x, gx);
                       });
}

Var row(Var x, std::size_t r) {
    return slice_rows(x, r, 1);
}

Var slice_rows(Var x, std::size_t begin, std::size_t count) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    const auto m = in.rows();
    const auto n = in.cols();
    if (begin + count > m || count == 0) {
        throw UsageError("slice_rows: [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") out of range for " + shape_str(in.shape()));
    }
    auto src = in.data().subspan(begin * n, count * n);
    Tensor out({count, n}, std::vector<double>(src.begin(), src.end()));
    return tape.record(std::move(out), tape.needs_grad(x), [x, begin, m, n](Tape& t, Var, std::span<const double> g) {
        std::vector<double> gx(m * n, 0.0);
        std::copy(g.begin(), g.end(), gx.begin() + static_cast<std::ptrdiff_t>(begin * n));
        t.accumulate(x, gx);
    });
}

Var stack_rows(std::span<const Var> parts) {
    if (parts.empty()) throw UsageError("stack_rows: nothing to stack");
    auto& tape = tape_of(parts.front());
    const auto n = parts.front().value().cols();
    std::size_t m = 0;
    bool ng = false;
    for (auto p : parts) {
        tape_of(parts.front(), p);
        if (p.value().cols() != n) throw UsageError("stack_rows: column mismatch");
        m += p.value().size() / n;
        ng = ng || tape.needs_grad(p);
    }
    std::vector<double> data;
    data.reserve(m * n);
    for (auto p : parts) data.insert(data.end(), p.value().data().begin(), p.value().data().end());
    std::vector<Var> inputs(parts.begin(), parts.end());
    return tape.record(Tensor({m, n}, std::move(data)), ng, [inputs](Tape& t, Var, std::span<const double> g) {
        std::size_t off = 0;
        for (auto p : inputs) {
            const auto sz = t.value(p).size();
            t.accumulate(p, g.subspan(off, sz));
            off += sz;
        }
    });
}

Var pick(Var x, std::span<const std::size_t> index) {
    auto& tape = tape_of(x);
    const auto& in = x.value();
    require_rank2(in, "pick");
    const auto m = in.rows();
    const auto n = in.cols();
    if (index.size() != m) throw UsageError("pick: need one index per row");
    Tensor out({m});
    for (std::size_t r = 0; r < m; ++r) {
        if (index[r] >= n) throw UsageError("pick: index " + std::to_string(index[r]) + " out of range");
        out[r] = in[r * n + index[r]];
    }
    std::vector<std::size_t> idx(index.begin(), index.end());
    return tape.record(std::move(out), tape.needs_grad(x), [x, m, n, idx](Tape& t, Var, std::span<const double> g) {
        std::vector<double> gx(m * n, 0.0);
        for (std::size_t r = 0; r < m; ++r) gx[r * n + idx[r]] = g[r];
        t.accumulate(x, gx);
    });
}

}  // namespace lamm::num
