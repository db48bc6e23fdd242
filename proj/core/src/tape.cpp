#include "relret/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relret/error.hpp"

namespace relret {

namespace {
constexpr double kLayerNormEps = 1e-5;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
} // namespace

Tape::Id Tape::push(Tensor2D val, bool needs_grad, std::function<void(Tape&)> back) {
    Node n;
    n.val = std::move(val);
    n.needs_grad = needs_grad;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

Tensor2D& Tape::grad_ref(Id id) {
    Node& n = nodes_[id];
    if (n.grad.empty() && n.val.size() > 0) n.grad = Tensor2D(n.val.rows, n.val.cols);
    return n.grad;
}

Tape::Id Tape::constant(Tensor2D v) {
    ensure_finite(v, "tape constant");
    return push(std::move(v), false, nullptr);
}

Tape::Id Tape::param(const std::string& name) {
    auto it = param_nodes_.find(name);
    if (it != param_nodes_.end()) return it->second;
    if (!params_) throw UsageError("Tape::param: no ParamSet bound");
    Id id = push(params_->get(name), true, nullptr);
    nodes_[id].param_name = name;
    param_nodes_[name] = id;
    return id;
}

double Tape::scalar(Id id) const {
    const Tensor2D& v = nodes_[id].val;
    if (v.rows != 1 || v.cols != 1) throw UsageError("Tape::scalar: value is not 1x1");
    return v.data[0];
}

Tape::Id Tape::add(Id a, Id b) {
    const Tensor2D& va = value(a);
    const Tensor2D& vb = value(b);
    if (!va.same_shape(vb)) throw UsageError("tape add: shape mismatch");
    Tensor2D out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += vb.data[i];
    bool ng = wants(a) || wants(b);
    return push(std::move(out), ng, [a, b, me = Id(nodes_.size())](Tape& t) {
        const Tensor2D& g = t.nodes_[me].grad;
        if (t.wants(a)) {
            Tensor2D& ga = t.grad_ref(a);
            for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
        }
        if (t.wants(b)) {
            Tensor2D& gb = t.grad_ref(b);
            for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i];
        }
    });
}

Tape::Id Tape::sub(Id a, Id b) {
    const Tensor2D& va = value(a);
    const Tensor2D& vb = value(b);
    if (!va.same_shape(vb)) throw UsageError("tape sub: shape mismatch");
    Tensor2D out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] -= vb.data[i];
    bool ng = wants(a) || wants(b);
    return push(std::move(out), ng, [a, b, me = Id(nodes_.size())](Tape& t) {
        const Tensor2D& g = t.nodes_[me].grad;
        if (t.wants(a)) {
            Tensor2D& ga = t.grad_ref(a);
            for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
        }
        if (t.wants(b)) {
            Tensor2D& gb = t.grad_ref(b);
            for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] -= g.data[i];
        }
    });
}

Tape::Id Tape::mul(Id a, Id b) {
    const Tensor2D& va = value(a);
    const Tensor2D& vb = value(b);
    if (!va.same_shape(vb)) throw UsageError("tape mul: shape mismatch");
    Tensor2D out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= vb.data[i];
    bool ng = wants(a) || wants(b);
    return push(std::move(out), ng, [a, b, me = Id(nodes_.size())](Tape& t) {
        const Tensor2D& g = t.nodes_[me].grad;
        const Tensor2D& va = t.value(a);
        const Tensor2D& vb = t.value(b);
        if (t.wants(a)) {
            Tensor2D& ga = t.grad_ref(a);
            for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * vb.data[i];
        }
        if (t.wants(b)) {
            Tensor2D& gb = t.grad_ref(b);
            for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i] * va.data[i];
        }
    });
}

Tape::Id Tape::scale(Id a, double c) {
    Tensor2D out = value(a);
    for (double& v : out.data) v *= c;
    return push(std::move(out), wants(a), [a, c, me = Id(nodes_.size())](Tape& t) {
        if (!t.wants(a)) return;
        const Tensor2D& g = t.nodes_[me].grad;
        Tensor2D& ga = t.grad_ref(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += c * g.data[i];
    });
}

Tape::Id Tape::add_row(Id a, Id row) {
    const Tensor2D& va = value(a);
    const Tensor2D& vr = value(row);
    if (vr.rows != 1 || vr.cols != va.cols) throw UsageError("tape add_row: row must be 1xC");
    Tensor2D out = va;
    for (std::size_t r = 0; r < out.rows; ++r)
        for (std::size_t c = 0; c < out.cols; ++c) out.at(r, c) += vr.data[c];
    bool ng = wants(a) || wants(row);
    return push(std::move(out), ng, [a, row, me = Id(nodes_.size())](Tape& t) {
        const Tensor2D& g = t.nodes_[me].grad;
        if (t.wants(a)) {
            Tensor2D& ga = t.grad_ref(a);
            for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
        }
        if (t.wants(row)) {
            Tensor2D& gr = t.grad_ref(row);
            for (std::size_t r = 0; r < g.rows; ++r)
                for (std::size_t c = 0; c < g.cols; ++c) gr.data[c] += g.at(r, c);
        }
    });
}

Tape::Id Tape::matmul(Id a, Id b) {
    const Tensor2D& va = value(a);
    const Tensor2D& vb = value(b);
    Tensor2D out = relret::matmul(va, vb);
    bool ng = wants(a) || wants(b);
    return push(std::move(out), ng, [a, b, me = Id(nodes_.size())](Tape& t) {
        const Tensor2D& g = t.nodes_[me].grad;
        if (t.wants(a)) accumulate_a_bt(g, t.value(b), t.grad_ref(a));
        if (t.wants(b)) accumulate_at_b(t.value(a), g, t.grad_ref(b));
    });
}

Tape::Id Tape::transpose(Id a) {
    Tensor2D out = transposed(value(a));
    return push(std::move(out), wants(a), [a, me = Id(nodes_.size())](Tape& t) {
        if (!t.wants(a)) return;
        const Tensor2D& g = t.nodes_[me].grad;
        Tensor2D& ga = t.grad_ref(a);
        for (std::size_t i = 0; i < g.rows; ++i)
            for (std::size_t j = 0; j < g.cols; ++j) ga.at(j, i) += g.at(i, j);
    });
}

Tape::Id Tape::tanh_act(Id a) {
    Tensor2D out = value(a);
    for (double& v : out.data) v = std::tanh(v);
    return push(std::move(out), wants(a), [a, me = Id(nodes_.size())](Tape& t) {
        if (!t.wants(a)) return;
        const Tensor2D& g = t.nodes_[me].grad;
        const Tensor2D& y = t.nodes_[me].val;
        Tensor2D& ga = t.grad_ref(a);
        for (std::size_t i = 0; i < g.size(); ++i)
            ga.data[i] += g.data[i] * (1.0 - y.data[i] * y.data[i]);
    });
}

Tape::Id Tape::gelu(Id a) {
    // exact erf form
    Tensor2D out = value(a);
    for (double& v : out.data) v = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
    return push(std::move(out), wants(a), [a, me = Id(nodes_.size())](Tape& t) {
        if (!t.wants(a)) return;
        const Tensor2D& g = t.nodes_[me].grad;
        const Tensor2D& x = t.value(a);
        Tensor2D& ga = t.grad_ref(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double xi = x.data[i];
            const double cdf = 0.5 * (1.0 + std::erf(xi * kInvSqrt2));
            const double pdf = kInvSqrt2Pi * std::exp(-0.5 * xi * xi);
            ga.data[i] += g.data[i] * (cdf + xi * pdf);
        }
    });
}

Tape::Id Tape::layer_norm(Id x, Id gamma, Id beta) {
    const Tensor2D& vx = value(x);
    const Tensor2D& vg = value(gamma);
    const Tensor2D& vb = value(beta);
    if (vg.rows != 1 || vg.cols != vx.cols || vb.rows != 1 || vb.cols != vx.cols)
        throw UsageError("layer_norm: gamma/beta must be 1xC");
    const std::size_t C = vx.cols;
    Tensor2D out(vx.rows, C);
    // cache (x - mu)/std per row for the backward pass
    Tensor2D xhat(vx.rows, C);
    std::vector<double> inv_std(vx.rows);
    for (std::size_t r = 0; r < vx.rows; ++r) {
        const double* xr = vx.row_ptr(r);
        double mu = 0.0;
        for (std::size_t c = 0; c < C; ++c) mu += xr[c];
        mu /= static_cast<double>(C);
        double var = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            const double d = xr[c] - mu;
            var += d * d;
        }
        var /= static_cast<double>(C);
        const double istd = 1.0 / std::sqrt(var + kLayerNormEps);
        inv_std[r] = istd;
        for (std::size_t c = 0; c < C; ++c) {
            const double h = (xr[c] - mu) * istd;
            xhat.at(r, c) = h;
            out.at(r, c) = vg.data[c] * h + vb.data[c];
        }
    }
    bool ng = wants(x) || wants(gamma) || wants(beta);
    return push(std::move(out), ng,
                [x, gamma, beta, xh = std::move(xhat), istdv = std::move(inv_std),
                 me = Id(nodes_.size())](Tape& t) {
                    const Tensor2D& g = t.nodes_[me].grad;
                    const Tensor2D& vg = t.value(gamma);
                    const std::size_t C = g.cols;
                    if (t.wants(gamma)) {
                        Tensor2D& gg = t.grad_ref(gamma);
                        for (std::size_t r = 0; r < g.rows; ++r)
                            for (std::size_t c = 0; c < C; ++c)
                                gg.data[c] += g.at(r, c) * xh.at(r, c);
                    }
                    if (t.wants(beta)) {
                        Tensor2D& gb = t.grad_ref(beta);
                        for (std::size_t r = 0; r < g.rows; ++r)
                            for (std::size_t c = 0; c < C; ++c) gb.data[c] += g.at(r, c);
                    }
                    if (t.wants(x)) {
                        Tensor2D& gx = t.grad_ref(x);
                        for (std::size_t r = 0; r < g.rows; ++r) {
                            double mean_h = 0.0, mean_hx = 0.0;
                            for (std::size_t c = 0; c < C; ++c) {
                                const double h = vg.data[c] * g.at(r, c);
                                mean_h += h;
                                mean_hx += h * xh.at(r, c);
                            }
                            mean_h /= static_cast<double>(C);
                            mean_hx /= static_cast<double>(C);
                            for (std::size_t c = 0; c < C; ++c) {
                                const double h = vg.data[c] * g.at(r, c);
                                gx.at(r, c) +=
                                    (h - mean_h - xh.at(r, c) * mean_hx) * istdv[r];
                            }
                        }
                    }
                });
}

Tape::Id Tape::softmax_rows(Id a, const std::vector<bool>* key_mask) {
    const Tensor2D& va = value(a);
    std::vector<bool> mask;
    if (key_mask) {
        if (key_mask->size() != va.cols)
            throw UsageError("softmax_rows: mask length must equal column count");
        mask = *key_mask;
    } else {
        mask.assign(va.cols, true);
    }
    bool any = false;
    for (bool m : mask) any = any || m;
    if (va.cols > 0 && !any) throw UsageError("softmax_rows: all columns masked");

    Tensor2D out(va.rows, va.cols);
    for (std::size_t r = 0; r < va.rows; ++r) {
        const double* xr = va.row_ptr(r);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < va.cols; ++c)
            if (mask[c] && xr[c] > mx) mx = xr[c];
        double sum = 0.0;
        for (std::size_t c = 0; c < va.cols; ++c) {
            if (!mask[c]) continue;
            const double e = std::exp(xr[c] - mx);
            out.at(r, c) = e;
            sum += e;
        }
        for (std::size_t c = 0; c < va.cols; ++c)
            if (mask[c]) out.at(r, c) /= sum;
    }
    return push(std::move(out), wants(a), [a, me = Id(nodes_.size())](Tape& t) {
        if (!t.wants(a)) return;
        const Tensor2D& g = t.nodes_[me].grad;
        const Tensor2D& y = t.nodes_[me].val;
        Tensor2D& ga = t.grad_ref(a);
        for (std::size_t r = 0; r < g.rows; ++r) {
            double dot = 0.0;
            for (std::size_t c = 0; c < g.cols; ++c) dot += g.at(r, c) * y.at(r, c);
            for (std::size_t c = 0; c < g.cols; ++c)
                ga.at(r, c) += y.at(r, c) * (g.at(r, c) - dot);
        }
    });
}

Tape::Id Tape::slice_rows(Id a, std::size_t start, std::size_t count) {
    const Tensor2D& va = value(a);
    if (start + count > va.rows) throw UsageError("slice_rows: out of range");
    Tensor2D out(count, va.cols);
    for (std::size_t r = 0; r < count; ++r)
        for (std::size_t c = 0; c < va.cols; ++c) out.at(r, c) = va.at(start + r, c);
    return push(std::move(out), wants(a), [a, start, me = Id(nodes_.size())](Tape& t) {
        if (!t.wants(a)) return;
        const Tensor2D& g = t.nodes_[me].grad;
        Tensor2D& ga = t.grad_ref(a);
        for (std::size_t r = 0; r < g.rows; ++r)
            for (std::size_t c = 0; c < g.cols; ++c) ga.at(start + r, c) += g.at(r, c);
    });
}

Tape::Id Tape::slice_cols(Id a, std::size_t start, std::size_t count) {
    const Tensor2D& va = value(a);
    if (start + count > va.cols) throw UsageError("slice_cols: out of range");
    Tensor2D out(va.rows, count);
    for (std::size_t r = 0; r < va.rows; ++r)
        for (std::size_t c = 0; c < count; ++c) out.at(r, c) = va.at(r, start + c);
    return push(std::move(out), wants(a), [a, start, me = Id(nodes_.size())](Tape& t) {
        if (!t.wants(a)) return;
        const Tensor2D& g = t.nodes_[me].grad;
        Tensor2D& ga = t.grad_ref(a);
        for (std::size_t r = 0; r < g.rows; ++r)
            for (std::size_t c = 0; c < g.cols; ++c) ga.at(r, start + c) += g.at(r, c);
    });
}

Tape::Id Tape::concat_rows(Id a, Id b) {
    const Tensor2D& va = value(a);
    const Tensor2D& vb = value(b);
    if (va.size() > 0 && vb.size() > 0 && va.cols != vb.cols)
        throw UsageError("concat_rows: column counts differ");
    const std::size_t cols = va.rows ? va.cols : vb.cols;
    Tensor2D out(va.rows + vb.rows, cols);
    std::copy(va.data.begin(), va.data.end(), out.data.begin());
    std::copy(vb.data.begin(), vb.data.end(), out.data.begin() + va.size());
    bool ng = wants(a) || wants(b);
    return push(std::move(out), ng,
                [a, b, na = va.rows, me = Id(nodes_.size())](Tape& t) {
                    const Tensor2D& g = t.nodes_[me].grad;
                    if (t.wants(a)) {
                        Tensor2D& ga = t.grad_ref(a);
                        for (std::size_t i = 0; i < ga.size(); ++i) ga.data[i] += g.data[i];
                    }
                    if (t.wants(b)) {
                        Tensor2D& gb = t.grad_ref(b);
                        const std::size_t off = na * g.cols;
                        for (std::size_t i = 0; i < gb.size(); ++i)
                            gb.data[i] += g.data[off + i];
                    }
                });
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
    if (parts.empty()) throw UsageError("concat_cols: no inputs");
    const std::size_t rows = value(parts[0]).rows;
    std::size_t cols = 0;
    bool ng = false;
    for (Id p : parts) {
        if (value(p).rows != rows) throw UsageError("concat_cols: row counts differ");
        cols += value(p).cols;
        ng = ng || wants(p);
    }
    Tensor2D out(rows, cols);
    std::size_t off = 0;
    for (Id p : parts) {
        const Tensor2D& v = value(p);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < v.cols; ++c) out.at(r, off + c) = v.at(r, c);
        off += v.cols;
    }
    return push(std::move(out), ng, [parts, me = Id(nodes_.size())](Tape& t) {
        const Tensor2D& g = t.nodes_[me].grad;
        std::size_t off = 0;
        for (Id p : parts) {
            const std::size_t pc = t.value(p).cols;
            if (t.wants(p)) {
                Tensor2D& gp = t.grad_ref(p);
                for (std::size_t r = 0; r < g.rows; ++r)
                    for (std::size_t c = 0; c < pc; ++c) gp.at(r, c) += g.at(r, off + c);
            }
            off += pc;
        }
    });
}

Tape::Id Tape::stack_rows(const std::vector<Id>& rows) {
    if (rows.empty()) throw UsageError("stack_rows: no inputs");
    const std::size_t cols = value(rows[0]).cols;
    bool ng = false;
    for (Id r : rows) {
        const Tensor2D& v = value(r);
        if (v.rows != 1 || v.cols != cols) throw UsageError("stack_rows: inputs must be 1xC");
        ng = ng || wants(r);
    }
    Tensor2D out(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(value(rows[i]).data.begin(), value(rows[i]).data.end(),
                  out.row_ptr(i));
    return push(std::move(out), ng, [rows, me = Id(nodes_.size())](Tape& t) {
        const Tensor2D& g = t.nodes_[me].grad;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!t.wants(rows[i])) continue;
            Tensor2D& gr = t.grad_ref(rows[i]);
            const double* grow = g.row_ptr(i);
            for (std::size_t c = 0; c < g.cols; ++c) gr.data[c] += grow[c];
        }
    });
}

Tape::Id Tape::mean_rows(Id a, const std::vector<bool>* row_mask) {
    const Tensor2D& va = value(a);
    std::vector<bool> mask;
    if (row_mask) {
        if (row_mask->size() != va.rows)
            throw UsageError("mean_rows: mask length must equal row count");
        mask = *row_mask;
    } else {
        mask.assign(va.rows, true);
    }
    std::size_t n = 0;
    for (bool m : mask) n += m ? 1 : 0;
    if (n == 0) throw UsageError("mean_rows: no rows selected");
    Tensor2D out(1, va.cols);
    for (std::size_t r = 0; r < va.rows; ++r) {
        if (!mask[r]) continue;
        for (std::size_t c = 0; c < va.cols; ++c) out.data[c] += va.at(r, c);
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : out.data) v *= inv;
    return push(std::move(out), wants(a),
                [a, mask = std::move(mask), inv, me = Id(nodes_.size())](Tape& t) {
                    if (!t.wants(a)) return;
                    const Tensor2D& g = t.nodes_[me].grad;
                    Tensor2D& ga = t.grad_ref(a);
                    for (std::size_t r = 0; r < ga.rows; ++r) {
                        if (!mask[r]) continue;
                        for (std::size_t c = 0; c < ga.cols; ++c)
                            ga.at(r, c) += g.data[c] * inv;
                    }
                });
}

Tape::Id Tape::l2_normalize_rows(Id a) {
    const Tensor2D& va = value(a);
    Tensor2D out(va.rows, va.cols);
    std::vector<double> norms(va.rows);
    for (std::size_t r = 0; r < va.rows; ++r) {
        double s = 0.0;
        const double* xr = va.row_ptr(r);
        for (std::size_t c = 0; c < va.cols; ++c) s += xr[c] * xr[c];
        const double n = std::sqrt(s);
        if (n < 1e-12) throw NumericError("l2_normalize_rows: near-zero row norm");
        norms[r] = n;
        for (std::size_t c = 0; c < va.cols; ++c) out.at(r, c) = xr[c] / n;
    }
    return push(std::move(out), wants(a),
                [a, norms = std::move(norms), me = Id(nodes_.size())](Tape& t) {
                    if (!t.wants(a)) return;
                    const Tensor2D& g = t.nodes_[me].grad;
                    const Tensor2D& y = t.nodes_[me].val;
                    Tensor2D& ga = t.grad_ref(a);
                    for (std::size_t r = 0; r < g.rows; ++r) {
                        double dot = 0.0;
                        for (std::size_t c = 0; c < g.cols; ++c)
                            dot += g.at(r, c) * y.at(r, c);
                        for (std::size_t c = 0; c < g.cols; ++c)
                            ga.at(r, c) += (g.at(r, c) - y.at(r, c) * dot) / norms[r];
                    }
                });
}

Tape::Id Tape::embedding_rows(Id table, const std::vector<std::size_t>& ids) {
    const Tensor2D& vt = value(table);
    for (std::size_t id : ids)
        if (id >= vt.rows) throw UsageError("embedding_rows: id out of range");
    Tensor2D out(ids.size(), vt.cols);
    for (std::size_t i = 0; i < ids.size(); ++i)
        std::copy(vt.row_ptr(ids[i]), vt.row_ptr(ids[i]) + vt.cols, out.row_ptr(i));
    return push(std::move(out), wants(table),
                [table, ids, me = Id(nodes_.size())](Tape& t) {
                    if (!t.wants(table)) return;
                    const Tensor2D& g = t.nodes_[me].grad;
                    Tensor2D& gt = t.grad_ref(table);
                    for (std::size_t i = 0; i < ids.size(); ++i) {
                        double* trow = gt.row_ptr(ids[i]);
                        const double* grow = g.row_ptr(i);
                        for (std::size_t c = 0; c < g.cols; ++c) trow[c] += grow[c];
                    }
                });
}

Tape::Id Tape::cross_entropy_rows(Id logits, const std::vector<std::size_t>& targets) {
    const Tensor2D& z = value(logits);
    if (targets.size() != z.rows)
        throw UsageError("cross_entropy_rows: one target per row required");
    for (std::size_t t : targets)
        if (t >= z.cols) throw UsageError("cross_entropy_rows: target index out of range");
    const std::size_t N = z.rows;
    double total = 0.0;
    for (std::size_t r = 0; r < N; ++r) {
        const double* zr = z.row_ptr(r);
        double mx = zr[0];
        for (std::size_t c = 1; c < z.cols; ++c) mx = std::max(mx, zr[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < z.cols; ++c) sum += std::exp(zr[c] - mx);
        total += mx + std::log(sum) - zr[targets[r]];
    }
    Tensor2D out(1, 1);
    out.data[0] = total / static_cast<double>(N);
    return push(std::move(out), wants(logits),
                [logits, targets, me = Id(nodes_.size())](Tape& t) {
                    if (!t.wants(logits)) return;
                    const double gscale = t.nodes_[me].grad.data[0];
                    const Tensor2D& z = t.value(logits);
                    Tensor2D& gz = t.grad_ref(logits);
                    const double invN = 1.0 / static_cast<double>(z.rows);
                    for (std::size_t r = 0; r < z.rows; ++r) {
                        const double* zr = z.row_ptr(r);
                        double mx = zr[0];
                        for (std::size_t c = 1; c < z.cols; ++c) mx = std::max(mx, zr[c]);
                        double sum = 0.0;
                        for (std::size_t c = 0; c < z.cols; ++c)
                            sum += std::exp(zr[c] - mx);
                        for (std::size_t c = 0; c < z.cols; ++c) {
                            double p = std::exp(zr[c] - mx) / sum;
                            if (c == targets[r]) p -= 1.0;
                            gz.at(r, c) += gscale * invN * p;
                        }
                    }
                });
}

Tape::Id Tape::sum_all(Id a) {
    const Tensor2D& va = value(a);
    Tensor2D out(1, 1);
    for (double v : va.data) out.data[0] += v;
    return push(std::move(out), wants(a), [a, me = Id(nodes_.size())](Tape& t) {
        if (!t.wants(a)) return;
        const double g = t.nodes_[me].grad.data[0];
        Tensor2D& ga = t.grad_ref(a);
        for (double& v : ga.data) v += g;
    });
}

GradResult Tape::backward(Id root) {
    const Tensor2D& rv = nodes_[root].val;
    if (rv.rows != 1 || rv.cols != 1)
        throw UsageError("Tape::backward: root must be a 1x1 scalar");
    if (!std::isfinite(rv.data[0]))
        throw NumericError("Tape::backward: loss is not finite");
    if (!params_) throw UsageError("Tape::backward: no ParamSet bound");

    grad_ref(root).data[0] = 1.0;
    for (std::size_t i = root + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.needs_grad || n.grad.empty() || !n.back) continue;
        n.back(*this);
    }

    GradResult res;
    res.loss = rv.data[0];
    res.grads = params_->zeros_like();
    for (const auto& [name, id] : param_nodes_) {
        const Node& n = nodes_[id];
        if (!n.grad.empty()) res.grads.get(name) = n.grad;
    }
    return res;
}

} // namespace relret
