#include "sasa/tape.hpp"

#include "sasa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace sasa::ad {

namespace {

[[noreturn]] void shape_fail(const char* op, const Mat& a, const Mat& b) {
    std::ostringstream os;
    os << op << ": incompatible shapes " << a.rows() << "x" << a.cols()
       << " vs " << b.rows() << "x" << b.cols();
    throw NumericError(os.str());
}

void require_same_tape(const char* op, Var a, Var b) {
    if (a.tape != b.tape) {
        throw NumericError(std::string(op) + ": operands from different tapes");
    }
}

void require_same_shape(const char* op, Var a, Var b) {
    require_same_tape(op, a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        shape_fail(op, a.value(), b.value());
    }
}

bool wants_grad(std::initializer_list<Var> vs) {
    for (Var v : vs) {
        if (v.tape->needs_grad(v.id)) return true;
    }
    return false;
}

} // namespace

const Mat& Var::value() const { return tape->val(id); }

Var Tape::constant(Mat v) {
    int id = emit(std::move(v), false, nullptr);
    return {this, id};
}

Var Tape::scalar(double v) {
    Mat m(1, 1);
    m(0, 0) = v;
    return constant(std::move(m));
}

Var Tape::leaf(Parameter& p, std::vector<LeafRecord>* trace) {
    Parameter* pp = &p;
    int id;
    if (grad_enabled_) {
        id = emit(p.value, true,
                  [pp](Tape&, const Mat& g) { pp->grad += g; },
                  /*keep_grad=*/true);
    } else {
        id = emit(p.value, false, nullptr);
    }
    if (trace) trace->push_back({pp, id});
    return {this, id};
}

int Tape::emit(Mat value, bool needs_grad, BackwardFn bw, bool keep_grad) {
    if (!value.allFinite()) {
        throw NumericError("tape: op produced a non-finite value");
    }
    Node n;
    n.value = std::move(value);
    n.needs_grad = grad_enabled_ && needs_grad;
    n.backward = n.needs_grad ? std::move(bw) : nullptr;
    n.keep_grad = keep_grad;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

void Tape::accumulate(int id, const Mat& g) {
    Node& n = nodes_[id];
    if (!n.needs_grad) return;
    if (n.grad.size() == 0) {
        n.grad = g;
    } else {
        n.grad += g;
    }
}

void Tape::backward(Var loss) {
    if (!grad_enabled_) {
        throw NumericError("tape: backward() on a no-grad tape");
    }
    if (loss.tape != this || loss.rows() != 1 || loss.cols() != 1) {
        throw NumericError("tape: backward() expects a 1x1 loss on this tape");
    }
    accumulate(loss.id, Mat::Ones(1, 1));
    for (int i = loss.id; i >= 0; --i) {
        Node& n = nodes_[i];
        if (n.grad.size() != 0 && n.backward) {
            n.backward(*this, n.grad);
            n.backward = nullptr; // release saved tensors early
            if (!n.keep_grad) n.grad.resize(0, 0);
        }
    }
}

Mat Tape::grad_of(Var v) const {
    const Node& n = nodes_[v.id];
    if (n.grad.size() == 0) {
        return Mat::Zero(n.value.rows(), n.value.cols());
    }
    return n.grad;
}

void Tape::clear() { nodes_.clear(); }

// --- elementwise and linear ops ----------------------------------------------

Var add(Var a, Var b) {
    require_same_shape("add", a, b);
    Tape& t = *a.tape;
    bool ng = wants_grad({a, b});
    int ia = a.id, ib = b.id;
    int id = t.emit(a.value() + b.value(), ng, [ia, ib](Tape& t, const Mat& g) {
        t.accumulate(ia, g);
        t.accumulate(ib, g);
    });
    return {&t, id};
}

Var sub(Var a, Var b) {
    require_same_shape("sub", a, b);
    Tape& t = *a.tape;
    bool ng = wants_grad({a, b});
    int ia = a.id, ib = b.id;
    int id = t.emit(a.value() - b.value(), ng, [ia, ib](Tape& t, const Mat& g) {
        t.accumulate(ia, g);
        t.accumulate(ib, -g);
    });
    return {&t, id};
}

Var mul(Var a, Var b) {
    require_same_shape("mul", a, b);
    Tape& t = *a.tape;
    bool ng = wants_grad({a, b});
    int ia = a.id, ib = b.id;
    int id = t.emit(a.value().cwiseProduct(b.value()), ng,
                    [ia, ib](Tape& t, const Mat& g) {
                        t.accumulate(ia, g.cwiseProduct(t.val(ib)));
                        t.accumulate(ib, g.cwiseProduct(t.val(ia)));
                    });
    return {&t, id};
}

Var scale(Var a, double c) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    int id = t.emit(a.value() * c, ng, [ia, c](Tape& t, const Mat& g) {
        t.accumulate(ia, g * c);
    });
    return {&t, id};
}

Var add_scalar(Var a, double c) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    int id = t.emit(a.value().array() + c, ng, [ia](Tape& t, const Mat& g) {
        t.accumulate(ia, g);
    });
    return {&t, id};
}

Var add_rowvec(Var a, Var b) {
    require_same_tape("add_rowvec", a, b);
    if (b.rows() != 1 || b.cols() != a.cols()) {
        shape_fail("add_rowvec", a.value(), b.value());
    }
    Tape& t = *a.tape;
    bool ng = wants_grad({a, b});
    int ia = a.id, ib = b.id;
    Mat v = a.value();
    v.rowwise() += b.value().row(0);
    int id = t.emit(std::move(v), ng, [ia, ib](Tape& t, const Mat& g) {
        t.accumulate(ia, g);
        t.accumulate(ib, g.colwise().sum());
    });
    return {&t, id};
}

Var matmul(Var a, Var b) {
    require_same_tape("matmul", a, b);
    if (a.cols() != b.rows()) shape_fail("matmul", a.value(), b.value());
    Tape& t = *a.tape;
    bool ng = wants_grad({a, b});
    int ia = a.id, ib = b.id;
    int id = t.emit(a.value() * b.value(), ng, [ia, ib](Tape& t, const Mat& g) {
        t.accumulate(ia, g * t.val(ib).transpose());
        t.accumulate(ib, t.val(ia).transpose() * g);
    });
    return {&t, id};
}

Var sum(const std::vector<Var>& xs) {
    if (xs.empty()) throw NumericError("sum: empty operand list");
    Tape& t = *xs[0].tape;
    Mat acc = xs[0].value();
    std::vector<int> ids;
    ids.reserve(xs.size());
    ids.push_back(xs[0].id);
    bool ng = wants_grad({xs[0]});
    for (std::size_t k = 1; k < xs.size(); ++k) {
        require_same_shape("sum", xs[0], xs[k]);
        acc += xs[k].value();
        ids.push_back(xs[k].id);
        ng = ng || wants_grad({xs[k]});
    }
    int id = t.emit(std::move(acc), ng,
                    [ids = std::move(ids)](Tape& t, const Mat& g) {
                        for (int i : ids) t.accumulate(i, g);
                    });
    return {&t, id};
}

Var sigmoid(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    Mat y = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
    std::shared_ptr<Mat> ys;
    if (ng) ys = std::make_shared<Mat>(y);
    int id = t.emit(std::move(y), ng, [ia, ys](Tape& t, const Mat& g) {
        t.accumulate(ia, (g.array() * ys->array() * (1.0 - ys->array())).matrix());
    });
    return {&t, id};
}

Var tanh(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    Mat y = a.value().array().tanh().matrix();
    std::shared_ptr<Mat> ys;
    if (ng) ys = std::make_shared<Mat>(y);
    int id = t.emit(std::move(y), ng, [ia, ys](Tape& t, const Mat& g) {
        t.accumulate(ia, (g.array() * (1.0 - ys->array().square())).matrix());
    });
    return {&t, id};
}

Var relu(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    int id = t.emit(a.value().cwiseMax(0.0), ng, [ia](Tape& t, const Mat& g) {
        Mat mask = (t.val(ia).array() > 0.0).cast<double>();
        t.accumulate(ia, g.cwiseProduct(mask));
    });
    return {&t, id};
}

Var sqr(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    int id = t.emit(a.value().array().square().matrix(), ng,
                    [ia](Tape& t, const Mat& g) {
                        t.accumulate(ia, (2.0 * g.array() * t.val(ia).array()).matrix());
                    });
    return {&t, id};
}

Var sqrt(Var a) {
    if ((a.value().array() < 0.0).any()) {
        throw NumericError("sqrt: negative input");
    }
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    Mat y = a.value().array().sqrt().matrix();
    std::shared_ptr<Mat> ys;
    if (ng) ys = std::make_shared<Mat>(y);
    int id = t.emit(std::move(y), ng, [ia, ys](Tape& t, const Mat& g) {
        // Subgradient 0 at the origin keeps the sweep finite.
        Eigen::ArrayXXd denom = 2.0 * ys->array();
        Eigen::ArrayXXd gin =
            (t.val(ia).array() < 1e-12).select(0.0, g.array() / denom.max(1e-300));
        t.accumulate(ia, gin.matrix());
    });
    return {&t, id};
}

Var abs(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    int id = t.emit(a.value().cwiseAbs(), ng, [ia](Tape& t, const Mat& g) {
        Mat s = t.val(ia).array().sign().matrix();
        t.accumulate(ia, g.cwiseProduct(s));
    });
    return {&t, id};
}

Var concat_cols(const std::vector<Var>& xs) {
    if (xs.empty()) throw NumericError("concat_cols: empty operand list");
    Tape& t = *xs[0].tape;
    Eigen::Index rows = xs[0].rows(), total = 0;
    bool ng = false;
    for (Var v : xs) {
        if (v.tape != &t || v.rows() != rows) {
            shape_fail("concat_cols", xs[0].value(), v.value());
        }
        total += v.cols();
        ng = ng || wants_grad({v});
    }
    Mat out(rows, total);
    std::vector<std::pair<int, Eigen::Index>> spans; // (id, start col)
    Eigen::Index c = 0;
    for (Var v : xs) {
        out.middleCols(c, v.cols()) = v.value();
        spans.emplace_back(v.id, c);
        c += v.cols();
    }
    int id = t.emit(std::move(out), ng,
                    [spans = std::move(spans)](Tape& t, const Mat& g) {
                        for (auto [pid, c0] : spans) {
                            t.accumulate(pid, g.middleCols(c0, t.val(pid).cols()));
                        }
                    });
    return {&t, id};
}

Var slice_cols(Var a, Eigen::Index c0, Eigen::Index width) {
    if (c0 < 0 || width < 0 || c0 + width > a.cols()) {
        throw NumericError("slice_cols: range out of bounds");
    }
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    int id = t.emit(a.value().middleCols(c0, width), ng,
                    [ia, c0, width](Tape& t, const Mat& g) {
                        Mat full = Mat::Zero(t.val(ia).rows(), t.val(ia).cols());
                        full.middleCols(c0, width) = g;
                        t.accumulate(ia, full);
                    });
    return {&t, id};
}

Var row_dot(Var a, Var b) {
    require_same_shape("row_dot", a, b);
    Tape& t = *a.tape;
    bool ng = wants_grad({a, b});
    int ia = a.id, ib = b.id;
    Mat y = a.value().cwiseProduct(b.value()).rowwise().sum();
    int id = t.emit(std::move(y), ng, [ia, ib](Tape& t, const Mat& g) {
        // g is [R x 1]; scale the other operand's rows by it.
        t.accumulate(ia, t.val(ib).array().colwise() * g.col(0).array());
        t.accumulate(ib, t.val(ia).array().colwise() * g.col(0).array());
    });
    return {&t, id};
}

Var col_scale(Var a, Var s) {
    require_same_tape("col_scale", a, s);
    if (s.cols() != 1 || s.rows() != a.rows()) {
        shape_fail("col_scale", a.value(), s.value());
    }
    Tape& t = *a.tape;
    bool ng = wants_grad({a, s});
    int ia = a.id, is = s.id;
    Mat y = a.value().array().colwise() * s.value().col(0).array();
    int id = t.emit(std::move(y), ng, [ia, is](Tape& t, const Mat& g) {
        t.accumulate(ia, g.array().colwise() * t.val(is).col(0).array());
        t.accumulate(is, g.cwiseProduct(t.val(ia)).rowwise().sum());
    });
    return {&t, id};
}

Var mean_rows(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    double inv = 1.0 / static_cast<double>(a.rows());
    int id = t.emit(a.value().colwise().mean(), ng,
                    [ia, inv](Tape& t, const Mat& g) {
                        Mat full = (g * inv).replicate(t.val(ia).rows(), 1);
                        t.accumulate(ia, full);
                    });
    return {&t, id};
}

Var sum_all(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    Mat y(1, 1);
    y(0, 0) = a.value().sum();
    int id = t.emit(std::move(y), ng, [ia](Tape& t, const Mat& g) {
        t.accumulate(ia, Mat::Constant(t.val(ia).rows(), t.val(ia).cols(), g(0, 0)));
    });
    return {&t, id};
}

Var mean_all(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    double inv = 1.0 / static_cast<double>(a.rows() * a.cols());
    Mat y(1, 1);
    y(0, 0) = a.value().sum() * inv;
    int id = t.emit(std::move(y), ng, [ia, inv](Tape& t, const Mat& g) {
        t.accumulate(ia, Mat::Constant(t.val(ia).rows(), t.val(ia).cols(),
                                       g(0, 0) * inv));
    });
    return {&t, id};
}

// --- similarity / attention ops ----------------------------------------------

Var row_cosine(Var a, Var b) {
    require_same_shape("row_cosine", a, b);
    constexpr double kEps = 1e-12;
    Tape& t = *a.tape;
    bool ng = wants_grad({a, b});
    int ia = a.id, ib = b.id;

    const Mat& av = a.value();
    const Mat& bv = b.value();
    Vec na = av.rowwise().norm();
    Vec nb = bv.rowwise().norm();
    Vec dot = av.cwiseProduct(bv).rowwise().sum();
    Vec denom = (na.array() * nb.array() + kEps).matrix();
    Mat y = (dot.array() / denom.array()).matrix();

    struct Saved {
        Vec na, nb, denom, cosv;
    };
    std::shared_ptr<Saved> sv;
    if (ng) sv = std::make_shared<Saved>(Saved{na, nb, denom, y.col(0)});

    int id = t.emit(std::move(y), ng, [ia, ib, sv](Tape& t, const Mat& g) {
        const Mat& av = t.val(ia);
        const Mat& bv = t.val(ib);
        Mat ga = Mat::Zero(av.rows(), av.cols());
        Mat gb = ga;
        for (Eigen::Index r = 0; r < av.rows(); ++r) {
            double gr = g(r, 0);
            double D = sv->denom(r);
            double c = sv->cosv(r);
            // d cos / da = b/D - cos * (nb/na) * a / D, guarded at zero norm.
            ga.row(r) = gr * (bv.row(r) / D);
            gb.row(r) = gr * (av.row(r) / D);
            if (sv->na(r) > kEps) {
                ga.row(r) -= gr * c * (sv->nb(r) / sv->na(r)) * av.row(r) / D;
            }
            if (sv->nb(r) > kEps) {
                gb.row(r) -= gr * c * (sv->na(r) / sv->nb(r)) * bv.row(r) / D;
            }
        }
        t.accumulate(ia, ga);
        t.accumulate(ib, gb);
    });
    return {&t, id};
}

Var sparsemax_rows(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    const Mat& z = a.value();
    Mat y(z.rows(), z.cols());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        y.row(r) = sasa::sparsemax(Vec(z.row(r).transpose())).transpose();
    }
    std::shared_ptr<Mat> support;
    if (ng) {
        support = std::make_shared<Mat>((y.array() > 0.0).cast<double>());
    }
    int id = t.emit(std::move(y), ng, [ia, support](Tape& t, const Mat& g) {
        const Mat& s = *support;
        Mat gin(g.rows(), g.cols());
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            double k = s.row(r).sum();
            double m = (k > 0.0) ? s.row(r).dot(g.row(r)) / k : 0.0;
            gin.row(r) = s.row(r).array() * (g.row(r).array() - m);
        }
        t.accumulate(ia, gin);
    });
    return {&t, id};
}

Var softmax_rows(Var a) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    const Mat& z = a.value();
    Mat y(z.rows(), z.cols());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        Eigen::ArrayXd e = (z.row(r).array() - z.row(r).maxCoeff()).exp();
        y.row(r) = (e / e.sum()).matrix().transpose();
    }
    std::shared_ptr<Mat> ys;
    if (ng) ys = std::make_shared<Mat>(y);
    int id = t.emit(std::move(y), ng, [ia, ys](Tape& t, const Mat& g) {
        Mat gin(g.rows(), g.cols());
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            double dot = ys->row(r).dot(g.row(r));
            gin.row(r) = ys->row(r).array() * (g.row(r).array() - dot);
        }
        t.accumulate(ia, gin);
    });
    return {&t, id};
}

// --- gradient-flow control -----------------------------------------------------

Var grad_stop(Var a) {
    Tape& t = *a.tape;
    int id = t.emit(a.value(), false, nullptr);
    return {&t, id};
}

Var st_indicator(Var a, double mu, double band) {
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    Mat y = (a.value().array() > mu).cast<double>();
    int id = t.emit(std::move(y), ng, [ia, mu, band](Tape& t, const Mat& g) {
        Mat mask = ((t.val(ia).array() - mu).abs() <= band).cast<double>();
        t.accumulate(ia, g.cwiseProduct(mask));
    });
    return {&t, id};
}

Var sigmoid_indicator(Var a, double mu, double temperature) {
    if (temperature <= 0.0) {
        throw NumericError("sigmoid_indicator: temperature must be positive");
    }
    Tape& t = *a.tape;
    bool ng = wants_grad({a});
    int ia = a.id;
    Mat y = (1.0 / (1.0 + (-(a.value().array() - mu) / temperature).exp())).matrix();
    std::shared_ptr<Mat> ys;
    if (ng) ys = std::make_shared<Mat>(y);
    int id = t.emit(std::move(y), ng, [ia, ys, temperature](Tape& t, const Mat& g) {
        Eigen::ArrayXXd d = ys->array() * (1.0 - ys->array()) / temperature;
        t.accumulate(ia, (g.array() * d).matrix());
    });
    return {&t, id};
}

// --- fused recurrent step ------------------------------------------------------

Var lstm_step(Var x, Var h, Var c, Var wx, Var wh, Var b) {
    Tape& t = *x.tape;
    const Eigen::Index B = x.rows(), I = x.cols(), D = h.cols();
    if (h.rows() != B || c.rows() != B || c.cols() != D ||
        wx.rows() != I || wx.cols() != 4 * D || wh.rows() != D ||
        wh.cols() != 4 * D || b.rows() != 1 || b.cols() != 4 * D) {
        throw NumericError("lstm_step: inconsistent operand shapes");
    }
    bool ng = wants_grad({x, h, c, wx, wh, b});
    int ix = x.id, ih = h.id, ic = c.id, iwx = wx.id, iwh = wh.id, ib = b.id;

    Mat z = x.value() * wx.value() + h.value() * wh.value();
    z.rowwise() += b.value().row(0);

    Mat gates(B, 4 * D); // [i | f | g~ | o] after nonlinearities
    gates.middleCols(0, D) = (1.0 / (1.0 + (-z.middleCols(0, D).array()).exp())).matrix();
    gates.middleCols(D, D) = (1.0 / (1.0 + (-z.middleCols(D, D).array()).exp())).matrix();
    gates.middleCols(2 * D, D) = z.middleCols(2 * D, D).array().tanh().matrix();
    gates.middleCols(3 * D, D) = (1.0 / (1.0 + (-z.middleCols(3 * D, D).array()).exp())).matrix();

    Mat cn = gates.middleCols(D, D).cwiseProduct(c.value()) +
             gates.middleCols(0, D).cwiseProduct(gates.middleCols(2 * D, D));
    Mat tanh_cn = cn.array().tanh().matrix();
    Mat hn = gates.middleCols(3 * D, D).cwiseProduct(tanh_cn);

    Mat out(B, 2 * D);
    out.middleCols(0, D) = hn;
    out.middleCols(D, D) = cn;

    struct Saved {
        Mat gates, tanh_cn;
    };
    std::shared_ptr<Saved> sv;
    if (ng) sv = std::make_shared<Saved>(Saved{std::move(gates), std::move(tanh_cn)});

    int id = t.emit(std::move(out), ng,
                    [=](Tape& t, const Mat& g) {
                        const Eigen::Index D2 = g.cols() / 2;
                        auto i_g = sv->gates.middleCols(0, D2).array();
                        auto f_g = sv->gates.middleCols(D2, D2).array();
                        auto c_g = sv->gates.middleCols(2 * D2, D2).array();
                        auto o_g = sv->gates.middleCols(3 * D2, D2).array();
                        auto tc = sv->tanh_cn.array();

                        Eigen::ArrayXXd gh = g.middleCols(0, D2).array();
                        Eigen::ArrayXXd dcn =
                            g.middleCols(D2, D2).array() + gh * o_g * (1.0 - tc.square());

                        Mat dz(g.rows(), 4 * D2);
                        dz.middleCols(0, D2) = (dcn * c_g * i_g * (1.0 - i_g)).matrix();
                        dz.middleCols(D2, D2) =
                            (dcn * t.val(ic).array() * f_g * (1.0 - f_g)).matrix();
                        dz.middleCols(2 * D2, D2) =
                            (dcn * i_g * (1.0 - c_g.square())).matrix();
                        dz.middleCols(3 * D2, D2) =
                            (gh * tc * o_g * (1.0 - o_g)).matrix();

                        t.accumulate(ix, dz * t.val(iwx).transpose());
                        t.accumulate(ih, dz * t.val(iwh).transpose());
                        t.accumulate(ic, (dcn * f_g).matrix());
                        t.accumulate(iwx, t.val(ix).transpose() * dz);
                        t.accumulate(iwh, t.val(ih).transpose() * dz);
                        t.accumulate(ib, dz.colwise().sum());
                    });
    return {&t, id};
}

// --- distribution distance ------------------------------------------------------

Var mmd_rbf(Var xs, Var xt, double sigma) {
    require_same_tape("mmd_rbf", xs, xt);
    if (xs.cols() != xt.cols()) shape_fail("mmd_rbf", xs.value(), xt.value());
    if (xs.rows() == 0 || xt.rows() == 0) {
        throw NumericError("mmd_rbf: empty sample set");
    }
    if (sigma <= 0.0) throw NumericError("mmd_rbf: bandwidth must be positive");
    Tape& t = *xs.tape;
    bool ng = wants_grad({xs, xt});
    int is = xs.id, it = xt.id;

    const Mat& X = xs.value();
    const Mat& Y = xt.value();
    auto kernel = [sigma](const Mat& A, const Mat& B) {
        Vec sa = A.rowwise().squaredNorm();
        Vec sb = B.rowwise().squaredNorm();
        Mat d2 = (-2.0 * A * B.transpose());
        d2.colwise() += sa;
        d2.rowwise() += sb.transpose();
        return (d2.array().max(0.0) * (-0.5 / (sigma * sigma))).exp().matrix().eval();
    };
    Mat kxx = kernel(X, X), ktt = kernel(Y, Y), kxt = kernel(X, Y);
    const double b1 = static_cast<double>(X.rows());
    const double b2 = static_cast<double>(Y.rows());
    Mat y(1, 1);
    y(0, 0) = kxx.sum() / (b1 * b1) + ktt.sum() / (b2 * b2) -
              2.0 * kxt.sum() / (b1 * b2);

    struct Saved {
        Mat kxx, ktt, kxt;
    };
    std::shared_ptr<Saved> sv;
    if (ng) sv = std::make_shared<Saved>(Saved{std::move(kxx), std::move(ktt), std::move(kxt)});

    int id = t.emit(std::move(y), ng, [is, it, sv, sigma, b1, b2](Tape& t, const Mat& g) {
        const Mat& X = t.val(is);
        const Mat& Y = t.val(it);
        const double gs = g(0, 0) * 2.0 / (sigma * sigma);
        Vec rx = sv->kxx.rowwise().sum();
        Vec rxt = sv->kxt.rowwise().sum();
        Mat gx = (gs / (b1 * b1)) * (sv->kxx * X - rx.asDiagonal() * X) -
                 (gs / (b1 * b2)) * (sv->kxt * Y - rxt.asDiagonal() * X);
        Vec ry = sv->ktt.rowwise().sum();
        Vec rtx = sv->kxt.colwise().sum().transpose();
        Mat gy = (gs / (b2 * b2)) * (sv->ktt * Y - ry.asDiagonal() * Y) -
                 (gs / (b1 * b2)) * (sv->kxt.transpose() * X - rtx.asDiagonal() * Y);
        t.accumulate(is, gx);
        t.accumulate(it, gy);
    });
    return {&t, id};
}

// --- losses ----------------------------------------------------------------------

Var softmax_xent(Var logits, const std::vector<int>& labels) {
    Tape& t = *logits.tape;
    const Eigen::Index B = logits.rows(), K = logits.cols();
    if (static_cast<Eigen::Index>(labels.size()) != B) {
        throw NumericError("softmax_xent: label count does not match batch");
    }
    for (int y : labels) {
        if (y < 0 || y >= K) throw NumericError("softmax_xent: label out of range");
    }
    bool ng = wants_grad({logits});
    int il = logits.id;

    Mat p(B, K);
    double loss = 0.0;
    for (Eigen::Index r = 0; r < B; ++r) {
        Eigen::ArrayXd e = (logits.value().row(r).array() -
                            logits.value().row(r).maxCoeff()).exp();
        p.row(r) = (e / e.sum()).matrix().transpose();
        loss -= std::log(std::max(p(r, labels[r]), 1e-300));
    }
    Mat y(1, 1);
    y(0, 0) = loss / static_cast<double>(B);

    std::shared_ptr<Mat> ps;
    std::shared_ptr<std::vector<int>> ls;
    if (ng) {
        ps = std::make_shared<Mat>(std::move(p));
        ls = std::make_shared<std::vector<int>>(labels);
    }
    int id = t.emit(std::move(y), ng, [il, ps, ls](Tape& t, const Mat& g) {
        Mat gin = *ps;
        for (Eigen::Index r = 0; r < gin.rows(); ++r) {
            gin(r, (*ls)[r]) -= 1.0;
        }
        t.accumulate(il, gin * (g(0, 0) / static_cast<double>(gin.rows())));
    });
    return {&t, id};
}

Var mse(Var a, Var b) {
    require_same_shape("mse", a, b);
    Tape& t = *a.tape;
    bool ng = wants_grad({a, b});
    int ia = a.id, ib = b.id;
    double inv = 1.0 / static_cast<double>(a.rows() * a.cols());
    Mat y(1, 1);
    y(0, 0) = (a.value() - b.value()).array().square().sum() * inv;
    int id = t.emit(std::move(y), ng, [ia, ib, inv](Tape& t, const Mat& g) {
        Mat d = (t.val(ia) - t.val(ib)) * (2.0 * inv * g(0, 0));
        t.accumulate(ia, d);
        t.accumulate(ib, -d);
    });
    return {&t, id};
}

} // namespace sasa::ad
