// Reverse-mode autodiff on a dynamic tape of Eigen matrices.
//
// Every forward op appends one node; creation order is a topological order,
// so backward() is a single reverse sweep. Gradients are accumulated lazily:
// a node's grad buffer is allocated only when something flows into it, which
// makes "no gradient reached this node" an exact (bitwise zero) statement
// rather than an approximate one.
#ifndef SASA_TAPE_HPP
#define SASA_TAPE_HPP

#include "sasa/common.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace sasa::ad {

class Tape;

/// Handle to a tape node. Cheap to copy; valid until Tape::clear().
struct Var {
    Tape* tape = nullptr;
    int id = -1;

    bool valid() const { return tape != nullptr && id >= 0; }
    const Mat& value() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }
};

/// Trainable tensor. Lives outside the tape; leaf nodes accumulate into grad.
struct Parameter {
    std::string name;
    Mat value;
    Mat grad;

    Parameter() = default;
    Parameter(std::string n, Mat v)
        : name(std::move(n)), value(std::move(v)),
          grad(Mat::Zero(value.rows(), value.cols())) {}

    void zero_grad() { grad.setZero(); }
};

/// One (parameter, leaf node) binding made during a forward pass. Lets a
/// caller inspect the gradient contribution of a single pass in isolation.
struct LeafRecord {
    const Parameter* param;
    int node;
};

class Tape {
public:
    explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

    Var constant(Mat v);
    Var scalar(double v);

    /// Binds a parameter for this pass. Gradients reaching the returned node
    /// are added to p.grad during backward(). If `trace` is non-null the
    /// binding is recorded there.
    Var leaf(Parameter& p, std::vector<LeafRecord>* trace = nullptr);

    /// Seeds `loss` (must be 1x1) with gradient 1 and runs the reverse sweep.
    /// May be called once per recorded graph.
    void backward(Var loss);

    /// Gradient buffer of a node after backward(); zeros if nothing reached it.
    Mat grad_of(Var v) const;

    void clear();
    std::size_t size() const { return nodes_.size(); }
    bool grad_enabled() const { return grad_enabled_; }

    // --- internals used by op implementations -------------------------------
    using BackwardFn = std::function<void(Tape&, const Mat&)>;

    int emit(Mat value, bool needs_grad, BackwardFn bw, bool keep_grad = false);
    const Mat& val(int id) const { return nodes_[id].value; }
    bool needs_grad(int id) const { return nodes_[id].needs_grad; }
    /// Adds `g` into the grad buffer of node `id` (no-op for non-grad nodes).
    void accumulate(int id, const Mat& g);

private:
    struct Node {
        Mat value;
        Mat grad;            // empty until touched
        BackwardFn backward; // null for constants and stopped nodes
        bool needs_grad = false;
        bool keep_grad = false; // leaf nodes keep grads for post-hoc inspection
    };
    std::vector<Node> nodes_;
    bool grad_enabled_ = true;
};

// --- op set ------------------------------------------------------------------
// All ops validate shapes and throw NumericError on mismatch.

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);               // elementwise
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
Var add_rowvec(Var a, Var b);        // b is 1xC, broadcast over rows
Var matmul(Var a, Var b);
Var sum(const std::vector<Var>& xs); // n-ary elementwise sum
Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var sqr(Var a);
Var sqrt(Var a);                     // subgradient 0 where value < 1e-12
Var abs(Var a);                      // sign(0) taken as 0
Var concat_cols(const std::vector<Var>& xs);
Var slice_cols(Var a, Eigen::Index c0, Eigen::Index width);
Var row_dot(Var a, Var b);           // [R x 1]
Var col_scale(Var a, Var s);         // rows of a scaled by column s [R x 1]
Var mean_rows(Var a);                // [1 x C]
Var sum_all(Var a);                  // [1 x 1]
Var mean_all(Var a);                 // [1 x 1]

/// Cosine similarity per row pair, denominator guarded by +1e-12.
Var row_cosine(Var a, Var b);

/// Row-wise Euclidean projection onto the probability simplex.
Var sparsemax_rows(Var a);
Var softmax_rows(Var a);

/// Identity value, but no gradient flows to the input (bitwise, not masked).
Var grad_stop(Var a);

/// Hard threshold 1[x > mu] forward; straight-through backward that passes
/// gradients only where |x - mu| <= band.
Var st_indicator(Var a, double mu, double band);

/// Smooth surrogate sigmoid((x - mu) / temperature) with its exact gradient.
Var sigmoid_indicator(Var a, double mu, double temperature);

/// One LSTM step. x:[B x I], h,c:[B x D], wx:[I x 4D], wh:[D x 4D], b:[1 x 4D].
/// Gate packing order along columns: input, forget, cell, output.
/// Returns [B x 2D] = [h' | c'].
Var lstm_step(Var x, Var h, Var c, Var wx, Var wh, Var b);

/// Biased MMD^2 between row sets under an RBF kernel with fixed bandwidth
/// sigma (treated as a constant in the backward pass).
Var mmd_rbf(Var xs, Var xt, double sigma);

/// Mean softmax cross-entropy of logits [B x K] against integer labels.
Var softmax_xent(Var logits, const std::vector<int>& labels);

/// Mean squared error over all entries, (1/(R*C)) * sum (a-b)^2.
Var mse(Var a, Var b);

} // namespace sasa::ad

#endif
