#pragma once

#include <functional>
#include <string>
#include <vector>

namespace uqq {

/// Dense row-major matrix of doubles. Row vectors are 1 x C matrices.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return a.size(); }

    static Mat row(std::vector<double> values);
};

Mat matmul(const Mat& x, const Mat& y);
Mat transpose(const Mat& x);

/// Reverse-mode tape over matrix-valued nodes. The computation graph is
/// rebuilt each step (full-batch training over a fixed architecture), so
/// nodes are created in topological order and backward runs the tape in
/// reverse.
class Tape {
  public:
    using Id = int;

    Id leaf(const Mat& value, bool requires_grad);

    const Mat& value(Id id) const { return nodes_[id].value; }
    const Mat& grad(Id id) const { return nodes_[id].grad; }

    // --- primitive ops ---
    Id matmul(Id x, Id y);
    Id add(Id x, Id y);                 // same shape
    Id add_rowvec(Id x, Id bias);       // bias 1 x C broadcast over rows
    Id relu(Id x);
    Id scale(Id x, double c);
    Id clamp(Id x, double lo, double hi);

    /// Row-wise LayerNorm with learnable affine (gamma, beta are 1 x C):
    /// normalizes each row to zero mean / unit variance before the affine.
    Id layer_norm(Id x, Id gamma, Id beta, double eps = 1e-5);

    /// (1 + eps) H + A_hat H with constant aggregation matrix A_hat and a
    /// 1 x 1 learnable eps node.
    Id gin_combine(Id h, Id eps_scalar, const Mat& a_hat);

    Id mean_rows(Id x);                 // n x C -> 1 x C
    Id max_rows(Id x);                  // n x C -> 1 x C, grad routed to argmax
    Id concat_cols(Id x, Id y);         // 1 x A , 1 x B -> 1 x (A+B)
    Id stack_rows(const std::vector<Id>& rows);  // N row vectors -> N x C

    /// total = sum_i coeffs[i] * terms[i], all terms 1 x 1.
    Id weighted_sum(const std::vector<Id>& terms, const std::vector<double>& coeffs);

    void backward(Id root);

    std::size_t node_count() const { return nodes_.size(); }

  private:
    struct Node {
        Mat value;
        Mat grad;
        std::function<void()> back;
    };

    friend class TapeOpAccess;

    Id push(Mat value) {
        Node node;
        node.grad = Mat(value.rows, value.cols);
        node.value = std::move(value);
        nodes_.push_back(std::move(node));
        return static_cast<Id>(nodes_.size()) - 1;
    }

    std::vector<Node> nodes_;
};

/// Escape hatch for fused operations defined outside the Tape class
/// (loss terms live in losses.cpp); exposes push + node access.
class TapeOpAccess {
  public:
    static Tape::Id push(Tape& t, Mat value) { return t.push(std::move(value)); }
    static Mat& grad(Tape& t, Tape::Id id) { return t.nodes_[id].grad; }
    static const Mat& value(const Tape& t, Tape::Id id) { return t.nodes_[id].value; }
    static void set_back(Tape& t, Tape::Id id, std::function<void()> fn) {
        t.nodes_[id].back = std::move(fn);
    }
    static void run_back(Tape& t, Tape::Id id) {
        if (t.nodes_[id].back) t.nodes_[id].back();
    }
};

}  // namespace uqq
