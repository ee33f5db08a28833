#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace tumorgnn::nn {

/// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    void zero() { std::fill(data.begin(), data.end(), 0.0); }

    bool operator==(const Matrix&) const = default;
};

/// A named learnable tensor with its accumulated gradient.
struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;
};

/// Owns parameters at stable addresses, in registration order.
class ParameterStore {
public:
    Parameter& add(std::string name, std::size_t rows, std::size_t cols);
    Parameter& get(const std::string& name);
    const Parameter& get(const std::string& name) const;
    bool contains(const std::string& name) const;

    std::size_t size() const { return params_.size(); }
    Parameter& operator[](std::size_t i) { return *params_[i]; }
    const Parameter& operator[](std::size_t i) const { return *params_[i]; }

    std::size_t scalar_count() const;
    void zero_grad();
    std::vector<Matrix> snapshot() const;
    void restore(const std::vector<Matrix>& values);

private:
    std::vector<std::unique_ptr<Parameter>> params_;
};

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Matrix& value() const;
    std::size_t rows() const { return value().rows; }
    std::size_t cols() const { return value().cols; }
};

/// Records forward values and the closures that propagate gradients back
/// through them. A tape supports exactly one backward pass.
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, Var out)>;

    Var constant(Matrix m);
    Var parameter(Parameter& p);
    /// Records an op output; `fn` reads grad(out) and accumulates into its inputs.
    Var record(Matrix value, BackwardFn fn);

    const Matrix& value(Var v) const { return nodes_[v.id].value; }
    /// Gradient buffer of v, allocated as zeros on first access.
    Matrix& grad(Var v);
    bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }

    /// Seeds d(loss)/d(loss) = 1 for a 1x1 loss and accumulates parameter
    /// gradients. Throws std::logic_error when called a second time.
    void backward(Var loss);

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        Parameter* param = nullptr;
        bool needs_grad = false;
    };
    std::vector<Node> nodes_;
    std::vector<std::pair<std::size_t, BackwardFn>> backs_;
    bool consumed_ = false;

    friend struct Var;
};

inline const Matrix& Var::value() const { return tape->value(*this); }

}  // namespace tumorgnn::nn
