#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace relret {

/// Dense row-major matrix of doubles. The one value type every numeric
/// routine in this library operates on; vectors are 1xC or Rx1 tensors.
struct Tensor2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor2D() = default;
    Tensor2D(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    static Tensor2D from_rows(std::initializer_list<std::initializer_list<double>> rs);

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row_ptr(std::size_t r) { return data.data() + r * cols; }
    const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
    bool same_shape(const Tensor2D& o) const { return rows == o.rows && cols == o.cols; }
    bool all_finite() const;

    bool operator==(const Tensor2D& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
};

/// Throws NumericError naming `what` if any entry is NaN or Inf.
void ensure_finite(const Tensor2D& t, const char* what);

// Plain dense kernels. Deterministic: fixed loop order, no threading.
Tensor2D matmul(const Tensor2D& a, const Tensor2D& b);
Tensor2D transposed(const Tensor2D& a);
// out += a^T * b  and  out += a * b^T, used by reverse-mode passes.
void accumulate_at_b(const Tensor2D& a, const Tensor2D& b, Tensor2D& out);
void accumulate_a_bt(const Tensor2D& a, const Tensor2D& b, Tensor2D& out);
void accumulate_matmul(const Tensor2D& a, const Tensor2D& b, Tensor2D& out);

} // namespace relret
