#include "relret/tensor.hpp"

#include <cmath>
#include <string>

#include "relret/error.hpp"

namespace relret {

Tensor2D Tensor2D::from_rows(std::initializer_list<std::initializer_list<double>> rs) {
    Tensor2D t;
    t.rows = rs.size();
    t.cols = rs.size() ? rs.begin()->size() : 0;
    t.data.reserve(t.rows * t.cols);
    for (const auto& r : rs) {
        if (r.size() != t.cols) throw UsageError("from_rows: ragged row lengths");
        t.data.insert(t.data.end(), r.begin(), r.end());
    }
    return t;
}

bool Tensor2D::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

void ensure_finite(const Tensor2D& t, const char* what) {
    if (!t.all_finite())
        throw NumericError(std::string(what) + ": non-finite value");
}

Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
    if (a.cols != b.rows) throw UsageError("matmul: inner dimensions differ");
    Tensor2D out(a.rows, b.cols);
    accumulate_matmul(a, b, out);
    return out;
}

void accumulate_matmul(const Tensor2D& a, const Tensor2D& b, Tensor2D& out) {
    // i-k-j order keeps both b and out accesses sequential
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* orow = out.row_ptr(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double av = a.at(i, k);
            if (av == 0.0) continue;
            const double* brow = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += av * brow[j];
        }
    }
}

Tensor2D transposed(const Tensor2D& a) {
    Tensor2D out(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

void accumulate_at_b(const Tensor2D& a, const Tensor2D& b, Tensor2D& out) {
    // out(k,j) += sum_i a(i,k) * b(i,j)
    if (a.cols != out.rows || b.cols != out.cols || a.rows != b.rows)
        throw UsageError("accumulate_at_b: shape mismatch");
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        const double* brow = b.row_ptr(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            double* orow = out.row_ptr(k);
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += av * brow[j];
        }
    }
}

void accumulate_a_bt(const Tensor2D& a, const Tensor2D& b, Tensor2D& out) {
    // out(i,k) += sum_j a(i,j) * b(k,j)
    if (a.rows != out.rows || b.rows != out.cols || a.cols != b.cols)
        throw UsageError("accumulate_a_bt: shape mismatch");
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = a.row_ptr(i);
        for (std::size_t k = 0; k < b.rows; ++k) {
            const double* brow = b.row_ptr(k);
            double acc = 0.0;
            for (std::size_t j = 0; j < a.cols; ++j) acc += arow[j] * brow[j];
            out.at(i, k) += acc;
        }
    }
}

} // namespace relret
