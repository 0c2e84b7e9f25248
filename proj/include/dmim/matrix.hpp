#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dmim/errors.hpp"

namespace dmim {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major matrix. Small (C <= 12 in every caller), so no views,
/// no expression templates, no sparsity.
template <typename T>
class Mat {
public:
    Mat() = default;

    Mat(int rows, int cols, const T& fill = T(0))
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
        if (rows < 0 || cols < 0) {
            throw ValidationError("matrix: dimensions must be non-negative");
        }
    }

    Mat(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = static_cast<int>(init.size());
        cols_ = rows_ > 0 ? static_cast<int>(init.begin()->size()) : 0;
        data_.reserve(static_cast<size_t>(rows_) * cols_);
        for (const auto& row : init) {
            if (static_cast<int>(row.size()) != cols_) {
                throw ValidationError("matrix: ragged initializer");
            }
            for (const auto& v : row) {
                data_.push_back(v);
            }
        }
    }

    static Mat identity(int n) {
        Mat m(n, n, T(0));
        for (int i = 0; i < n; ++i) {
            m(i, i) = T(1);
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    T& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    Mat transposed() const {
        Mat out(cols_, rows_);
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) {
                out(j, i) = (*this)(i, j);
            }
        }
        return out;
    }

    const std::vector<T>& flat() const { return data_; }

    friend bool operator==(const Mat& a, const Mat& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> data_;
};

using RealMat = Mat<double>;
using IntMat = Mat<BigInt>;
using RatMat = Mat<Rational>;

template <typename T>
Mat<T> mat_mul(const Mat<T>& a, const Mat<T>& b) {
    if (a.cols() != b.rows()) {
        throw ValidationError("matrix product: inner dimensions differ");
    }
    Mat<T> out(a.rows(), b.cols(), T(0));
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const T& aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

} // namespace dmim
