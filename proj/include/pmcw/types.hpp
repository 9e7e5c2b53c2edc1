#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmcw {

using cdouble = std::complex<double>;
using cvec = std::vector<cdouble>;

constexpr double two_pi = 6.283185307179586476925286766559;

// Dense complex matrix, row major. Small (K x K or K x N) throughout, so no
// attempt at blocking or views; value semantics like everything else here.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), d_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cdouble& operator()(std::size_t r, std::size_t c) { return d_[r * cols_ + c]; }
    const cdouble& operator()(std::size_t r, std::size_t c) const { return d_[r * cols_ + c]; }

    cdouble* data() { return d_.data(); }
    const cdouble* data() const { return d_.data(); }

    const std::vector<cdouble>& storage() const { return d_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    Matrix& operator+=(const Matrix& o) {
        if (!same_shape(o))
            throw std::invalid_argument("Matrix::operator+=: shape mismatch");
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
        return *this;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cdouble> d_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { a += b; return a; }

// y = A z for square or rectangular A.
inline cvec matvec(const Matrix& a, const cvec& z) {
    if (a.cols() != z.size())
        throw std::invalid_argument("matvec: dimension mismatch");
    cvec y(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        cdouble acc = 0.0;
        const cdouble* row = a.data() + r * a.cols();
        for (std::size_t c = 0; c < a.cols(); ++c) acc += row[c] * z[c];
        y[r] = acc;
    }
    return y;
}

// Re(z^H A z); the quadratic form value used all over the solver.
inline double quadratic_value(const Matrix& a, const cvec& z) {
    const cvec az = matvec(a, z);
    cdouble acc = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) acc += std::conj(z[k]) * az[k];
    return acc.real();
}

inline double norm2(const cvec& z) {
    double s = 0.0;
    for (const auto& v : z) s += std::norm(v);
    return s;
}

} // namespace pmcw
