#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "pmcw/types.hpp"

namespace pmcw {

// K x K Hermitian matrix (the interference quadratic forms and their loaded
// versions). Construction checks conjugate symmetry elementwise at 1e-10,
// scaled by the largest entry so legitimately accumulated matrices of any
// magnitude pass. Positive semidefiniteness is a builder guarantee, checked
// by eigensolver-backed tests rather than at every construction (O(K^3)).
class HermitianForm {
public:
    explicit HermitianForm(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols())
            throw std::invalid_argument("HermitianForm: matrix must be square, got " +
                                        std::to_string(m_.rows()) + "x" +
                                        std::to_string(m_.cols()));
        double scale = 1.0;
        for (const auto& v : m_.storage()) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < m_.rows(); ++i)
            for (std::size_t j = i; j < m_.cols(); ++j)
                if (std::abs(m_(i, j) - std::conj(m_(j, i))) > 1e-10 * scale)
                    throw std::invalid_argument("HermitianForm: matrix is not Hermitian at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
    }

    std::size_t dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    const cdouble& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    cvec apply(const cvec& z) const { return matvec(m_, z); }
    double quad(const cvec& z) const { return quadratic_value(m_, z); }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i).real();
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : m_.storage()) s += std::norm(v);
        return std::sqrt(s);
    }

    // max_i sum_j |B_ij|; for Hermitian B an upper bound on the spectral radius
    double max_abs_row_sum() const {
        double best = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < dim(); ++j) s += std::abs(m_(i, j));
            best = std::max(best, s);
        }
        return best;
    }

private:
    Matrix m_;
};

} // namespace pmcw
