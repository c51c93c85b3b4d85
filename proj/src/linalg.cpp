#include "fbk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbk/errors.hpp"

namespace fbk {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<double> DenseMatrix::matvec(std::span<const double> x) const {
    FBK_REQUIRE(x.size() == cols_, "matvec: size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* r = data_.data() + i * cols_;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> DenseMatrix::matvec_transposed(std::span<const double> x) const {
    FBK_REQUIRE(x.size() == rows_, "matvec_transposed: size mismatch");
    std::vector<double> y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* r = data_.data() + i * cols_;
        const double xi = x[i];
        for (std::size_t j = 0; j < cols_; ++j) y[j] += r[j] * xi;
    }
    return y;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs) {
    FBK_REQUIRE(rows_ == rhs.rows_ && cols_ == rhs.cols_, "matrix add: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& rhs) {
    FBK_REQUIRE(rows_ == rhs.rows_ && cols_ == rhs.cols_, "matrix sub: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

double DenseMatrix::one_norm() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double DenseMatrix::max_abs() const {
    double best = 0.0;
    for (double v : data_) best = std::max(best, std::abs(v));
    return best;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    FBK_REQUIRE(a.cols() == b.rows(), "matmul: shape mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    FBK_REQUIRE(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff: shape mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            best = std::max(best, std::abs(a(i, j) - b(i, j)));
    return best;
}

DenseLU::DenseLU(DenseMatrix a) : lu_(std::move(a)), perm_(lu_.rows()) {
    FBK_REQUIRE(lu_.rows() == lu_.cols(), "DenseLU: matrix not square");
    const std::size_t n = lu_.rows();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu_(i, k)) > best) {
                best = std::abs(lu_(i, k));
                p = i;
            }
        }
        FBK_NUMERIC_REQUIRE(best > 0.0, "DenseLU: singular matrix at column " << k);
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            std::swap(perm_[k], perm_[p]);
        }
        const double piv = lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = lu_(i, k) / piv;
            lu_(i, k) = m;
            if (m == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
        }
    }
}

std::vector<double> DenseLU::solve(std::span<const double> b) const {
    const std::size_t n = lu_.rows();
    FBK_REQUIRE(b.size() == n, "DenseLU::solve: size mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 1; i < n; ++i) {
        double acc = x[i];
        for (std::size_t j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
        x[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= lu_(ii, j) * x[j];
        x[ii] = acc / lu_(ii, ii);
    }
    return x;
}

std::vector<double> DenseLU::solve_transposed(std::span<const double> b) const {
    // A = P^T L U  =>  A^T x = b  solves as U^T y = b, L^T z = y, x = P^T z.
    const std::size_t n = lu_.rows();
    FBK_REQUIRE(b.size() == n, "DenseLU::solve_transposed: size mismatch");
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double acc = y[i];
        for (std::size_t j = 0; j < i; ++j) acc -= lu_(j, i) * y[j];
        y[i] = acc / lu_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= lu_(j, ii) * y[j];
        y[ii] = acc;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = y[i];
    return x;
}

DenseMatrix DenseLU::solve_matrix(const DenseMatrix& b) const {
    FBK_REQUIRE(b.rows() == lu_.rows(), "DenseLU::solve_matrix: shape mismatch");
    DenseMatrix x(b.rows(), b.cols());
    std::vector<double> col(b.rows());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        auto s = solve(col);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = s[i];
    }
    return x;
}

DenseMatrix expm(const DenseMatrix& a) {
    FBK_REQUIRE(a.rows() == a.cols(), "expm: matrix not square");
    const std::size_t n = a.rows();
    // Higham's degree-13 coefficients.
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;

    double norm = a.one_norm();
    int squarings = 0;
    DenseMatrix as = a;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        as *= std::pow(2.0, -squarings);
    }

    const DenseMatrix eye = DenseMatrix::identity(n);
    const DenseMatrix a2 = matmul(as, as);
    const DenseMatrix a4 = matmul(a2, a2);
    const DenseMatrix a6 = matmul(a2, a4);

    DenseMatrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    DenseMatrix u = matmul(as, matmul(a6, u_inner) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye);
    DenseMatrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
    DenseMatrix v = matmul(a6, v_inner) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye;

    DenseLU lu(v - u);
    DenseMatrix r = lu.solve_matrix(v + u);
    for (int s = 0; s < squarings; ++s) r = matmul(r, r);
    return r;
}

TridiagonalLU::TridiagonalLU(const Tridiagonal& m)
    : l_(m.size(), 0.0), u_(m.size(), 0.0), c_(m.sup) {
    const std::size_t n = m.size();
    FBK_REQUIRE(n > 0, "TridiagonalLU: empty system");
    u_[0] = m.diag[0];
    FBK_NUMERIC_REQUIRE(u_[0] != 0.0, "TridiagonalLU: zero pivot at row 0");
    for (std::size_t i = 1; i < n; ++i) {
        l_[i] = m.sub[i] / u_[i - 1];
        u_[i] = m.diag[i] - l_[i] * c_[i - 1];
        FBK_NUMERIC_REQUIRE(u_[i] != 0.0, "TridiagonalLU: zero pivot at row " << i);
    }
}

void TridiagonalLU::solve_inplace(std::span<double> b) const {
    const std::size_t n = u_.size();
    FBK_REQUIRE(b.size() == n, "TridiagonalLU::solve: size mismatch");
    for (std::size_t i = 1; i < n; ++i) b[i] -= l_[i] * b[i - 1];
    b[n - 1] /= u_[n - 1];
    for (std::size_t ii = n - 1; ii-- > 0;) b[ii] = (b[ii] - c_[ii] * b[ii + 1]) / u_[ii];
}

void TridiagonalLU::solve_transposed_inplace(std::span<double> b) const {
    // M^T = U^T L^T: forward sweep with U^T, back sweep with unit L^T.
    const std::size_t n = u_.size();
    FBK_REQUIRE(b.size() == n, "TridiagonalLU::solve_transposed: size mismatch");
    b[0] /= u_[0];
    for (std::size_t i = 1; i < n; ++i) b[i] = (b[i] - c_[i - 1] * b[i - 1]) / u_[i];
    for (std::size_t ii = n - 1; ii-- > 0;) b[ii] -= l_[ii + 1] * b[ii + 1];
}

BandedLU::BandedLU(BandedMatrix m) : f_(std::move(m)) {
    const std::size_t n = f_.size();
    const std::size_t kl = f_.lower_bandwidth();
    const std::size_t ku = f_.upper_bandwidth();
    for (std::size_t k = 0; k < n; ++k) {
        const double piv = f_.at(k, k);
        FBK_NUMERIC_REQUIRE(piv != 0.0, "BandedLU: zero pivot at row " << k);
        const std::size_t imax = std::min(n - 1, k + kl);
        const std::size_t jmax = std::min(n - 1, k + ku);
        for (std::size_t i = k + 1; i <= imax; ++i) {
            const double mult = f_.at(i, k) / piv;
            f_.at(i, k) = mult;
            if (mult == 0.0) continue;
            for (std::size_t j = k + 1; j <= jmax; ++j) f_.at(i, j) -= mult * f_.at(k, j);
        }
        if (imax == 0) break;
    }
}

void BandedLU::solve_inplace(std::span<double> b) const {
    const std::size_t n = f_.size();
    const std::size_t kl = f_.lower_bandwidth();
    const std::size_t ku = f_.upper_bandwidth();
    FBK_REQUIRE(b.size() == n, "BandedLU::solve: size mismatch");
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j0 = (i > kl) ? i - kl : 0;
        double acc = b[i];
        for (std::size_t j = j0; j < i; ++j) acc -= f_.at(i, j) * b[j];
        b[i] = acc;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        const std::size_t j1 = std::min(n - 1, ii + ku);
        double acc = b[ii];
        for (std::size_t j = ii + 1; j <= j1; ++j) acc -= f_.at(ii, j) * b[j];
        b[ii] = acc / f_.at(ii, ii);
        if (ii == 0) break;
    }
}

void BandedLU::solve_transposed_inplace(std::span<double> b) const {
    const std::size_t n = f_.size();
    const std::size_t kl = f_.lower_bandwidth();
    const std::size_t ku = f_.upper_bandwidth();
    FBK_REQUIRE(b.size() == n, "BandedLU::solve_transposed: size mismatch");
    // U^T y = b (lower triangular with U's diagonal)
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = (i > ku) ? i - ku : 0;
        double acc = b[i];
        for (std::size_t j = j0; j < i; ++j) acc -= f_.at(j, i) * b[j];
        b[i] = acc / f_.at(i, i);
    }
    // L^T x = y (unit upper triangular)
    for (std::size_t ii = n; ii-- > 0;) {
        const std::size_t j1 = std::min(n - 1, ii + kl);
        double acc = b[ii];
        for (std::size_t j = ii + 1; j <= j1; ++j) acc -= f_.at(j, ii) * b[j];
        b[ii] = acc;
    }
}

void fft_inplace(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    FBK_REQUIRE(n > 0 && (n & (n - 1)) == 0, "fft_inplace: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace fbk
