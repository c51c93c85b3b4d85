#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fbk {

// Row-major dense matrix. Small sizes only: dense paths back the
// transition-matrix oracles, jump exponentials and the FFT benchmark,
// never the production grid solves.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    DenseMatrix transposed() const;

    std::vector<double> matvec(std::span<const double> x) const;
    std::vector<double> matvec_transposed(std::span<const double> x) const;

    DenseMatrix& operator+=(const DenseMatrix& rhs);
    DenseMatrix& operator-=(const DenseMatrix& rhs);
    DenseMatrix& operator*=(double s);

    double one_norm() const;     // max column sum of |a_ij|
    double max_abs() const;

    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
    friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
    friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

// LU with partial pivoting.
class DenseLU {
  public:
    explicit DenseLU(DenseMatrix a);

    std::vector<double> solve(std::span<const double> b) const;
    // Solves A^T x = b reusing the same factors.
    std::vector<double> solve_transposed(std::span<const double> b) const;
    DenseMatrix solve_matrix(const DenseMatrix& b) const;

  private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

// Matrix exponential, scaling-and-squaring with the [13/13] Pade approximant.
DenseMatrix expm(const DenseMatrix& a);

// Tridiagonal system stored as three diagonals; sub[0] and sup[n-1] are unused.
struct Tridiagonal {
    std::vector<double> sub, diag, sup;

    std::size_t size() const { return diag.size(); }
    static Tridiagonal zero(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }
};

// LU factors of a tridiagonal matrix, no pivoting. Transposed solves reuse
// the same factors so that <M^-1 a, b> and <a, M^-T b> agree to rounding.
class TridiagonalLU {
  public:
    explicit TridiagonalLU(const Tridiagonal& m);

    void solve_inplace(std::span<double> b) const;
    void solve_transposed_inplace(std::span<double> b) const;

  private:
    std::vector<double> l_;   // subdiagonal multipliers, l_[0] unused
    std::vector<double> u_;   // pivots
    std::vector<double> c_;   // superdiagonal (copied through)
};

// General banded matrix, LAPACK-style band storage: entry (i,j) with
// -kl <= j-i <= ku lives at band(ku + i - j, j).
class BandedMatrix {
  public:
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
        : n_(n), kl_(kl), ku_(ku), data_((kl + ku + 1) * n, 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t lower_bandwidth() const { return kl_; }
    std::size_t upper_bandwidth() const { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const {
        return (j + kl_ >= i) && (i + ku_ >= j);
    }
    double& at(std::size_t i, std::size_t j) { return data_[(ku_ + i - j) * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[(ku_ + i - j) * n_ + j]; }

  private:
    std::size_t n_, kl_, ku_;
    std::vector<double> data_;
};

// Banded LU without pivoting; callers assemble diagonally dominant systems.
class BandedLU {
  public:
    explicit BandedLU(BandedMatrix m);

    void solve_inplace(std::span<double> b) const;
    void solve_transposed_inplace(std::span<double> b) const;

  private:
    BandedMatrix f_;  // L (unit diagonal, below) and U (on/above) in place
};

// In-place radix-2 FFT; size must be a power of two. sign = -1 applies
// exp(-i 2 pi j k / n), sign = +1 the conjugate transform (unnormalized).
void fft_inplace(std::vector<std::complex<double>>& a, int sign);

}  // namespace fbk
