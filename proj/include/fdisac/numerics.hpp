// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra and scalar root finding used by every other
// part of the library. Sizes are small (a few tens of rows), so everything is
// plain row-major storage and O(n^3) direct methods.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdisac {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kJ{0.0, 1.0};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// Raised by solve_linear when elimination meets a pivot below threshold.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double pivot) : Error(what), pivot_(pivot) {}
    double pivot() const noexcept { return pivot_; }

private:
    double pivot_;
};

class BracketError : public Error {
public:
    using Error::Error;
};

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols, cplx fill = {});
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix outer(std::span<const cplx> x, std::span<const cplx> y);  // x * y^H
    static ComplexMatrix diagonal(std::span<const cplx> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    CVector column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const cplx> v);

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(cplx s);

    /// Adds `s` to every diagonal entry (matrix must be square).
    void add_diagonal(cplx s);

    bool operator==(const ComplexMatrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    CVector data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
CVector matvec(const ComplexMatrix& a, std::span<const cplx> x);
ComplexMatrix hermitian_transpose(const ComplexMatrix& a);
ComplexMatrix transpose(const ComplexMatrix& a);

// Vector helpers. dot(x, y) is x^H y.
cplx dot(std::span<const cplx> x, std::span<const cplx> y);
double norm2_squared(std::span<const cplx> x);
double norm2(std::span<const cplx> x);
CVector scaled(std::span<const cplx> x, cplx s);
CVector add(std::span<const cplx> x, std::span<const cplx> y);
CVector subtract(std::span<const cplx> x, std::span<const cplx> y);
CVector conjugated(std::span<const cplx> x);

/// Quadratic form x^H A x; A is assumed Hermitian so the result is real.
double hermitian_form(const ComplexMatrix& a, std::span<const cplx> x);

double frobenius_norm(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol);

/// At elimination step k, a pivot with |pivot| <= kPivotThreshold * (largest
/// magnitude in its original row over columns k..n-1) is treated as singular.
inline constexpr double kPivotThreshold = 1e-14;

/// Solves A x = b by Gaussian elimination with partial pivoting followed by one
/// step of iterative refinement. Throws SingularMatrixError on a vanishing pivot.
CVector solve_linear(const ComplexMatrix& a, std::span<const cplx> b);

/// Cholesky factorization attempt; true iff A is numerically positive definite.
bool is_positive_definite(const ComplexMatrix& a);

/// Largest eigenvalue of a Hermitian matrix by shifted power iteration.
double max_eigenvalue_hermitian(const ComplexMatrix& a);

/// Smallest eigenvalue, computed as -max_eigenvalue_hermitian(-A).
double min_eigenvalue_hermitian(const ComplexMatrix& a);

/// Householder reflector Q (Hermitian, unitary) with Q v = -e^{j arg v_0} ||v|| e_0.
ComplexMatrix householder_reflector(std::span<const cplx> v);

struct BisectionOptions {
    double ftol = 1e-10;    // stop when |f(x)| <= ftol
    double xtol = 1e-10;    // stop when the bracket width <= xtol
    int max_iterations = 400;
};

/// Root of a monotone function bracketed by [lo, hi]. Stops on |f| <= ftol,
/// width <= xtol, or when the bracket can no longer be split in floating point.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectionOptions& opts);
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol);

/// X[k] = sum_n x[n] exp(-j 2 pi k n / M). Radix-2 FFT when M is a power of two.
CVector dft(std::span<const cplx> x);
/// Inverse of dft, including the 1/M factor.
CVector idft(std::span<const cplx> x);

}  // namespace fdisac
