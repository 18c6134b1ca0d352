// SPDX-License-Identifier: Apache-2.0

#include "fdisac/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace fdisac {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, cplx fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DimensionError("ComplexMatrix: ragged initializer list");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const cplx> x, std::span<const cplx> y) {
    ComplexMatrix m(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            m(i, j) = x[i] * std::conj(y[j]);
        }
    }
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> d) {
    ComplexMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CVector ComplexMatrix::column(std::size_t c) const {
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

void ComplexMatrix::set_column(std::size_t c, std::span<const cplx> v) {
    if (v.size() != rows_) throw DimensionError("set_column: length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("matrix addition: shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw DimensionError("matrix subtraction: shape mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

void ComplexMatrix::add_diagonal(cplx s) {
    if (rows_ != cols_) throw DimensionError("add_diagonal: matrix not square");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, i) += s;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream msg;
        msg << "matmul: " << a.rows() << "x" << a.cols() << " times " << b.rows() << "x"
            << b.cols();
        throw DimensionError(msg.str());
    }
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

CVector matvec(const ComplexMatrix& a, std::span<const cplx> x) {
    if (a.cols() != x.size()) throw DimensionError("matvec: length mismatch");
    CVector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

ComplexMatrix hermitian_transpose(const ComplexMatrix& a) {
    ComplexMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
    }
    return t;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
    ComplexMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

cplx dot(std::span<const cplx> x, std::span<const cplx> y) {
    if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
    cplx acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

double norm2_squared(std::span<const cplx> x) {
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return acc;
}

double norm2(std::span<const cplx> x) { return std::sqrt(norm2_squared(x)); }

CVector scaled(std::span<const cplx> x, cplx s) {
    CVector y(x.begin(), x.end());
    for (auto& v : y) v *= s;
    return y;
}

CVector add(std::span<const cplx> x, std::span<const cplx> y) {
    if (x.size() != y.size()) throw DimensionError("add: length mismatch");
    CVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
}

CVector subtract(std::span<const cplx> x, std::span<const cplx> y) {
    if (x.size() != y.size()) throw DimensionError("subtract: length mismatch");
    CVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
    return z;
}

CVector conjugated(std::span<const cplx> x) {
    CVector y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::conj(x[i]);
    return y;
}

double hermitian_form(const ComplexMatrix& a, std::span<const cplx> x) {
    return dot(x, matvec(a, x)).real();
}

double frobenius_norm(const ComplexMatrix& a) { return norm2(a.data()); }

double max_abs(const ComplexMatrix& a) {
    double m = 0.0;
    for (const auto& v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i; j < a.cols(); ++j) {
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
        }
    }
    return true;
}

namespace {

struct LuFactors {
    ComplexMatrix lu;
    std::vector<std::size_t> perm;
};

LuFactors lu_factor(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("solve_linear: matrix not square");
    const std::size_t n = a.rows();
    LuFactors f{a, std::vector<std::size_t>(n)};
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
    // A pivot is judged against its original row restricted to the columns not
    // yet eliminated, so large couplings to already-eliminated unknowns do not
    // count. Squared magnitudes throughout; std::abs on complex goes through hypot.
    std::vector<double> suffix_max(n * (n + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = n; j-- > 0;)
            suffix_max[i * (n + 1) + j] =
                std::max(suffix_max[i * (n + 1) + j + 1], std::norm(a(i, j)));
    auto& m = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::norm(m(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::norm(m(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        const double threshold =
            kPivotThreshold * std::sqrt(suffix_max[f.perm[piv] * (n + 1) + k]);
        if (!(best > threshold * threshold)) {
            std::ostringstream msg;
            msg << "solve_linear: pivot magnitude " << std::sqrt(best) << " at column " << k
                << " below threshold " << threshold;
            throw SingularMatrixError(msg.str(), std::sqrt(best));
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        const cplx inv = 1.0 / m(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx l = m(i, k) * inv;
            m(i, k) = l;
            if (l == cplx{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
        }
    }
    return f;
}

CVector lu_solve(const LuFactors& f, std::span<const cplx> b) {
    const std::size_t n = f.lu.rows();
    CVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

}  // namespace

CVector solve_linear(const ComplexMatrix& a, std::span<const cplx> b) {
    if (a.rows() != b.size()) throw DimensionError("solve_linear: rhs length mismatch");
    const LuFactors f = lu_factor(a);
    CVector x = lu_solve(f, b);
    const CVector r = subtract(b, matvec(a, x));
    const CVector dx = lu_solve(f, r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    return x;
}

bool is_positive_definite(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) return false;
    const std::size_t n = a.rows();
    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return true;
}

double max_eigenvalue_hermitian(const ComplexMatrix& a) {
    const double scale = std::max(1.0, max_abs(a));
    if (!is_hermitian(a, 1e-10 * scale)) {
        throw Error("max_eigenvalue_hermitian: matrix is not Hermitian");
    }
    const std::size_t n = a.rows();
    if (n == 0) throw DimensionError("max_eigenvalue_hermitian: empty matrix");

    // Shift by the infinity norm so A + sI is positive semidefinite and the
    // dominant eigenvalue of the shifted matrix is the algebraic maximum of A.
    double shift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(a(i, j));
        shift = std::max(shift, row);
    }
    ComplexMatrix b = a;
    b.add_diagonal(shift);
    if (shift == 0.0) return 0.0;

    // Deterministic start with no special alignment to steering structure.
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = cplx{1.0 + 0.1 * static_cast<double>(i), 0.37 * std::sin(1.3 * (i + 1))};
    }
    double nv = norm2(v);
    for (auto& x : v) x /= nv;

    double lambda = hermitian_form(b, v);
    constexpr int kMinIterations = 200;
    constexpr int kMaxIterations = 20000;
    for (int it = 0; it < kMaxIterations; ++it) {
        CVector bv = matvec(b, v);
        const double nb = norm2(bv);
        if (nb == 0.0) break;
        for (auto& x : bv) x /= nb;
        v = std::move(bv);
        const double next = hermitian_form(b, v);
        const bool settled = std::abs(next - lambda) <= 1e-16 * shift;
        lambda = next;
        if (it >= kMinIterations && settled) break;
    }
    return lambda - shift;
}

double min_eigenvalue_hermitian(const ComplexMatrix& a) {
    return -max_eigenvalue_hermitian(cplx{-1.0} * a);
}

ComplexMatrix householder_reflector(std::span<const cplx> v) {
    const std::size_t n = v.size();
    const double nv = norm2(v);
    if (nv == 0.0) return ComplexMatrix::identity(n);
    const cplx phase = std::abs(v[0]) == 0.0 ? cplx{1.0} : v[0] / std::abs(v[0]);
    CVector u(v.begin(), v.end());
    u[0] += phase * nv;
    const double nu2 = norm2_squared(u);
    ComplexMatrix q = ComplexMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) q(i, j) -= 2.0 * u[i] * std::conj(u[j]) / nu2;
    }
    return q;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              const BisectionOptions& opts) {
    if (lo > hi) std::swap(lo, hi);
    double flo = f(lo);
    const double fhi = f(hi);
    if (std::abs(flo) <= opts.ftol) return lo;
    if (std::abs(fhi) <= opts.ftol) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream msg;
        msg << "bisect: no sign change on [" << lo << ", " << hi << "] (f = " << flo << ", "
            << fhi << "); widen the bracket";
        throw BracketError(msg.str());
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < opts.max_iterations; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (std::abs(fm) <= opts.ftol) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= opts.xtol) break;
    }
    return 0.5 * (lo + hi);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    return bisect(f, lo, hi, BisectionOptions{tol, tol, 400});
}

namespace {

void fft_radix2(CVector& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                // Twiddles computed directly rather than by recurrence to keep
                // round-off flat for long transforms.
                const cplx w = std::polar(1.0, ang * static_cast<double>(k));
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

CVector dft_direct(std::span<const cplx> x, bool inverse) {
    const std::size_t m = x.size();
    CVector out(m);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < m; ++k) {
        cplx acc{};
        for (std::size_t n = 0; n < m; ++n) {
            const std::size_t kn = (k * n) % m;
            acc += x[n] * std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(kn) /
                                              static_cast<double>(m));
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace

CVector dft(std::span<const cplx> x) {
    if (x.empty()) return {};
    if (std::has_single_bit(x.size())) {
        CVector a(x.begin(), x.end());
        fft_radix2(a, false);
        return a;
    }
    return dft_direct(x, false);
}

CVector idft(std::span<const cplx> x) {
    if (x.empty()) return {};
    CVector out;
    if (std::has_single_bit(x.size())) {
        out.assign(x.begin(), x.end());
        fft_radix2(out, true);
    } else {
        out = dft_direct(x, true);
    }
    const double inv = 1.0 / static_cast<double>(x.size());
    for (auto& v : out) v *= inv;
    return out;
}

}  // namespace fdisac
