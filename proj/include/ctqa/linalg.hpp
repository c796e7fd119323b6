#pragma once

// Dense complex linear algebra sized for automaton state spaces (dimension
// capped at 64). The one nontrivial routine is the Hermitian eigensolver, a
// cyclic Jacobi iteration with complex plane rotations; the matrix exponential
// exp(-iHt) is evaluated through it rather than by series, so unitarity is
// inherited from the eigenvector basis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctqa {

using Complex = std::complex<double>;

inline constexpr double structural_tol = 1e-12;  // Hermiticity/unitarity at construction
inline constexpr double behavioral_tol = 1e-9;   // probabilities and state comparisons
inline constexpr std::size_t max_dim = 64;

class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, Complex(0.0, 0.0)) {
        check_dims(rows, cols);
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        check_dims(rows, cols);
        if (a_.size() != rows * cols)
            throw std::invalid_argument("matrix: entry count does not match shape");
        for (const Complex& z : a_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw std::invalid_argument("matrix: non-finite entry");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix zero(std::size_t n) { return ComplexMatrix(n, n); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) {
        bounds(i, j);
        return a_[i * cols_ + j];
    }
    const Complex& operator()(std::size_t i, std::size_t j) const {
        bounds(i, j);
        return a_[i * cols_ + j];
    }

    ComplexMatrix operator*(const ComplexMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix multiply: inner dimensions differ");
        ComplexMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Complex aik = a_[i * cols_ + k];
                if (aik == Complex(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    r(i, j) += aik * o(k, j);
            }
        return r;
    }

    ComplexMatrix operator+(const ComplexMatrix& o) const { return zip(o, std::plus<Complex>()); }
    ComplexMatrix operator-(const ComplexMatrix& o) const { return zip(o, std::minus<Complex>()); }

    ComplexMatrix scaled(Complex factor) const {
        ComplexMatrix r = *this;
        for (Complex& z : r.a_) z *= factor;
        return r;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj(a_[i * cols_ + j]);
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const Complex& z : a_) m = std::max(m, std::abs(z));
        return m;
    }

    /// max |A(i,j) - conj(A(j,i))|; zero for an exactly Hermitian matrix.
    double hermiticity_defect() const {
        if (rows_ != cols_) throw std::invalid_argument("hermiticity defect: matrix must be square");
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                m = std::max(m, std::abs(a_[i * cols_ + j] - std::conj(a_[j * cols_ + i])));
        return m;
    }

    /// max |(U U† - I)(i,j)|.
    double unitarity_defect() const {
        if (rows_ != cols_) throw std::invalid_argument("unitarity defect: matrix must be square");
        const ComplexMatrix p = *this * adjoint();
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                m = std::max(m, std::abs(p(i, j) - (i == j ? Complex(1.0) : Complex(0.0))));
        return m;
    }

    bool all_finite() const {
        for (const Complex& z : a_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    bool operator==(const ComplexMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

private:
    static void check_dims(std::size_t rows, std::size_t cols) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("matrix: empty shape");
        if (rows > max_dim || cols > max_dim)
            throw std::invalid_argument("matrix: dimension above " + std::to_string(max_dim));
    }

    void bounds(std::size_t i, std::size_t j) const {
        if (i >= rows_ || j >= cols_) throw std::out_of_range("matrix: index out of range");
    }

    template <typename Op>
    ComplexMatrix zip(const ComplexMatrix& o, Op op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix: shape mismatch");
        ComplexMatrix r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = op(a_[i], o.a_[i]);
        return r;
    }

    std::size_t rows_, cols_;
    std::vector<Complex> a_;
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

struct StateVector {
    std::vector<Complex> amp;

    std::size_t dim() const { return amp.size(); }

    double norm() const {
        double s = 0.0;
        for (const Complex& z : amp) s += std::norm(z);
        return std::sqrt(s);
    }

    static StateVector basis(std::size_t dim, std::size_t index) {
        if (index >= dim) throw std::invalid_argument("state vector: basis index out of range");
        StateVector v;
        v.amp.assign(dim, Complex(0.0, 0.0));
        v.amp[index] = 1.0;
        return v;
    }
};

inline double max_abs_diff(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("state diff: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a.amp[i] - b.amp[i]));
    return m;
}

inline StateVector apply(const ComplexMatrix& u, const StateVector& v) {
    if (u.cols() != v.dim()) throw std::invalid_argument("apply: dimension mismatch");
    StateVector r;
    r.amp.assign(u.rows(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < u.cols(); ++j) r.amp[i] += u(i, j) * v.amp[j];
    return r;
}

struct EighResult {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns; H = V diag(values) V†
};

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix. The input must be
/// Hermitian within structural_tol; the iteration runs on the Hermitian
/// average (H + H†)/2 so sub-tolerance asymmetry cannot bias a sweep.
inline EighResult eigh(const ComplexMatrix& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eigh: matrix must be square");
    const double defect = h.hermiticity_defect();
    if (defect > structural_tol)
        throw std::invalid_argument("eigh: matrix not Hermitian, max asymmetry " + std::to_string(defect));

    const std::size_t n = h.rows();
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = Complex(h(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex avg = 0.5 * (h(i, j) + std::conj(h(j, i)));
            a(i, j) = avg;
            a(j, i) = std::conj(avg);
        }
    }

    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = a.max_abs();
    const double stop = scale * 1e-15;

    double off = 0.0;
    bool converged = (scale == 0.0);
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= stop) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double r = std::abs(apq);
                if (r <= stop) continue;
                // Phase-absorbed plane rotation: with apq = r e^{iφ}, the real
                // angle θ solves tan 2θ = 2r / (a_pp - a_qq).
                const Complex eiphi = apq / r;
                const double theta = 0.5 * std::atan2(2.0 * r, a(p, p).real() - a(q, q).real());
                const double c = std::cos(theta), s = std::sin(theta);
                const Complex jpq = -s * eiphi;            // J(p,q)
                const Complex jqp = s * std::conj(eiphi);  // J(q,p)
                for (std::size_t i = 0; i < n; ++i) {      // columns: A <- A J, V <- V J
                    const Complex aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip + jqp * aiq;
                    a(i, q) = jpq * aip + c * aiq;
                    const Complex vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip + jqp * viq;
                    v(i, q) = jpq * vip + c * viq;
                }
                for (std::size_t j = 0; j < n; ++j) {  // rows: A <- J† A
                    const Complex apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj + s * eiphi * aqj;
                    a(q, j) = -s * std::conj(eiphi) * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = Complex(a(p, p).real(), 0.0);
                a(q, q) = Complex(a(q, q).real(), 0.0);
            }
        }
    }
    if (!converged)
        throw std::runtime_error("eigh: no convergence after 100 sweeps, off-diagonal residual " +
                                 std::to_string(off));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    EighResult res;
    res.values.resize(n);
    res.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        res.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) res.vectors(i, k) = v(i, order[k]);
    }
    return res;
}

/// exp(-i H t) assembled from a precomputed eigendecomposition of H. Run
/// loops decompose each Hamiltonian once and call this per step; the result
/// is bit-identical to mat_exp_hermitian on the same matrix.
inline ComplexMatrix mat_exp_from_eigh(const EighResult& e, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("mat_exp: duration not finite");
    if (t < 0.0) throw std::invalid_argument("mat_exp: negative duration");
    const std::size_t n = e.values.size();
    std::vector<Complex> phase(n);
    for (std::size_t k = 0; k < n; ++k) phase[k] = std::polar(1.0, -e.values[k] * t);
    ComplexMatrix u(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex z(0.0, 0.0);
            for (std::size_t k = 0; k < n; ++k)
                z += e.vectors(i, k) * phase[k] * std::conj(e.vectors(j, k));
            u(i, j) = z;
        }
    return u;
}

/// exp(-i H t) for Hermitian H and duration t >= 0, via the spectral form
/// V diag(e^{-i λ t}) V†.
inline ComplexMatrix mat_exp_hermitian(const ComplexMatrix& h, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("mat_exp: duration not finite");
    if (t < 0.0) throw std::invalid_argument("mat_exp: negative duration");
    return mat_exp_from_eigh(eigh(h), t);  // eigh rejects non-Hermitian input
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());  // ctor enforces the size cap
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return r;
}

inline ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix r(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) r(a.rows() + i, a.cols() + j) = b(i, j);
    return r;
}

/// Diagonal 0/1 projector onto the given basis indices.
inline ComplexMatrix projector(std::size_t dim, const std::set<std::size_t>& indices) {
    ComplexMatrix p(dim, dim);
    for (std::size_t idx : indices) {
        if (idx >= dim) throw std::invalid_argument("projector: index out of range");
        p(idx, idx) = 1.0;
    }
    return p;
}

/// The generator (π/2)·NOT: exp(-i·NOT_PI_2·t) is the rotation
/// [[cos(tπ/2), -i sin(tπ/2)], [-i sin(tπ/2), cos(tπ/2)]].
inline ComplexMatrix not_pi_2() {
    ComplexMatrix h(2, 2);
    h(0, 1) = std::acos(-1.0) / 2.0;
    h(1, 0) = h(0, 1);
    return h;
}

}  // namespace ctqa
