#include "rabigeom/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rabigeom/errors.hpp"

namespace rabigeom {

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
    if (dim == 0) throw InvalidMatrix("dimension must be at least 1");
}

SymMatrix SymMatrix::from_dense(std::size_t dim, std::span<const double> row_major) {
    if (row_major.size() != dim * dim) {
        throw InvalidMatrix("expected " + std::to_string(dim * dim) + " entries, got " +
                            std::to_string(row_major.size()));
    }
    SymMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            if (row_major[i * dim + j] != row_major[j * dim + i]) {
                throw InvalidMatrix("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") differs from its transpose");
            }
        }
    }
    std::copy(row_major.begin(), row_major.end(), m.data_.begin());
    return m;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) noexcept {
    data_[i * dim_ + j] = value;
    data_[j * dim_ + i] = value;
}

void SymMatrix::add(std::size_t i, std::size_t j, double value) noexcept {
    data_[i * dim_ + j] += value;
    if (i != j) data_[j * dim_ + i] += value;
}

double SymMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

SymMatrix SymMatrix::restrict_to(std::span<const std::size_t> indices) const {
    SymMatrix sub(indices.size());
    for (std::size_t a = 0; a < indices.size(); ++a) {
        for (std::size_t b = a; b < indices.size(); ++b) {
            sub.set(a, b, (*this)(indices[a], indices[b]));
        }
    }
    return sub;
}

namespace {

// One Jacobi rotation zeroing a(p,q). `a` is symmetric and stored row-major,
// so row p doubles as column p; rows are rotated then mirrored into columns.
void rotate(std::vector<double>& a, std::vector<double>& v, std::size_t n, std::size_t p,
            std::size_t q) {
    const double apq = a[p * n + q];
    const double app = a[p * n + p];
    const double aqq = a[q * n + q];
    const double theta = (aqq - app) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    double* rp = a.data() + p * n;
    double* rq = a.data() + q * n;
    for (std::size_t k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        const double akp = rp[k];
        const double akq = rq[k];
        rp[k] = c * akp - s * akq;
        rq[k] = s * akp + c * akq;
        a[k * n + p] = rp[k];
        a[k * n + q] = rq[k];
    }
    rp[p] = app - t * apq;
    rq[q] = aqq + t * apq;
    rp[q] = 0.0;
    rq[p] = 0.0;

    double* vp = v.data() + p * n;
    double* vq = v.data() + q * n;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = vp[k];
        const double y = vq[k];
        vp[k] = c * x - s * y;
        vq[k] = s * x + c * y;
    }
}

}  // namespace

EigenDecomposition eigh(const SymMatrix& matrix) {
    const std::size_t n = matrix.dim();
    for (double x : matrix.data()) {
        if (!std::isfinite(x)) throw InvalidMatrix("non-finite entry");
    }

    std::vector<double> a(matrix.data().begin(), matrix.data().end());
    // v holds eigenvector j in row j (contiguous), i.e. the transpose of V.
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a[p * n + q]);
        }
        if (off == 0.0) break;

        // Rutishauser's threshold for the first three sweeps.
        const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                const double guard = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(a[p * n + p]) + guard == std::abs(a[p * n + p]) &&
                    std::abs(a[q * n + q]) + guard == std::abs(a[q * n + q])) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                } else if (std::abs(apq) > threshold && apq != 0.0) {
                    rotate(a, v, n, p, q);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a[src * n + src];
        double* dst = out.vectors.data() + j * n;
        std::copy_n(v.data() + src * n, n, dst);
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(dst[k]) > 1e-12) {
                if (dst[k] < 0.0) {
                    for (std::size_t m = 0; m < n; ++m) dst[m] = -dst[m];
                }
                break;
            }
        }
    }
    return out;
}

CVector propagate(const EigenDecomposition& decomp, std::span<const cplx> state, double t) {
    const std::size_t n = decomp.dim();
    if (state.size() != n) {
        throw DimensionError("state has " + std::to_string(state.size()) +
                             " components, spectrum has " + std::to_string(n));
    }
    CVector out(n, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) {
        const auto vj = decomp.vector(j);
        cplx overlap{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) overlap += vj[k] * state[k];
        const cplx amp = std::polar(1.0, -decomp.values[j] * t) * overlap;
        for (std::size_t k = 0; k < n; ++k) out[k] += amp * vj[k];
    }
    return out;
}

CVector propagate(const EigenDecomposition& decomp, std::span<const double> state, double t) {
    const CVector c(state.begin(), state.end());
    return propagate(decomp, c, t);
}

double trapezoid_integral(std::span<const double> x, std::span<const double> f) {
    if (x.size() != f.size()) throw InvalidGrid("abscissa and ordinate sizes differ");
    if (x.size() < 2) throw InvalidGrid("need at least two samples");
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double h = x[i] - x[i - 1];
        if (!(h > 0.0)) throw InvalidGrid("abscissae must be strictly increasing");
        sum += 0.5 * h * (f[i] + f[i - 1]);
    }
    return sum;
}

std::vector<double> linspace(double start, double stop, std::size_t n) {
    std::vector<double> x(n);
    if (n == 1) {
        x[0] = start;
        return x;
    }
    const double step = (stop - start) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) x[i] = start + step * static_cast<double>(i);
    x[n - 1] = stop;
    return x;
}

double norm(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace rabigeom
