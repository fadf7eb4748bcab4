// numerics.hpp - dense real-symmetric eigensolver, quadrature and propagation

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rabigeom {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Dense real symmetric matrix. Writes through set() keep both triangles equal.
class SymMatrix {
public:
    explicit SymMatrix(std::size_t dim);

    /// Takes a row-major dense matrix; throws InvalidMatrix unless it is exactly symmetric.
    static SymMatrix from_dense(std::size_t dim, std::span<const double> row_major);

    std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
    void set(std::size_t i, std::size_t j, double value) noexcept;
    void add(std::size_t i, std::size_t j, double value) noexcept;

    /// Largest absolute entry.
    double max_abs() const noexcept;
    std::span<const double> data() const noexcept { return data_; }

    /// Principal submatrix on the given indices (in that order).
    SymMatrix restrict_to(std::span<const std::size_t> indices) const;

private:
    std::size_t dim_;
    std::vector<double> data_;
};

/// Eigenvalues ascending; eigenvector j is stored contiguously.
struct EigenDecomposition {
    std::vector<double> values;
    std::vector<double> vectors;

    std::size_t dim() const noexcept { return values.size(); }
    std::span<const double> vector(std::size_t j) const noexcept {
        return {vectors.data() + j * dim(), dim()};
    }
};

/// Full spectrum of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back in ascending order (stable for exact ties). Each
/// eigenvector is sign-fixed so that its first component with magnitude
/// above 1e-12 is positive. Throws InvalidMatrix on non-finite entries.
EigenDecomposition eigh(const SymMatrix& matrix);

/// Evolves `state` for time t under the Hamiltonian whose spectrum is `decomp`:
/// sum_j exp(-i E_j t) v_j (v_j . state). Throws DimensionError on size mismatch.
CVector propagate(const EigenDecomposition& decomp, std::span<const cplx> state, double t);
CVector propagate(const EigenDecomposition& decomp, std::span<const double> state, double t);

/// Composite trapezoid rule over strictly increasing abscissae.
double trapezoid_integral(std::span<const double> x, std::span<const double> f);

/// n points spanning [start, stop] inclusive.
std::vector<double> linspace(double start, double stop, std::size_t n);

double norm(std::span<const cplx> v);
double norm(std::span<const double> v);

}  // namespace rabigeom
