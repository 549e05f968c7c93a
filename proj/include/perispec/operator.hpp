#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "perispec/geometry.hpp"
#include "perispec/types.hpp"

namespace perispec {

enum class SymbolKind { scalar, elasticity };

// First-order symbol D(xi) = D1*xi1 + D2*xi2 of the divergence-form
// system; m form components acting on n solution components.
struct OperatorSymbol {
    SymbolKind kind = SymbolKind::scalar;
    int n = 1;
    int m = 2;
    MatC d1;  // m x n
    MatC d2;  // m x n

    MatC at(Complex xi1, Complex xi2) const { return d1 * xi1 + d2 * xi2; }
};

// Gradient symbol: D(xi) = (xi1, xi2)^T on one component.
OperatorSymbol scalar_symbol();

// Plane-strain elasticity with the 2^{-1/2} shear normalization:
// D(xi)^T = [xi1, 0, 2^{-1/2} xi2; 0, xi2, 2^{-1/2} xi1].
OperatorSymbol elasticity_symbol();

enum class HoleBC { neumann, dirichlet };

enum class Region { background, waveguide };

struct MatrixOverride {
    Shape region;
    MatC a;  // m x m Hermitian
};

struct DensityOverride {
    Shape region;
    double rho = 1.0;
};

// Piecewise-constant coefficients: an m x m Hermitian default with
// shape-scoped overrides in the unit cell (background A0, density rho)
// and in Q1h (waveguide patch A1, zero by default outside overrides).
// transition[a1] optionally replaces the A1 overrides in waveguide
// column a1 < transition_R before the patch turns 1-periodic.
struct CoefficientField {
    MatC background_a;  // m x m
    double background_rho = 1.0;
    std::vector<MatrixOverride> a_overrides;
    std::vector<DensityOverride> rho_overrides;
    std::vector<MatrixOverride> patch_overrides;
    std::vector<std::vector<MatrixOverride>> transition;
    HoleBC hole_bc = HoleBC::neumann;

    int m() const { return static_cast<int>(background_a.rows()); }
};

CoefficientField identity_field(int m);

// Samples (A, rho) at a point; background points are taken modulo the
// unit cell, waveguide points live in Q1h and receive A0 + A1.
// column_a1 selects the transition override list when 0 <= column_a1 <
// transition.size(); pass -1 for the periodic regime.
// Throws ConfigError when the sampled matrix is not positive definite.
std::pair<MatC, double> sample_coefficients(const CoefficientField& field, Region region,
                                            const Eigen::Vector2d& point, int column_a1 = -1);

// Largest Hermiticity deviation max|A - A^H| of a raw input matrix.
double hermitian_deviation(const MatC& a);

// (A + A^H)/2
MatC hermitize(const MatC& a);

bool is_positive_definite(const MatC& a);

}  // namespace perispec
