#pragma once

#include <functional>
#include <string>
#include <vector>

#include "perispec/assembly.hpp"
#include "perispec/geometry.hpp"
#include "perispec/types.hpp"

namespace perispec {

// Dyadic plateau window: rises over width d past 2^j, falls before
// 2^{j+1}; C^2 quintic ramp, so two derivatives enter the discrete
// commutator.
struct PlateauSpec {
    int j = 2;
    double d = 1.0;
};

// chi(t): 0 for t <= 0, 1 for t >= d, monotone quintic in between.
double smoothstep_ramp(double t, double d);

// chi_j(t) = chi(t - 2^j) * chi(2^{j+1} - t)
double plateau_1d(const PlateauSpec& spec, double t);

// X_j(x) = chi_j(x1) chi_j(x2)
double plateau_2d(const PlateauSpec& spec, double x1, double x2);

enum class WeylKind { bloch, floquet };

// M-normalized localized wave plus its pre-normalization mass norm.
struct WeylElement {
    VecC u;
    double norm_m = 0.0;  // ||windowed tile||_M before normalization
};

struct WeylScale {
    int j = 0;
    double norm_m_sq = 0.0;  // squared mass norm of the windowed tile
    double residual = 0.0;   // ||K u - lambda M u|| with u M-normalized
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;  // 1-sigma half-width
};

struct WeylRun {
    WeylKind kind = WeylKind::bloch;
    double lambda = 0.0;
    std::vector<WeylScale> scales;
    SlopeFit residual_fit;  // log2 residual vs j
    SlopeFit norm_fit;      // log2 norm^2 vs j
};

// Tiles a cell eigenvector over the plane with per-cell phase
// e^{i eta . alpha}, windows it with X_j, and M-normalizes. The box
// sits at [2^j, 2^{j+1}]^2, clear of the waveguide semi-strip.
WeylElement build_bloch_weyl_element(const PlaneMesh& mesh, const AssembledPair& plane,
                                     const AssembledPair& cell, const VecC& cell_vec,
                                     const BlochMomentum& eta, const PlateauSpec& spec);

// Tiles a truncated-strip eigenvector along x1 with phase e^{i zeta a1},
// windowed by chi_j(x1) chi(x2 + 2^{j+1}) chi(2^{j+1} - x2). Strip data
// beyond the truncation extent continues by zero.
WeylElement build_floquet_weyl_element(const PlaneMesh& mesh, const AssembledPair& plane,
                                       const StripMesh& strip_mesh, const AssembledPair& strip,
                                       const VecC& strip_vec, double zeta,
                                       const PlateauSpec& spec);

// Residual decay study over scales j in [j_min, j_max]; matvec only.
WeylRun residual_decay(const AssembledPair& plane, double lambda, int j_min, int j_max,
                       WeylKind kind, const std::function<WeylElement(int)>& make_element);

// Least-squares line with 1-sigma slope error.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace perispec
