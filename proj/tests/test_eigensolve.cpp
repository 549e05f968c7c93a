#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "perispec/assembly.hpp"
#include "perispec/eigensolve.hpp"

using namespace perispec;

namespace {

// analytic oracle for the free Laplacian cell problem: the k lowest of
// { |eta + 2 pi alpha|^2 : |alpha|_inf <= 3 }
std::vector<double> fourier_oracle(double e1, double e2, int count) {
    std::vector<double> vals;
    for (int a1 = -3; a1 <= 3; ++a1)
        for (int a2 = -3; a2 <= 3; ++a2) {
            double k1 = e1 + two_pi * a1;
            double k2 = e2 + two_pi * a2;
            vals.push_back(k1 * k1 + k2 * k2);
        }
    std::sort(vals.begin(), vals.end());
    vals.resize(count);
    return vals;
}

AssembledPair free_cell_pair(int n, double e1, double e2) {
    UnitCellGeometry g;
    auto mesh = rasterize_cell(g, n);
    return assemble_cell_pair(mesh, scalar_symbol(), identity_field(2), BlochMomentum(e1, e2));
}

}  // namespace

TEST_CASE("diagonal pencil is solved exactly") {
    AssembledPair pair;
    pair.K.resize(3, 3);
    pair.M.resize(3, 3);
    std::vector<TripletC> kt{{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}};
    std::vector<TripletC> mt{{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}};
    pair.K.setFromTriplets(kt.begin(), kt.end());
    pair.M.setFromTriplets(mt.begin(), mt.end());

    auto res = lowest_eigenpairs(pair, 3);
    CHECK(res.values[0] == doctest::Approx(1.0));
    CHECK(res.values[1] == doctest::Approx(2.0));
    CHECK(res.values[2] == doctest::Approx(3.0));
}

TEST_CASE("free cell at the origin: zero mode plus fourfold 4pi^2") {
    auto pair = free_cell_pair(16, 0.0, 0.0);
    auto res = lowest_eigenpairs(pair, 5);
    CHECK(res.values[0] <= 1e-10);
    for (int k = 1; k < 5; ++k)
        CHECK(std::abs(res.values[k] - 4 * M_PI * M_PI) <= 0.02 * 4 * M_PI * M_PI);
    // ascending order
    for (int k = 1; k < 5; ++k) CHECK(res.values[k] >= res.values[k - 1]);
    // M-orthonormal within contract
    MatC gram = res.vectors.adjoint() * pair.M * res.vectors;
    CHECK((gram - MatC::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
    // residual contract
    for (int k = 0; k < 5; ++k)
        CHECK(res.residuals[k] <= 1e-8 * std::max(1.0, res.values[k]));
}

TEST_CASE("free cell at (pi,pi): fourfold 2pi^2 and analytic span") {
    auto pair = free_cell_pair(16, M_PI, M_PI);
    auto res = lowest_eigenpairs(pair, 4);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(res.values[k] - 2 * M_PI * M_PI) <= 0.02 * 2 * M_PI * M_PI);

    // the discrete eigenspace is spanned by the four plane waves with
    // frequencies (+-pi, +-pi); compare M-orthogonal projectors
    int n = 16;
    MatC waves(pair.dim(), 4);
    int col = 0;
    for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) {
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < n; ++ix) {
                    int dof = pair.dofs.dof_of(ix, iy, 0);
                    double phase = s1 * M_PI * ix / n + s2 * M_PI * iy / n;
                    waves(dof, col) = std::polar(1.0, phase);
                }
            ++col;
        }
    }
    // M-orthonormalize the analytic set (Gram-Schmidt)
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < j; ++i) {
            Complex c = (waves.col(i).adjoint() * pair.M * waves.col(j))(0);
            waves.col(j) -= c * waves.col(i);
        }
        double nn = std::sqrt(
            std::real((waves.col(j).adjoint() * pair.M * waves.col(j))(0)));
        waves.col(j) /= nn;
    }
    MatC cross = waves.adjoint() * pair.M * res.vectors;
    Eigen::JacobiSVD<MatC> svd(cross);
    CHECK(svd.singularValues().minCoeff() > 0.95);
}

TEST_CASE("fourier oracle across generic momenta") {
    for (auto [e1, e2] : std::vector<std::pair<double, double>>{
             {0.7, 0.3}, {M_PI, 0.0}, {2.0, 5.0}}) {
        auto pair = free_cell_pair(16, e1, e2);
        auto res = lowest_eigenpairs(pair, 5);
        auto oracle = fourier_oracle(e1, e2, 5);
        for (int k = 0; k < 5; ++k) {
            double denom = std::max(1.0, oracle[k]);
            CHECK(std::abs(res.values[k] - oracle[k]) / denom <= 0.02);
        }
    }
}

TEST_CASE("elasticity translations span the kernel at the origin") {
    UnitCellGeometry g;
    auto mesh = rasterize_cell(g, 8);
    auto pair = assemble_cell_pair(mesh, elasticity_symbol(), identity_field(3),
                                   BlochMomentum(0.0, 0.0));
    auto res = lowest_eigenpairs(pair, 3);
    CHECK(res.values[0] <= 1e-10);
    CHECK(res.values[1] <= 1e-10);
    CHECK(res.values[2] > 1e-6);  // kernel dimension exactly two
}

TEST_CASE("dense and lanczos backends agree to 1e-8") {
    // generic momentum (simple spectrum) and a degenerate one
    for (auto [e1, e2] : std::vector<std::pair<double, double>>{{0.7, 0.3}, {M_PI, M_PI}}) {
        auto pair = free_cell_pair(20, e1, e2);  // dim 400
        EigenOptions dense;
        auto rd = lowest_eigenpairs(pair, 6, dense);
        EigenOptions iter;
        iter.dense_threshold = 0;
        auto ri = lowest_eigenpairs(pair, 6, iter);
        CHECK(ri.method == "shift-invert-lanczos");
        for (int k = 0; k < 6; ++k) {
            CHECK(std::abs(rd.values[k] - ri.values[k]) <=
                  1e-8 * std::max(1.0, std::abs(rd.values[k])));
        }
    }
}

TEST_CASE("solves are deterministic") {
    auto pair = free_cell_pair(12, 1.0, 2.0);
    EigenOptions iter;
    iter.dense_threshold = 0;
    auto a = lowest_eigenpairs(pair, 4, iter);
    auto b = lowest_eigenpairs(pair, 4, iter);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("residual_norm contract") {
    auto pair = free_cell_pair(8, 0.5, 0.5);
    auto res = lowest_eigenpairs(pair, 2);
    CHECK(residual_norm(pair, res.values[0], res.vectors.col(0)) <= 1e-8);

    VecC v = VecC::Random(pair.dim());
    double r = residual_norm(pair, res.values[0], v);
    CHECK(r > 1e-6);
    // exact homogeneity under power-of-two scaling
    CHECK(residual_norm(pair, res.values[0], (2.0 * v).eval()) == r);
    // phase invariance at rounding level
    VecC w = std::polar(1.0, 0.7) * v;
    CHECK(residual_norm(pair, res.values[0], w) == doctest::Approx(r).epsilon(1e-12));

    VecC zero = VecC::Zero(pair.dim());
    CHECK_THROWS_AS(residual_norm(pair, 1.0, zero), SolverError);
}

TEST_CASE("error paths: count bounds and non-convergence report") {
    auto pair = free_cell_pair(8, 0.0, 0.0);
    CHECK_THROWS_AS(lowest_eigenpairs(pair, pair.dim() + 1), SolverError);
    CHECK_THROWS_AS(lowest_eigenpairs(pair, 0), SolverError);

    EigenOptions impossible;
    impossible.dense_threshold = 0;
    impossible.tol = 1e-300;
    impossible.max_attempts = 1;
    try {
        lowest_eigenpairs(pair, 3, impossible);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("achieved residuals") != std::string::npos);
    }
}
