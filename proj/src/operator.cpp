#include "perispec/operator.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

namespace perispec {

OperatorSymbol scalar_symbol() {
    OperatorSymbol sym;
    sym.kind = SymbolKind::scalar;
    sym.n = 1;
    sym.m = 2;
    sym.d1 = MatC::Zero(2, 1);
    sym.d2 = MatC::Zero(2, 1);
    sym.d1(0, 0) = 1.0;
    sym.d2(1, 0) = 1.0;
    return sym;
}

OperatorSymbol elasticity_symbol() {
    OperatorSymbol sym;
    sym.kind = SymbolKind::elasticity;
    sym.n = 2;
    sym.m = 3;
    sym.d1 = MatC::Zero(3, 2);
    sym.d2 = MatC::Zero(3, 2);
    const double s = 1.0 / std::sqrt(2.0);
    sym.d1(0, 0) = 1.0;
    sym.d1(2, 1) = s;
    sym.d2(1, 1) = 1.0;
    sym.d2(2, 0) = s;
    return sym;
}

CoefficientField identity_field(int m) {
    CoefficientField f;
    f.background_a = MatC::Identity(m, m);
    f.background_rho = 1.0;
    return f;
}

double hermitian_deviation(const MatC& a) {
    return (a - a.adjoint().eval()).cwiseAbs().maxCoeff();
}

MatC hermitize(const MatC& a) { return 0.5 * (a + a.adjoint().eval()); }

bool is_positive_definite(const MatC& a) {
    Eigen::LLT<MatC> llt(a);
    return llt.info() == Eigen::Success;
}

namespace {

Eigen::Vector2d wrap_unit(const Eigen::Vector2d& p) {
    return {p.x() - std::floor(p.x()), p.y() - std::floor(p.y())};
}

void apply_overrides(MatC& a, const std::vector<MatrixOverride>& overrides,
                     const Eigen::Vector2d& p, bool add) {
    for (const auto& ov : overrides) {
        if (shape_contains(ov.region, p)) {
            if (add)
                a += ov.a;
            else
                a = ov.a;
        }
    }
}

}  // namespace

std::pair<MatC, double> sample_coefficients(const CoefficientField& field, Region region,
                                            const Eigen::Vector2d& point, int column_a1) {
    Eigen::Vector2d cell_pt = wrap_unit(point);
    MatC a = field.background_a;
    apply_overrides(a, field.a_overrides, cell_pt, /*add=*/false);

    double rho = field.background_rho;
    for (const auto& ov : field.rho_overrides)
        if (shape_contains(ov.region, cell_pt)) rho = ov.rho;

    if (region == Region::waveguide) {
        // point lives in Q1h; A = A0 + A1 there
        const std::vector<MatrixOverride>* patch = &field.patch_overrides;
        if (column_a1 >= 0 && column_a1 < static_cast<int>(field.transition.size()))
            patch = &field.transition[column_a1];
        apply_overrides(a, *patch, point, /*add=*/true);
    }

    if (!(rho > 0.0)) {
        std::ostringstream os;
        os << "density not positive at (" << point.x() << ", " << point.y() << ")";
        throw ConfigError(os.str());
    }
    if (!is_positive_definite(a)) {
        std::ostringstream os;
        os << "coefficient matrix not positive definite at (" << point.x() << ", " << point.y()
           << ")";
        throw ConfigError(os.str());
    }
    return {std::move(a), rho};
}

}  // namespace perispec
