#include "perispec/weyl.hpp"

#include <cmath>
#include <sstream>

namespace perispec {

double smoothstep_ramp(double t, double d) {
    if (t <= 0.0) return 0.0;
    if (t >= d) return 1.0;
    double s = t / d;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double plateau_1d(const PlateauSpec& spec, double t) {
    double lo = std::ldexp(1.0, spec.j);      // 2^j
    double hi = std::ldexp(1.0, spec.j + 1);  // 2^{j+1}
    return smoothstep_ramp(t - lo, spec.d) * smoothstep_ramp(hi - t, spec.d);
}

double plateau_2d(const PlateauSpec& spec, double x1, double x2) {
    return plateau_1d(spec, x1) * plateau_1d(spec, x2);
}

namespace {

double m_norm(const SpMatC& m, const VecC& v) {
    Complex q = v.dot(m * v);
    return std::sqrt(std::max(0.0, q.real()));
}

}  // namespace

WeylElement build_bloch_weyl_element(const PlaneMesh& mesh, const AssembledPair& plane,
                                     const AssembledPair& cell, const VecC& cell_vec,
                                     const BlochMomentum& eta, const PlateauSpec& spec) {
    const int n = mesh.n;
    const double lo = std::ldexp(1.0, spec.j);
    const double hi = std::ldexp(1.0, spec.j + 1);
    if (hi >= mesh.L)
        throw ValidationError("bloch weyl element: support box reaches the mesh edge");
    if (lo <= mesh.h)
        throw ValidationError("bloch weyl element: support box touches the waveguide strip");
    if (cell.meta.n != n)
        throw ValidationError("bloch weyl element: cell and plane subdivisions differ");

    const int ncomp = plane.dofs.ncomp;
    VecC v = VecC::Zero(plane.dofs.num_dofs);
    for (int iy = 0; iy <= mesh.ny(); ++iy) {
        double y = -mesh.L + static_cast<double>(iy) / n;
        if (y < lo || y > hi) continue;
        for (int ix = 0; ix <= mesh.nx(); ++ix) {
            double x = -mesh.L + static_cast<double>(ix) / n;
            if (x < lo || x > hi) continue;
            double w = plateau_2d(spec, x, y);
            if (w == 0.0) continue;
            int a1 = ix / n - mesh.L;
            int a2 = iy / n - mesh.L;
            int lx = ix % n, ly = iy % n;
            Complex tile_phase = std::polar(1.0, eta.eta1 * a1 + eta.eta2 * a2);
            for (int c = 0; c < ncomp; ++c) {
                int pd = plane.dofs.dof_of(ix, iy, c);
                int cd = cell.dofs.dof_of(lx, ly, c);
                if (pd < 0 || cd < 0) continue;
                Complex cval = cell.dofs.node_phase[cell.dofs.node_index(lx, ly)] * cell_vec[cd];
                v[pd] = w * tile_phase * cval;
            }
        }
    }

    WeylElement el;
    el.norm_m = m_norm(plane.M, v);
    if (el.norm_m <= 0.0) throw SolverError("bloch weyl element: window annihilated the tile");
    el.u = v / el.norm_m;
    return el;
}

WeylElement build_floquet_weyl_element(const PlaneMesh& mesh, const AssembledPair& plane,
                                       const StripMesh& strip_mesh, const AssembledPair& strip,
                                       const VecC& strip_vec, double zeta,
                                       const PlateauSpec& spec) {
    const int n = mesh.n;
    const double lo = std::ldexp(1.0, spec.j);
    const double hi = std::ldexp(1.0, spec.j + 1);
    if (hi >= mesh.L)
        throw ValidationError("floquet weyl element: support box reaches the mesh edge");
    if (lo <= mesh.transition_R)
        throw ValidationError("floquet weyl element: support box inside the transition zone");
    if (strip_mesh.n != n)
        throw ValidationError("floquet weyl element: strip and plane subdivisions differ");
    if (strip_mesh.h != mesh.h)
        throw ValidationError("floquet weyl element: strip and plane waveguide widths differ");

    const int ncomp = plane.dofs.ncomp;
    const int T = strip_mesh.T;
    double zred = BlochMomentum::reduce(zeta);
    VecC v = VecC::Zero(plane.dofs.num_dofs);
    for (int iy = 0; iy <= mesh.ny(); ++iy) {
        double y = -mesh.L + static_cast<double>(iy) / n;
        if (y < -hi || y > hi) continue;
        double wy = smoothstep_ramp(y + hi, spec.d) * smoothstep_ramp(hi - y, spec.d);
        if (wy == 0.0) continue;
        int iy_s = iy - (mesh.L - T) * n;
        if (iy_s < 0 || iy_s > 2 * T * n) continue;  // beyond truncation: zero extension
        for (int ix = 0; ix <= mesh.nx(); ++ix) {
            double x = -mesh.L + static_cast<double>(ix) / n;
            if (x < lo || x > hi) continue;
            double w = plateau_1d(spec, x) * wy;
            if (w == 0.0) continue;
            int a1 = ix / n - mesh.L;
            int lx = ix % n;
            Complex tile_phase = std::polar(1.0, zred * a1);
            for (int c = 0; c < ncomp; ++c) {
                int pd = plane.dofs.dof_of(ix, iy, c);
                int sd = strip.dofs.dof_of(lx, iy_s, c);
                if (pd < 0 || sd < 0) continue;
                Complex sval =
                    strip.dofs.node_phase[strip.dofs.node_index(lx, iy_s)] * strip_vec[sd];
                v[pd] = w * tile_phase * sval;
            }
        }
    }

    WeylElement el;
    el.norm_m = m_norm(plane.M, v);
    if (el.norm_m <= 0.0) throw SolverError("floquet weyl element: window annihilated the tile");
    el.u = v / el.norm_m;
    return el;
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    SlopeFit fit;
    size_t m = x.size();
    if (m < 2 || y.size() != m) throw ValidationError("fit_line: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    if (m > 2) {
        double ss = 0.0;
        for (size_t i = 0; i < m; ++i) {
            double e = y[i] - (fit.intercept + fit.slope * x[i]);
            ss += e * e;
        }
        double var = ss / (m - 2);
        fit.stderr_slope = std::sqrt(var * m / denom);
    }
    return fit;
}

WeylRun residual_decay(const AssembledPair& plane, double lambda, int j_min, int j_max,
                       WeylKind kind, const std::function<WeylElement(int)>& make_element) {
    if (j_max - j_min + 1 < 3)
        throw ValidationError("residual decay: need at least three scales");

    WeylRun run;
    run.kind = kind;
    run.lambda = lambda;

    std::vector<double> js, logr, logn;
    for (int j = j_min; j <= j_max; ++j) {
        WeylElement el = make_element(j);
        VecC r = plane.K * el.u - lambda * (plane.M * el.u);
        WeylScale sc;
        sc.j = j;
        sc.norm_m_sq = el.norm_m * el.norm_m;
        sc.residual = r.norm();
        run.scales.push_back(sc);
        js.push_back(j);
        logr.push_back(std::log2(std::max(sc.residual, 1e-300)));
        logn.push_back(std::log2(std::max(sc.norm_m_sq, 1e-300)));
    }
    run.residual_fit = fit_line(js, logr);
    run.norm_fit = fit_line(js, logn);
    return run;
}

}  // namespace perispec
