#include "perispec/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace perispec {

double BlochMomentum::reduce(double x) {
    double r = std::fmod(x, two_pi);
    if (r < 0) r += two_pi;
    if (r >= two_pi || two_pi - r < 1e-9) r = 0.0;
    return r;
}

namespace {

// Values of the four bilinear basis functions and their reference
// gradients at the 2x2 Gauss points of the unit square. Local corner
// order: (0,0), (1,0), (0,1), (1,1).
struct QuadratureTables {
    double phi[4][4];
    double ds[4][4];
    double dt[4][4];
    QuadratureTables() {
        const double g0 = 0.5 - 0.5 / std::sqrt(3.0);
        const double g1 = 0.5 + 0.5 / std::sqrt(3.0);
        const double pts[2] = {g0, g1};
        int q = 0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b, ++q) {
                double s = pts[a], t = pts[b];
                phi[q][0] = (1 - s) * (1 - t);
                phi[q][1] = s * (1 - t);
                phi[q][2] = (1 - s) * t;
                phi[q][3] = s * t;
                ds[q][0] = -(1 - t);
                ds[q][1] = (1 - t);
                ds[q][2] = -t;
                ds[q][3] = t;
                dt[q][0] = -(1 - s);
                dt[q][1] = -s;
                dt[q][2] = (1 - s);
                dt[q][3] = s;
            }
        }
    }
};

const QuadratureTables& tables() {
    static const QuadratureTables tab;
    return tab;
}

// Element pair for constant (A, rho) on a square of size h = 1/n.
// Gradient scalings cancel in 2D, so K is h-independent; M scales h^2.
struct ElementMatrices {
    MatC k;
    MatC m;
};

ElementMatrices compute_element(const OperatorSymbol& sym, const MatC& a, double rho,
                                double h_elem) {
    const auto& tab = tables();
    const int nc = sym.n;
    const int dim = 4 * nc;
    MatC ke = MatC::Zero(dim, dim);
    MatR me_scalar = MatR::Zero(4, 4);
    MatC g(sym.m, dim);
    for (int q = 0; q < 4; ++q) {
        for (int j = 0; j < 4; ++j) {
            for (int b = 0; b < nc; ++b)
                g.col(j * nc + b) = sym.d1.col(b) * tab.ds[q][j] + sym.d2.col(b) * tab.dt[q][j];
        }
        ke.noalias() += 0.25 * (g.adjoint() * a * g);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) me_scalar(i, j) += 0.25 * tab.phi[q][i] * tab.phi[q][j];
    }
    ke = 0.5 * (ke + ke.adjoint()).eval();

    MatC me = MatC::Zero(dim, dim);
    double mscale = rho * h_elem * h_elem;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int c = 0; c < nc; ++c) me(i * nc + c, j * nc + c) = mscale * me_scalar(i, j);
    return {std::move(ke), std::move(me)};
}

// Piecewise-constant fields repeat a handful of coefficient values, so
// element matrices are memoized on the sampled (A, rho).
class ElementCache {
public:
    ElementCache(const OperatorSymbol& sym, double h_elem) : sym_(sym), h_(h_elem) {}

    const ElementMatrices& get(const MatC& a, double rho) {
        for (const auto& e : entries_) {
            if (e.rho == rho && e.a.rows() == a.rows() && (e.a.array() == a.array()).all())
                return e.mats;
        }
        entries_.push_back({a, rho, compute_element(sym_, a, rho, h_)});
        return entries_.back().mats;
    }

private:
    struct Entry {
        MatC a;
        double rho;
        ElementMatrices mats;
    };
    const OperatorSymbol& sym_;
    double h_;
    std::vector<Entry> entries_;
};

struct NodeRef {
    int32_t dof;  // base dof or -1
    Complex phase;
};

// Exactly Hermitian accumulation: every off-diagonal push is paired
// with its conjugate, diagonal pushes are real.
class HermitianAccumulator {
public:
    explicit HermitianAccumulator(size_t reserve_hint) { trips_.reserve(reserve_hint); }

    void add_upper(int r, int c, Complex w) {
        if (r == c) {
            trips_.emplace_back(r, c, Complex(w.real(), 0.0));
        } else {
            trips_.emplace_back(r, c, w);
            trips_.emplace_back(c, r, std::conj(w));
        }
    }
    void add_diag_pair(int r, Complex w) {
        // (p,q) and (q,p) landing on the same dof: w + conj(w)
        trips_.emplace_back(r, r, Complex(2.0 * w.real(), 0.0));
    }

    SpMatC build(int dim) {
        SpMatC mat(dim, dim);
        mat.setFromTriplets(trips_.begin(), trips_.end());
        trips_.clear();
        trips_.shrink_to_fit();
        return mat;
    }

private:
    std::vector<TripletC> trips_;
};

// Scatters the element pair into the accumulators through the dof map.
void scatter_element(const ElementMatrices& em, const NodeRef corners[4], int ncomp,
                     HermitianAccumulator& ka, HermitianAccumulator& ma) {
    const int dim = 4 * ncomp;
    for (int p = 0; p < dim; ++p) {
        int np = p / ncomp, cp = p % ncomp;
        if (corners[np].dof < 0) continue;
        int r = corners[np].dof + cp;
        Complex php = corners[np].phase;
        for (int q = p; q < dim; ++q) {
            int nq = q / ncomp, cq = q % ncomp;
            if (corners[nq].dof < 0) continue;
            int c = corners[nq].dof + cq;
            Complex fac = std::conj(php) * corners[nq].phase;
            Complex wk = em.k(p, q) * fac;
            Complex wm = em.m(p, q) * fac;
            if (r == c && p != q) {
                ka.add_diag_pair(r, wk);
                ma.add_diag_pair(r, wm);
            } else {
                ka.add_upper(r, c, wk);
                ma.add_upper(r, c, wm);
            }
        }
    }
}

struct MeshTopology {
    int nx = 0, ny = 0;  // element grid
    bool wrap_x = false, wrap_y = false;
    bool cap_dirichlet_y = false;  // y extremes eliminated when not wrapped
};

// Activity/elimination rules shared by the three domains. adjacency
// wraps across identified edges so hole detection is seamless.
DofMap build_dof_map(const MeshTopology& topo, const std::vector<uint8_t>& active, int ncomp,
                     HoleBC hole_bc, double eta1, double eta2) {
    DofMap dm;
    dm.ncomp = ncomp;
    dm.nnx = topo.nx + 1;
    dm.nny = topo.ny + 1;
    size_t nnodes = static_cast<size_t>(dm.nnx) * dm.nny;
    dm.node_dof.assign(nnodes, -1);
    dm.node_phase.assign(nnodes, Complex(0.0, 0.0));

    auto elem_active = [&](int ex, int ey) -> bool {
        if (topo.wrap_x) ex = (ex % topo.nx + topo.nx) % topo.nx;
        if (topo.wrap_y) ey = (ey % topo.ny + topo.ny) % topo.ny;
        if (ex < 0 || ex >= topo.nx || ey < 0 || ey >= topo.ny) return false;
        return active[ex + static_cast<size_t>(topo.nx) * ey] != 0;
    };
    auto elem_exists = [&](int ex, int ey) -> bool {
        if (topo.wrap_x) ex = (ex % topo.nx + topo.nx) % topo.nx;
        if (topo.wrap_y) ey = (ey % topo.ny + topo.ny) % topo.ny;
        return ex >= 0 && ex < topo.nx && ey >= 0 && ey < topo.ny;
    };

    const Complex ph1 = std::polar(1.0, eta1);
    const Complex ph2 = std::polar(1.0, eta2);

    int next_dof = 0;
    for (int iy = 0; iy < dm.nny; ++iy) {
        for (int ix = 0; ix < dm.nnx; ++ix) {
            bool slave_x = topo.wrap_x && ix == topo.nx;
            bool slave_y = topo.wrap_y && iy == topo.ny;
            if (slave_x || slave_y) continue;  // handled after masters

            bool any_active = false, any_inactive_neighbor = false;
            for (int dy = -1; dy <= 0; ++dy) {
                for (int dx = -1; dx <= 0; ++dx) {
                    int ex = ix + dx, ey = iy + dy;
                    if (!elem_exists(ex, ey)) continue;
                    if (elem_active(ex, ey))
                        any_active = true;
                    else
                        any_inactive_neighbor = true;
                }
            }
            if (!any_active) continue;  // node floats inside a hole
            if (hole_bc == HoleBC::dirichlet && any_inactive_neighbor) continue;
            if (!topo.wrap_y && topo.cap_dirichlet_y && (iy == 0 || iy == topo.ny)) continue;

            size_t idx = dm.node_index(ix, iy);
            dm.node_dof[idx] = next_dof;
            dm.node_phase[idx] = Complex(1.0, 0.0);
            next_dof += ncomp;
        }
    }

    // wrapped copies inherit the master dof with the boundary phase
    for (int iy = 0; iy < dm.nny; ++iy) {
        for (int ix = 0; ix < dm.nnx; ++ix) {
            bool slave_x = topo.wrap_x && ix == topo.nx;
            bool slave_y = topo.wrap_y && iy == topo.ny;
            if (!slave_x && !slave_y) continue;
            int mx = slave_x ? 0 : ix;
            int my = slave_y ? 0 : iy;
            size_t midx = dm.node_index(mx, my);
            size_t idx = dm.node_index(ix, iy);
            if (dm.node_dof[midx] < 0) continue;
            Complex phase(1.0, 0.0);
            if (slave_x) phase *= ph1;
            if (slave_y) phase *= ph2;
            dm.node_dof[idx] = dm.node_dof[midx];
            dm.node_phase[idx] = phase;
        }
    }

    dm.num_dofs = next_dof;
    return dm;
}

template <class SampleFn>
AssembledPair assemble_impl(const MeshTopology& topo, const std::vector<uint8_t>& active,
                            const OperatorSymbol& sym, const CoefficientField& field,
                            double h_elem, double eta1, double eta2, SampleFn&& sample,
                            PairMeta meta) {
    size_t n_active = std::count(active.begin(), active.end(), uint8_t{1});
    if (n_active == 0) throw ValidationError("assembly: mesh has no active elements");

    DofMap dm = build_dof_map(topo, active, sym.n, field.hole_bc, eta1, eta2);
    if (dm.num_dofs == 0)
        throw ValidationError("assembly: Dirichlet elimination removed all dofs");

    ElementCache cache(sym, h_elem);

    const int edim = 4 * sym.n;
    size_t hint = n_active * static_cast<size_t>(edim) * (edim + 1);
    HermitianAccumulator ka(hint), ma(hint);

    for (int ey = 0; ey < topo.ny; ++ey) {
        for (int ex = 0; ex < topo.nx; ++ex) {
            if (active[ex + static_cast<size_t>(topo.nx) * ey] == 0) continue;
            auto [a, rho] = sample(ex, ey);
            const ElementMatrices& em = cache.get(a, rho);
            NodeRef corners[4];
            const int cx[4] = {ex, ex + 1, ex, ex + 1};
            const int cy[4] = {ey, ey, ey + 1, ey + 1};
            for (int c = 0; c < 4; ++c) {
                size_t idx = dm.node_index(cx[c], cy[c]);
                corners[c] = {dm.node_dof[idx], dm.node_phase[idx]};
            }
            scatter_element(em, corners, sym.n, ka, ma);
        }
    }

    AssembledPair pair;
    pair.K = ka.build(dm.num_dofs);
    pair.M = ma.build(dm.num_dofs);
    pair.dofs = std::move(dm);
    pair.meta = meta;
    return pair;
}

}  // namespace

AssembledPair assemble_cell_pair(const CellMesh& mesh, const OperatorSymbol& sym,
                                 const CoefficientField& field, const BlochMomentum& eta) {
    MeshTopology topo;
    topo.nx = mesh.n;
    topo.ny = mesh.n;
    topo.wrap_x = true;
    topo.wrap_y = true;

    double he = 1.0 / mesh.n;
    auto sample = [&](int ex, int ey) {
        Eigen::Vector2d c((ex + 0.5) * he, (ey + 0.5) * he);
        return sample_coefficients(field, Region::background, c);
    };
    PairMeta meta{DomainKind::cell, eta, CapBC::neumann, mesh.n, field.hole_bc};
    return assemble_impl(topo, mesh.active, sym, field, he, eta.eta1, eta.eta2, sample, meta);
}

AssembledPair assemble_strip_pair(const StripMesh& mesh, const OperatorSymbol& sym,
                                  const CoefficientField& field, double zeta, CapBC cap) {
    MeshTopology topo;
    topo.nx = mesh.nx();
    topo.ny = mesh.ny();
    topo.wrap_x = true;
    topo.wrap_y = false;
    topo.cap_dirichlet_y = (cap == CapBC::dirichlet);

    double he = 1.0 / mesh.n;
    auto sample = [&](int ex, int ey) {
        Eigen::Vector2d c((ex + 0.5) * he, mesh.y0(ey) + 0.5 * he);
        bool wg = mesh.waveguide_row[ex + static_cast<size_t>(mesh.nx()) * ey] != 0;
        return sample_coefficients(field, wg ? Region::waveguide : Region::background, c);
    };
    BlochMomentum zmom(zeta, 0.0);
    PairMeta meta{DomainKind::strip, zmom, cap, mesh.n, field.hole_bc};
    return assemble_impl(topo, mesh.active, sym, field, he, zmom.eta1, 0.0, sample, meta);
}

AssembledPair assemble_plane_pair(const PlaneMesh& mesh, const OperatorSymbol& sym,
                                  const CoefficientField& field) {
    MeshTopology topo;
    topo.nx = mesh.nx();
    topo.ny = mesh.ny();

    double he = 1.0 / mesh.n;
    auto sample = [&](int ex, int ey) {
        Eigen::Vector2d c(mesh.x0(ex) + 0.5 * he, mesh.y0(ey) + 0.5 * he);
        bool wg = mesh.waveguide[ex + static_cast<size_t>(mesh.nx()) * ey] != 0;
        if (!wg) return sample_coefficients(field, Region::background, c);
        int a1 = static_cast<int>(std::floor(c.x()));
        Eigen::Vector2d local(c.x() - a1, c.y());
        int col = a1 < mesh.transition_R ? a1 : -1;
        return sample_coefficients(field, Region::waveguide, local, col);
    };
    PairMeta meta{DomainKind::plane, BlochMomentum(), CapBC::neumann, mesh.n, field.hole_bc};
    return assemble_impl(topo, mesh.active, sym, field, he, 0.0, 0.0, sample, meta);
}

void apply_operator(const AssembledPair& pair, const VecC& v, VecC& kv, VecC& mv) {
    if (v.size() != pair.dim()) throw SolverError("apply_operator: dimension mismatch");
    kv.noalias() = pair.K * v;
    mv.noalias() = pair.M * v;
}

void dump_matrix(const SpMatC& mat, std::ostream& os) {
    std::vector<std::tuple<int, int, Complex>> entries;
    entries.reserve(mat.nonZeros());
    for (int col = 0; col < mat.outerSize(); ++col)
        for (SpMatC::InnerIterator it(mat, col); it; ++it)
            entries.emplace_back(static_cast<int>(it.row()), col, it.value());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
        return std::get<1>(a) < std::get<1>(b);
    });
    os.precision(17);
    for (const auto& [r, c, v] : entries)
        os << r << " " << c << " " << v.real() << " " << v.imag() << "\n";
}

}  // namespace perispec
