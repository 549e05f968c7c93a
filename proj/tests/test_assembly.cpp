#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "perispec/assembly.hpp"
#include "perispec/eigensolve.hpp"

using namespace perispec;

namespace {

double hermiticity_defect(const SpMatC& k) {
    SpMatC d = k - SpMatC(k.adjoint());
    double defect = 0.0;
    for (int c = 0; c < d.outerSize(); ++c)
        for (SpMatC::InnerIterator it(d, c); it; ++it)
            defect = std::max(defect, std::abs(it.value()));
    return defect;
}

double max_abs(const SpMatC& k) {
    double m = 0.0;
    for (int c = 0; c < k.outerSize(); ++c)
        for (SpMatC::InnerIterator it(k, c); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

double matrix_diff(const SpMatC& a, const SpMatC& b) {
    SpMatC d = a - b;
    return max_abs(d);
}

VecC random_vec(int dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VecC v(dim);
    for (int i = 0; i < dim; ++i) v[i] = Complex(u(rng), u(rng));
    return v;
}

}  // namespace

TEST_CASE("momentum canonical reduction") {
    CHECK(BlochMomentum(0.0, 0.0).eta1 == 0.0);
    CHECK(BlochMomentum(two_pi, 0.0).eta1 == 0.0);
    CHECK(BlochMomentum(two_pi - 1e-12, 0.0).eta1 == 0.0);  // snaps to the origin
    CHECK(BlochMomentum(-M_PI, 0.0).eta1 == doctest::Approx(M_PI));
    CHECK(BlochMomentum(1.25 + two_pi, 0.0).eta1 == doctest::Approx(1.25));
}

TEST_CASE("free cell pair: Hermitian, zero row sums, Rayleigh positivity") {
    UnitCellGeometry g;
    auto mesh = rasterize_cell(g, 8);
    auto sym = scalar_symbol();
    auto field = identity_field(2);
    auto pair = assemble_cell_pair(mesh, sym, field, BlochMomentum(0.0, 0.0));

    CHECK(pair.dim() == 64);  // 8x8 master nodes
    CHECK(hermiticity_defect(pair.K) == 0.0);
    CHECK(hermiticity_defect(pair.M) == 0.0);

    // constants in the kernel at eta = 0
    VecC ones = VecC::Ones(pair.dim());
    VecC k1 = pair.K * ones;
    CHECK(k1.cwiseAbs().maxCoeff() <= 1e-12 * max_abs(pair.K));

    for (unsigned s = 0; s < 100; ++s) {
        VecC v = random_vec(pair.dim(), s);
        Complex kq = v.dot(pair.K * v);
        Complex mq = v.dot(pair.M * v);
        CHECK(std::abs(kq.imag()) <= 1e-10 * std::abs(kq.real() + 1.0));
        CHECK(kq.real() >= -1e-10);
        CHECK(mq.real() > 0.0);
    }
}

TEST_CASE("2pi shift produces the same matrices") {
    UnitCellGeometry g;
    g.holes.push_back(Disk{{0.5, 0.5}, 0.3});
    g.margin_d = 0.1;
    auto mesh = rasterize_cell(g, 8);
    auto sym = scalar_symbol();
    auto field = identity_field(2);

    double e1 = 1.1, e2 = 2.3;
    auto a = assemble_cell_pair(mesh, sym, field, BlochMomentum(e1, e2));
    auto b = assemble_cell_pair(mesh, sym, field, BlochMomentum(e1 + two_pi, e2));
    auto c = assemble_cell_pair(mesh, sym, field, BlochMomentum(e1, e2 + two_pi));
    double scale = max_abs(a.K);
    CHECK(matrix_diff(a.K, b.K) <= 1e-12 * scale);
    CHECK(matrix_diff(a.K, c.K) <= 1e-12 * scale);
    CHECK(matrix_diff(a.M, b.M) <= 1e-12 * max_abs(a.M));
}

TEST_CASE("conjugation symmetry for real coefficients") {
    UnitCellGeometry g;
    g.holes.push_back(Disk{{0.5, 0.5}, 0.25});
    auto mesh = rasterize_cell(g, 8);
    auto sym = scalar_symbol();
    auto field = identity_field(2);

    double e1 = 0.9, e2 = 1.7;
    auto a = assemble_cell_pair(mesh, sym, field, BlochMomentum(e1, e2));
    auto b = assemble_cell_pair(mesh, sym, field, BlochMomentum(two_pi - e1, two_pi - e2));
    SpMatC aconj = a.K.conjugate();
    CHECK(matrix_diff(aconj, b.K) <= 1e-12 * max_abs(a.K));
}

TEST_CASE("strip pair: canonical zeta, caps, lateral phases") {
    UnitCellGeometry g;
    WaveguideSpec wg;
    auto mesh = build_strip_mesh(g, wg, 4, 8);
    auto sym = scalar_symbol();
    auto field = identity_field(2);

    auto p0 = assemble_strip_pair(mesh, sym, field, 0.0, CapBC::dirichlet);
    auto pw = assemble_strip_pair(mesh, sym, field, two_pi - 1e-12, CapBC::dirichlet);
    CHECK(matrix_diff(p0.K, pw.K) == 0.0);  // canonical reduction snaps to zero
    CHECK(matrix_diff(p0.M, pw.M) == 0.0);

    // Dirichlet caps eliminate the two cap node rows: 8 x (65-2) dofs
    CHECK(p0.dim() == 8 * 63);

    auto pn = assemble_strip_pair(mesh, sym, field, 0.0, CapBC::neumann);
    CHECK(pn.dim() == 8 * 65);
    VecC ones = VecC::Ones(pn.dim());
    CHECK((pn.K * ones).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(pn.K));
    CHECK(hermiticity_defect(pn.K) == 0.0);

    auto pz = assemble_strip_pair(mesh, sym, field, 1.3, CapBC::dirichlet);
    CHECK(hermiticity_defect(pz.K) == 0.0);
}

TEST_CASE("plane pair: bookkeeping and kernel") {
    UnitCellGeometry g;
    WaveguideSpec wg;
    auto mesh = build_truncated_plane_mesh(g, wg, 2, 8);
    auto sym = scalar_symbol();
    auto field = identity_field(2);
    auto pair = assemble_plane_pair(mesh, sym, field);

    CHECK(pair.dim() == 33 * 33);  // all nodes active, Neumann box
    VecC ones = VecC::Ones(pair.dim());
    CHECK((pair.K * ones).cwiseAbs().maxCoeff() <= 1e-12 * max_abs(pair.K));

    VecC kv, mv;
    apply_operator(pair, ones, kv, mv);
    CHECK(kv.cwiseAbs().maxCoeff() <= 1e-12 * max_abs(pair.K));
    VecC wrong(3);
    CHECK_THROWS_AS(apply_operator(pair, wrong, kv, mv), SolverError);
}

TEST_CASE("plane rows left of the waveguide tile the cell stencil") {
    UnitCellGeometry g;
    g.holes.push_back(Disk{{0.5, 0.5}, 0.3});
    g.margin_d = 0.1;
    WaveguideSpec wg;
    auto sym = scalar_symbol();

    for (HoleBC bc : {HoleBC::neumann, HoleBC::dirichlet}) {
        auto field = identity_field(2);
        field.hole_bc = bc;
        int n = 8, L = 2;
        auto pmesh = build_truncated_plane_mesh(g, wg, L, n);
        auto cmesh = rasterize_cell(g, n);
        auto plane = assemble_plane_pair(pmesh, sym, field);
        auto cell = assemble_cell_pair(cmesh, sym, field, BlochMomentum(0.0, 0.0));

        double scale = max_abs(plane.K);
        int checked = 0;
        for (int gy = 1; gy < pmesh.ny(); ++gy) {
            for (int gx = 1; gx < pmesh.nx(); ++gx) {
                double x = -L + static_cast<double>(gx) / n;
                if (x >= -1.0) continue;
                int pd = plane.dofs.dof_of(gx, gy, 0);
                int md = cell.dofs.dof_of(gx % n, gy % n, 0);
                if (pd < 0 || md < 0) {
                    CHECK(pd == md);  // eliminated in both or neither
                    continue;
                }
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int qx = gx + dx, qy = gy + dy;
                        int qd = plane.dofs.dof_of(qx, qy, 0);
                        int mq = cell.dofs.dof_of((qx % n + n) % n, (qy % n + n) % n, 0);
                        if (qd < 0 || mq < 0) {
                            CHECK(qd == mq);
                            continue;
                        }
                        Complex pv = plane.K.coeff(pd, qd);
                        Complex cv = cell.K.coeff(md, mq);
                        CHECK(std::abs(pv - cv) <= 1e-13 * scale);
                        ++checked;
                    }
                }
            }
        }
        CHECK(checked > 100);
    }
}

TEST_CASE("strip middle rows match the waveguide rasterization flags") {
    UnitCellGeometry g;
    g.holes.push_back(Disk{{0.5, 0.5}, 0.3});
    g.margin_d = 0.1;
    WaveguideSpec wg;  // filled row
    auto mesh = build_strip_mesh(g, wg, 4, 8);
    for (int ey = 0; ey < mesh.ny(); ++ey)
        for (int ex = 0; ex < mesh.nx(); ++ex) {
            bool wg_row = mesh.waveguide_row[ex + static_cast<size_t>(mesh.nx()) * ey] != 0;
            if (wg_row) CHECK(mesh.element_active(ex, ey));
        }
}

TEST_CASE("dirichlet holes eliminate boundary nodes") {
    UnitCellGeometry g;
    g.holes.push_back(Disk{{0.5, 0.5}, 0.3});
    g.margin_d = 0.1;
    auto mesh = rasterize_cell(g, 16);
    auto sym = scalar_symbol();

    auto fn = identity_field(2);
    fn.hole_bc = HoleBC::neumann;
    auto fd = identity_field(2);
    fd.hole_bc = HoleBC::dirichlet;

    auto pn = assemble_cell_pair(mesh, sym, fn, BlochMomentum(0.0, 0.0));
    auto pd = assemble_cell_pair(mesh, sym, fd, BlochMomentum(0.0, 0.0));
    CHECK(pd.dim() < pn.dim());

    // Dirichlet positivity: no zero mode survives elimination
    auto res = lowest_eigenpairs(pd, 1);
    CHECK(res.values[0] > 1e-3);
}

TEST_CASE("empty active set is rejected") {
    UnitCellGeometry g;
    g.margin_d = 0.05;
    g.holes.push_back(AxisRect{{0.06, 0.06}, {0.94, 0.94}});
    auto mesh = rasterize_cell(g, 8);
    // all centroids inside the rectangle: nothing active
    auto sym = scalar_symbol();
    auto field = identity_field(2);
    CHECK_THROWS_AS(assemble_cell_pair(mesh, sym, field, BlochMomentum(0.0, 0.0)),
                    ValidationError);
}

TEST_CASE("matrix dump is sorted and complete") {
    UnitCellGeometry g;
    auto mesh = rasterize_cell(g, 4);
    auto sym = scalar_symbol();
    auto field = identity_field(2);
    auto pair = assemble_cell_pair(mesh, sym, field, BlochMomentum(1.0, 0.5));

    std::ostringstream os;
    dump_matrix(pair.K, os);
    std::istringstream is(os.str());
    int r, c, prev_r = -1, prev_c = -1, count = 0;
    double re, im;
    while (is >> r >> c >> re >> im) {
        bool ordered = (r > prev_r) || (r == prev_r && c > prev_c);
        CHECK(ordered);
        prev_r = r;
        prev_c = c;
        ++count;
    }
    CHECK(count == static_cast<int>(pair.K.nonZeros()));
}

TEST_CASE("elasticity pair assembles and is Hermitian") {
    UnitCellGeometry g;
    auto mesh = rasterize_cell(g, 8);
    auto sym = elasticity_symbol();
    auto field = identity_field(3);
    auto pair = assemble_cell_pair(mesh, sym, field, BlochMomentum(0.7, 0.2));
    CHECK(pair.dim() == 2 * 64);
    CHECK(hermiticity_defect(pair.K) == 0.0);
    CHECK(hermiticity_defect(pair.M) == 0.0);
}
