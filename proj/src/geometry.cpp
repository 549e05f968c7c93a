#include "perispec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace perispec {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() * b.y() - a.y() * b.x();
}

bool point_in_polygon(const std::vector<Eigen::Vector2d>& vs, const Eigen::Vector2d& p) {
    // even-odd ray casting, horizontal ray to +x
    bool inside = false;
    size_t m = vs.size();
    for (size_t i = 0, j = m - 1; i < m; j = i++) {
        const auto& a = vs[j];
        const auto& b = vs[i];
        bool crosses = (b.y() > p.y()) != (a.y() > p.y());
        if (crosses) {
            double xint = b.x() + (p.y() - b.y()) * (a.x() - b.x()) / (a.y() - b.y());
            if (p.x() < xint) inside = !inside;
        }
    }
    return inside;
}

double segment_point_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                              const Eigen::Vector2d& p) {
    Eigen::Vector2d ab = b - a;
    double t = ab.squaredNorm() > 0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

bool segments_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
    double d1 = cross2(b - a, c - a);
    double d2 = cross2(b - a, d - a);
    double d3 = cross2(d - c, a - c);
    double d4 = cross2(d - c, b - c);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](const Eigen::Vector2d& s, const Eigen::Vector2d& e,
                         const Eigen::Vector2d& q) {
        return std::min(s.x(), e.x()) <= q.x() && q.x() <= std::max(s.x(), e.x()) &&
               std::min(s.y(), e.y()) <= q.y() && q.y() <= std::max(s.y(), e.y());
    };
    if (d1 == 0 && on_segment(a, b, c)) return true;
    if (d2 == 0 && on_segment(a, b, d)) return true;
    if (d3 == 0 && on_segment(c, d, a)) return true;
    if (d4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

std::vector<Eigen::Vector2d> shape_outline(const Shape& s) {
    if (const auto* r = std::get_if<AxisRect>(&s)) {
        return {r->lo, {r->hi.x(), r->lo.y()}, r->hi, {r->lo.x(), r->hi.y()}};
    }
    if (const auto* p = std::get_if<Polygon>(&s)) return p->vertices;
    return {};  // disk handled separately
}

bool polygonal_shapes_overlap(const Shape& a, const Shape& b) {
    auto va = shape_outline(a);
    auto vb = shape_outline(b);
    for (size_t i = 0; i < va.size(); ++i)
        for (size_t j = 0; j < vb.size(); ++j)
            if (segments_intersect(va[i], va[(i + 1) % va.size()], vb[j],
                                   vb[(j + 1) % vb.size()]))
                return true;
    // containment without boundary crossing
    if (shape_contains(b, va[0])) return true;
    if (shape_contains(a, vb[0])) return true;
    return false;
}

bool disk_shape_overlap(const Disk& d, const Shape& other) {
    if (const auto* d2 = std::get_if<Disk>(&other))
        return (d.center - d2->center).norm() <= d.radius + d2->radius;
    auto vs = shape_outline(other);
    if (shape_contains(other, d.center)) return true;
    for (size_t i = 0; i < vs.size(); ++i)
        if (segment_point_distance(vs[i], vs[(i + 1) % vs.size()], d.center) <= d.radius)
            return true;
    return false;
}

}  // namespace

bool shape_contains(const Shape& s, const Eigen::Vector2d& p) {
    if (const auto* d = std::get_if<Disk>(&s))
        return (p - d->center).squaredNorm() < d->radius * d->radius;
    if (const auto* r = std::get_if<AxisRect>(&s))
        return p.x() > r->lo.x() && p.x() < r->hi.x() && p.y() > r->lo.y() && p.y() < r->hi.y();
    const auto& poly = std::get<Polygon>(s);
    return point_in_polygon(poly.vertices, p);
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> shape_bbox(const Shape& s) {
    if (const auto* d = std::get_if<Disk>(&s)) {
        Eigen::Vector2d r(d->radius, d->radius);
        return {d->center - r, d->center + r};
    }
    if (const auto* r = std::get_if<AxisRect>(&s)) return {r->lo, r->hi};
    const auto& poly = std::get<Polygon>(s);
    Eigen::Vector2d lo = poly.vertices.front();
    Eigen::Vector2d hi = lo;
    for (const auto& v : poly.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return {lo, hi};
}

std::string shape_describe(const Shape& s) {
    std::ostringstream os;
    if (const auto* d = std::get_if<Disk>(&s)) {
        os << "disk(" << d->center.x() << "," << d->center.y() << ";r=" << d->radius << ")";
    } else if (const auto* r = std::get_if<AxisRect>(&s)) {
        os << "rect(" << r->lo.x() << "," << r->lo.y() << ";" << r->hi.x() << "," << r->hi.y()
           << ")";
    } else {
        const auto& poly = std::get<Polygon>(s);
        os << "polygon(" << poly.vertices.size() << " vertices)";
    }
    return os.str();
}

bool shapes_overlap(const Shape& a, const Shape& b) {
    auto [alo, ahi] = shape_bbox(a);
    auto [blo, bhi] = shape_bbox(b);
    if (ahi.x() < blo.x() || bhi.x() < alo.x() || ahi.y() < blo.y() || bhi.y() < alo.y())
        return false;
    if (const auto* d = std::get_if<Disk>(&a)) return disk_shape_overlap(*d, b);
    if (const auto* d = std::get_if<Disk>(&b)) return disk_shape_overlap(*d, a);
    return polygonal_shapes_overlap(a, b);
}

bool shape_inside_box(const Shape& s, const Eigen::Vector2d& lo, const Eigen::Vector2d& hi) {
    auto [slo, shi] = shape_bbox(s);
    return slo.x() > lo.x() && slo.y() > lo.y() && shi.x() < hi.x() && shi.y() < hi.y();
}

std::vector<std::string> shape_defects(const Shape& s) {
    std::vector<std::string> out;
    if (const auto* d = std::get_if<Disk>(&s)) {
        if (!(d->radius > 0)) out.push_back(shape_describe(s) + ": radius must be positive");
    } else if (const auto* r = std::get_if<AxisRect>(&s)) {
        if (!(r->lo.x() < r->hi.x() && r->lo.y() < r->hi.y()))
            out.push_back(shape_describe(s) + ": lo must be componentwise below hi");
    } else {
        const auto& poly = std::get<Polygon>(s);
        const auto& vs = poly.vertices;
        if (vs.size() < 3) {
            out.push_back(shape_describe(s) + ": needs at least 3 vertices");
            return out;
        }
        double area2 = 0.0;
        for (size_t i = 0; i < vs.size(); ++i)
            area2 += cross2(vs[i], vs[(i + 1) % vs.size()]);
        if (area2 <= 0) out.push_back(shape_describe(s) + ": vertices must be counterclockwise");
        // simplicity: non-adjacent edges must not intersect
        size_t m = vs.size();
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = i + 1; j < m; ++j) {
                bool adjacent = (j == i + 1) || (i == 0 && j == m - 1);
                if (adjacent) continue;
                if (segments_intersect(vs[i], vs[(i + 1) % m], vs[j], vs[(j + 1) % m])) {
                    out.push_back(shape_describe(s) + ": self-intersecting outline");
                    return out;
                }
            }
        }
    }
    return out;
}

std::string ValidationReport::summary() const {
    if (errors.empty()) return "valid";
    std::ostringstream os;
    for (const auto& e : errors) os << e << "\n";
    return os.str();
}

ValidationReport validate_cell(const UnitCellGeometry& geom) {
    ValidationReport rep;
    if (!(geom.margin_d > 0.0 && geom.margin_d < 0.5))
        rep.errors.push_back("margin_d must lie in (0, 0.5)");
    for (const auto& hole : geom.holes) {
        for (auto& d : shape_defects(hole)) rep.errors.push_back(d);
    }
    if (!rep.errors.empty()) return rep;

    Eigen::Vector2d lo(geom.margin_d, geom.margin_d);
    Eigen::Vector2d hi(1.0 - geom.margin_d, 1.0 - geom.margin_d);
    for (const auto& hole : geom.holes) {
        if (!shape_inside_box(hole, lo, hi))
            rep.errors.push_back(shape_describe(hole) + ": violates the boundary strip margin " +
                                 std::to_string(geom.margin_d));
    }
    for (size_t i = 0; i < geom.holes.size(); ++i) {
        for (size_t j = i + 1; j < geom.holes.size(); ++j) {
            if (shapes_overlap(geom.holes[i], geom.holes[j]))
                rep.errors.push_back(shape_describe(geom.holes[i]) + " overlaps " +
                                     shape_describe(geom.holes[j]));
        }
    }
    return rep;
}

ValidationReport validate_waveguide(const UnitCellGeometry& geom, const WaveguideSpec& wg) {
    ValidationReport rep;
    if (wg.half_width_h < 1) rep.errors.push_back("half_width_h must be a positive integer");
    if (wg.transition_R < 0) rep.errors.push_back("transition_R must be nonnegative");
    for (const auto& hole : wg.holes) {
        for (auto& d : shape_defects(hole)) rep.errors.push_back(d);
    }
    if (!rep.errors.empty()) return rep;

    double h = wg.half_width_h;
    Eigen::Vector2d lo(geom.margin_d, -h + geom.margin_d);
    Eigen::Vector2d hi(1.0 - geom.margin_d, h - geom.margin_d);
    for (const auto& hole : wg.holes) {
        if (!shape_inside_box(hole, lo, hi))
            rep.errors.push_back(shape_describe(hole) +
                                 ": waveguide hole must stay inside Q1h with margin " +
                                 std::to_string(geom.margin_d));
    }
    for (size_t i = 0; i < wg.holes.size(); ++i) {
        for (size_t j = i + 1; j < wg.holes.size(); ++j) {
            if (shapes_overlap(wg.holes[i], wg.holes[j]))
                rep.errors.push_back(shape_describe(wg.holes[i]) + " overlaps " +
                                     shape_describe(wg.holes[j]));
        }
    }
    return rep;
}

int CellMesh::active_count() const {
    return static_cast<int>(std::count(active.begin(), active.end(), uint8_t{1}));
}

namespace {

bool centroid_in_any(const std::vector<Shape>& holes, const Eigen::Vector2d& c) {
    for (const auto& h : holes)
        if (shape_contains(h, c)) return true;
    return false;
}

}  // namespace

CellMesh rasterize_cell(const UnitCellGeometry& geom, int n) {
    if (n < 4) throw ValidationError("rasterize_cell: n must be at least 4");
    ValidationReport rep = validate_cell(geom);
    if (!rep.valid()) throw ValidationError("rasterize_cell: " + rep.summary());

    CellMesh mesh;
    mesh.n = n;
    mesh.active.assign(static_cast<size_t>(n) * n, 1);
    double he = 1.0 / n;
    for (int ey = 0; ey < n; ++ey) {
        for (int ex = 0; ex < n; ++ex) {
            Eigen::Vector2d c((ex + 0.5) * he, (ey + 0.5) * he);
            if (centroid_in_any(geom.holes, c)) mesh.active[ex + n * ey] = 0;
        }
    }
    return mesh;
}

StripMesh build_strip_mesh(const UnitCellGeometry& geom, const WaveguideSpec& wg, int T, int n,
                           CapBC cap) {
    if (T < wg.half_width_h + 2)
        throw ValidationError("build_strip_mesh: T must be at least h+2 so the waveguide stays "
                              "clear of the artificial caps");
    if (n < 4) throw ValidationError("build_strip_mesh: n must be at least 4");
    ValidationReport rep = validate_cell(geom);
    if (!rep.valid()) throw ValidationError("build_strip_mesh: " + rep.summary());
    rep = validate_waveguide(geom, wg);
    if (!rep.valid()) throw ValidationError("build_strip_mesh: " + rep.summary());

    StripMesh mesh;
    mesh.n = n;
    mesh.h = wg.half_width_h;
    mesh.T = T;
    mesh.cap = cap;
    int nx = mesh.nx(), ny = mesh.ny();
    mesh.active.assign(static_cast<size_t>(nx) * ny, 1);
    mesh.waveguide_row.assign(static_cast<size_t>(nx) * ny, 0);
    double he = 1.0 / n;
    for (int ey = 0; ey < ny; ++ey) {
        for (int ex = 0; ex < nx; ++ex) {
            Eigen::Vector2d c((ex + 0.5) * he, mesh.y0(ey) + 0.5 * he);
            bool in_wg = std::abs(c.y()) < mesh.h;
            size_t idx = ex + static_cast<size_t>(nx) * ey;
            mesh.waveguide_row[idx] = in_wg ? 1 : 0;
            if (in_wg) {
                // waveguide rows carry the foreign holes of Q1h
                if (centroid_in_any(wg.holes, c)) mesh.active[idx] = 0;
            } else {
                Eigen::Vector2d local(c.x(), c.y() - std::floor(c.y()));
                if (centroid_in_any(geom.holes, local)) mesh.active[idx] = 0;
            }
        }
    }
    return mesh;
}

PlaneMesh build_truncated_plane_mesh(const UnitCellGeometry& geom, const WaveguideSpec& wg,
                                     int L, int n) {
    int Lmin = std::max(2 * wg.half_width_h, wg.transition_R + 2);
    if (L < Lmin)
        throw ValidationError("build_truncated_plane_mesh: L must be at least max(2h, R+2) = " +
                              std::to_string(Lmin));
    if (n < 4) throw ValidationError("build_truncated_plane_mesh: n must be at least 4");
    ValidationReport rep = validate_cell(geom);
    if (!rep.valid()) throw ValidationError("build_truncated_plane_mesh: " + rep.summary());
    rep = validate_waveguide(geom, wg);
    if (!rep.valid()) throw ValidationError("build_truncated_plane_mesh: " + rep.summary());

    PlaneMesh mesh;
    mesh.n = n;
    mesh.h = wg.half_width_h;
    mesh.L = L;
    mesh.transition_R = wg.transition_R;
    int nx = mesh.nx();
    mesh.active.assign(static_cast<size_t>(nx) * nx, 1);
    mesh.waveguide.assign(static_cast<size_t>(nx) * nx, 0);
    double he = 1.0 / n;
    for (int ey = 0; ey < nx; ++ey) {
        for (int ex = 0; ex < nx; ++ex) {
            Eigen::Vector2d c(mesh.x0(ex) + 0.5 * he, mesh.y0(ey) + 0.5 * he);
            bool in_wg = c.x() > 0.0 && std::abs(c.y()) < mesh.h;
            size_t idx = ex + static_cast<size_t>(nx) * ey;
            mesh.waveguide[idx] = in_wg ? 1 : 0;
            if (in_wg) {
                Eigen::Vector2d local(c.x() - std::floor(c.x()), c.y());
                if (centroid_in_any(wg.holes, local)) mesh.active[idx] = 0;
            } else {
                Eigen::Vector2d local(c.x() - std::floor(c.x()), c.y() - std::floor(c.y()));
                if (centroid_in_any(geom.holes, local)) mesh.active[idx] = 0;
            }
        }
    }
    return mesh;
}

}  // namespace perispec
