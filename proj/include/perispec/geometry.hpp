#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "perispec/types.hpp"

namespace perispec {

struct Disk {
    Eigen::Vector2d center;
    double radius = 0.0;
};

struct AxisRect {
    Eigen::Vector2d lo;
    Eigen::Vector2d hi;
};

// Simple (non-self-intersecting) polygon, vertices counterclockwise.
struct Polygon {
    std::vector<Eigen::Vector2d> vertices;
};

using Shape = std::variant<Disk, AxisRect, Polygon>;

bool shape_contains(const Shape& s, const Eigen::Vector2d& p);
// Axis-aligned bounding box as (lo, hi).
std::pair<Eigen::Vector2d, Eigen::Vector2d> shape_bbox(const Shape& s);
// Human-readable tag ("disk(0.5,0.5;r=0.3)") used in validation messages.
std::string shape_describe(const Shape& s);
// True when the closures of a and b intersect.
bool shapes_overlap(const Shape& a, const Shape& b);
// True when the closure of s lies strictly inside the open box (lo, hi).
bool shape_inside_box(const Shape& s, const Eigen::Vector2d& lo, const Eigen::Vector2d& hi);
// Structural soundness of the shape itself (positive radius, lo<hi,
// polygon simple with >=3 vertices); returns a message per defect.
std::vector<std::string> shape_defects(const Shape& s);

// Periodic perforation of the unit cell. Hole closures must stay inside
// the sub-square (margin_d, 1-margin_d)^2 and be pairwise disjoint, so
// the cell keeps a connected boundary strip of width margin_d.
struct UnitCellGeometry {
    std::vector<Shape> holes;
    double margin_d = 0.05;
};

// Semi-infinite perturbation row: foreign holes in Q1h = (0,1)x(-h,h)
// plus a coefficient patch (carried by the CoefficientField). The patch
// is 1-periodic in x1 past the transition column transition_R.
struct WaveguideSpec {
    int half_width_h = 1;
    std::vector<Shape> holes;  // placed in Q1h
    int transition_R = 0;
};

struct ValidationReport {
    std::vector<std::string> errors;
    bool valid() const { return errors.empty(); }
    std::string summary() const;
};

ValidationReport validate_cell(const UnitCellGeometry& geom);
ValidationReport validate_waveguide(const UnitCellGeometry& geom, const WaveguideSpec& wg);

enum class CapBC { dirichlet, neumann };

// Uniform square meshes; element size 1/n, activity by centroid-in-hole
// test. Node indices run over the full (nx+1)x(ny+1) grid; periodic
// identification happens at assembly, not here.
struct CellMesh {
    int n = 0;                    // subdivisions per unit cell
    std::vector<uint8_t> active;  // n*n, row-major (ex + n*ey)
    int active_count() const;
    bool element_active(int ex, int ey) const { return active[ex + n * ey] != 0; }
};

struct StripMesh {
    int n = 0;
    int h = 1;  // waveguide half-width (cells)
    int T = 0;  // vertical truncation, strip covers (0,1)x(-T,T)
    CapBC cap = CapBC::dirichlet;
    std::vector<uint8_t> active;         // n * (2*T*n), row-major
    std::vector<uint8_t> waveguide_row;  // per element: inside |x2|<h
    int nx() const { return n; }
    int ny() const { return 2 * T * n; }
    bool element_active(int ex, int ey) const { return active[ex + nx() * ey] != 0; }
    // y-coordinate of the element's lower edge
    double y0(int ey) const { return -T + static_cast<double>(ey) / n; }
};

struct PlaneMesh {
    int n = 0;
    int h = 1;
    int L = 0;  // mesh covers (-L,L)^2
    int transition_R = 0;
    std::vector<uint8_t> active;     // (2*L*n)^2 row-major
    std::vector<uint8_t> waveguide;  // per element: in the perturbed semi-strip
    int nx() const { return 2 * L * n; }
    int ny() const { return 2 * L * n; }
    bool element_active(int ex, int ey) const { return active[ex + nx() * ey] != 0; }
    double x0(int ex) const { return -L + static_cast<double>(ex) / n; }
    double y0(int ey) const { return -L + static_cast<double>(ey) / n; }
};

CellMesh rasterize_cell(const UnitCellGeometry& geom, int n);

StripMesh build_strip_mesh(const UnitCellGeometry& geom, const WaveguideSpec& wg, int T, int n,
                           CapBC cap = CapBC::dirichlet);

PlaneMesh build_truncated_plane_mesh(const UnitCellGeometry& geom, const WaveguideSpec& wg,
                                     int L, int n);

}  // namespace perispec
