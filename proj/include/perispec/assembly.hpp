#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "perispec/geometry.hpp"
#include "perispec/operator.hpp"
#include "perispec/types.hpp"

namespace perispec {

// Quasi-momentum, canonical in [0, 2pi)^2. Values within 1e-9 of the
// period wrap to 0 so grid endpoint samples coincide with the origin.
struct BlochMomentum {
    double eta1 = 0.0;
    double eta2 = 0.0;

    BlochMomentum() = default;
    BlochMomentum(double e1, double e2) : eta1(reduce(e1)), eta2(reduce(e2)) {}

    static double reduce(double x);
};

enum class DomainKind { cell, strip, plane };

// Node -> dof translation after periodic identification and Dirichlet
// elimination. value(node, c) = phase[node] * x[dof[node] + c].
struct DofMap {
    int ncomp = 1;
    int nnx = 0, nny = 0;           // node grid dimensions
    std::vector<int32_t> node_dof;  // base dof of the node's master, or -1
    std::vector<Complex> node_phase;
    int num_dofs = 0;

    int node_index(int ix, int iy) const { return ix + nnx * iy; }
    int dof_of(int ix, int iy, int comp) const {
        int nd = node_dof[node_index(ix, iy)];
        return nd < 0 ? -1 : nd + comp;
    }
};

struct PairMeta {
    DomainKind domain = DomainKind::cell;
    BlochMomentum eta;   // cell: both components; strip: eta1 = zeta
    CapBC cap = CapBC::dirichlet;
    int n = 0;           // subdivisions
    HoleBC hole_bc = HoleBC::neumann;
};

// Sparse Hermitian stiffness/mass pair. K and M are exactly Hermitian
// by paired accumulation; M is positive definite on the retained dofs.
struct AssembledPair {
    SpMatC K;
    SpMatC M;
    DofMap dofs;
    PairMeta meta;

    int dim() const { return static_cast<int>(K.rows()); }
};

AssembledPair assemble_cell_pair(const CellMesh& mesh, const OperatorSymbol& sym,
                                 const CoefficientField& field, const BlochMomentum& eta);

AssembledPair assemble_strip_pair(const StripMesh& mesh, const OperatorSymbol& sym,
                                  const CoefficientField& field, double zeta, CapBC cap);

AssembledPair assemble_plane_pair(const PlaneMesh& mesh, const OperatorSymbol& sym,
                                  const CoefficientField& field);

// Convenience overload taking the cap recorded in the mesh.
inline AssembledPair assemble_strip_pair(const StripMesh& mesh, const OperatorSymbol& sym,
                                         const CoefficientField& field, double zeta) {
    return assemble_strip_pair(mesh, sym, field, zeta, mesh.cap);
}

// Sparse matvec; no factorization.
void apply_operator(const AssembledPair& pair, const VecC& v, VecC& kv, VecC& mv);

// Coordinate-triplet text dump "row col re im", sorted by (row, col).
void dump_matrix(const SpMatC& mat, std::ostream& os);

}  // namespace perispec
