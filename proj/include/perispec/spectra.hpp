#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perispec/assembly.hpp"
#include "perispec/eigensolve.hpp"
#include "perispec/geometry.hpp"
#include "perispec/intervals.hpp"
#include "perispec/operator.hpp"
#include "perispec/types.hpp"

namespace perispec {

struct SweepOptions {
    int workers = 1;
    EigenOptions eig;
};

// Uniform sample angles 2*pi*i/(count-1), i = 0..count-1; odd counts
// place pi exactly, and the final sample wraps to the origin under
// canonical momentum reduction.
std::vector<double> momentum_grid(int count);

// Sampled band functions Lambda_k on the m_grid x m_grid momentum grid.
struct BandFunction {
    int m_grid = 0;
    int count = 0;             // bands per sample
    std::vector<double> grid;  // per-axis sample angles
    MatR values;               // (m_grid^2) x count, row g = gx + m_grid*gy
    double continuity_modulus = 0.0;  // max |dLambda| / |deta| over grid edges
    int n = 0;                 // mesh subdivisions used
};

BandFunction sample_band_functions(const UnitCellGeometry& geom, const CoefficientField& field,
                                   const OperatorSymbol& sym, int n, int m_grid, int count,
                                   const SweepOptions& opts = {});

struct Band {
    int k = 0;
    Interval iv;
};

// Bands, their merged union, and the gap list below the trust ceiling
// min_eta Lambda_K (above it uncomputed bands could fill gaps).
struct BandSummary {
    std::vector<Band> bands;
    IntervalUnion sigma0;
    std::vector<Interval> gaps;
    double trust_ceiling = 0.0;
};

BandSummary bands_from_samples(const BandFunction& bf);

// Partial bands B_k#(zeta): eta2 sweep at fixed eta1 = zeta.
struct PartialBands {
    double zeta = 0.0;
    std::vector<Interval> bands;
    double trust_ceiling = 0.0;
    IntervalUnion merged() const;
};

PartialBands partial_bands(const UnitCellGeometry& geom, const CoefficientField& field,
                           const OperatorSymbol& sym, int n, double zeta, int m_line, int count,
                           const SweepOptions& opts = {});

// One truncated-strip solve; keeps the pair for overlap computations.
struct StripSolve {
    StripMesh mesh;
    AssembledPair pair;
    EigenResult eig;
};

StripSolve strip_spectrum(const UnitCellGeometry& geom, const WaveguideSpec& wg,
                          const CoefficientField& field, const OperatorSymbol& sym, double zeta,
                          int T, int n, int count, CapBC cap, const SweepOptions& opts = {});

enum class BandClass { in_band, in_gap };

// in_gap iff the distance to every partial band exceeds tol_band and
// the eigenvalue sits below the trust ceiling; ties break to in_band.
std::vector<BandClass> classify_strip_eigenvalues(const VecR& values,
                                                  const PartialBands& partial, double tol_band);

// Per-cell-row root-mean-square of nodal values (2T rows).
VecR strip_row_profile(const StripMesh& mesh, const DofMap& dofs, const VecC& vec);

struct DecayFit {
    double beta = 0.0;       // fitted decay rate, positive for decaying profiles
    double intercept = 0.0;  // log-profile intercept
    double rms = 0.0;        // rms residual of the log-linear fit
    int rows_used = 0;
};

// Least-squares slope of log(row profile) over rows |x2| in [h+1, T-1].
// Rows below 1e-13 of the profile peak are excluded.
DecayFit fit_decay_rate(const VecR& row_profile, int h, int T);

struct TruncationCase {
    int T = 0;
    CapBC cap = CapBC::dirichlet;
    double lambda = 0.0;
};

struct TruncationRecord {
    std::vector<TruncationCase> cases;
    double spread_rel = 0.0;
    bool stable = false;
};

// Re-solves the strip over all (T, cap) combinations and tracks the
// eigenvalue nearest the candidate. Requires at least two T values.
TruncationRecord truncation_stability(const UnitCellGeometry& geom, const WaveguideSpec& wg,
                                      const CoefficientField& field, const OperatorSymbol& sym,
                                      double zeta, double lambda_candidate,
                                      const std::vector<int>& t_list,
                                      const std::vector<CapBC>& caps, int n, int count,
                                      double tol_stab, const SweepOptions& opts = {});

struct TrappedMode {
    double zeta = 0.0;
    double lambda = 0.0;
    double beta_fit = 0.0;
    double fit_rms = 0.0;
    TruncationRecord stability;
    int branch = -1;
    int zeta_index = -1;
    std::string note;  // rejection reason when listed as a candidate
};

struct DispersionSample {
    int zeta_index = -1;
    int eig_index = -1;
    double zeta = 0.0;
    double lambda = 0.0;
    BandClass cls = BandClass::in_band;
    bool certified = false;
};

enum class EndpointType { band_edge, interior, periodic };

struct DispersionSegment {
    int id = -1;
    std::vector<DispersionSample> samples;
    EndpointType start_type = EndpointType::interior;
    EndpointType end_type = EndpointType::interior;
    bool split_start = false;  // born from an ambiguous matching split
    bool split_end = false;
};

struct DispersionOptions {
    int zeta_count = 17;
    int m_line = 17;
    int count = 8;       // eigenvalues per strip solve
    int band_count = 6;  // partial bands per zeta (sets the trust ceiling)
    std::vector<int> t_list{6, 10};
    std::vector<CapBC> caps{CapBC::dirichlet, CapBC::neumann};
    double tol_band = 0.05;
    double tol_stab = 1e-3;
    double beta_min = 0.05;
    double fit_rms_max = 0.5;
    double match_min_overlap = 0.2;
    double match_ambiguity = 0.01;  // relative closeness that forces a split
};

// Full swept dispersion picture with certification artifacts.
struct DispersionReport {
    std::vector<double> zetas;
    std::vector<DispersionSegment> segments;
    std::vector<TrappedMode> trapped;          // certified
    std::vector<TrappedMode> rejected;         // in-gap candidates that failed checks
    std::vector<PartialBands> partials;        // per zeta
    double sharp_ceiling = 0.0;                // min over zeta of partial ceilings
    IntervalUnion sigma_sharp_union;
    int base_T = 0;
    CapBC base_cap = CapBC::dirichlet;
};

DispersionReport sweep_dispersion(const UnitCellGeometry& geom, const WaveguideSpec& wg,
                                  const CoefficientField& field, const OperatorSymbol& sym,
                                  int n, const DispersionOptions& dopts,
                                  const SweepOptions& opts = {});

// Union over zeta of certified trapped eigenvalues as merged closed
// intervals (per-branch runs of consecutive certified samples).
IntervalUnion sigma_sharp(const std::vector<DispersionSegment>& segments);

struct SpectrumReport {
    std::vector<Band> bands;
    std::vector<Interval> gaps;
    IntervalUnion sigma0;       // essential spectrum of the periodic plane
    IntervalUnion sharp;        // sigma#
    IntervalUnion sigma_es;     // sigma0 union sharp
    IntervalUnion sigma_ad;     // sharp minus sigma0
    double trust_ceiling = 0.0;
    bool ceiling_clipped = false;
    std::string union_check;  // "ok" after emit-time re-verification
};

// Assembles the union formula sigma_es(A) = sigma_es(A0) U sigma# with
// exact interval algebra, clipping both operands to the common ceiling.
SpectrumReport essential_spectrum_union(const BandSummary& bands, const IntervalUnion& sharp,
                                        double sharp_ceiling);

// Exact emit-time re-verification of the set algebra; throws on defect.
void verify_union_report(const SpectrumReport& rep);

}  // namespace perispec
