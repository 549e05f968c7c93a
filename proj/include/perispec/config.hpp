#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perispec/geometry.hpp"
#include "perispec/operator.hpp"
#include "perispec/spectra.hpp"
#include "perispec/weyl.hpp"

namespace perispec {

struct Discretization {
    int n = 0;
    int m_grid = 0;
    int k = 0;           // bands sampled on the momentum grid
    int m_line = 17;     // eta2 samples for partial bands
    int strip_k = 8;     // strip eigenpairs per zeta
    int band_k = 6;      // partial bands per zeta
    int zeta_grid = 17;  // dispersion sweep size
    std::vector<int> t_list{6, 10};
    std::vector<CapBC> caps{CapBC::dirichlet, CapBC::neumann};
};

struct Tolerances {
    double tol_band = 0.05;
    double tol_stab = 1e-3;
    double eig_tol = 1e-8;
    double beta_min = 0.05;
    double fit_rms_max = 0.5;
    double match_min_overlap = 0.2;
    double match_ambiguity = 0.01;
    int dense_threshold = 2000;
};

struct WeylConfig {
    WeylKind kind = WeylKind::bloch;
    int j_min = 2;
    int j_max = 5;
    int L = 0;
    double plateau_d = 1.0;
    double eta1 = 0.0, eta2 = 0.0;  // bloch target momentum
    int band_index = 1;             // 1-based band at that momentum
    double detune = 0.0;            // shifts lambda for control runs
    double zeta = 0.0;              // floquet target
    double slope_lo = -0.8, slope_hi = -0.2;
};

struct OutputConfig {
    std::string dir = "out";
    bool json = true;
    bool csv = true;
    bool svg = true;
};

struct RunConfig {
    UnitCellGeometry cell;
    std::optional<WaveguideSpec> waveguide;
    SymbolKind symbol_kind = SymbolKind::scalar;
    CoefficientField field;
    Discretization disc;
    Tolerances tol;
    OutputConfig out;
    uint64_t seed = 12345;
    std::optional<WeylConfig> weyl;
    nlohmann::ordered_json raw;  // canonical source document, for hashing

    OperatorSymbol symbol() const {
        return symbol_kind == SymbolKind::scalar ? scalar_symbol() : elasticity_symbol();
    }
};

// Strict parse: unknown keys anywhere are rejected, physics fields are
// required, tolerance/output fields carry defaults. Throws ConfigError
// with the offending JSON path.
RunConfig parse_config_json(const nlohmann::ordered_json& doc);
RunConfig parse_config_file(const std::string& path);

// Aggregated geometry + operator + discretization feasibility checks.
ValidationReport validate_config(const RunConfig& cfg);

}  // namespace perispec
