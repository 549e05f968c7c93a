#pragma once

#include <iosfwd>
#include <string>

#include "perispec/cache.hpp"
#include "perispec/config.hpp"
#include "perispec/emit.hpp"
#include "perispec/spectra.hpp"
#include "perispec/weyl.hpp"

namespace perispec {

struct RunOptions {
    int workers = 1;
    bool use_cache = true;
    std::string out_override;  // overrides config outputs.dir when set
};

// Compute helpers shared by the commands.
struct BandsProduct {
    BandFunction bf;
    BandSummary summary;
};
BandsProduct compute_bands(const RunConfig& cfg, int workers);
DispersionReport compute_dispersion(const RunConfig& cfg, int workers);
WeylRun compute_weyl(const RunConfig& cfg, int workers);

// Commands mirror the CLI verbs; they validate, compute (or restore
// from cache), emit artifacts into the output directory, and return
// the process exit code. Solver and config errors propagate as
// exceptions for the CLI layer to map to exit codes.
int cmd_validate(const RunConfig& cfg, std::ostream& log);
int cmd_bands(const RunConfig& cfg, const RunOptions& opts, std::ostream& log);
int cmd_dispersion(const RunConfig& cfg, const RunOptions& opts, std::ostream& log);
int cmd_spectrum(const RunConfig& cfg, const RunOptions& opts, std::ostream& log);
int cmd_weyl(const RunConfig& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace perispec
