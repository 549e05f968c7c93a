#pragma once

#include <string>

#include <json.hpp>

#include "perispec/config.hpp"
#include "perispec/spectra.hpp"
#include "perispec/weyl.hpp"

namespace perispec {

// Deterministic serialization: fixed key order, nlohmann shortest
// round-trip doubles, "%.12g" in CSV/SVG.

nlohmann::ordered_json provenance_json(const RunConfig& cfg);
nlohmann::ordered_json interval_json(const Interval& iv);
nlohmann::ordered_json interval_union_json(const IntervalUnion& u);

nlohmann::ordered_json bands_json(const BandFunction& bf, const BandSummary& summary,
                                  const RunConfig& cfg);
std::string bands_csv(const BandFunction& bf);
std::string bands_svg(const BandFunction& bf);

nlohmann::ordered_json dispersion_json(const DispersionReport& rep, const RunConfig& cfg);
std::string dispersion_csv(const DispersionReport& rep);
std::string dispersion_svg(const DispersionReport& rep);

nlohmann::ordered_json spectrum_json(const SpectrumReport& rep, const RunConfig& cfg);

nlohmann::ordered_json weyl_json(const WeylRun& run, const RunConfig& cfg);
std::string weyl_csv(const WeylRun& run);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace perispec
