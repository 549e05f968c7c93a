#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "perispec/config.hpp"

namespace perispec {

enum class Product { bands, dispersion, spectrum, weyl };

uint64_t fnv1a64(std::string_view data);

// Canonical JSON subset of the config that determines the product,
// serialized deterministically. Any spectrally relevant field changes
// the hash; output paths and worker counts do not.
std::string product_key_material(const nlohmann::ordered_json& raw, Product p);
std::string product_hash(const nlohmann::ordered_json& raw, Product p);

// Directory-backed artifact cache: entry <dir>/<hash>/ holds the
// emitted files byte-for-byte. The directory comes from
// PERISPEC_CACHE_DIR or defaults to <outdir>/.perispec-cache.
class ArtifactCache {
public:
    ArtifactCache(const std::string& outdir, bool enabled);

    bool enabled() const { return enabled_; }
    const std::string& dir() const { return dir_; }

    // Copies cached files into outdir; false when any file is missing.
    bool restore(const std::string& key, const std::vector<std::string>& filenames,
                 const std::string& outdir) const;
    void store(const std::string& key, const std::vector<std::string>& filenames,
               const std::string& outdir) const;

private:
    std::string dir_;
    bool enabled_;
};

}  // namespace perispec
