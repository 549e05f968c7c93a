#include "perispec/cache.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace perispec {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

uint64_t fnv1a64(std::string_view data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

void copy_if_present(json& dst, const json& src, const std::string& key) {
    if (src.contains(key)) dst[key] = src.at(key);
}

void copy_path(json& dst, const json& src, const std::string& outer, const std::string& key) {
    if (src.contains(outer) && src.at(outer).contains(key)) dst[outer][key] = src.at(outer).at(key);
}

}  // namespace

std::string product_key_material(const json& raw, Product p) {
    json sub = json::object();
    sub["product"] = static_cast<int>(p);
    copy_if_present(sub, raw, "seed");
    if (raw.contains("geometry")) {
        copy_path(sub, raw, "geometry", "cell");
        if (p != Product::bands) copy_path(sub, raw, "geometry", "waveguide");
    }
    copy_if_present(sub, raw, "operator");

    if (raw.contains("discretization")) {
        const json& d = raw.at("discretization");
        copy_path(sub, raw, "discretization", "n");
        switch (p) {
            case Product::bands:
                copy_path(sub, raw, "discretization", "m_grid");
                copy_path(sub, raw, "discretization", "k");
                break;
            case Product::dispersion:
                copy_path(sub, raw, "discretization", "m_line");
                copy_path(sub, raw, "discretization", "strip_k");
                copy_path(sub, raw, "discretization", "band_k");
                copy_path(sub, raw, "discretization", "zeta_grid");
                copy_path(sub, raw, "discretization", "t_list");
                copy_path(sub, raw, "discretization", "cap_bc");
                break;
            case Product::spectrum:
            case Product::weyl:
                sub["discretization"] = d;
                break;
        }
    }
    copy_if_present(sub, raw, "tolerances");
    if (p == Product::weyl) copy_if_present(sub, raw, "weyl");
    return sub.dump();
}

std::string product_hash(const json& raw, Product p) {
    std::ostringstream os;
    os << std::hex << fnv1a64(product_key_material(raw, p));
    return os.str();
}

ArtifactCache::ArtifactCache(const std::string& outdir, bool enabled) : enabled_(enabled) {
    const char* env = std::getenv("PERISPEC_CACHE_DIR");
    dir_ = env && *env ? std::string(env) : (fs::path(outdir) / ".perispec-cache").string();
}

bool ArtifactCache::restore(const std::string& key, const std::vector<std::string>& filenames,
                            const std::string& outdir) const {
    if (!enabled_) return false;
    fs::path entry = fs::path(dir_) / key;
    for (const auto& f : filenames)
        if (!fs::exists(entry / f)) return false;
    fs::create_directories(outdir);
    for (const auto& f : filenames)
        fs::copy_file(entry / f, fs::path(outdir) / f, fs::copy_options::overwrite_existing);
    return true;
}

void ArtifactCache::store(const std::string& key, const std::vector<std::string>& filenames,
                          const std::string& outdir) const {
    if (!enabled_) return;
    fs::path entry = fs::path(dir_) / key;
    fs::create_directories(entry);
    for (const auto& f : filenames) {
        fs::path src = fs::path(outdir) / f;
        if (fs::exists(src))
            fs::copy_file(src, entry / f, fs::copy_options::overwrite_existing);
    }
}

}  // namespace perispec
