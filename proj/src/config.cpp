#include "perispec/config.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace perispec {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) fail(path + "." + it.key(), "unknown key");
    }
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) fail(path + "." + key, "required key missing");
    return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

Eigen::Vector2d as_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
    return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

Shape parse_shape(const json& v, const std::string& path) {
    expect_keys(v, path, {"kind", "center", "radius", "lo", "hi", "vertices"});
    std::string kind = require(v, path, "kind").get<std::string>();
    if (kind == "disk") {
        expect_keys(v, path, {"kind", "center", "radius"});
        return Disk{as_point(require(v, path, "center"), path + ".center"),
                    as_number(require(v, path, "radius"), path + ".radius")};
    }
    if (kind == "rect") {
        expect_keys(v, path, {"kind", "lo", "hi"});
        return AxisRect{as_point(require(v, path, "lo"), path + ".lo"),
                        as_point(require(v, path, "hi"), path + ".hi")};
    }
    if (kind == "polygon") {
        expect_keys(v, path, {"kind", "vertices"});
        const json& vs = require(v, path, "vertices");
        if (!vs.is_array()) fail(path + ".vertices", "expected an array");
        Polygon poly;
        for (size_t i = 0; i < vs.size(); ++i)
            poly.vertices.push_back(as_point(vs[i], path + ".vertices[" + std::to_string(i) + "]"));
        return poly;
    }
    fail(path + ".kind", "unknown shape kind '" + kind + "'");
}

std::vector<Shape> parse_shapes(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of shapes");
    std::vector<Shape> out;
    for (size_t i = 0; i < v.size(); ++i)
        out.push_back(parse_shape(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

MatC parse_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a nonempty matrix");
    size_t m = v.size();
    MatC a(m, m);
    for (size_t r = 0; r < m; ++r) {
        const json& row = v[r];
        if (!row.is_array() || row.size() != m)
            fail(path, "matrix must be square, row-major");
        for (size_t c = 0; c < m; ++c) {
            const json& e = row[c];
            std::string ep = path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
            if (!e.is_array() || e.size() != 2) fail(ep, "expected a [re, im] pair");
            a(r, c) = Complex(as_number(e[0], ep), as_number(e[1], ep));
        }
    }
    double dev = hermitian_deviation(a);
    if (dev > 1e-12)
        std::cerr << "warning: " << path << " deviates from Hermitian by " << dev
                  << "; symmetrized\n";
    return hermitize(a);
}

std::vector<MatrixOverride> parse_matrix_overrides(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
    std::vector<MatrixOverride> out;
    for (size_t i = 0; i < v.size(); ++i) {
        std::string p = path + "[" + std::to_string(i) + "]";
        expect_keys(v[i], p, {"shape", "a"});
        MatrixOverride ov;
        ov.region = parse_shape(require(v[i], p, "shape"), p + ".shape");
        ov.a = parse_matrix(require(v[i], p, "a"), p + ".a");
        out.push_back(std::move(ov));
    }
    return out;
}

CapBC parse_cap(const json& v, const std::string& path) {
    std::string s = v.get<std::string>();
    if (s == "dirichlet") return CapBC::dirichlet;
    if (s == "neumann") return CapBC::neumann;
    fail(path, "expected 'dirichlet' or 'neumann'");
}

}  // namespace

RunConfig parse_config_json(const json& doc) {
    RunConfig cfg;
    cfg.raw = doc;
    expect_keys(doc, "config",
                {"geometry", "operator", "discretization", "tolerances", "outputs", "seed",
                 "weyl"});

    // geometry
    const json& geo = require(doc, "config", "geometry");
    expect_keys(geo, "geometry", {"cell", "waveguide"});
    const json& cell = require(geo, "geometry", "cell");
    expect_keys(cell, "geometry.cell", {"margin_d", "holes"});
    cfg.cell.margin_d = as_number(require(cell, "geometry.cell", "margin_d"),
                                  "geometry.cell.margin_d");
    cfg.cell.holes = parse_shapes(require(cell, "geometry.cell", "holes"), "geometry.cell.holes");
    if (geo.contains("waveguide")) {
        const json& wg = geo.at("waveguide");
        expect_keys(wg, "geometry.waveguide", {"half_width_h", "holes", "transition_R"});
        WaveguideSpec spec;
        spec.half_width_h =
            as_int(require(wg, "geometry.waveguide", "half_width_h"),
                   "geometry.waveguide.half_width_h");
        spec.holes = parse_shapes(require(wg, "geometry.waveguide", "holes"),
                                  "geometry.waveguide.holes");
        if (wg.contains("transition_R"))
            spec.transition_R = as_int(wg.at("transition_R"), "geometry.waveguide.transition_R");
        cfg.waveguide = std::move(spec);
    }

    // operator
    const json& op = require(doc, "config", "operator");
    expect_keys(op, "operator", {"symbol", "hole_bc", "background", "waveguide_patch"});
    std::string sym = require(op, "operator", "symbol").get<std::string>();
    if (sym == "scalar")
        cfg.symbol_kind = SymbolKind::scalar;
    else if (sym == "elasticity")
        cfg.symbol_kind = SymbolKind::elasticity;
    else
        fail("operator.symbol", "expected 'scalar' or 'elasticity'");

    std::string bc = require(op, "operator", "hole_bc").get<std::string>();
    if (bc == "neumann")
        cfg.field.hole_bc = HoleBC::neumann;
    else if (bc == "dirichlet")
        cfg.field.hole_bc = HoleBC::dirichlet;
    else
        fail("operator.hole_bc", "expected 'neumann' or 'dirichlet'");

    const json& bg = require(op, "operator", "background");
    expect_keys(bg, "operator.background", {"a", "rho", "a_overrides", "rho_overrides"});
    cfg.field.background_a = parse_matrix(require(bg, "operator.background", "a"),
                                          "operator.background.a");
    cfg.field.background_rho =
        as_number(require(bg, "operator.background", "rho"), "operator.background.rho");
    if (bg.contains("a_overrides"))
        cfg.field.a_overrides =
            parse_matrix_overrides(bg.at("a_overrides"), "operator.background.a_overrides");
    if (bg.contains("rho_overrides")) {
        const json& rv = bg.at("rho_overrides");
        if (!rv.is_array()) fail("operator.background.rho_overrides", "expected an array");
        for (size_t i = 0; i < rv.size(); ++i) {
            std::string p = "operator.background.rho_overrides[" + std::to_string(i) + "]";
            expect_keys(rv[i], p, {"shape", "rho"});
            DensityOverride ov;
            ov.region = parse_shape(require(rv[i], p, "shape"), p + ".shape");
            ov.rho = as_number(require(rv[i], p, "rho"), p + ".rho");
            cfg.field.rho_overrides.push_back(std::move(ov));
        }
    }
    if (op.contains("waveguide_patch")) {
        const json& wp = op.at("waveguide_patch");
        expect_keys(wp, "operator.waveguide_patch", {"a_overrides", "transition"});
        if (wp.contains("a_overrides"))
            cfg.field.patch_overrides = parse_matrix_overrides(
                wp.at("a_overrides"), "operator.waveguide_patch.a_overrides");
        if (wp.contains("transition")) {
            const json& tr = wp.at("transition");
            if (!tr.is_array()) fail("operator.waveguide_patch.transition", "expected an array");
            for (size_t i = 0; i < tr.size(); ++i)
                cfg.field.transition.push_back(parse_matrix_overrides(
                    tr[i], "operator.waveguide_patch.transition[" + std::to_string(i) + "]"));
        }
    }

    int m_expected = cfg.symbol_kind == SymbolKind::scalar ? 2 : 3;
    if (cfg.field.m() != m_expected)
        fail("operator.background.a", "matrix must be " + std::to_string(m_expected) + "x" +
                                          std::to_string(m_expected) + " for this symbol");
    for (const auto& ov : cfg.field.a_overrides)
        if (ov.a.rows() != m_expected)
            fail("operator.background.a_overrides", "override size mismatch");
    for (const auto& ov : cfg.field.patch_overrides)
        if (ov.a.rows() != m_expected)
            fail("operator.waveguide_patch.a_overrides", "override size mismatch");

    // discretization
    const json& disc = require(doc, "config", "discretization");
    expect_keys(disc, "discretization",
                {"n", "m_grid", "k", "m_line", "strip_k", "band_k", "zeta_grid", "t_list",
                 "cap_bc"});
    cfg.disc.n = as_int(require(disc, "discretization", "n"), "discretization.n");
    cfg.disc.m_grid = as_int(require(disc, "discretization", "m_grid"), "discretization.m_grid");
    cfg.disc.k = as_int(require(disc, "discretization", "k"), "discretization.k");
    if (disc.contains("m_line")) cfg.disc.m_line = as_int(disc.at("m_line"), "discretization.m_line");
    if (disc.contains("strip_k"))
        cfg.disc.strip_k = as_int(disc.at("strip_k"), "discretization.strip_k");
    if (disc.contains("band_k"))
        cfg.disc.band_k = as_int(disc.at("band_k"), "discretization.band_k");
    if (disc.contains("zeta_grid"))
        cfg.disc.zeta_grid = as_int(disc.at("zeta_grid"), "discretization.zeta_grid");
    if (disc.contains("t_list")) {
        cfg.disc.t_list.clear();
        for (size_t i = 0; i < disc.at("t_list").size(); ++i)
            cfg.disc.t_list.push_back(
                as_int(disc.at("t_list")[i], "discretization.t_list[" + std::to_string(i) + "]"));
    }
    if (disc.contains("cap_bc")) {
        cfg.disc.caps.clear();
        const json& caps = disc.at("cap_bc");
        if (!caps.is_array()) fail("discretization.cap_bc", "expected an array");
        for (size_t i = 0; i < caps.size(); ++i)
            cfg.disc.caps.push_back(
                parse_cap(caps[i], "discretization.cap_bc[" + std::to_string(i) + "]"));
    }

    // tolerances (defaults allowed)
    if (doc.contains("tolerances")) {
        const json& tol = doc.at("tolerances");
        expect_keys(tol, "tolerances",
                    {"tol_band", "tol_stab", "eig_tol", "beta_min", "fit_rms_max",
                     "match_min_overlap", "match_ambiguity", "dense_threshold"});
        if (tol.contains("tol_band")) cfg.tol.tol_band = as_number(tol.at("tol_band"), "tolerances.tol_band");
        if (tol.contains("tol_stab")) cfg.tol.tol_stab = as_number(tol.at("tol_stab"), "tolerances.tol_stab");
        if (tol.contains("eig_tol")) cfg.tol.eig_tol = as_number(tol.at("eig_tol"), "tolerances.eig_tol");
        if (tol.contains("beta_min")) cfg.tol.beta_min = as_number(tol.at("beta_min"), "tolerances.beta_min");
        if (tol.contains("fit_rms_max"))
            cfg.tol.fit_rms_max = as_number(tol.at("fit_rms_max"), "tolerances.fit_rms_max");
        if (tol.contains("match_min_overlap"))
            cfg.tol.match_min_overlap =
                as_number(tol.at("match_min_overlap"), "tolerances.match_min_overlap");
        if (tol.contains("match_ambiguity"))
            cfg.tol.match_ambiguity =
                as_number(tol.at("match_ambiguity"), "tolerances.match_ambiguity");
        if (tol.contains("dense_threshold"))
            cfg.tol.dense_threshold = as_int(tol.at("dense_threshold"), "tolerances.dense_threshold");
    }

    // outputs
    if (doc.contains("outputs")) {
        const json& out = doc.at("outputs");
        expect_keys(out, "outputs", {"dir", "formats"});
        if (out.contains("dir")) cfg.out.dir = out.at("dir").get<std::string>();
        if (out.contains("formats")) {
            cfg.out.json = cfg.out.csv = cfg.out.svg = false;
            for (const auto& f : out.at("formats")) {
                std::string s = f.get<std::string>();
                if (s == "json")
                    cfg.out.json = true;
                else if (s == "csv")
                    cfg.out.csv = true;
                else if (s == "svg")
                    cfg.out.svg = true;
                else
                    fail("outputs.formats", "unknown format '" + s + "'");
            }
        }
    }

    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer())
            fail("seed", "expected an integer");
        cfg.seed = doc.at("seed").get<uint64_t>();
    }

    // weyl section
    if (doc.contains("weyl")) {
        const json& w = doc.at("weyl");
        expect_keys(w, "weyl",
                    {"kind", "j_min", "j_max", "L", "plateau_d", "eta", "band_index", "detune",
                     "zeta", "slope_window"});
        WeylConfig wc;
        std::string kind = require(w, "weyl", "kind").get<std::string>();
        if (kind == "bloch")
            wc.kind = WeylKind::bloch;
        else if (kind == "floquet")
            wc.kind = WeylKind::floquet;
        else
            fail("weyl.kind", "expected 'bloch' or 'floquet'");
        wc.j_min = as_int(require(w, "weyl", "j_min"), "weyl.j_min");
        wc.j_max = as_int(require(w, "weyl", "j_max"), "weyl.j_max");
        wc.L = as_int(require(w, "weyl", "L"), "weyl.L");
        if (w.contains("plateau_d")) wc.plateau_d = as_number(w.at("plateau_d"), "weyl.plateau_d");
        if (wc.kind == WeylKind::bloch) {
            Eigen::Vector2d eta = as_point(require(w, "weyl", "eta"), "weyl.eta");
            wc.eta1 = eta.x();
            wc.eta2 = eta.y();
            if (w.contains("band_index"))
                wc.band_index = as_int(w.at("band_index"), "weyl.band_index");
        } else {
            wc.zeta = as_number(require(w, "weyl", "zeta"), "weyl.zeta");
        }
        if (w.contains("detune")) wc.detune = as_number(w.at("detune"), "weyl.detune");
        if (w.contains("slope_window")) {
            Eigen::Vector2d sw = as_point(w.at("slope_window"), "weyl.slope_window");
            wc.slope_lo = sw.x();
            wc.slope_hi = sw.y();
        }
        cfg.weyl = wc;
    }

    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    return parse_config_json(doc);
}

ValidationReport validate_config(const RunConfig& cfg) {
    ValidationReport rep = validate_cell(cfg.cell);
    if (cfg.waveguide) {
        ValidationReport wrep = validate_waveguide(cfg.cell, *cfg.waveguide);
        rep.errors.insert(rep.errors.end(), wrep.errors.begin(), wrep.errors.end());
    }

    if (cfg.disc.n < 4) rep.errors.push_back("discretization.n must be at least 4");
    if (cfg.disc.m_grid < 1) rep.errors.push_back("discretization.m_grid must be positive");
    if (cfg.disc.k < 1) rep.errors.push_back("discretization.k must be positive");
    if (cfg.disc.zeta_grid < 9)
        rep.errors.push_back("discretization.zeta_grid must be at least 9");
    if (cfg.disc.t_list.size() < 2)
        rep.errors.push_back("discretization.t_list needs at least two extents");
    if (cfg.waveguide) {
        for (int T : cfg.disc.t_list)
            if (T < cfg.waveguide->half_width_h + 2)
                rep.errors.push_back("discretization.t_list: T=" + std::to_string(T) +
                                     " is below half_width_h + 2");
    }
    if (cfg.disc.caps.empty()) rep.errors.push_back("discretization.cap_bc must not be empty");

    // coefficient sanity at a few probe points
    try {
        OperatorSymbol sym = cfg.symbol();
        (void)sym;
        for (double x : {0.1, 0.5, 0.9})
            for (double y : {0.1, 0.5, 0.9})
                sample_coefficients(cfg.field, Region::background, {x, y});
        if (cfg.waveguide) {
            double h = cfg.waveguide->half_width_h;
            for (double x : {0.1, 0.5, 0.9})
                for (double y : {-h + 0.1, 0.0, h - 0.1})
                    sample_coefficients(cfg.field, Region::waveguide, {x, y});
        }
    } catch (const ConfigError& e) {
        rep.errors.push_back(e.what());
    }

    if (cfg.weyl) {
        const WeylConfig& w = *cfg.weyl;
        if (w.j_max - w.j_min + 1 < 3)
            rep.errors.push_back("weyl: need at least three scales (j_max >= j_min + 2)");
        if ((1 << (w.j_max + 1)) >= w.L)
            rep.errors.push_back("weyl.L too small: need 2^(j_max+1) < L");
        if (!cfg.waveguide) rep.errors.push_back("weyl runs need a geometry.waveguide section");
    }
    return rep;
}

}  // namespace perispec
