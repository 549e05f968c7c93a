#include "perispec/emit.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace perispec {

using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

const char* cap_name(CapBC cap) { return cap == CapBC::dirichlet ? "dirichlet" : "neumann"; }

// Minimal polyline plot: series of (x, y) curves on a fixed canvas.
class SvgPlot {
public:
    SvgPlot(double x_lo, double x_hi, double y_lo, double y_hi)
        : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi) {
        body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
                 "viewBox=\"0 0 640 480\">\n";
        body_ += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
        body_ += "<rect x=\"60\" y=\"20\" width=\"540\" height=\"420\" fill=\"none\" "
                 "stroke=\"black\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                  const std::string& dash = "") {
        if (pts.empty()) return;
        body_ += "<polyline fill=\"none\" stroke=\"" + color + "\"";
        if (!dash.empty()) body_ += " stroke-dasharray=\"" + dash + "\"";
        body_ += " points=\"";
        for (const auto& [x, y] : pts) body_ += fmt(px(x)) + "," + fmt(py(y)) + " ";
        body_ += "\"/>\n";
    }

    void marker(double x, double y, const std::string& color) {
        body_ += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"3\" fill=\"" +
                 color + "\"/>\n";
    }

    std::string finish() { return body_ + "</svg>\n"; }

private:
    double px(double x) const {
        double t = x_hi_ > x_lo_ ? (x - x_lo_) / (x_hi_ - x_lo_) : 0.5;
        return 60.0 + 540.0 * t;
    }
    double py(double y) const {
        double t = y_hi_ > y_lo_ ? (y - y_lo_) / (y_hi_ - y_lo_) : 0.5;
        return 440.0 - 420.0 * t;
    }
    double x_lo_, x_hi_, y_lo_, y_hi_;
    std::string body_;
};

const char* palette(int i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    return colors[i % 8];
}

}  // namespace

json provenance_json(const RunConfig& cfg) {
    json p;
    p["tool"] = "perispec";
    p["n"] = cfg.disc.n;
    p["m_grid"] = cfg.disc.m_grid;
    p["m_line"] = cfg.disc.m_line;
    p["k"] = cfg.disc.k;
    p["strip_k"] = cfg.disc.strip_k;
    p["band_k"] = cfg.disc.band_k;
    p["zeta_grid"] = cfg.disc.zeta_grid;
    p["t_list"] = cfg.disc.t_list;
    json caps = json::array();
    for (CapBC c : cfg.disc.caps) caps.push_back(cap_name(c));
    p["cap_bc"] = caps;
    json tol;
    tol["tol_band"] = cfg.tol.tol_band;
    tol["tol_stab"] = cfg.tol.tol_stab;
    tol["eig_tol"] = cfg.tol.eig_tol;
    tol["beta_min"] = cfg.tol.beta_min;
    tol["fit_rms_max"] = cfg.tol.fit_rms_max;
    p["tolerances"] = tol;
    p["seed"] = cfg.seed;
    p["symbol"] = cfg.symbol_kind == SymbolKind::scalar ? "scalar" : "elasticity";
    return p;
}

json interval_json(const Interval& iv) {
    json j;
    j["lo"] = iv.lo;
    j["hi"] = iv.hi;
    j["lo_closed"] = iv.lo_closed;
    j["hi_closed"] = iv.hi_closed;
    return j;
}

json interval_union_json(const IntervalUnion& u) {
    json arr = json::array();
    for (const auto& iv : u) arr.push_back(interval_json(iv));
    return arr;
}

json bands_json(const BandFunction& bf, const BandSummary& summary, const RunConfig& cfg) {
    json doc;
    json bands = json::array();
    for (const auto& b : summary.bands) {
        json item;
        item["k"] = b.k;
        item["interval"] = interval_json(b.iv);
        bands.push_back(item);
    }
    doc["bands"] = bands;
    doc["sigma0"] = interval_union_json(summary.sigma0);
    json gaps = json::array();
    for (const auto& g : summary.gaps) gaps.push_back(interval_json(g));
    doc["gaps"] = gaps;
    doc["trust_ceiling"] = summary.trust_ceiling;
    doc["continuity_modulus"] = bf.continuity_modulus;
    doc["grid"] = bf.grid;
    json values = json::array();
    for (int g = 0; g < bf.values.rows(); ++g) {
        json row = json::array();
        for (int k = 0; k < bf.values.cols(); ++k) row.push_back(bf.values(g, k));
        values.push_back(row);
    }
    doc["lambda"] = values;
    doc["provenance"] = provenance_json(cfg);
    return doc;
}

std::string bands_csv(const BandFunction& bf) {
    std::string out = "eta1,eta2,k,lambda\n";
    for (int gy = 0; gy < bf.m_grid; ++gy)
        for (int gx = 0; gx < bf.m_grid; ++gx)
            for (int k = 0; k < bf.count; ++k) {
                int g = gx + bf.m_grid * gy;
                out += fmt(bf.grid[gx]) + "," + fmt(bf.grid[gy]) + "," +
                       std::to_string(k + 1) + "," + fmt(bf.values(g, k)) + "\n";
            }
    return out;
}

std::string bands_svg(const BandFunction& bf) {
    int total = bf.m_grid * bf.m_grid;
    double y_hi = bf.values.maxCoeff();
    SvgPlot plot(0, total > 1 ? total - 1 : 1, 0.0, y_hi * 1.05 + 1e-12);
    for (int k = 0; k < bf.count; ++k) {
        std::vector<std::pair<double, double>> pts;
        for (int g = 0; g < total; ++g) pts.push_back({static_cast<double>(g), bf.values(g, k)});
        plot.polyline(pts, palette(k));
    }
    return plot.finish();
}

json dispersion_json(const DispersionReport& rep, const RunConfig& cfg) {
    json doc;
    doc["zetas"] = rep.zetas;
    json segs = json::array();
    for (const auto& seg : rep.segments) {
        json s;
        s["id"] = seg.id;
        auto type_name = [](EndpointType t) {
            switch (t) {
                case EndpointType::band_edge: return "band_edge";
                case EndpointType::periodic: return "periodic";
                default: return "interior";
            }
        };
        s["start_type"] = type_name(seg.start_type);
        s["end_type"] = type_name(seg.end_type);
        s["split_start"] = seg.split_start;
        s["split_end"] = seg.split_end;
        json samples = json::array();
        for (const auto& p : seg.samples) {
            json q;
            q["zeta"] = p.zeta;
            q["lambda"] = p.lambda;
            q["class"] = p.cls == BandClass::in_gap ? "in_gap" : "in_band";
            q["certified"] = p.certified;
            samples.push_back(q);
        }
        s["samples"] = samples;
        segs.push_back(s);
    }
    doc["segments"] = segs;

    auto trapped_json = [](const TrappedMode& tm) {
        json t;
        t["zeta"] = tm.zeta;
        t["lambda"] = tm.lambda;
        t["beta_fit"] = tm.beta_fit;
        t["fit_rms"] = tm.fit_rms;
        t["branch"] = tm.branch;
        json cases = json::array();
        for (const auto& c : tm.stability.cases) {
            json cc;
            cc["T"] = c.T;
            cc["cap"] = cap_name(c.cap);
            cc["lambda"] = c.lambda;
            cases.push_back(cc);
        }
        t["stability_cases"] = cases;
        t["stability_spread_rel"] = tm.stability.spread_rel;
        t["stable"] = tm.stability.stable;
        if (!tm.note.empty()) t["note"] = tm.note;
        return t;
    };
    json trapped = json::array();
    for (const auto& tm : rep.trapped) trapped.push_back(trapped_json(tm));
    doc["trapped_modes"] = trapped;
    json rejected = json::array();
    for (const auto& tm : rep.rejected) rejected.push_back(trapped_json(tm));
    doc["rejected_candidates"] = rejected;

    doc["sigma_sharp"] = interval_union_json(rep.sigma_sharp_union);
    doc["sharp_trust_ceiling"] = rep.sharp_ceiling;
    doc["base_T"] = rep.base_T;
    doc["base_cap"] = cap_name(rep.base_cap);
    doc["provenance"] = provenance_json(cfg);
    return doc;
}

std::string dispersion_csv(const DispersionReport& rep) {
    std::string out = "zeta,branch,lambda,classification\n";
    for (const auto& seg : rep.segments)
        for (const auto& p : seg.samples)
            out += fmt(p.zeta) + "," + std::to_string(seg.id) + "," + fmt(p.lambda) + "," +
                   (p.cls == BandClass::in_gap ? "in_gap" : "in_band") + "\n";
    return out;
}

std::string dispersion_svg(const DispersionReport& rep) {
    double y_hi = 1.0;
    for (const auto& seg : rep.segments)
        for (const auto& p : seg.samples) y_hi = std::max(y_hi, p.lambda);
    SvgPlot plot(0.0, two_pi, 0.0, y_hi * 1.05);
    // partial band rectangles as vertical strokes at each zeta
    for (size_t i = 0; i < rep.partials.size(); ++i) {
        for (const auto& iv : rep.partials[i].bands) {
            plot.polyline({{rep.partials[i].zeta, iv.lo}, {rep.partials[i].zeta, iv.hi}},
                          "#cccccc");
        }
    }
    for (const auto& seg : rep.segments) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : seg.samples) pts.push_back({p.zeta, p.lambda});
        plot.polyline(pts, palette(seg.id));
        for (const auto& p : seg.samples)
            if (p.cls == BandClass::in_gap)
                plot.marker(p.zeta, p.lambda, p.certified ? "#d62728" : "#999999");
    }
    return plot.finish();
}

json spectrum_json(const SpectrumReport& rep, const RunConfig& cfg) {
    json doc;
    json bands = json::array();
    for (const auto& b : rep.bands) {
        json item;
        item["k"] = b.k;
        item["interval"] = interval_json(b.iv);
        bands.push_back(item);
    }
    doc["bands"] = bands;
    json gaps = json::array();
    for (const auto& g : rep.gaps) gaps.push_back(interval_json(g));
    doc["gaps"] = gaps;
    doc["sigma0"] = interval_union_json(rep.sigma0);
    doc["sigma_sharp"] = interval_union_json(rep.sharp);
    doc["sigma_es"] = interval_union_json(rep.sigma_es);
    doc["sigma_ad"] = interval_union_json(rep.sigma_ad);
    doc["trust_ceiling"] = rep.trust_ceiling;
    doc["ceiling_clipped"] = rep.ceiling_clipped;
    doc["union_check"] = rep.union_check;
    doc["provenance"] = provenance_json(cfg);
    return doc;
}

json weyl_json(const WeylRun& run, const RunConfig& cfg) {
    json doc;
    doc["kind"] = run.kind == WeylKind::bloch ? "bloch" : "floquet";
    doc["lambda"] = run.lambda;
    json scales = json::array();
    for (const auto& s : run.scales) {
        json item;
        item["j"] = s.j;
        item["norm_m_sq"] = s.norm_m_sq;
        item["residual"] = s.residual;
        scales.push_back(item);
    }
    doc["scales"] = scales;
    json rf;
    rf["slope"] = run.residual_fit.slope;
    rf["intercept"] = run.residual_fit.intercept;
    rf["stderr"] = run.residual_fit.stderr_slope;
    doc["residual_fit"] = rf;
    json nf;
    nf["slope"] = run.norm_fit.slope;
    nf["intercept"] = run.norm_fit.intercept;
    nf["stderr"] = run.norm_fit.stderr_slope;
    doc["norm_fit"] = nf;
    doc["provenance"] = provenance_json(cfg);
    return doc;
}

std::string weyl_csv(const WeylRun& run) {
    std::string out = "j,norm_m_sq,residual\n";
    for (const auto& s : run.scales)
        out += std::to_string(s.j) + "," + fmt(s.norm_m_sq) + "," + fmt(s.residual) + "\n";
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

}  // namespace perispec
