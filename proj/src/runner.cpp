#include "perispec/runner.hpp"

#include <filesystem>
#include <ostream>

namespace perispec {

namespace {

namespace fs = std::filesystem;

SweepOptions sweep_options(const RunConfig& cfg, int workers) {
    SweepOptions opts;
    opts.workers = workers;
    opts.eig.tol = cfg.tol.eig_tol;
    opts.eig.dense_threshold = cfg.tol.dense_threshold;
    opts.eig.seed = cfg.seed;
    return opts;
}

DispersionOptions dispersion_options(const RunConfig& cfg) {
    DispersionOptions d;
    d.zeta_count = cfg.disc.zeta_grid;
    d.m_line = cfg.disc.m_line;
    d.count = cfg.disc.strip_k;
    d.band_count = cfg.disc.band_k;
    d.t_list = cfg.disc.t_list;
    d.caps = cfg.disc.caps;
    d.tol_band = cfg.tol.tol_band;
    d.tol_stab = cfg.tol.tol_stab;
    d.beta_min = cfg.tol.beta_min;
    d.fit_rms_max = cfg.tol.fit_rms_max;
    d.match_min_overlap = cfg.tol.match_min_overlap;
    d.match_ambiguity = cfg.tol.match_ambiguity;
    return d;
}

std::string resolve_outdir(const RunConfig& cfg, const RunOptions& opts) {
    return opts.out_override.empty() ? cfg.out.dir : opts.out_override;
}

std::vector<std::string> select_files(const RunConfig& cfg,
                                      const std::vector<std::pair<std::string, char>>& items) {
    // tag j/c/s selects by enabled formats
    std::vector<std::string> out;
    for (const auto& [name, tag] : items) {
        if (tag == 'j' && !cfg.out.json) continue;
        if (tag == 'c' && !cfg.out.csv) continue;
        if (tag == 's' && !cfg.out.svg) continue;
        out.push_back(name);
    }
    return out;
}

void require_valid(const RunConfig& cfg) {
    ValidationReport rep = validate_config(cfg);
    if (!rep.valid()) throw ValidationError(rep.summary());
}

WaveguideSpec waveguide_or_throw(const RunConfig& cfg) {
    if (!cfg.waveguide)
        throw ValidationError("this command needs a geometry.waveguide section");
    return *cfg.waveguide;
}

void emit_bands(const RunConfig& cfg, const BandsProduct& prod, const std::string& outdir) {
    if (cfg.out.json)
        write_text_file((fs::path(outdir) / "bands.json").string(),
                        bands_json(prod.bf, prod.summary, cfg).dump(2) + "\n");
    if (cfg.out.csv)
        write_text_file((fs::path(outdir) / "bands.csv").string(), bands_csv(prod.bf));
    if (cfg.out.svg)
        write_text_file((fs::path(outdir) / "bands.svg").string(), bands_svg(prod.bf));
}

void emit_dispersion(const RunConfig& cfg, const DispersionReport& rep,
                     const std::string& outdir) {
    if (cfg.out.json)
        write_text_file((fs::path(outdir) / "dispersion.json").string(),
                        dispersion_json(rep, cfg).dump(2) + "\n");
    if (cfg.out.csv)
        write_text_file((fs::path(outdir) / "dispersion.csv").string(), dispersion_csv(rep));
    if (cfg.out.svg)
        write_text_file((fs::path(outdir) / "dispersion.svg").string(), dispersion_svg(rep));
}

}  // namespace

BandsProduct compute_bands(const RunConfig& cfg, int workers) {
    BandsProduct prod;
    prod.bf = sample_band_functions(cfg.cell, cfg.field, cfg.symbol(), cfg.disc.n,
                                    cfg.disc.m_grid, cfg.disc.k, sweep_options(cfg, workers));
    prod.summary = bands_from_samples(prod.bf);
    return prod;
}

DispersionReport compute_dispersion(const RunConfig& cfg, int workers) {
    WaveguideSpec wg = waveguide_or_throw(cfg);
    return sweep_dispersion(cfg.cell, wg, cfg.field, cfg.symbol(), cfg.disc.n,
                            dispersion_options(cfg), sweep_options(cfg, workers));
}

WeylRun compute_weyl(const RunConfig& cfg, int workers) {
    if (!cfg.weyl) throw ValidationError("config has no weyl section");
    WaveguideSpec wg = waveguide_or_throw(cfg);
    const WeylConfig& w = *cfg.weyl;
    SweepOptions opts = sweep_options(cfg, workers);

    PlaneMesh pmesh = build_truncated_plane_mesh(cfg.cell, wg, w.L, cfg.disc.n);
    AssembledPair plane = assemble_plane_pair(pmesh, cfg.symbol(), cfg.field);

    if (w.kind == WeylKind::bloch) {
        CellMesh cmesh = rasterize_cell(cfg.cell, cfg.disc.n);
        BlochMomentum eta(w.eta1, w.eta2);
        AssembledPair cell = assemble_cell_pair(cmesh, cfg.symbol(), cfg.field, eta);
        EigenResult eig = lowest_eigenpairs(cell, w.band_index, opts.eig);
        double lambda = eig.values[w.band_index - 1] + w.detune;
        VecC vec = eig.vectors.col(w.band_index - 1);
        return residual_decay(plane, lambda, w.j_min, w.j_max, WeylKind::bloch, [&](int j) {
            PlateauSpec spec{j, w.plateau_d};
            return build_bloch_weyl_element(pmesh, plane, cell, vec, eta, spec);
        });
    }

    // floquet: locate a certified trapped mode at the requested zeta
    int T = *std::max_element(cfg.disc.t_list.begin(), cfg.disc.t_list.end());
    CapBC cap = cfg.disc.caps.front();
    StripSolve solve = strip_spectrum(cfg.cell, wg, cfg.field, cfg.symbol(), w.zeta, T,
                                      cfg.disc.n, cfg.disc.strip_k, cap, opts);
    PartialBands partial = partial_bands(cfg.cell, cfg.field, cfg.symbol(), cfg.disc.n, w.zeta,
                                         cfg.disc.m_line, cfg.disc.band_k, opts);
    auto classes = classify_strip_eigenvalues(solve.eig.values, partial, cfg.tol.tol_band);

    int pick = -1;
    double best_beta = cfg.tol.beta_min;
    DecayFit pick_fit;
    for (int i = 0; i < solve.eig.values.size(); ++i) {
        if (classes[i] != BandClass::in_gap) continue;
        VecR profile = strip_row_profile(solve.mesh, solve.pair.dofs, solve.eig.vectors.col(i));
        DecayFit fit = fit_decay_rate(profile, solve.mesh.h, solve.mesh.T);
        if (!(fit.beta > cfg.tol.beta_min) || !(fit.rms <= cfg.tol.fit_rms_max)) continue;
        TruncationRecord rec = truncation_stability(cfg.cell, wg, cfg.field, cfg.symbol(),
                                                    w.zeta, solve.eig.values[i], cfg.disc.t_list,
                                                    cfg.disc.caps, cfg.disc.n, cfg.disc.strip_k,
                                                    cfg.tol.tol_stab, opts);
        if (!rec.stable) continue;
        if (fit.beta > best_beta) {
            best_beta = fit.beta;
            pick = i;
            pick_fit = fit;
        }
    }
    if (pick < 0)
        throw ValidationError("no certified trapped mode at zeta=" + std::to_string(w.zeta));

    double lambda = solve.eig.values[pick] + w.detune;
    VecC vec = solve.eig.vectors.col(pick);
    return residual_decay(plane, lambda, w.j_min, w.j_max, WeylKind::floquet, [&](int j) {
        PlateauSpec spec{j, w.plateau_d};
        return build_floquet_weyl_element(pmesh, plane, solve.mesh, solve.pair, vec, w.zeta,
                                          spec);
    });
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
    ValidationReport rep = validate_config(cfg);
    log << rep.summary();
    if (!rep.valid()) return 1;
    return 0;
}

int cmd_bands(const RunConfig& cfg, const RunOptions& opts, std::ostream& log) {
    require_valid(cfg);
    std::string outdir = resolve_outdir(cfg, opts);
    auto files = select_files(cfg, {{"bands.json", 'j'}, {"bands.csv", 'c'}, {"bands.svg", 's'}});
    ArtifactCache cache(outdir, opts.use_cache);
    std::string key = product_hash(cfg.raw, Product::bands);
    if (cache.restore(key, files, outdir)) {
        log << "bands: cache hit " << key << "\n";
        return 0;
    }
    BandsProduct prod = compute_bands(cfg, opts.workers);
    emit_bands(cfg, prod, outdir);
    cache.store(key, files, outdir);
    log << "bands: wrote " << files.size() << " artifact(s) to " << outdir << "\n";
    return 0;
}

int cmd_dispersion(const RunConfig& cfg, const RunOptions& opts, std::ostream& log) {
    require_valid(cfg);
    waveguide_or_throw(cfg);
    std::string outdir = resolve_outdir(cfg, opts);
    auto files = select_files(
        cfg, {{"dispersion.json", 'j'}, {"dispersion.csv", 'c'}, {"dispersion.svg", 's'}});
    ArtifactCache cache(outdir, opts.use_cache);
    std::string key = product_hash(cfg.raw, Product::dispersion);
    if (cache.restore(key, files, outdir)) {
        log << "dispersion: cache hit " << key << "\n";
        return 0;
    }
    DispersionReport rep = compute_dispersion(cfg, opts.workers);
    emit_dispersion(cfg, rep, outdir);
    cache.store(key, files, outdir);
    log << "dispersion: " << rep.trapped.size() << " certified trapped sample(s), sigma_sharp "
        << rep.sigma_sharp_union.size() << " component(s)\n";
    return 0;
}

int cmd_spectrum(const RunConfig& cfg, const RunOptions& opts, std::ostream& log) {
    require_valid(cfg);
    waveguide_or_throw(cfg);
    std::string outdir = resolve_outdir(cfg, opts);
    auto files = select_files(cfg, {{"bands.json", 'j'},
                                    {"bands.csv", 'c'},
                                    {"bands.svg", 's'},
                                    {"dispersion.json", 'j'},
                                    {"dispersion.csv", 'c'},
                                    {"dispersion.svg", 's'},
                                    {"spectrum.json", 'j'}});
    ArtifactCache cache(outdir, opts.use_cache);
    std::string key = product_hash(cfg.raw, Product::spectrum);
    if (cache.restore(key, files, outdir)) {
        log << "spectrum: cache hit " << key << "\n";
        return 0;
    }

    BandsProduct bands = compute_bands(cfg, opts.workers);
    DispersionReport disp = compute_dispersion(cfg, opts.workers);
    SpectrumReport rep =
        essential_spectrum_union(bands.summary, disp.sigma_sharp_union, disp.sharp_ceiling);

    emit_bands(cfg, bands, outdir);
    emit_dispersion(cfg, disp, outdir);
    write_text_file((fs::path(outdir) / "spectrum.json").string(),
                    spectrum_json(rep, cfg).dump(2) + "\n");
    cache.store(key, files, outdir);
    log << "spectrum: sigma_es has " << rep.sigma_es.size() << " component(s), sigma_ad "
        << rep.sigma_ad.size() << "\n";
    return 0;
}

int cmd_weyl(const RunConfig& cfg, const RunOptions& opts, std::ostream& log) {
    require_valid(cfg);
    if (!cfg.weyl) throw ValidationError("config has no weyl section");
    std::string outdir = resolve_outdir(cfg, opts);
    WeylRun run = compute_weyl(cfg, opts.workers);
    if (cfg.out.json)
        write_text_file((fs::path(outdir) / "weyl.json").string(),
                        weyl_json(run, cfg).dump(2) + "\n");
    if (cfg.out.csv)
        write_text_file((fs::path(outdir) / "weyl.csv").string(), weyl_csv(run));

    const WeylConfig& w = *cfg.weyl;
    bool ok = run.residual_fit.slope >= w.slope_lo && run.residual_fit.slope <= w.slope_hi;
    log << "weyl: residual slope " << run.residual_fit.slope << " (window [" << w.slope_lo
        << ", " << w.slope_hi << "]), norm slope " << run.norm_fit.slope << "\n";
    return ok ? 0 : 1;
}

}  // namespace perispec
