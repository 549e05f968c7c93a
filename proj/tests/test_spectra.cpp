#include <doctest.h>

#include <cmath>

#include "perispec/spectra.hpp"

using namespace perispec;

namespace {

UnitCellGeometry free_cell() { return {}; }

UnitCellGeometry disk_cell() {
    UnitCellGeometry g;
    g.holes.push_back(Disk{{0.5, 0.5}, 0.3});
    g.margin_d = 0.1;
    return g;
}

CoefficientField dirichlet_field() {
    auto f = identity_field(2);
    f.hole_bc = HoleBC::dirichlet;
    return f;
}

}  // namespace

TEST_CASE("momentum grid places pi for odd counts and wraps the end") {
    auto grid = momentum_grid(9);
    CHECK(grid[4] == doctest::Approx(M_PI));
    CHECK(BlochMomentum(grid[8], 0.0).eta1 == 0.0);
    CHECK(momentum_grid(1).size() == 1);
    CHECK(momentum_grid(1)[0] == 0.0);
}

TEST_CASE("free laplacian band function hits the analytic anchors") {
    SweepOptions opts;
    opts.workers = 2;
    auto bf = sample_band_functions(free_cell(), identity_field(2), scalar_symbol(), 16, 9, 1,
                                    opts);
    CHECK(bf.values(0, 0) <= 1e-10);
    int mid = 4 + 9 * 4;
    CHECK(std::abs(bf.values(mid, 0) - 2 * M_PI * M_PI) <= 0.02 * 2 * M_PI * M_PI);
    CHECK(bf.continuity_modulus > 0.0);
}

TEST_CASE("band function obeys conjugation symmetry") {
    SweepOptions opts;
    opts.workers = 2;
    auto bf = sample_band_functions(disk_cell(), dirichlet_field(), scalar_symbol(), 8, 5, 3,
                                    opts);
    int m = 5;
    for (int gy = 0; gy < m; ++gy)
        for (int gx = 0; gx < m; ++gx) {
            int g = gx + m * gy;
            int gm = ((m - 1 - gx) % m) + m * ((m - 1 - gy) % m);
            for (int k = 0; k < 3; ++k)
                CHECK(std::abs(bf.values(g, k) - bf.values(gm, k)) <=
                      1e-8 * std::max(1.0, bf.values(g, k)));
        }
}

TEST_CASE("bands and gaps of the free laplacian") {
    SweepOptions opts;
    opts.workers = 2;
    auto bf = sample_band_functions(free_cell(), identity_field(2), scalar_symbol(), 16, 9, 5,
                                    opts);
    auto sum = bands_from_samples(bf);
    CHECK(sum.bands[0].iv.lo <= 1e-10);
    CHECK(std::abs(sum.bands[0].iv.hi - 2 * M_PI * M_PI) <= 0.02 * 2 * M_PI * M_PI);
    CHECK(sum.gaps.empty());
    CHECK(sum.trust_ceiling > 0.0);
}

TEST_CASE("single-sample band function degenerates to points") {
    SweepOptions opts;
    auto bf = sample_band_functions(free_cell(), identity_field(2), scalar_symbol(), 8, 1, 3,
                                    opts);
    auto sum = bands_from_samples(bf);
    for (const auto& b : sum.bands) CHECK(b.iv.lo == b.iv.hi);
}

TEST_CASE("dirichlet holes kill the zero mode in band sampling") {
    SweepOptions opts;
    auto bf = sample_band_functions(disk_cell(), dirichlet_field(), scalar_symbol(), 16, 1, 1,
                                    opts);
    CHECK(bf.values(0, 0) > 1.0);
}

TEST_CASE("gap edges agree with a doubled-resolution run within 3 percent") {
    SweepOptions coarse_opts;
    coarse_opts.workers = 2;
    SweepOptions fine_opts;
    fine_opts.workers = 2;
    fine_opts.eig.dense_threshold = 400;

    auto coarse = bands_from_samples(sample_band_functions(
        disk_cell(), dirichlet_field(), scalar_symbol(), 16, 9, 6, coarse_opts));
    auto fine = bands_from_samples(sample_band_functions(disk_cell(), dirichlet_field(),
                                                         scalar_symbol(), 32, 17, 6, fine_opts));
    double c_lo = coarse.bands[0].iv.hi, c_hi = coarse.bands[1].iv.lo;
    double f_lo = fine.bands[0].iv.hi, f_hi = fine.bands[1].iv.lo;
    CHECK(c_hi > c_lo);
    CHECK(std::abs(c_lo - f_lo) <= 0.03 * f_lo);
    CHECK(std::abs(c_hi - f_hi) <= 0.03 * f_hi);
}

TEST_CASE("partial bands of the free laplacian at zeta = 0") {
    SweepOptions opts;
    opts.workers = 2;
    auto pb = partial_bands(free_cell(), identity_field(2), scalar_symbol(), 16, 0.0, 9, 1, opts);
    CHECK(pb.bands[0].lo <= 1e-10);
    CHECK(std::abs(pb.bands[0].hi - M_PI * M_PI) <= 0.02 * M_PI * M_PI);
}

TEST_CASE("partial bands are contained in the full bands") {
    SweepOptions opts;
    opts.workers = 2;
    auto bf = sample_band_functions(disk_cell(), dirichlet_field(), scalar_symbol(), 8, 9, 4,
                                    opts);
    auto sum = bands_from_samples(bf);
    double zeta = bf.grid[2];
    auto pb = partial_bands(disk_cell(), dirichlet_field(), scalar_symbol(), 8, zeta, 9, 4, opts);
    for (int k = 0; k < 4; ++k) {
        CHECK(pb.bands[k].lo >= sum.bands[k].iv.lo - 1e-8);
        CHECK(pb.bands[k].hi <= sum.bands[k].iv.hi + 1e-8);
    }
    auto pt = partial_bands(free_cell(), identity_field(2), scalar_symbol(), 8, zeta, 1, 1, opts);
    CHECK(pt.bands[0].lo == pt.bands[0].hi);
}

TEST_CASE("strip spectrum matches the separable oracle") {
    SweepOptions opts;
    WaveguideSpec wg;
    wg.half_width_h = 1;
    int T = 4, n = 8;

    auto solve = strip_spectrum(free_cell(), wg, identity_field(2), scalar_symbol(), 0.0, T, n, 6,
                                CapBC::dirichlet, opts);
    for (int b = 1; b <= 6; ++b) {
        double exact = std::pow(M_PI * b / (2.0 * T), 2);
        CHECK(std::abs(solve.eig.values[b - 1] - exact) <= 0.02 * exact);
    }

    auto neumann = strip_spectrum(free_cell(), wg, identity_field(2), scalar_symbol(), 0.0, T, n,
                                  2, CapBC::neumann, opts);
    CHECK(neumann.eig.values[0] <= 1e-10);
}

TEST_CASE("strip spectrum symmetric under zeta -> 2pi - zeta") {
    SweepOptions opts;
    WaveguideSpec wg;
    wg.half_width_h = 1;
    auto a = strip_spectrum(disk_cell(), wg, dirichlet_field(), scalar_symbol(), 1.0, 4, 8, 6,
                            CapBC::dirichlet, opts);
    auto b = strip_spectrum(disk_cell(), wg, dirichlet_field(), scalar_symbol(), two_pi - 1.0, 4,
                            8, 6, CapBC::dirichlet, opts);
    for (int k = 0; k < 6; ++k)
        CHECK(std::abs(a.eig.values[k] - b.eig.values[k]) <=
              1e-6 * std::max(1.0, a.eig.values[k]));
}

TEST_CASE("classification distances and tie-breaking") {
    PartialBands pb;
    pb.zeta = 0.0;
    pb.bands = {{1.0, 2.0}, {3.0, 4.0}};
    pb.trust_ceiling = 10.0;

    VecR vals(5);
    vals << 1.5, 2.5, 2.04, 9.99, 2.5;
    auto cls = classify_strip_eigenvalues(vals, pb, 0.05);
    CHECK(cls[0] == BandClass::in_band);
    CHECK(cls[1] == BandClass::in_gap);
    CHECK(cls[2] == BandClass::in_band);
    CHECK(cls[3] == BandClass::in_band);
    CHECK(cls[4] == BandClass::in_gap);
}

TEST_CASE("decay fit recovers a synthetic exponential") {
    int T = 10, h = 1;
    VecR profile(2 * T);
    for (int r = 0; r < 2 * T; ++r) {
        double center = -T + r + 0.5;
        profile[r] = std::exp(-0.7 * std::abs(center));
    }
    auto fit = fit_decay_rate(profile, h, T);
    CHECK(std::abs(fit.beta - 0.7) <= 1e-3);
    CHECK(fit.rms <= 1e-9);
    CHECK(fit.rows_used >= 6);

    VecR flat = VecR::Ones(2 * T);
    auto flat_fit = fit_decay_rate(flat, h, T);
    CHECK(std::abs(flat_fit.beta) <= 1e-9);

    VecR wob(2 * T);
    for (int r = 0; r < 2 * T; ++r) wob[r] = (r % 2 == 0) ? 1.0 : 0.05;
    auto wob_fit = fit_decay_rate(wob, h, T);
    CHECK(wob_fit.rms > 0.5);
}

TEST_CASE("truncation stability rejects short T lists and in-band drifters") {
    SweepOptions opts;
    WaveguideSpec wg;
    wg.half_width_h = 1;
    CHECK_THROWS_AS(truncation_stability(free_cell(), wg, identity_field(2), scalar_symbol(),
                                         0.0, 1.0, {4}, {CapBC::dirichlet}, 8, 4, 1e-3, opts),
                    ValidationError);

    auto rec = truncation_stability(free_cell(), wg, identity_field(2), scalar_symbol(), 0.0,
                                    0.30, {4, 8}, {CapBC::dirichlet}, 8, 8, 1e-3, opts);
    CHECK_FALSE(rec.stable);
    CHECK(rec.spread_rel > 0.1);
    CHECK(rec.cases.size() == 2);
}

TEST_CASE("unperturbed dispersion sweep finds no in-gap segments") {
    SweepOptions opts;
    opts.workers = 2;
    WaveguideSpec wg;
    wg.half_width_h = 1;
    DispersionOptions dopts;
    dopts.zeta_count = 9;
    dopts.m_line = 5;
    dopts.count = 6;
    dopts.band_count = 4;
    dopts.t_list = {4, 6};
    dopts.caps = {CapBC::dirichlet};

    auto rep =
        sweep_dispersion(free_cell(), wg, identity_field(2), scalar_symbol(), 8, dopts, opts);
    for (const auto& seg : rep.segments)
        for (const auto& s : seg.samples) CHECK(s.cls == BandClass::in_band);
    CHECK(rep.trapped.empty());
    CHECK(rep.sigma_sharp_union.empty());
}

TEST_CASE("sigma_sharp interval algebra") {
    CHECK(sigma_sharp({}).empty());

    DispersionSegment seg;
    seg.id = 0;
    auto mk = [](double z, double lam, bool cert) {
        DispersionSample s;
        s.zeta = z;
        s.lambda = lam;
        s.cls = BandClass::in_gap;
        s.certified = cert;
        return s;
    };
    seg.samples = {mk(0.0, 1.0, true), mk(0.1, 2.0, true)};
    auto u = sigma_sharp({seg});
    REQUIRE(u.size() == 1);
    CHECK(u[0].lo == 1.0);
    CHECK(u[0].hi == 2.0);

    DispersionSegment s2;
    s2.id = 1;
    s2.samples = {mk(0.0, 1.5, true), mk(0.1, 3.0, true)};
    u = sigma_sharp({seg, s2});
    REQUIRE(u.size() == 1);
    CHECK(u[0].lo == 1.0);
    CHECK(u[0].hi == 3.0);

    s2.samples[0].certified = false;
    s2.samples[1].certified = false;
    u = sigma_sharp({s2});
    CHECK(u.empty());
}

TEST_CASE("essential spectrum union set algebra") {
    BandSummary bands;
    bands.sigma0 = merge_intervals({{0.0, 1.0}, {2.0, 3.0}});
    bands.trust_ceiling = 5.0;
    bands.bands = {{1, {0.0, 1.0}}, {2, {2.0, 3.0}}};

    auto rep = essential_spectrum_union(bands, merge_intervals({{0.5, 0.9}}), 5.0);
    CHECK(rep.sigma_ad.empty());
    CHECK(rep.sigma_es.size() == 2);
    CHECK(rep.union_check == "ok");

    rep = essential_spectrum_union(bands, merge_intervals({{1.4, 1.6}}), 5.0);
    CHECK(rep.sigma_es.size() == 3);
    REQUIRE(rep.sigma_ad.size() == 1);
    CHECK(rep.sigma_ad[0].lo == 1.4);
    CHECK(rep.sigma_ad[0].hi == 1.6);

    rep = essential_spectrum_union(bands, merge_intervals({{0.9, 1.2}}), 5.0);
    REQUIRE(rep.sigma_ad.size() == 1);
    CHECK(rep.sigma_ad[0].lo == 1.0);
    CHECK_FALSE(rep.sigma_ad[0].lo_closed);
    CHECK(rep.sigma_ad[0].hi == 1.2);

    rep = essential_spectrum_union(bands, merge_intervals({{1.4, 4.8}}), 2.5);
    CHECK(rep.ceiling_clipped);
    CHECK(rep.trust_ceiling == 2.5);
    CHECK(rep.sigma_es.back().hi <= 2.5);
}
