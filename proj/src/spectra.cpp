#include "perispec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "perispec/parallel.hpp"

namespace perispec {

std::vector<double> momentum_grid(int count) {
    if (count < 1) throw ValidationError("momentum grid needs at least one sample");
    std::vector<double> grid(count);
    if (count == 1) {
        grid[0] = 0.0;
        return grid;
    }
    for (int i = 0; i < count; ++i) grid[i] = two_pi * i / (count - 1);
    return grid;
}

BandFunction sample_band_functions(const UnitCellGeometry& geom, const CoefficientField& field,
                                   const OperatorSymbol& sym, int n, int m_grid, int count,
                                   const SweepOptions& opts) {
    if (m_grid < 1) throw ValidationError("band sampling: m_grid must be positive");
    if (count < 1) throw ValidationError("band sampling: band count must be positive");

    CellMesh mesh = rasterize_cell(geom, n);

    BandFunction bf;
    bf.m_grid = m_grid;
    bf.count = count;
    bf.grid = momentum_grid(m_grid);
    bf.n = n;
    bf.values.resize(m_grid * m_grid, count);

    const int total = m_grid * m_grid;
    parallel_for_indexed(total, opts.workers, [&](int g) {
        int gx = g % m_grid, gy = g / m_grid;
        BlochMomentum eta(bf.grid[gx], bf.grid[gy]);
        try {
            auto pair = assemble_cell_pair(mesh, sym, field, eta);
            auto eig = lowest_eigenpairs(pair, count, opts.eig);
            for (int k = 0; k < count; ++k) bf.values(g, k) = eig.values[k];
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "eta=(" << eta.eta1 << "," << eta.eta2 << "): " << e.what();
            throw SolverError(os.str());
        }
    });

    // ascending in k at every sample
    for (int g = 0; g < total; ++g)
        for (int k = 1; k < count; ++k)
            if (bf.values(g, k) < bf.values(g, k - 1) - 1e-9)
                throw SolverError("band ordering violated at a grid sample");

    // continuity modulus over grid edges
    double cmod = 0.0;
    if (m_grid > 1) {
        double step = bf.grid[1] - bf.grid[0];
        for (int gy = 0; gy < m_grid; ++gy) {
            for (int gx = 0; gx < m_grid; ++gx) {
                int g = gx + m_grid * gy;
                if (gx + 1 < m_grid) {
                    int r = g + 1;
                    for (int k = 0; k < count; ++k)
                        cmod = std::max(cmod, std::abs(bf.values(g, k) - bf.values(r, k)) / step);
                }
                if (gy + 1 < m_grid) {
                    int u = g + m_grid;
                    for (int k = 0; k < count; ++k)
                        cmod = std::max(cmod, std::abs(bf.values(g, k) - bf.values(u, k)) / step);
                }
            }
        }
    }
    bf.continuity_modulus = cmod;
    return bf;
}

BandSummary bands_from_samples(const BandFunction& bf) {
    BandSummary out;
    std::vector<Interval> ivs;
    for (int k = 0; k < bf.count; ++k) {
        double lo = bf.values.col(k).minCoeff();
        double hi = bf.values.col(k).maxCoeff();
        out.bands.push_back({k + 1, Interval{lo, hi}});
        ivs.push_back({lo, hi});
    }
    out.sigma0 = merge_intervals(ivs);
    out.trust_ceiling = bf.values.col(bf.count - 1).minCoeff();
    out.gaps = gaps_below(out.sigma0, out.trust_ceiling);
    return out;
}

IntervalUnion PartialBands::merged() const { return merge_intervals(bands); }

PartialBands partial_bands(const UnitCellGeometry& geom, const CoefficientField& field,
                           const OperatorSymbol& sym, int n, double zeta, int m_line, int count,
                           const SweepOptions& opts) {
    if (m_line < 1) throw ValidationError("partial bands: m_line must be positive");
    CellMesh mesh = rasterize_cell(geom, n);
    std::vector<double> grid = momentum_grid(m_line);

    MatR values(m_line, count);
    parallel_for_indexed(m_line, opts.workers, [&](int g) {
        BlochMomentum eta(zeta, grid[g]);
        try {
            auto pair = assemble_cell_pair(mesh, sym, field, eta);
            auto eig = lowest_eigenpairs(pair, count, opts.eig);
            for (int k = 0; k < count; ++k) values(g, k) = eig.values[k];
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "eta=(" << zeta << "," << eta.eta2 << "): " << e.what();
            throw SolverError(os.str());
        }
    });

    PartialBands pb;
    pb.zeta = BlochMomentum::reduce(zeta);
    for (int k = 0; k < count; ++k)
        pb.bands.push_back({values.col(k).minCoeff(), values.col(k).maxCoeff()});
    pb.trust_ceiling = values.col(count - 1).minCoeff();
    return pb;
}

StripSolve strip_spectrum(const UnitCellGeometry& geom, const WaveguideSpec& wg,
                          const CoefficientField& field, const OperatorSymbol& sym, double zeta,
                          int T, int n, int count, CapBC cap, const SweepOptions& opts) {
    StripSolve out;
    out.mesh = build_strip_mesh(geom, wg, T, n, cap);
    out.pair = assemble_strip_pair(out.mesh, sym, field, zeta, cap);
    out.eig = lowest_eigenpairs(out.pair, count, opts.eig);
    return out;
}

std::vector<BandClass> classify_strip_eigenvalues(const VecR& values, const PartialBands& partial,
                                                  double tol_band) {
    IntervalUnion u = partial.merged();
    std::vector<BandClass> out(values.size(), BandClass::in_band);
    for (int i = 0; i < values.size(); ++i) {
        double lam = values[i];
        if (lam > partial.trust_ceiling - tol_band) continue;  // conservative above ceiling
        if (union_distance(u, lam) > tol_band) out[i] = BandClass::in_gap;
    }
    return out;
}

VecR strip_row_profile(const StripMesh& mesh, const DofMap& dofs, const VecC& vec) {
    int rows = 2 * mesh.T;
    int n = mesh.n;
    VecR profile = VecR::Zero(rows);
    for (int r = 0; r < rows; ++r) {
        double acc = 0.0;
        int cnt = 0;
        for (int iy = r * n; iy < (r + 1) * n; ++iy) {
            for (int ix = 0; ix < mesh.nx(); ++ix) {
                for (int c = 0; c < dofs.ncomp; ++c) {
                    int d = dofs.dof_of(ix, iy, c);
                    double a = d < 0 ? 0.0 : std::abs(vec[d]);
                    acc += a * a;
                    ++cnt;
                }
            }
        }
        profile[r] = cnt > 0 ? std::sqrt(acc / cnt) : 0.0;
    }
    return profile;
}

DecayFit fit_decay_rate(const VecR& row_profile, int h, int T) {
    double peak = row_profile.maxCoeff();
    std::vector<std::pair<double, double>> pts;  // (|x2| at row center, log p)
    for (int r = 0; r < row_profile.size(); ++r) {
        double center = -T + r + 0.5;
        double a = std::abs(center);
        if (a < h + 1 || a > T - 1) continue;
        if (!(row_profile[r] > 1e-13 * peak)) continue;
        pts.push_back({a, std::log(row_profile[r])});
    }

    DecayFit fit;
    fit.rows_used = static_cast<int>(pts.size());
    if (pts.size() < 3) {
        fit.rms = std::numeric_limits<double>::infinity();
        return fit;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = static_cast<double>(pts.size());
    double denom = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / denom;
    fit.beta = -slope;
    fit.intercept = (sy - slope * sx) / m;
    double ss = 0.0;
    for (auto [x, y] : pts) {
        double e = y - (fit.intercept + slope * x);
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / m);
    return fit;
}

TruncationRecord truncation_stability(const UnitCellGeometry& geom, const WaveguideSpec& wg,
                                      const CoefficientField& field, const OperatorSymbol& sym,
                                      double zeta, double lambda_candidate,
                                      const std::vector<int>& t_list,
                                      const std::vector<CapBC>& caps, int n, int count,
                                      double tol_stab, const SweepOptions& opts) {
    if (t_list.size() < 2)
        throw ValidationError("truncation_stability: need at least two truncation extents");
    if (caps.empty()) throw ValidationError("truncation_stability: need at least one cap kind");

    TruncationRecord rec;
    for (int T : t_list) {
        for (CapBC cap : caps) {
            auto solve = strip_spectrum(geom, wg, field, sym, zeta, T, n, count, cap, opts);
            int best = 0;
            for (int i = 1; i < solve.eig.values.size(); ++i)
                if (std::abs(solve.eig.values[i] - lambda_candidate) <
                    std::abs(solve.eig.values[best] - lambda_candidate))
                    best = i;
            rec.cases.push_back({T, cap, solve.eig.values[best]});
        }
    }
    double lo = rec.cases[0].lambda, hi = rec.cases[0].lambda;
    for (const auto& c : rec.cases) {
        lo = std::min(lo, c.lambda);
        hi = std::max(hi, c.lambda);
    }
    rec.spread_rel = (hi - lo) / std::max(std::abs(hi), 1e-12);
    rec.stable = rec.spread_rel < tol_stab;
    return rec;
}

namespace {

struct Branch {
    int id;
    std::vector<DispersionSample> samples;
    int last_eig = -1;
    bool open = true;
    bool split_start = false;
    bool split_end = false;
};

}  // namespace

DispersionReport sweep_dispersion(const UnitCellGeometry& geom, const WaveguideSpec& wg,
                                  const CoefficientField& field, const OperatorSymbol& sym,
                                  int n, const DispersionOptions& dopts,
                                  const SweepOptions& opts) {
    if (dopts.zeta_count < 9)
        throw ValidationError("dispersion sweep: zeta grid needs at least 9 points");
    if (dopts.t_list.size() < 2)
        throw ValidationError("dispersion sweep: need at least two truncation extents");

    DispersionReport rep;
    rep.zetas = momentum_grid(dopts.zeta_count);
    rep.base_T = *std::max_element(dopts.t_list.begin(), dopts.t_list.end());
    rep.base_cap = dopts.caps.empty() ? CapBC::dirichlet : dopts.caps.front();

    const int nz = dopts.zeta_count;
    std::vector<StripSolve> solves(nz);
    rep.partials.resize(nz);

    parallel_for_indexed(nz, opts.workers, [&](int i) {
        try {
            solves[i] = strip_spectrum(geom, wg, field, sym, rep.zetas[i], rep.base_T, n,
                                       dopts.count, rep.base_cap, {1, opts.eig});
            rep.partials[i] = partial_bands(geom, field, sym, n, rep.zetas[i], dopts.m_line,
                                            dopts.band_count, {1, opts.eig});
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "zeta=" << rep.zetas[i] << ": " << e.what();
            throw SolverError(os.str());
        }
    });

    rep.sharp_ceiling = rep.partials[0].trust_ceiling;
    for (const auto& p : rep.partials)
        rep.sharp_ceiling = std::min(rep.sharp_ceiling, p.trust_ceiling);

    std::vector<std::vector<BandClass>> classes(nz);
    for (int i = 0; i < nz; ++i)
        classes[i] =
            classify_strip_eigenvalues(solves[i].eig.values, rep.partials[i], dopts.tol_band);

    // branch bookkeeping across the sweep
    std::vector<Branch> branches;
    int next_id = 0;
    auto open_branch = [&](int iz, int ie, bool from_split) {
        Branch b;
        b.id = next_id++;
        b.split_start = from_split;
        b.samples.push_back(
            {iz, ie, rep.zetas[iz], solves[iz].eig.values[ie], classes[iz][ie], false});
        b.last_eig = ie;
        branches.push_back(std::move(b));
    };
    for (int e = 0; e < solves[0].eig.values.size(); ++e) open_branch(0, e, false);

    for (int i = 0; i + 1 < nz; ++i) {
        const auto& va = solves[i];
        const auto& vb = solves[i + 1];
        const int na = static_cast<int>(va.eig.values.size());
        const int nb = static_cast<int>(vb.eig.values.size());

        // overlap matrix |v_a^H M v_b| with M at the left sample
        MatR overlap(na, nb);
        for (int b = 0; b < nb; ++b) {
            VecC mb = va.pair.M * vb.eig.vectors.col(b);
            for (int a = 0; a < na; ++a) overlap(a, b) = std::abs(va.eig.vectors.col(a).dot(mb));
        }

        // ambiguous rows split rather than guess
        std::vector<bool> ambiguous(na, false);
        for (int a = 0; a < na; ++a) {
            double best = 0, second = 0;
            for (int b = 0; b < nb; ++b) {
                double o = overlap(a, b);
                if (o > best) {
                    second = best;
                    best = o;
                } else if (o > second) {
                    second = o;
                }
            }
            if (best >= dopts.match_min_overlap && second >= (1.0 - dopts.match_ambiguity) * best)
                ambiguous[a] = true;
        }

        // greedy one-to-one assignment by descending overlap
        std::vector<std::tuple<double, int, int>> cand;
        for (int a = 0; a < na; ++a)
            for (int b = 0; b < nb; ++b)
                if (overlap(a, b) >= dopts.match_min_overlap && !ambiguous[a])
                    cand.emplace_back(overlap(a, b), a, b);
        std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) {
            if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
            if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
            return std::get<2>(x) < std::get<2>(y);
        });
        std::vector<int> match_a(na, -1), match_b(nb, -1);
        for (auto& [o, a, b] : cand) {
            if (match_a[a] >= 0 || match_b[b] >= 0) continue;
            match_a[a] = b;
            match_b[b] = a;
        }

        for (auto& br : branches) {
            if (!br.open) continue;
            if (br.samples.back().zeta_index != i) continue;
            int a = br.last_eig;
            int b = match_a[a];
            if (b < 0) {
                br.open = false;
                br.split_end = ambiguous[a];
                continue;
            }
            br.samples.push_back(
                {i + 1, b, rep.zetas[i + 1], vb.eig.values[b], classes[i + 1][b], false});
            br.last_eig = b;
        }
        for (int b = 0; b < nb; ++b) {
            if (match_b[b] >= 0) continue;
            bool from_split = false;
            for (int a = 0; a < na; ++a)
                if (ambiguous[a] && overlap(a, b) >= dopts.match_min_overlap) from_split = true;
            open_branch(i + 1, b, from_split);
        }
    }

    // certification of in-gap candidates
    std::map<std::tuple<int, int, int>, VecR> stab_cache;  // (iz, T, cap) -> strip values
    auto nearest = [](const VecR& vals, double lam) {
        int best = 0;
        for (int k = 1; k < vals.size(); ++k)
            if (std::abs(vals[k] - lam) < std::abs(vals[best] - lam)) best = k;
        return vals[best];
    };
    auto stability_for = [&](int iz, double lam) {
        TruncationRecord rec;
        for (int T : dopts.t_list) {
            for (CapBC cap : dopts.caps) {
                double got;
                if (T == rep.base_T && cap == rep.base_cap) {
                    got = nearest(solves[iz].eig.values, lam);
                } else {
                    auto key = std::make_tuple(iz, T, static_cast<int>(cap));
                    auto it = stab_cache.find(key);
                    if (it == stab_cache.end()) {
                        auto solve = strip_spectrum(geom, wg, field, sym, rep.zetas[iz], T, n,
                                                    dopts.count, cap, {1, opts.eig});
                        it = stab_cache.emplace(key, solve.eig.values).first;
                    }
                    got = nearest(it->second, lam);
                }
                rec.cases.push_back({T, cap, got});
            }
        }
        double lo = rec.cases[0].lambda, hi = rec.cases[0].lambda;
        for (const auto& c : rec.cases) {
            lo = std::min(lo, c.lambda);
            hi = std::max(hi, c.lambda);
        }
        rec.spread_rel = (hi - lo) / std::max(std::abs(hi), 1e-12);
        rec.stable = rec.spread_rel < dopts.tol_stab;
        return rec;
    };

    for (auto& br : branches) {
        for (auto& s : br.samples) {
            if (s.cls != BandClass::in_gap) continue;
            const auto& solve = solves[s.zeta_index];
            VecR profile = strip_row_profile(solve.mesh, solve.pair.dofs,
                                             solve.eig.vectors.col(s.eig_index));
            DecayFit fit = fit_decay_rate(profile, solve.mesh.h, solve.mesh.T);

            TrappedMode tm;
            tm.zeta = s.zeta;
            tm.lambda = s.lambda;
            tm.beta_fit = fit.beta;
            tm.fit_rms = fit.rms;
            tm.branch = br.id;
            tm.zeta_index = s.zeta_index;

            if (!(fit.beta > dopts.beta_min) || !(fit.rms <= dopts.fit_rms_max)) {
                tm.note = "decay fit rejected";
                rep.rejected.push_back(std::move(tm));
                continue;
            }
            tm.stability = stability_for(s.zeta_index, s.lambda);
            if (!tm.stability.stable) {
                tm.note = "truncation unstable";
                rep.rejected.push_back(std::move(tm));
                continue;
            }
            s.certified = true;
            rep.trapped.push_back(std::move(tm));
        }
    }

    // branch records to segments with endpoint classification
    for (auto& br : branches) {
        DispersionSegment seg;
        seg.id = br.id;
        seg.samples = br.samples;
        seg.split_start = br.split_start;
        seg.split_end = br.split_end;
        bool full = static_cast<int>(br.samples.size()) == nz;
        auto end_type = [&](const DispersionSample& s) {
            if (full) return EndpointType::periodic;
            if (s.cls == BandClass::in_band) return EndpointType::band_edge;
            IntervalUnion u = rep.partials[s.zeta_index].merged();
            if (union_distance(u, s.lambda) <= 2.0 * dopts.tol_band)
                return EndpointType::band_edge;
            return EndpointType::interior;
        };
        seg.start_type = end_type(br.samples.front());
        seg.end_type = end_type(br.samples.back());
        rep.segments.push_back(std::move(seg));
    }

    rep.sigma_sharp_union = sigma_sharp(rep.segments);
    return rep;
}

IntervalUnion sigma_sharp(const std::vector<DispersionSegment>& segments) {
    std::vector<Interval> ivs;
    for (const auto& seg : segments) {
        size_t i = 0;
        while (i < seg.samples.size()) {
            if (!seg.samples[i].certified) {
                ++i;
                continue;
            }
            double lo = seg.samples[i].lambda, hi = lo;
            size_t j = i;
            while (j + 1 < seg.samples.size() && seg.samples[j + 1].certified) {
                ++j;
                lo = std::min(lo, seg.samples[j].lambda);
                hi = std::max(hi, seg.samples[j].lambda);
            }
            ivs.push_back({lo, hi});
            i = j + 1;
        }
    }
    return merge_intervals(std::move(ivs));
}

SpectrumReport essential_spectrum_union(const BandSummary& bands, const IntervalUnion& sharp,
                                        double sharp_ceiling) {
    SpectrumReport rep;
    rep.bands = bands.bands;
    double trust = std::min(bands.trust_ceiling, sharp_ceiling);
    rep.ceiling_clipped =
        std::abs(bands.trust_ceiling - sharp_ceiling) >
        1e-12 * std::max(1.0, std::max(std::abs(bands.trust_ceiling), std::abs(sharp_ceiling)));
    rep.trust_ceiling = trust;
    rep.sigma0 = clip_to(bands.sigma0, trust);
    rep.sharp = clip_to(sharp, trust);
    rep.gaps = gaps_below(rep.sigma0, trust);
    rep.sigma_es = union_of(rep.sigma0, rep.sharp);
    rep.sigma_ad = difference(rep.sharp, rep.sigma0);
    verify_union_report(rep);
    rep.union_check = "ok";
    return rep;
}

void verify_union_report(const SpectrumReport& rep) {
    IntervalUnion expect_es = union_of(rep.sigma0, rep.sharp);
    if (expect_es.size() != rep.sigma_es.size())
        throw SolverError("union verification failed: component count mismatch");
    for (size_t i = 0; i < expect_es.size(); ++i) {
        if (expect_es[i].lo != rep.sigma_es[i].lo || expect_es[i].hi != rep.sigma_es[i].hi ||
            expect_es[i].lo_closed != rep.sigma_es[i].lo_closed ||
            expect_es[i].hi_closed != rep.sigma_es[i].hi_closed)
            throw SolverError("union verification failed: interval mismatch");
    }
    IntervalUnion expect_ad = difference(rep.sharp, rep.sigma0);
    if (expect_ad.size() != rep.sigma_ad.size())
        throw SolverError("difference verification failed: component count mismatch");
    for (size_t i = 0; i < expect_ad.size(); ++i) {
        if (expect_ad[i].lo != rep.sigma_ad[i].lo || expect_ad[i].hi != rep.sigma_ad[i].hi)
            throw SolverError("difference verification failed: interval mismatch");
    }
    // the additional component must be exactly disjoint from sigma0
    for (const auto& iv : rep.sigma_ad) {
        IntervalUnion solo{iv};
        IntervalUnion cut = difference(solo, rep.sigma0);
        if (cut.size() != 1 || cut[0].lo != iv.lo || cut[0].hi != iv.hi)
            throw SolverError("sigma_ad intersects sigma0");
    }
}

}  // namespace perispec
