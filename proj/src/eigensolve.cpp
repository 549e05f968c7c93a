#include "perispec/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

namespace perispec {

namespace {

double m_norm(const SpMatC& m, const VecC& v) {
    Complex q = v.dot(m * v);  // Eigen dot conjugates the left argument
    return std::sqrt(std::max(0.0, q.real()));
}

// Rotates each column so its largest-magnitude entry is real positive,
// making reports reproducible across solver backends.
void fix_phases(MatC& vecs) {
    for (int j = 0; j < vecs.cols(); ++j) {
        int imax = 0;
        double best = -1.0;
        for (int i = 0; i < vecs.rows(); ++i) {
            double a = std::abs(vecs(i, j));
            if (a > best + 1e-14) {
                best = a;
                imax = i;
            }
        }
        Complex z = vecs(imax, j);
        if (std::abs(z) > 0) vecs.col(j) *= std::conj(z) / std::abs(z);
    }
}

// Modified Gram-Schmidt in the M inner product.
void m_orthonormalize(const SpMatC& m, MatC& vecs) {
    for (int j = 0; j < vecs.cols(); ++j) {
        VecC vj = vecs.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                Complex c = vecs.col(i).dot(m * vj);
                vj -= c * vecs.col(i);
            }
        }
        double nrm = m_norm(m, vj);
        if (nrm > 0) vj /= nrm;
        vecs.col(j) = vj;
    }
}

EigenResult dense_solve(const AssembledPair& pair, int count) {
    MatC kd(pair.K);
    MatC md(pair.M);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatC> ges(kd, md,
                                                       Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success)
        throw SolverError("dense generalized eigensolve failed (mass matrix not SPD?)");
    EigenResult res;
    res.values = ges.eigenvalues().head(count);
    res.vectors = ges.eigenvectors().leftCols(count);
    res.method = "dense";
    res.iterations = 1;
    return res;
}

struct LanczosState {
    std::vector<VecC> basis;  // M-orthonormal
    std::vector<double> alpha, beta;
};

EigenResult lanczos_solve(const AssembledPair& pair, int count, const EigenOptions& opts) {
    const int dim = pair.dim();

    // shift below the spectrum, scaled to the pencil
    double knorm = 0.0, mnorm = 0.0;
    for (int i = 0; i < dim; ++i) {
        knorm += std::abs(pair.K.coeff(i, i));
        mnorm += std::abs(pair.M.coeff(i, i));
    }
    double scale = mnorm > 0 ? knorm / mnorm : 1.0;
    double sigma = -std::max(1e-8, 0.01 * scale);

    SpMatC shifted = pair.K - sigma * pair.M;
    Eigen::SparseLU<SpMatC> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
        throw SolverError("sparse factorization of the shifted pencil failed");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_vec = [&]() {
        VecC v(dim);
        for (int i = 0; i < dim; ++i) v[i] = Complex(unif(rng), unif(rng));
        return v;
    };

    int ncv = std::min(dim, std::max(2 * count + 16, 40));
    EigenResult res;
    res.method = "shift-invert-lanczos";

    for (int attempt = 0; attempt < opts.max_attempts; ++attempt, ncv = std::min(dim, 2 * ncv)) {
        std::vector<VecC> basis, mbasis;  // mbasis[i] = M * basis[i]
        basis.reserve(ncv);
        mbasis.reserve(ncv);
        std::vector<double> alpha, beta;

        auto push_basis = [&](const VecC& u) {
            basis.push_back(u);
            mbasis.push_back(pair.M * u);
        };

        VecC v = random_vec();
        v /= m_norm(pair.M, v);
        push_basis(v);

        for (int it = 0; it < ncv; ++it) {
            VecC w = lu.solve(mbasis[it]);
            // full reorthogonalization, two passes; <w,u_i>_M = (M u_i)^H w
            double a = 0.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (size_t i = 0; i < basis.size(); ++i) {
                    Complex c = mbasis[i].dot(w);
                    if (pass == 0 && static_cast<int>(i) == it) a = c.real();
                    w -= c * basis[i];
                }
            }
            alpha.push_back(a);
            double b = m_norm(pair.M, w);
            if (it + 1 < ncv) {
                if (b < 1e-13 * std::abs(1.0 / sigma)) {
                    // invariant subspace; continue with a fresh direction
                    VecC f = random_vec();
                    for (int pass = 0; pass < 2; ++pass)
                        for (size_t i = 0; i < basis.size(); ++i) f -= mbasis[i].dot(f) * basis[i];
                    double fn = m_norm(pair.M, f);
                    if (fn < 1e-14) break;
                    beta.push_back(0.0);
                    push_basis(f / fn);
                } else {
                    beta.push_back(b);
                    push_basis(w / b);
                }
            }
        }

        int steps = static_cast<int>(alpha.size());
        if (steps < count) continue;

        MatR tri = MatR::Zero(steps, steps);
        for (int i = 0; i < steps; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < steps) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<MatR> tes(tri);

        // largest theta of (K - sigma M)^{-1} M <-> smallest lambda
        struct Ritz {
            double theta;
            int idx;
        };
        std::vector<Ritz> ritz;
        for (int i = 0; i < steps; ++i) ritz.push_back({tes.eigenvalues()[i], i});
        std::sort(ritz.begin(), ritz.end(),
                  [](const Ritz& a, const Ritz& b) { return a.theta > b.theta; });

        int take = std::min(count, steps);
        MatC vecs(dim, take);
        VecR vals(take);
        for (int j = 0; j < take; ++j) {
            const auto& r = ritz[j];
            vals[j] = sigma + 1.0 / r.theta;
            VecC x = VecC::Zero(dim);
            for (int i = 0; i < steps; ++i) x += tes.eigenvectors()(i, r.idx) * basis[i];
            vecs.col(j) = x;
        }

        // ascending lambda
        std::vector<int> order(take);
        for (int i = 0; i < take; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        VecR svals(take);
        MatC svecs(dim, take);
        for (int i = 0; i < take; ++i) {
            svals[i] = vals[order[i]];
            svecs.col(i) = vecs.col(order[i]);
        }

        m_orthonormalize(pair.M, svecs);

        VecR rnorms(take);
        bool ok = take == count;
        for (int j = 0; j < take; ++j) {
            rnorms[j] = residual_norm(pair, svals[j], svecs.col(j));
            if (rnorms[j] > opts.tol * std::max(1.0, std::abs(svals[j]))) ok = false;
        }

        res.values = svals;
        res.vectors = svecs;
        res.residuals = rnorms;
        res.iterations += steps;
        if (ok) return res;
    }

    std::ostringstream os;
    os << "lanczos did not reach the residual tolerance " << opts.tol << " for " << count
       << " pairs; achieved residuals:";
    for (int j = 0; j < res.residuals.size(); ++j) os << " " << res.residuals[j];
    throw SolverError(os.str());
}

}  // namespace

double residual_norm(const AssembledPair& pair, double lambda, const VecC& v) {
    if (v.size() != pair.dim()) throw SolverError("residual_norm: dimension mismatch");
    double vn = v.norm();
    if (vn == 0.0) throw SolverError("residual_norm: zero vector");
    VecC mv = pair.M * v;
    VecC r = pair.K * v - lambda * mv;
    double mn = mv.norm();
    if (mn == 0.0) throw SolverError("residual_norm: vector in the mass matrix kernel");
    return r.norm() / mn;
}

EigenResult lowest_eigenpairs(const AssembledPair& pair, int count, const EigenOptions& opts) {
    const int dim = pair.dim();
    if (count < 1) throw SolverError("lowest_eigenpairs: count must be positive");
    if (count > dim)
        throw SolverError("lowest_eigenpairs: requested " + std::to_string(count) +
                          " pairs from a pencil of dimension " + std::to_string(dim));

    EigenResult res;
    if (dim <= opts.dense_threshold) {
        res = dense_solve(pair, count);
        res.residuals.resize(count);
        for (int j = 0; j < count; ++j)
            res.residuals[j] = residual_norm(pair, res.values[j], res.vectors.col(j));
    } else {
        res = lanczos_solve(pair, count, opts);
    }
    fix_phases(res.vectors);
    return res;
}

}  // namespace perispec
