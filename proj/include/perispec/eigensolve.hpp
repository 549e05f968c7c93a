#pragma once

#include <cstdint>
#include <string>

#include "perispec/assembly.hpp"
#include "perispec/types.hpp"

namespace perispec {

struct EigenOptions {
    double tol = 1e-8;         // relative residual target
    int dense_threshold = 2000;  // dense reduction below, shift-invert Lanczos above
    int max_attempts = 4;        // Lanczos restarts with growing basis
    uint64_t seed = 12345;       // start-vector generator
};

// Lowest eigenpairs of the Hermitian pair (K, M), ascending,
// eigenvectors M-orthonormal with deterministic phases.
struct EigenResult {
    VecR values;
    MatC vectors;    // dim x count
    VecR residuals;  // ||K v - lambda M v|| / ||M v|| per pair
    std::string method;
    int iterations = 0;
};

EigenResult lowest_eigenpairs(const AssembledPair& pair, int count,
                              const EigenOptions& opts = {});

// ||K v - lambda M v||_2 / ||M v||_2
double residual_norm(const AssembledPair& pair, double lambda, const VecC& v);

}  // namespace perispec
