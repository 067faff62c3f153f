#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccgf/constructions.hpp"

namespace ccgf {

struct TheoremRun {
    std::string name;
    bool pass = false;
    std::string detail;  // empty when pass, diagnostic otherwise
};

/**
 * One sweep of every constructive theorem on seed-derived instances: the
 * controller equivalence both ways, both compositions with scalar and
 * diagonal theta, conjugation with its inverse round-trip, the canonical
 * K-family identity, the Bessel-pair construction and morphism transport,
 * plus the projection-identity lemma. Bound predictions are compared with
 * measurements at relative tolerance 1e-8 (1e-12 for the morphism identity,
 * 1e-10 for the round-trip restore).
 */
std::vector<TheoremRun> run_theorem_suite(uint64_t seed);

}  // namespace ccgf
