#pragma once

// Seeded property suites over random coefficients and random states.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lhsis/timefn.hpp"

namespace lhsis {

struct InvariantResult {
  std::string name;
  std::size_t cases = 0;
  double worst = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Builtin family with parameters in [-2, 2] (sinusoidal amplitude in [-1, 1]).
CoefficientFunction random_builtin(std::mt19937_64& rng);

InvariantResult check_builtin_equivalence(std::uint64_t seed, std::size_t count);
InvariantResult check_print_round_trip(std::uint64_t seed, std::size_t count);
InvariantResult check_chart_round_trip(std::uint64_t seed, std::size_t count);
InvariantResult check_canonicity(std::uint64_t seed, std::size_t count);
InvariantResult check_book_bracket(std::uint64_t seed, std::size_t count);
InvariantResult check_book_commutator(std::uint64_t seed, std::size_t count);
InvariantResult check_deformed_bracket(std::uint64_t seed, std::size_t count);
InvariantResult check_deformed_commutator(std::uint64_t seed, std::size_t count);
InvariantResult check_moment_pushforward(std::uint64_t seed, std::size_t count);
InvariantResult check_exact_residual(std::uint64_t seed, std::size_t count);
InvariantResult check_exact_vs_oracle(std::uint64_t seed, std::size_t count);

/// Every suite above; count scales the number of random cases (scenario
/// suites use count / 10, at least one).
std::vector<InvariantResult> run_invariants(std::uint64_t seed, std::size_t count);

}  // namespace lhsis
