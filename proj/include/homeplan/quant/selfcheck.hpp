#pragma once

// Property suite for the quant module, run by `homeplan quant-selfcheck`
// and by the test binaries. Each check compares the production code against
// the oracles in oracle.hpp.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homeplan/quant/nf4.hpp"

namespace homeplan::quant {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelfCheckOptions {
  std::size_t blocks = 10000;    // random 64-element blocks per block-level property
  std::size_t instances = 100;   // random forward/gradient instances
  std::uint64_t seed = 20240521;
  /// Replaces the production codebook everywhere, to prove the suite can fail.
  std::optional<NF4Codebook> codebook;
};

// Pinned tolerances.
inline constexpr double kCodebookTolerance = 1e-12;
inline constexpr double kForwardTolerance = 1e-10;
inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kGradientTolerance = 1e-6;
inline constexpr double kBoundSlack = 1e-12;

PropertyResult check_codebook(const SelfCheckOptions& options);
PropertyResult check_e4m3(const SelfCheckOptions& options);
PropertyResult check_nearest_codes(const SelfCheckOptions& options);
PropertyResult check_error_bound(const SelfCheckOptions& options);
PropertyResult check_zero_matrix(const SelfCheckOptions& options);
PropertyResult check_idempotence(const SelfCheckOptions& options);
PropertyResult check_storage(const SelfCheckOptions& options);
PropertyResult check_serialization(const SelfCheckOptions& options);
PropertyResult check_forward(const SelfCheckOptions& options);
PropertyResult check_gradients(const SelfCheckOptions& options);
PropertyResult check_zero_adapter(const SelfCheckOptions& options);

std::vector<PropertyResult> run_selfcheck(const SelfCheckOptions& options = {});

}  // namespace homeplan::quant
