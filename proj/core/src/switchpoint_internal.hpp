#pragma once

#include "shiftscope/switchpoint.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace shiftscope::detail {

/// prefix[t] = counts[0] + ... + counts[t - 1].
std::vector<std::int64_t> prefix_sums(std::span<const std::int64_t> counts);

/// Log marginal likelihood of switch day t, up to a constant shared by all t.
double log_switch_evidence(const std::vector<std::int64_t>& prefix, std::size_t t, double alpha);

/// Normalises log weights in place into probabilities.
void softmax_inplace(std::vector<double>& log_weights);

/// S * ln(rate) with the convention 0 * ln 0 = 0.
double xlogy(double s, double rate);

void check_mcmc_options(const McmcOptions& options);

/// Splits the merged draws of `chains` chains into per-chain vectors.
ChainDraws by_chain(const std::vector<double>& merged, std::size_t chains);

void require_convergence(const std::vector<ParameterDiagnostics>& diagnostics, const McmcOptions& options,
                         std::string_view model);

} // namespace shiftscope::detail
