#pragma once

#include <span>
#include <string>
#include <vector>

namespace shiftscope {

/// Draws of one scalar parameter, one vector per chain (equal lengths).
using ChainDraws = std::vector<std::vector<double>>;

/// Split potential scale reduction factor (each chain halved). Returns 1 for
/// constant draws.
double split_rhat(const ChainDraws& chains);

/// Multi-chain effective sample size using Geyer's initial monotone sequence
/// on the combined autocorrelation.
double effective_sample_size(const ChainDraws& chains);

struct ParameterDiagnostics {
    std::string parameter;
    double rhat = 1.0;
    double ess = 0.0;
};

ParameterDiagnostics diagnose(std::string parameter, const ChainDraws& chains);

} // namespace shiftscope
