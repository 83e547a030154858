#include "shiftscope/mcmc_diagnostics.hpp"

#include "shiftscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shiftscope {
namespace {

struct ChainMoments {
    std::vector<double> means;
    std::vector<double> variances; // unbiased
};

ChainMoments moments(const ChainDraws& chains) {
    ChainMoments out;
    for (const auto& chain : chains) {
        double mean = 0.0;
        for (double v : chain) {
            mean += v;
        }
        mean /= static_cast<double>(chain.size());
        double ss = 0.0;
        for (double v : chain) {
            ss += (v - mean) * (v - mean);
        }
        out.means.push_back(mean);
        out.variances.push_back(ss / static_cast<double>(chain.size() - 1));
    }
    return out;
}

void check_shape(const ChainDraws& chains, std::size_t min_length) {
    if (chains.empty()) {
        throw InvalidInputError{"diagnostics need at least one chain"};
    }
    for (const auto& chain : chains) {
        if (chain.size() != chains.front().size() || chain.size() < min_length) {
            throw InvalidInputError{"diagnostics need equal-length chains with enough draws"};
        }
    }
}

ChainDraws split_halves(const ChainDraws& chains) {
    ChainDraws halves;
    for (const auto& chain : chains) {
        std::size_t half = chain.size() / 2;
        halves.emplace_back(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(half));
        halves.emplace_back(chain.end() - static_cast<std::ptrdiff_t>(half), chain.end());
    }
    return halves;
}

// (W, var+) of the between/within decomposition.
std::pair<double, double> pooled_variances(const ChainMoments& m, std::size_t length) {
    auto n = static_cast<double>(length);
    double w = 0.0;
    for (double v : m.variances) {
        w += v;
    }
    w /= static_cast<double>(m.variances.size());
    double grand = 0.0;
    for (double mu : m.means) {
        grand += mu;
    }
    grand /= static_cast<double>(m.means.size());
    double b_over_n = 0.0;
    if (m.means.size() > 1) {
        for (double mu : m.means) {
            b_over_n += (mu - grand) * (mu - grand);
        }
        b_over_n /= static_cast<double>(m.means.size() - 1);
    }
    return {w, (n - 1.0) / n * w + b_over_n};
}

} // namespace

double split_rhat(const ChainDraws& chains) {
    check_shape(chains, 4);
    ChainDraws halves = split_halves(chains);
    ChainMoments m = moments(halves);
    auto [w, var_plus] = pooled_variances(m, halves.front().size());
    if (w <= 0.0) {
        return var_plus <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return std::sqrt(var_plus / w);
}

double effective_sample_size(const ChainDraws& chains) {
    check_shape(chains, 4);
    const std::size_t n = chains.front().size();
    const std::size_t m = chains.size();
    const double total = static_cast<double>(n * m);
    ChainMoments mom = moments(chains);
    auto [w, var_plus] = pooled_variances(mom, n);
    if (var_plus <= 0.0) {
        return total;
    }

    // Mean over chains of the biased lag-t autocovariance.
    auto mean_acov = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
            const auto& x = chains[c];
            double mu = mom.means[c];
            double s = 0.0;
            for (std::size_t i = 0; i + lag < n; ++i) {
                s += (x[i] - mu) * (x[i + lag] - mu);
            }
            acc += s / static_cast<double>(n);
        }
        return acc / static_cast<double>(m);
    };
    auto rho = [&](std::size_t lag) { return lag == 0 ? 1.0 : 1.0 - (w - mean_acov(lag)) / var_plus; };

    double tau = -1.0;
    double previous_pair = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t + 1 < n; t += 2) {
        double pair = rho(t) + rho(t + 1);
        if (pair < 0.0) {
            break;
        }
        pair = std::min(pair, previous_pair);
        tau += 2.0 * pair;
        previous_pair = pair;
    }
    tau = std::max(tau, 1.0 / std::log10(total));
    return total / tau;
}

ParameterDiagnostics diagnose(std::string parameter, const ChainDraws& chains) {
    return ParameterDiagnostics{std::move(parameter), split_rhat(chains), effective_sample_size(chains)};
}

} // namespace shiftscope
