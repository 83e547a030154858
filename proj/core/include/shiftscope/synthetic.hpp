#pragma once

#include "shiftscope/timeline.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace shiftscope {

/// Constant-rate stretch of a schedule, active from `start` until the next
/// piece starts. `retweet_fraction` is the probability that an event of this
/// stretch is a retweet.
struct RatePiece {
    Date start;
    double rate = 0.0;
    double retweet_fraction = 0.0;
};

/// Retweet sources are drawn from `pool_size` accounts with Zipf weights
/// 1 / (rank + 1)^zipf_exponent.
struct SourcePool {
    std::size_t pool_size = 50;
    double zipf_exponent = 1.0;
};

class RateSchedule {
public:
    /// Throws InvalidInputError unless the first piece starts at the window
    /// start, starts increase strictly and stay inside the window, rates are
    /// non-negative and retweet fractions lie in [0, 1].
    RateSchedule(AnalysisWindow window, std::vector<RatePiece> pieces, SourcePool sources = {});

    const AnalysisWindow& window() const { return m_Window; }
    std::span<const RatePiece> pieces() const { return m_Pieces; }
    const SourcePool& sources() const { return m_Sources; }
    /// Piece active on `day`; caller guarantees window().contains(day).
    const RatePiece& piece_on(Date day) const;

private:
    AnalysisWindow m_Window;
    std::vector<RatePiece> m_Pieces;
    SourcePool m_Sources;
};

/// Poisson daily counts at the active rate with timestamps uniform within
/// each day. Deterministic given `seed`.
Timeline generate(const RateSchedule& schedule, std::uint64_t seed, std::string user_id = "synthetic",
                  UserClass user_class = UserClass::generic);

struct NamedSchedule {
    std::string name;
    RateSchedule schedule;
};

/// Covering window used by the multiple-switch validation scenarios.
AnalysisWindow scenario_window();

/// Scenario "A": rate 1 -> 5 on 2019-01-12 -> 2 on 2020-03-02.
/// Scenario "B": rate 1 -> 5 on 2019-10-12 -> 2 on 2020-03-02.
std::vector<NamedSchedule> appendix_scenarios();

struct PopulationSpec {
    RateSchedule schedule;
    std::size_t users = 0;
    UserClass user_class = UserClass::generic;
};

/// Independent timelines for every spec. User ids are `u<global index>`
/// zero-padded to six digits, so lexical order follows generation order;
/// user i draws from substream i of `seed`.
std::vector<Timeline> generate_population(std::span<const PopulationSpec> specs, std::uint64_t seed);

} // namespace shiftscope
