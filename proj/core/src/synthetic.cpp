#include "shiftscope/synthetic.hpp"

#include "shiftscope/error.hpp"
#include "shiftscope/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace shiftscope {

RateSchedule::RateSchedule(AnalysisWindow window, std::vector<RatePiece> pieces, SourcePool sources)
    : m_Window{window}, m_Pieces{std::move(pieces)}, m_Sources{sources} {
    if (m_Pieces.empty() || m_Pieces.front().start != m_Window.start()) {
        throw InvalidInputError{"rate schedule must start with a piece at the window start"};
    }
    for (std::size_t i = 0; i < m_Pieces.size(); ++i) {
        const RatePiece& piece = m_Pieces[i];
        if (!m_Window.contains(piece.start)) {
            throw InvalidInputError{fmt::format("rate piece starting {} lies outside the window", format_date(piece.start))};
        }
        if (i > 0 && !(m_Pieces[i - 1].start < piece.start)) {
            throw InvalidInputError{"rate piece starts must increase strictly"};
        }
        if (!(piece.rate >= 0.0) || !std::isfinite(piece.rate)) {
            throw InvalidInputError{"rates must be finite and non-negative"};
        }
        if (!(piece.retweet_fraction >= 0.0 && piece.retweet_fraction <= 1.0)) {
            throw InvalidInputError{"retweet fraction must lie in [0, 1]"};
        }
    }
    if (m_Sources.pool_size == 0) {
        throw InvalidInputError{"retweet source pool must be non-empty"};
    }
}

const RatePiece& RateSchedule::piece_on(Date day) const {
    auto it = std::upper_bound(m_Pieces.begin(), m_Pieces.end(), day,
                               [](Date d, const RatePiece& p) { return d < p.start; });
    return *(it - 1);
}

Timeline generate(const RateSchedule& schedule, std::uint64_t seed, std::string user_id, UserClass user_class) {
    Rng rng{derive_seed(seed, 0)};
    const AnalysisWindow& window = schedule.window();

    std::vector<double> weights(schedule.sources().pool_size);
    for (std::size_t r = 0; r < weights.size(); ++r) {
        weights[r] = std::pow(static_cast<double>(r + 1), -schedule.sources().zipf_exponent);
    }
    std::discrete_distribution<std::size_t> pick_source{weights.begin(), weights.end()};
    std::uniform_int_distribution<std::int64_t> second_of_day{0, 86399};
    std::uniform_real_distribution<double> unit{0.0, 1.0};

    std::vector<Event> events;
    std::vector<std::int64_t> seconds;
    for (std::size_t d = 0; d < window.days(); ++d) {
        Date day = window.date_at(d);
        const RatePiece& piece = schedule.piece_on(day);
        if (piece.rate <= 0.0) {
            continue;
        }
        auto count = std::poisson_distribution<std::int64_t>{piece.rate}(rng);
        seconds.resize(static_cast<std::size_t>(count));
        for (auto& s : seconds) {
            s = second_of_day(rng);
        }
        std::sort(seconds.begin(), seconds.end());
        for (std::int64_t s : seconds) {
            Timestamp ts = Timestamp{day} + std::chrono::seconds{s};
            if (piece.retweet_fraction > 0.0 && unit(rng) < piece.retweet_fraction) {
                events.push_back(Event::retweet(ts, fmt::format("src{:04d}", pick_source(rng))));
            } else {
                events.push_back(Event::original(ts));
            }
        }
    }
    return Timeline{std::move(user_id), user_class, std::move(events)};
}

AnalysisWindow scenario_window() {
    using namespace std::chrono;
    return AnalysisWindow{sys_days{year{2018} / November / 1}, sys_days{year{2020} / May / 1}};
}

std::vector<NamedSchedule> appendix_scenarios() {
    using namespace std::chrono;
    const AnalysisWindow window = scenario_window();
    auto three_piece = [&](sys_days first_switch) {
        return RateSchedule{window,
                            {{window.start(), 1.0, 0.0},
                             {first_switch, 5.0, 0.0},
                             {sys_days{year{2020} / March / 2}, 2.0, 0.0}}};
    };
    return {
        {"A", three_piece(sys_days{year{2019} / January / 12})},
        {"B", three_piece(sys_days{year{2019} / October / 12})},
    };
}

std::vector<Timeline> generate_population(std::span<const PopulationSpec> specs, std::uint64_t seed) {
    std::vector<Timeline> out;
    std::size_t index = 0;
    for (const PopulationSpec& spec : specs) {
        for (std::size_t u = 0; u < spec.users; ++u, ++index) {
            out.push_back(generate(spec.schedule, derive_seed(seed, index), fmt::format("u{:06d}", index),
                                   spec.user_class));
        }
    }
    return out;
}

} // namespace shiftscope
