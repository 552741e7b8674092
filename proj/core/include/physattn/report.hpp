#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "physattn/metrics.hpp"

namespace physattn::report {

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF; inner
/// quotes doubled.
[[nodiscard]] std::string csv_escape(std::string_view field);

/// Comma-joined, escaped fields terminated by CRLF as RFC 4180 prescribes.
[[nodiscard]] std::string csv_line(const std::vector<std::string>& fields);

/// printf %.{significant}g, with "nan"/"inf" spelled out.
[[nodiscard]] std::string format_number(double value, int significant = 12);

/// run_id, alpha, prior, T, R, D, R_hat, D_hat, S, adjacent_cosine, seed
[[nodiscard]] std::vector<std::string> metric_csv_header();

[[nodiscard]] std::vector<std::string> metric_csv_fields(std::string_view run_id, double alpha,
                                                         std::string_view prior,
                                                         const metrics::MetricReport& report,
                                                         std::uint64_t seed);

/// {"T":..,"R":..,"D":..,"R_hat":..,"D_hat":..,"S":..,"adjacent_cosine":..}
/// followed by a newline; adjacent_cosine is null when it was not computed.
[[nodiscard]] std::string metric_json(const metrics::MetricReport& report);

}  // namespace physattn::report
