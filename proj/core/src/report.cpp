#include "physattn/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace physattn::report {

std::string csv_escape(std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (const char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_escape(fields[i]);
  }
  out += "\r\n";
  return out;
}

std::string format_number(double value, int significant) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, value);
  return buf;
}

std::vector<std::string> metric_csv_header() {
  return {"run_id", "alpha", "prior", "T", "R", "D", "R_hat", "D_hat", "S", "adjacent_cosine", "seed"};
}

std::vector<std::string> metric_csv_fields(std::string_view run_id, double alpha, std::string_view prior,
                                           const metrics::MetricReport& r, std::uint64_t seed) {
  return {std::string(run_id),
          format_number(alpha),
          std::string(prior),
          std::to_string(r.frames),
          format_number(r.r),
          format_number(r.d),
          format_number(r.r_hat),
          format_number(r.d_hat),
          format_number(r.s),
          r.adjacent_cosine ? format_number(*r.adjacent_cosine) : std::string(),
          std::to_string(seed)};
}

std::string metric_json(const metrics::MetricReport& r) {
  nlohmann::ordered_json doc;
  doc["T"] = r.frames;
  doc["R"] = r.r;
  doc["D"] = r.d;
  doc["R_hat"] = r.r_hat;
  doc["D_hat"] = r.d_hat;
  doc["S"] = r.s;
  doc["adjacent_cosine"] = r.adjacent_cosine ? nlohmann::ordered_json(*r.adjacent_cosine) : nullptr;
  return doc.dump() + "\n";
}

}  // namespace physattn::report
