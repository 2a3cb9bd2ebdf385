#include "geok/report.hpp"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace geok {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const PerturbationCertificate& c) {
  return {{"lambda_min_ref", c.lambda_min_reference},
          {"delta", c.inf_norm_delta},
          {"n", c.n},
          {"bound", c.certified_bound},
          {"fires", c.fires}};
}

json to_json(const Point& p) {
  if (p.kind == SpaceKind::finite) return {{"index", p.index}};
  return {{"coords", p.coords}};
}

json to_json(const WitnessReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(to_json(p));
  json trace = json::array();
  for (const auto& s : r.trace) trace.push_back({{"N", s.n}, {"lambda_min", s.lambda_min}, {"direct", s.direct}});
  json out = {
      {"space", r.space},
      {"lambda", r.lambda},
      {"q", r.q},
      {"found", r.found},
      {"N", optional_json(r.n)},
      {"lambda_min", optional_json(r.lambda_min)},
      {"lambda_eff", r.lambda_eff},
      {"loop", {{"kind", r.loop.kind}, {"length", r.loop.length}, {"class", r.loop.cls}}},
      {"certificate", r.certificate ? to_json(*r.certificate) : json(nullptr)},
      {"epsilon_observed", optional_json(r.epsilon_observed)},
      {"max_abs_deviation", optional_json(r.max_abs_deviation)},
      {"lipschitz_consistent", optional_json(r.lipschitz_consistent)},
      {"mode", std::string(to_string(r.mode))},
      {"points", pts},
      {"trace", trace},
  };
  if (r.grid_pitch > 0.0) out["grid_pitch"] = r.grid_pitch;
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

json to_json(const ShorteningReport& r) {
  return {{"initial_length", r.initial_length}, {"final_length", r.final_length},
          {"iterations", r.iterations},         {"converged", r.converged},
          {"contractible", r.contractible},     {"class_before", r.class_before.winding},
          {"class_after", r.class_after.winding}};
}

json to_json(const LambdaScanReport& r) {
  json recs = json::array();
  for (const auto& x : r.records)
    recs.push_back({{"lambda", x.lambda},
                    {"psd_observed", x.psd_observed},
                    {"lambda_min", x.lambda_min},
                    {"witness_n", optional_json(x.witness_n)},
                    {"seed", x.sample_seed},
                    {"structured", x.structured},
                    {"samples_used", x.samples_used},
                    {"budget_exhausted", x.budget_exhausted}});
  return {{"space", r.space},
          {"q", r.options.q},
          {"n_schedule", r.options.n_schedule},
          {"seed", r.options.seed},
          {"budget", r.options.budget},
          {"records", recs}};
}

std::string to_csv(const LambdaScanReport& r) {
  std::ostringstream os;
  os << "lambda,psd_observed,lambda_min,witness_n,seed\n";
  for (const auto& x : r.records)
    os << format_number(x.lambda) << ',' << (x.psd_observed ? "true" : "false") << ','
       << format_number(x.lambda_min) << ',' << (x.witness_n ? std::to_string(*x.witness_n) : "") << ','
       << x.sample_seed << '\n';
  return os.str();
}

std::string trace_csv(const WitnessReport& r) {
  std::ostringstream os;
  os << "N,lambda_min,direct\n";
  for (const auto& s : r.trace)
    os << s.n << ',' << format_number(s.lambda_min) << ',' << (s.direct ? "true" : "false") << '\n';
  return os.str();
}

json envelope(const json& config, const json& payload) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return {{"tool", std::string(kToolName)},
          {"version", std::string(kToolVersion)},
          {"config", config},
          {"timestamp", stamp},
          {"payload", payload}};
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + ": " + std::strerror(errno));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace geok
