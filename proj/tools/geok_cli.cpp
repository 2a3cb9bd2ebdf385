// geok: command-line front end.
//
// Exit codes: 0 found / converged / valid, 1 usage or parse error,
// 2 numeric failure, 3 not found within budget (or no canonical loop).

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "geok/error.hpp"
#include "geok/geodesics.hpp"
#include "geok/kernels.hpp"
#include "geok/report.hpp"
#include "geok/spaces.hpp"
#include "geok/witness.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0, kUsage = 1, kNumeric = 2, kNotFound = 3;

struct Common {
  std::string out;
  std::string format;
};

void emit(const Common& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text;
  else
    geok::write_file_atomic(c.out, text);
}

void emit_json(const Common& c, const json& config, const json& payload) {
  emit(c, geok::envelope(config, payload).dump(2) + "\n");
}

void require_format(const Common& c, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (c.format == a) return;
  throw geok::Error(geok::Errc::invalid_argument, "unsupported --format '" + c.format + "'");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size())
      throw geok::Error(geok::Errc::invalid_argument, "bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// "0.25,0.5,1.5" or "log:<lo>:<hi>:<count>".
std::vector<double> parse_grid(const std::string& text) {
  if (text.rfind("log:", 0) == 0) {
    std::string rest = text.substr(4);
    for (char& ch : rest)
      if (ch == ':') ch = ',';
    const auto v = parse_number_list(rest);
    if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2]))
      throw geok::Error(geok::Errc::invalid_argument, "log grid is log:<lo>:<hi>:<count>");
    return geok::log_grid(v[0], v[1], static_cast<std::size_t>(v[2]));
  }
  auto v = parse_number_list(text);
  if (v.empty()) throw geok::Error(geok::Errc::invalid_argument, "lambda grid is empty");
  return v;
}

std::vector<std::size_t> parse_schedule(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_number_list(text)) {
    if (v < 1 || v != std::floor(v)) throw geok::Error(geok::Errc::invalid_argument, "schedule entries are integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

geok::Loop load_loop(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw geok::Error(geok::Errc::parse_error, "cannot open loop file " + path);
  return geok::read_loop(in);
}

// --- subcommands -----------------------------------------------------------

struct ScanArgs {
  double lambda = 0.0, q = 2.0, radius = 1.0;
  std::size_t n_max = 4096;
};

int run_circulant_scan(const ScanArgs& a, const Common& c) {
  require_format(c, {"json", "csv"});
  const auto rep = geok::witness_on_circle(a.radius, a.lambda, a.n_max, a.q);
  const json config = {{"subcommand", "circulant-scan"}, {"lambda", a.lambda}, {"q", a.q},
                       {"radius", a.radius}, {"n_max", a.n_max}};
  if (c.format == "csv")
    emit(c, geok::trace_csv(rep));
  else
    emit_json(c, config, geok::to_json(rep));
  if (!c.out.empty()) {
    if (rep.found)
      std::cout << "minimal N = " << *rep.n << ", lambda_min = " << geok::format_number(*rep.lambda_min) << "\n";
    else
      std::cout << "no witness up to N = " << a.n_max << "\n";
  }
  return rep.found ? kOk : kNotFound;
}

struct WitnessArgs {
  std::string space, mode = "auto";
  double lambda = 0.0, q = 2.0;
  std::size_t n_max = 4096, direct_cap = 128;
};

int run_witness_cmd(const WitnessArgs& a, const Common& c) {
  require_format(c, {"json", "csv"});
  geok::WitnessRequest req;
  req.space = geok::parse_space(a.space);
  req.lambda = a.lambda;
  req.q = a.q;
  req.n_max = a.n_max;
  req.mode = geok::parse_witness_mode(a.mode);
  req.direct_cap = a.direct_cap;
  geok::validate(req);
  const json config = {{"subcommand", "witness"}, {"space", a.space}, {"lambda", a.lambda}, {"q", a.q},
                       {"n_max", a.n_max}, {"mode", a.mode}, {"direct_cap", a.direct_cap}};
  geok::WitnessReport rep;
  try {
    rep = geok::run_witness(req);
  } catch (const geok::Error& e) {
    if (e.code() != geok::Errc::unsupported) throw;
    rep.space = req.space.describe();
    rep.lambda = req.lambda;
    rep.q = req.q;
    rep.note = "no canonical loop; use lambda-scan";
    std::cerr << rep.note << "\n";
    if (c.format == "json") emit_json(c, config, geok::to_json(rep));
    return kNotFound;
  }
  if (c.format == "csv")
    emit(c, geok::trace_csv(rep));
  else
    emit_json(c, config, geok::to_json(rep));
  return rep.found ? kOk : kNotFound;
}

struct LambdaScanArgs {
  std::string space, grid, schedule = "4,8";
  double q = 2.0;
  std::uint64_t seed = 0;
  std::size_t budget = 100000;
  unsigned threads = 0;
  bool no_structured = false;
};

int run_lambda_scan(const LambdaScanArgs& a, const Common& c) {
  require_format(c, {"json", "csv"});
  const auto space = geok::parse_space(a.space);
  geok::LambdaScanOptions opts;
  opts.q = a.q;
  opts.n_schedule = parse_schedule(a.schedule);
  opts.seed = a.seed;
  opts.budget = a.budget;
  opts.structured = !a.no_structured;
  opts.threads = a.threads;
  const auto rep = geok::lambda_scan(space, parse_grid(a.grid), opts);
  if (c.format == "csv") {
    emit(c, geok::to_csv(rep));
  } else {
    const json config = {{"subcommand", "lambda-scan"}, {"space", a.space}, {"grid", a.grid},
                         {"q", a.q}, {"schedule", a.schedule}, {"seed", a.seed},
                         {"budget", a.budget}, {"structured", opts.structured}};
    emit_json(c, config, geok::to_json(rep));
  }
  for (const auto& r : rep.records)
    if (!r.psd_observed) return kOk;
  return kNotFound;
}

struct ShortenArgs {
  std::string loop, loop_out;
  int max_iter = 20000;
  double max_move = 0.0, step_tol = 1e-12;
  bool perturb = false, no_coarse = false;
};

int run_shorten(const ShortenArgs& a, const Common& c) {
  require_format(c, {"json"});
  const geok::Loop loop = load_loop(a.loop);
  geok::ShorteningOptions opts;
  opts.max_iter = a.max_iter;
  opts.max_move = a.max_move;
  opts.step_tol = a.step_tol;
  opts.perturb = a.perturb;
  opts.coarse_to_fine = !a.no_coarse;
  const auto res = geok::shorten_loop(loop, opts);
  if (!a.loop_out.empty()) {
    std::ostringstream os;
    geok::write_loop(os, res.loop);
    geok::write_file_atomic(a.loop_out, os.str());
  }
  json payload = geok::to_json(res.report);
  if (loop.surface.kind == geok::SpaceKind::revolution_torus)
    payload["clairaut_relative_deviation"] = geok::clairaut_relative_deviation(res.loop);
  const json config = {{"subcommand", "shorten"}, {"loop", a.loop}, {"max_iter", a.max_iter},
                       {"max_move", a.max_move}, {"step_tol", a.step_tol}, {"perturb", a.perturb},
                       {"coarse_to_fine", opts.coarse_to_fine}};
  emit_json(c, config, payload);
  return res.report.converged ? kOk : kNotFound;
}

struct GramArgs {
  std::string space;
  double lambda = 0.0, q = 2.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool loop_sample = false;
};

int run_gram(const GramArgs& a, const Common& c) {
  require_format(c, {"json", "csv"});
  const auto space = geok::parse_space(a.space);
  const geok::KernelSpec k{a.q, a.lambda};
  geok::validate(k);
  std::size_t n = a.n;
  if (n == 0) n = space.kind == geok::SpaceKind::finite ? space.finite->size() : 8;
  std::vector<geok::Point> pts;
  if (a.loop_sample)
    pts = geok::canonical_loop(space).sample(n);
  else if (space.kind == geok::SpaceKind::finite && n == space.finite->size())
    for (std::size_t i = 0; i < n; ++i) pts.push_back(geok::finite_point(i));
  else
    pts = geok::sample_points(space, n, a.seed);
  const auto g = geok::gram(geok::pairwise_distances(space, pts), k, space.describe());
  const auto verdict = geok::psd_check(g.matrix);
  if (c.format == "csv") {
    std::ostringstream os;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << geok::format_number(g.matrix(i, j));
      os << '\n';
    }
    emit(c, os.str());
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < n; ++j) row.push_back(g.matrix(i, j));
      rows.push_back(row);
    }
    json points = json::array();
    for (const auto& p : pts) points.push_back(geok::to_json(p));
    const json payload = {{"space", space.describe()}, {"lambda", a.lambda}, {"q", a.q}, {"N", n},
                          {"lambda_min", verdict.lambda_min}, {"psd_tolerance", verdict.tolerance},
                          {"psd", verdict.psd}, {"points", points}, {"matrix", rows}};
    const json config = {{"subcommand", "gram"}, {"space", a.space}, {"lambda", a.lambda}, {"q", a.q},
                         {"n", n}, {"seed", a.seed}, {"loop_sample", a.loop_sample}};
    emit_json(c, config, payload);
  }
  return kOk;
}

struct ValidateArgs {
  std::string file;
  double tol = 1e-12;
};

int run_validate(const ValidateArgs& a, const Common& c) {
  require_format(c, {"json"});
  std::ifstream in(a.file);
  if (!in) throw geok::Error(geok::Errc::parse_error, "cannot open " + a.file);
  const auto d = geok::read_distance_matrix(in);
  const auto violations = geok::validate_metric(d, a.tol);
  json list = json::array();
  for (const auto& v : violations) list.push_back(json::array({v.from, v.to, v.via}));
  const json payload = {{"n", d.size()}, {"valid", violations.empty()}, {"violations", list}};
  emit_json(c, {{"subcommand", "validate-metric"}, {"file", a.file}, {"tol", a.tol}}, payload);
  return violations.empty() ? kOk : kNotFound;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-kernel positive-definiteness witnesses on geodesic metric spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(geok::kToolVersion));
  Common common;
  std::uint64_t unused_seed = 0;

  ScanArgs scan;
  auto* cs = app.add_subcommand("circulant-scan", "Scan N = 4, 8, ... for a negative circulant eigenvalue");
  cs->add_option("--lambda", scan.lambda, "Kernel rate")->required();
  cs->add_option("--q", scan.q, "Kernel exponent")->capture_default_str();
  cs->add_option("--radius", scan.radius, "Circle radius")->capture_default_str();
  cs->add_option("--n-max", scan.n_max, "Largest N (multiple of 4)")->capture_default_str();

  WitnessArgs wit;
  auto* ws = app.add_subcommand("witness", "Search the canonical loop of a space for a witness");
  ws->add_option("--space", wit.space, "Space, e.g. sphere:2 or rev-torus:3,1")->required();
  ws->add_option("--lambda", wit.lambda, "Kernel rate")->required();
  ws->add_option("--q", wit.q, "Kernel exponent")->capture_default_str();
  ws->add_option("--n-max", wit.n_max, "Largest N (multiple of 4)")->capture_default_str();
  ws->add_option("--mode", wit.mode, "direct, certified or auto")->capture_default_str();
  ws->add_option("--direct-cap", wit.direct_cap, "Largest N eigensolved densely in auto mode")
      ->capture_default_str();

  LambdaScanArgs ls;
  auto* lss = app.add_subcommand("lambda-scan", "Randomized witness search over a grid of rates");
  lss->add_option("--space", ls.space, "Space")->required();
  lss->add_option("--grid", ls.grid, "Comma list of rates, or log:<lo>:<hi>:<count>")->required();
  lss->add_option("--lambda", ls.grid, "Alias for --grid");
  lss->add_option("--q", ls.q, "Kernel exponent")->capture_default_str();
  lss->add_option("--schedule", ls.schedule, "Ascending sample sizes")->capture_default_str();
  lss->add_option("--budget", ls.budget, "Random samples per rate")->capture_default_str();
  lss->add_option("--seed", ls.seed, "Base seed")->capture_default_str();
  lss->add_option("--threads", ls.threads, "Worker threads (0 = all cores)")->capture_default_str();
  lss->add_flag("--no-structured", ls.no_structured, "Skip the canonical-loop sample");

  ShortenArgs sh;
  auto* shs = app.add_subcommand("shorten", "Birkhoff curve shortening of a closed loop");
  shs->add_option("--loop", sh.loop, "Loop file")->required();
  shs->add_option("--loop-out", sh.loop_out, "Write the shortened loop here");
  shs->add_option("--max-iter", sh.max_iter, "Iteration cap per level")->capture_default_str();
  shs->add_option("--max-move", sh.max_move, "Per-vertex move cap (0 = period/8)")->capture_default_str();
  shs->add_option("--step-tol", sh.step_tol, "Stop when an iteration shortens by less")->capture_default_str();
  shs->add_flag("--perturb", sh.perturb, "Shift theta by 0.05 first (torus of revolution)");
  shs->add_flag("--no-coarse", sh.no_coarse, "Shorten at full resolution only");

  GramArgs gr;
  auto* grs = app.add_subcommand("gram", "Gram matrix of sampled points");
  grs->add_option("--space", gr.space, "Space")->required();
  grs->add_option("--lambda", gr.lambda, "Kernel rate")->required();
  grs->add_option("--q", gr.q, "Kernel exponent")->capture_default_str();
  grs->add_option("--n", gr.n, "Number of points (default: all points of a finite space, else 8)");
  grs->add_option("--seed", gr.seed, "Sampling seed")->capture_default_str();
  grs->add_flag("--loop-sample", gr.loop_sample, "Equidistributed points on the canonical loop");

  ValidateArgs va;
  auto* vas = app.add_subcommand("validate-metric", "List triangle-inequality violations of a distance file");
  vas->add_option("file", va.file, "Distance file")->required();
  vas->add_option("--tol", va.tol, "Slack allowed in the triangle inequality")->capture_default_str();

  // Deterministic subcommands accept --seed so scripts can pass it uniformly.
  for (auto* sub : {cs, ws})
    sub->add_option("--seed", unused_seed, "Accepted for uniformity; these scans are deterministic");
  for (auto* sub : {cs, ws, lss, shs, grs, vas}) {
    sub->add_option("--out", common.out, "Write the report here (atomically) instead of stdout");
    sub->add_option("--format", common.format, sub == lss ? "csv (default) or json" : "json (default) or csv");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (common.format.empty()) common.format = lss->parsed() ? "csv" : "json";

  try {
    if (cs->parsed()) return run_circulant_scan(scan, common);
    if (ws->parsed()) return run_witness_cmd(wit, common);
    if (lss->parsed()) return run_lambda_scan(ls, common);
    if (shs->parsed()) return run_shorten(sh, common);
    if (grs->parsed()) return run_gram(gr, common);
    if (vas->parsed()) return run_validate(va, common);
  } catch (const geok::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return geok::is_numeric_failure(e.code()) ? kNumeric : kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
