// Copyright 2026 The pvbs-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pvbs/error.hpp"
#include "pvbs/martingale.hpp"
#include "pvbs/spectra.hpp"
#include "pvbs/variational.hpp"

namespace pvbs::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

template <class T>
T parse_number(const std::string& tok, const std::string& what) {
  T v{};
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc() || ptr != end) throw UsageError("malformed " + what + ": '" + tok + "'");
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const std::string& what) {
  std::vector<T> out;
  for (const auto& tok : split(s)) out.push_back(parse_number<T>(tok, what));
  if (out.empty()) throw UsageError("empty " + what);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json_arg(const std::string& s, const std::string& what) {
  std::string text = s;
  if (!text.empty() && text.front() == '@') text = read_file(text.substr(1));
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    std::ifstream probe(s);
    if (probe) return json::parse(read_file(s));
    throw UsageError("malformed JSON for " + what);
  }
}

// Raw option text; config-file values are converted to the same form.
struct Raw {
  std::map<std::string, std::string> values;
  bool no_certificate = false;

  std::optional<std::string> get(const std::string& k) const {
    auto it = values.find(k);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
};

std::string json_to_flag(const json& v) {
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += v[i].is_string() ? v[i].get<std::string>() : v[i].dump();
    }
    return s;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void merge_config(Raw& raw, const std::string& path) {
  json cfg = parse_json_arg("@" + path, "--config");
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    std::string key = it.key();
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "no-certificate") {
      if (!raw.values.count("no-certificate-flag")) raw.no_certificate = it.value().get<bool>();
      continue;
    }
    if (!raw.values.count(key)) raw.values[key] = json_to_flag(it.value());
  }
}

ModelParams read_params(const Raw& raw, bool need_m) {
  const auto lam = raw.get("lambda");
  if (!lam) throw UsageError("--lambda is required");
  const auto lambda = parse_list<double>(*lam, "lambda");
  if (const auto d = raw.get("dim")) {
    const int dim = parse_number<int>(*d, "dim");
    if (dim != static_cast<int>(lambda.size())) throw UsageError("--dim does not match the number of lambda entries");
  }
  std::vector<double> m(lambda.size(), 0.0);
  m[0] = 1.0;
  if (const auto ms = raw.get("m")) {
    m = parse_list<double>(*ms, "m");
  } else if (need_m) {
    throw UsageError("--m is required");
  }
  if (m.size() != lambda.size()) throw UsageError("--m and --lambda differ in length");
  return ModelParams::make_normalized(lambda, m);
}

void warn_normalization(const Raw& raw, std::ostream& err) {
  const auto ms = raw.get("m");
  if (!ms) return;
  const double n = norm2(parse_list<double>(*ms, "m"));
  if (std::abs(n - 1.0) > 1e-6) err << "warning: m rescaled to unit length (norm was " << n << ")\n";
}

SolverCaps read_caps(const Raw& raw, SolverCaps caps = {}, int* ell_max = nullptr) {
  const auto s = raw.get("caps");
  if (!s) return caps;
  const json j = parse_json_arg(*s, "--caps");
  if (!j.is_object()) throw UsageError("--caps must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (!it.value().is_number()) throw UsageError("cap " + k + " must be a number");
    if (k == "max_states") {
      caps.max_states = it.value().get<std::size_t>();
    } else if (k == "dense_threshold") {
      caps.dense_threshold = it.value().get<std::size_t>();
    } else if (k == "ell_max") {
      if (ell_max) *ell_max = it.value().get<int>();
    } else {
      throw UsageError("unknown cap '" + k + "'");
    }
  }
  return caps;
}

int read_int(const Raw& raw, const std::string& key, int fallback) {
  const auto s = raw.get(key);
  return s ? parse_number<int>(*s, key) : fallback;
}

json envelope(const std::string& command) { return json{{"schema", kSchema}, {"command", command}}; }

// ---------------------------------------------------------------------------

json cmd_gap(const Raw& raw, std::ostream& err) {
  const ModelParams params = read_params(raw, false);
  warn_normalization(raw, err);
  RegionSpec spec;
  if (const auto rs = raw.get("region-spec")) {
    spec = parse_json_arg(*rs, "--region-spec").get<RegionSpec>();
  } else if (const auto box = raw.get("box")) {
    const auto lengths = parse_list<Coord>(*box, "box");
    spec = RegionSpec::box(std::vector<Coord>(lengths.size(), 0), lengths);
  } else {
    throw UsageError("gap needs --box or --region-spec");
  }
  const Region region = build_region(spec, params);
  const SolverCaps caps = read_caps(raw);
  std::vector<int> sectors = default_sectors(region.size());
  if (const auto s = raw.get("sectors")) {
    if (*s == "all") {
      sectors = all_sectors(region.size());
    } else if (*s != "default") {
      sectors = parse_list<int>(*s, "sectors");
    }
  }
  json out = envelope("gap");
  out["params"] = params;
  out["region"] = {{"spec", spec}, {"sites", region.size()}, {"connected", is_connected(region)}};
  out["result"] = spectral_gap(region, params, sectors, caps);
  return out;
}

json cmd_certify(const Raw& raw, std::ostream& err) {
  const ModelParams params = read_params(raw, true);
  warn_normalization(raw, err);
  CertifyOptions opt;
  opt.caps = read_caps(raw, {}, &opt.ell_max);
  const int scale = read_int(raw, "scale", 2);
  BoundCertificate cert = certify_lower_bound(params, scale, opt);
  const UpperBoundResult ub = trial_state_energy(params, scale);
  if (ub.closed_form_bound) attach_upper_bound(cert, *ub.closed_form_bound);
  for (const auto& w : cert.warnings) err << "warning: " << w << '\n';
  json out = envelope("certify");
  out["certificate"] = cert;
  out["variational"] = ub;
  return out;
}

json cmd_bulk(const Raw& raw) {
  const ModelParams params = read_params(raw, false);
  CertifyOptions opt;
  opt.caps = read_caps(raw, {}, &opt.ell_max);
  json out = envelope("bulk");
  out["certificate"] = certify_bulk(params, opt);
  return out;
}

// Unit normal at angle theta from -log(lambda), rotating towards a fixed orthogonal direction.
std::vector<double> normal_at(const std::vector<double>& l, double theta) {
  const double nl = norm2(l);
  std::vector<double> u(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) u[i] = l[i] / nl;
  std::size_t k = 0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (std::abs(u[i]) < std::abs(u[k]) - 1e-15) k = i;
  }
  std::vector<double> w(u.size(), 0.0);
  w[k] = 1.0;
  const double c = dot(w, u);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * u[i];
  const double nw = norm2(w);
  std::vector<double> m(u.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = -std::cos(theta) * u[i] + std::sin(theta) * w[i] / nw;
  return m;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream os;
  os << std::setprecision(17) << *v;
  return os.str();
}

std::string cmd_sweep_theta(const Raw& raw) {
  const ModelParams base = read_params(raw, false);
  if (base.is_isotropic()) throw UsageError("sweep-theta needs lambda != (1,...,1)");
  if (base.d < 2) throw UsageError("sweep-theta needs d >= 2");
  const int scale = read_int(raw, "scale", 8);
  const int steps = read_int(raw, "steps", 8);
  if (scale < 1 || steps < 1) throw UsageError("--scale and --steps must be positive");
  SolverCaps defaults;
  defaults.max_states = 200000;
  CertifyOptions opt;
  opt.caps = read_caps(raw, defaults, &opt.ell_max);
  const auto l = base.log_lambda();

  std::ostringstream os;
  os << "theta,closed_form_bound,trial_quotient_at_L,certificate_lower\n";
  for (int k = 0; k <= steps; ++k) {
    const double theta = 0.5 * std::numbers::pi * k / steps;
    const ModelParams p = ModelParams::make_normalized(base.lambda, normal_at(l, theta));
    std::optional<double> closed, quotient, lower;
    try {
      closed = closed_form_upper_bound(p);
    } catch (const Error&) {
    }
    try {
      quotient = trial_state_energy(p, scale).rayleigh_quotient;
    } catch (const Error&) {
    }
    if (!raw.no_certificate) {
      try {
        lower = certify_lower_bound(p, scale, opt).lower_bound;
      } catch (const Error&) {
      }
    }
    os << cell(theta) << ',' << cell(closed) << ',' << cell(quotient) << ',' << cell(lower) << '\n';
  }
  return os.str();
}

json cmd_epsilon_verify(const Raw& raw, int& exit_code) {
  const int count = read_int(raw, "count", 50);
  if (count <= 0) throw UsageError("--count must be positive");
  const auto seed = static_cast<std::uint64_t>(read_int(raw, "seed", 7));
  constexpr double kTol = 1e-9;
  std::mt19937_64 rng(seed);
  json rows = json::array();
  json skipped = json::array();
  double worst = 0.0;
  const auto check = [&](const LemmaInstance& inst) {
    try {
      const double a = epsilon_exact(inst.filtration, inst.n, inst.ell, inst.params);
      const double b = epsilon_bruteforce(inst.filtration, inst.n, inst.ell, inst.params);
      worst = std::max(worst, std::abs(a - b));
      rows.push_back({{"description", inst.description},
                      {"lambda", inst.params.lambda},
                      {"sites", inst.filtration.stages[static_cast<std::size_t>(inst.n + 1)].size()},
                      {"n", inst.n},
                      {"ell", inst.ell},
                      {"exact", a},
                      {"bruteforce", b},
                      {"deviation", std::abs(a - b)}});
      return true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DisconnectedVolume) throw;
      skipped.push_back({{"description", inst.description}, {"reason", std::string(to_string(e.code())) + ": " + e.what()}});
      return false;
    }
  };
  if (raw.get("include-disconnected")) check(disconnected_lemma_instance());
  int verified = 0;
  for (long long attempts = 0; verified < count && attempts < 100LL * count; ++attempts) {
    if (check(random_lemma_instance(rng))) ++verified;
  }
  const bool pass = verified == count && worst < kTol;
  json out = envelope("epsilon-verify");
  out["seed"] = seed;
  out["requested"] = count;
  out["verified"] = verified;
  out["skipped"] = skipped;
  out["tolerance"] = kTol;
  out["max_abs_deviation"] = worst;
  out["pass"] = pass;
  out["instances"] = rows;
  exit_code = pass ? kOk : kEpsilonMismatch;
  return out;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::SectorTooLarge:
    case ErrorCode::RegionTooLarge:
      return kTooLarge;
    case ErrorCode::SolverFailure:
      return kSolverFailure;
    case ErrorCode::GaplessDirection:
      return kGaplessDirection;
    case ErrorCode::NoFeasibleEll:
      return kNoFeasibleEll;
    case ErrorCode::GaplessBulk:
      return kGaplessBulk;
    default:
      return kUsage;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral gaps and gap bounds for product-vacua-with-boundary-states models", "pvbs-gap"};
  app.require_subcommand(1, 1);
  Raw raw;
  std::map<std::string, std::string> flag_values;
  std::string config_path;
  bool no_cert = false;
  bool include_disconnected = false;

  const auto add = [&](CLI::App* sub, const std::string& name, const std::string& help) {
    sub->add_option("--" + name, flag_values[sub->get_name() + "/" + name], help);
  };
  const auto common = [&](CLI::App* sub) {
    add(sub, "dim", "lattice dimension d");
    add(sub, "lambda", "comma-separated couplings lambda_1..lambda_d");
    add(sub, "m", "comma-separated half-space normal (rescaled to unit length)");
    add(sub, "caps", "JSON object with max_states, dense_threshold, ell_max");
    add(sub, "out", "write output to this file");
    sub->add_option("--config", config_path, "JSON config file; flags take precedence");
  };

  auto* gap = app.add_subcommand("gap", "spectral gap of a finite region");
  common(gap);
  add(gap, "box", "box side lengths, lower corner at the origin");
  add(gap, "region-spec", "region spec as JSON text, @file or file path");
  add(gap, "sectors", "'default', 'all' or a list of particle numbers");

  auto* certify = app.add_subcommand("certify", "martingale lower bound with variational upper bound");
  common(certify);
  add(certify, "scale", "scale L of the target volume (default 2)");

  auto* bulk = app.add_subcommand("bulk", "lower bound for the full lattice, choosing a normal");
  common(bulk);

  auto* sweep = app.add_subcommand("sweep-theta", "bounds along a grid of normals, as CSV");
  common(sweep);
  add(sweep, "scale", "trial-state and certificate scale L (default 8)");
  add(sweep, "steps", "grid intervals on [0, pi/2] (default 8)");
  sweep->add_flag("--no-certificate", no_cert, "skip the lower-bound column");

  auto* eps = app.add_subcommand("epsilon-verify", "compare exact and brute-force overlap norms");
  add(eps, "count", "number of random instances (default 50)");
  add(eps, "seed", "random seed (default 7)");
  add(eps, "out", "write output to this file");
  eps->add_option("--config", config_path, "JSON config file; flags take precedence");
  eps->add_flag("--include-disconnected", include_disconnected, "add a fixed instance with a disconnected strip");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  for (const auto* opt : sub->get_options()) {
    if (opt->count() == 0) continue;
    const std::string flag = opt->get_name().substr(2);
    auto it = flag_values.find(name + "/" + flag);
    if (it != flag_values.end()) raw.values[flag] = it->second;
  }
  if (no_cert) {
    raw.no_certificate = true;
    raw.values["no-certificate-flag"] = "1";
  }
  if (include_disconnected) raw.values["include-disconnected"] = "1";

  try {
    if (!config_path.empty()) merge_config(raw, config_path);
    int code = kOk;
    std::string text;
    if (name == "gap") {
      text = cmd_gap(raw, err).dump(2) + "\n";
    } else if (name == "certify") {
      text = cmd_certify(raw, err).dump(2) + "\n";
    } else if (name == "bulk") {
      text = cmd_bulk(raw).dump(2) + "\n";
    } else if (name == "sweep-theta") {
      text = cmd_sweep_theta(raw);
    } else {
      text = cmd_epsilon_verify(raw, code).dump(2) + "\n";
    }
    if (const auto path = raw.get("out")) {
      std::ofstream f(*path, std::ios::binary);
      if (!f) throw UsageError("cannot write " + *path);
      f << text;
    } else {
      out << text;
    }
    if (code == kEpsilonMismatch) err << "error: exact and brute-force overlap norms disagree\n";
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n" << sub->help();
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace pvbs::cli
