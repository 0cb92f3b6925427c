// qkdrot command line front end. Talks to the library only through the C API.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkdrot/qkdrot.h"

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

enum ExitCode { kExitOk = 0, kExitVerifyFailed = 1, kExitInvalid = 2 };

struct CliError {
  std::string message;
};

[[noreturn]] void die(const std::string& message) { throw CliError{message}; }

void check(qkd_status status, const std::string& context = {}) {
  if (status == QKD_OK) return;
  std::string msg = qkd_last_error();
  if (msg.empty()) msg = qkd_status_string(status);
  die(context.empty() ? msg : context + ": " + msg);
}

struct ChannelDeleter {
  void operator()(qkd_channel* c) const { qkd_channel_free(c); }
};
using ChannelPtr = std::unique_ptr<qkd_channel, ChannelDeleter>;

std::string format12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

double parse_angle(const std::string& s) {
  if (s == "pi/2") return kPi / 2;
  if (s == "pi/3") return kPi / 3;
  if (s == "pi/4") return kPi / 4;
  if (s == "pi/8") return kPi / 8;
  if (auto v = parse_number(s)) return *v;
  die("cannot parse angle '" + s + "' (radians or pi/2, pi/3, pi/4, pi/8)");
}

double parse_real(const std::string& s, const std::string& what) {
  if (auto v = parse_number(s)) return *v;
  die("cannot parse " + what + " '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ChannelPtr channel_from_json_text(const std::string& text) {
  qkd_channel* out = nullptr;
  check(qkd_channel_from_json(text.c_str(), &out), "channel");
  return ChannelPtr(out);
}

// identity | depolarizing:p | pauli:pi,px,py,pz | pauli_x:p | pauli_y:p | pauli_z:p |
// rotation:beta | unitary_rotation:beta | amplitude_damping:g | random:seed[:k] |
// @file.json | inline JSON object
ChannelPtr parse_channel(const std::string& text) {
  if (text.empty()) die("empty channel specification");
  if (text.front() == '@') return channel_from_json_text(read_file(text.substr(1)));
  if (text.front() == '{') return channel_from_json_text(text);
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) die("channel '" + name + "' needs a parameter, e.g. " + name + ":0.1");
  };
  qkd_channel* out = nullptr;
  qkd_status st = QKD_OK;
  if (name == "identity") {
    if (!arg.empty()) die("channel 'identity' takes no parameter");
    st = qkd_channel_identity(&out);
  } else if (name == "depolarizing") {
    need_arg();
    st = qkd_channel_depolarizing(parse_real(arg, "depolarizing p"), &out);
  } else if (name == "pauli") {
    need_arg();
    const auto parts = split(arg, ',');
    if (parts.size() != 4) die("pauli channel needs four weights: pauli:p_i,p_x,p_y,p_z");
    st = qkd_channel_pauli(parse_real(parts[0], "p_i"), parse_real(parts[1], "p_x"),
                           parse_real(parts[2], "p_y"), parse_real(parts[3], "p_z"), &out);
  } else if (name == "pauli_x" || name == "pauli_y" || name == "pauli_z") {
    need_arg();
    const double p = parse_real(arg, name + " p");
    const char axis = name.back();
    st = qkd_channel_pauli(1.0 - p, axis == 'x' ? p : 0.0, axis == 'y' ? p : 0.0,
                           axis == 'z' ? p : 0.0, &out);
  } else if (name == "rotation" || name == "unitary_rotation") {
    need_arg();
    st = qkd_channel_unitary_rotation(parse_angle(arg), &out);
  } else if (name == "amplitude_damping") {
    need_arg();
    st = qkd_channel_amplitude_damping(parse_real(arg, "amplitude damping gamma"), &out);
  } else if (name == "random") {
    need_arg();
    const auto parts = split(arg, ':');
    if (parts.size() > 2) die("random channel syntax: random:seed[:num_kraus]");
    std::uint64_t seed = 0;
    try {
      std::size_t used = 0;
      seed = std::stoull(parts[0], &used);
      if (used != parts[0].size() || parts[0].front() == '-') throw std::invalid_argument("");
    } catch (const std::exception&) {
      die("random channel seed must be a non-negative integer, got '" + parts[0] + "'");
    }
    int k = 2;
    if (parts.size() == 2) {
      const double kv = parse_real(parts[1], "num_kraus");
      if (kv != std::floor(kv)) die("num_kraus must be an integer");
      k = static_cast<int>(kv);
    }
    st = qkd_channel_random(seed, k, &out);
  } else {
    die("unknown channel '" + name + "'");
  }
  check(st, "channel");
  return ChannelPtr(out);
}

json channel_json(const qkd_channel* ch) {
  char* text = nullptr;
  check(qkd_channel_to_json(ch, &text));
  json j = json::parse(text);
  qkd_string_free(text);
  return j;
}

// CSV-safe family name: the JSON type, or the sanitized label of a custom channel.
std::string channel_family(const qkd_channel* ch) {
  std::string name = channel_json(ch).at("type").get<std::string>();
  if (name == "custom") name = qkd_channel_label(ch);
  for (char& c : name) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') c = '_';
  }
  return name;
}

unsigned env_threads() {
  const char* env = std::getenv("QKD_ROTSYM_THREADS");
  if (!env || !*env) return 0;
  const auto v = parse_number(env);
  if (!v || *v < 1 || *v != std::floor(*v) || *v > 4096) {
    die(std::string("QKD_ROTSYM_THREADS must be a positive integer, got '") + env + "'");
  }
  return static_cast<unsigned>(*v);
}

// ---------------------------------------------------------------------------
// Run configuration (flags, optionally seeded from a RunConfigFile)

struct RunConfig {
  std::optional<int> num_bases;
  std::optional<double> theta;
  std::string sifting = "generic";
  std::optional<std::string> channel_text;  // CLI form
  std::optional<json> channel_spec;         // JSON form from a config file
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> seed;
  double test_fraction = 0.0;
  std::string lambda_mode = "paper_range";
};

[[noreturn]] void config_error(const std::string& path, const std::string& pointer,
                               const std::string& what) {
  die(path + ": field " + pointer + ": " + what);
}

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) line += text[i] == '\n' ? 1 : 0;
  return line;
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& path,
                const std::string& pointer) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == key;
    if (!ok) config_error(path, pointer + "/" + key, "unknown field");
  }
}

std::uint64_t config_uint(const json& v, const std::string& path, const std::string& pointer) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    config_error(path, pointer, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

void load_config(const std::string& path, RunConfig& cfg) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    die(path + ":" + std::to_string(line_of_offset(text, e.byte)) + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) config_error(path, "/", "top level must be an object");
  // Unknown top-level keys are ignored so that result documents written by
  // `analyze --json` and `simulate --json` can be fed back in.
  if (auto it = doc.find("protocol"); it != doc.end()) {
    const json& p = *it;
    if (!p.is_object()) config_error(path, "/protocol", "expected an object");
    check_keys(p, {"M", "theta", "sifting_mode"}, path, "/protocol");
    if (auto m = p.find("M"); m != p.end()) {
      if (!m->is_number_integer()) config_error(path, "/protocol/M", "expected an integer");
      cfg.num_bases = m->get<int>();
    }
    if (auto t = p.find("theta"); t != p.end()) {
      if (t->is_number()) {
        cfg.theta = t->get<double>();
      } else if (t->is_string()) {
        try {
          cfg.theta = parse_angle(t->get<std::string>());
        } catch (const CliError& e) {
          config_error(path, "/protocol/theta", e.message);
        }
      } else {
        config_error(path, "/protocol/theta", "expected radians or a pi token");
      }
    }
    if (auto s = p.find("sifting_mode"); s != p.end()) {
      if (!s->is_string()) config_error(path, "/protocol/sifting_mode", "expected a string");
      cfg.sifting = s->get<std::string>();
      if (cfg.sifting != "generic" && cfg.sifting != "basis_free") {
        config_error(path, "/protocol/sifting_mode", "expected \"generic\" or \"basis_free\"");
      }
    }
  }
  if (auto it = doc.find("channel"); it != doc.end()) {
    if (!it->is_object()) config_error(path, "/channel", "expected a channel spec object");
    try {
      channel_from_json_text(it->dump());
    } catch (const CliError& e) {
      config_error(path, "/channel", e.message);
    }
    cfg.channel_spec = *it;
  }
  if (auto it = doc.find("simulation"); it != doc.end()) {
    const json& s = *it;
    if (!s.is_object()) config_error(path, "/simulation", "expected an object");
    check_keys(s, {"n", "seed", "test_fraction"}, path, "/simulation");
    if (auto v = s.find("n"); v != s.end()) cfg.n = config_uint(*v, path, "/simulation/n");
    if (auto v = s.find("seed"); v != s.end()) cfg.seed = config_uint(*v, path, "/simulation/seed");
    if (auto v = s.find("test_fraction"); v != s.end()) {
      if (!v->is_number()) config_error(path, "/simulation/test_fraction", "expected a number");
      cfg.test_fraction = v->get<double>();
    }
  }
  if (auto it = doc.find("lambda_mode"); it != doc.end()) {
    if (!it->is_string()) config_error(path, "/lambda_mode", "expected a string");
    cfg.lambda_mode = it->get<std::string>();
    if (cfg.lambda_mode != "paper_range" && cfg.lambda_mode != "pessimistic") {
      config_error(path, "/lambda_mode", "expected \"paper_range\" or \"pessimistic\"");
    }
  }
}

// Flag values as typed; applied on top of the config file.
struct Flags {
  std::string config;
  int num_bases = 0;
  std::string theta;
  std::string channel;
  std::string sifting;
  std::string lambda_mode;
  bool json_out = false;
};

void add_common(CLI::App* sub, Flags& f, bool with_channel) {
  sub->add_option("--config", f.config, "RunConfigFile JSON");
  sub->add_option("--M", f.num_bases, "number of bases (>= 2)");
  sub->add_option("--theta", f.theta, "angle in radians or pi/2, pi/3, pi/4, pi/8");
  if (with_channel) sub->add_option("--channel", f.channel, "channel, e.g. depolarizing:0.1");
  sub->add_option("--sifting", f.sifting, "generic | basis_free");
  sub->add_option("--lambda-mode", f.lambda_mode, "paper_range | pessimistic");
  sub->add_flag("--json", f.json_out, "machine-readable output");
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) load_config(f.config, cfg);
  if (f.num_bases != 0) cfg.num_bases = f.num_bases;
  if (!f.theta.empty()) cfg.theta = parse_angle(f.theta);
  if (!f.channel.empty()) {
    cfg.channel_text = f.channel;
    cfg.channel_spec.reset();
  }
  if (!f.sifting.empty()) {
    if (f.sifting != "generic" && f.sifting != "basis_free") {
      die("--sifting must be generic or basis_free");
    }
    cfg.sifting = f.sifting;
  }
  if (!f.lambda_mode.empty()) {
    if (f.lambda_mode != "paper_range" && f.lambda_mode != "pessimistic") {
      die("--lambda-mode must be paper_range or pessimistic");
    }
    cfg.lambda_mode = f.lambda_mode;
  }
  return cfg;
}

qkd_params params_of(const RunConfig& cfg) {
  if (!cfg.num_bases) die("missing --M (or protocol.M in --config)");
  if (!cfg.theta) die("missing --theta (or protocol.theta in --config)");
  qkd_params p{*cfg.num_bases, *cfg.theta,
               cfg.sifting == "basis_free" ? QKD_SIFT_BASIS_FREE : QKD_SIFT_GENERIC};
  check(qkd_params_validate(&p), "protocol");
  return p;
}

ChannelPtr channel_of(const RunConfig& cfg) {
  if (cfg.channel_text) return parse_channel(*cfg.channel_text);
  if (cfg.channel_spec) return channel_from_json_text(cfg.channel_spec->dump());
  die("missing --channel (or channel in --config)");
}

qkd_lambda_mode lambda_of(const RunConfig& cfg) {
  return cfg.lambda_mode == "pessimistic" ? QKD_LAMBDA_PESSIMISTIC : QKD_LAMBDA_ADMISSIBLE_RANGE;
}

json protocol_json(const qkd_params& p) {
  return {{"M", p.num_bases},
          {"theta", p.theta},
          {"sifting_mode", p.sifting == QKD_SIFT_BASIS_FREE ? "basis_free" : "generic"}};
}

// Analysis refuses M = 2, theta = pi/2; surface the library's explanation.
qkd_error_relation relation_or_refuse(const qkd_params& p) {
  qkd_error_relation rel{};
  check(qkd_error_relation_get(&p, &rel));
  return rel;
}

json bell_json(const qkd_bell_diagnostics& d) {
  return {{"p_i", d.p_i},     {"p_x", d.p_x},         {"p_y", d.p_y},
          {"p_z", d.p_z},     {"e_b", d.e_b},         {"e_p", d.e_p},
          {"n_prime", d.n_prime}, {"p_con", d.p_con},
          {"degenerate_parameters", d.degenerate_parameters != 0}};
}

json key_rate_json(const qkd_key_rate_report& r) {
  return {{"e_b", r.e_b},
          {"e_p", r.e_p},
          {"lambda_min", r.lambda_min},
          {"lambda_max", r.lambda_max},
          {"lambda_worst", r.lambda_worst},
          {"bracket_shor_preskill", r.bracket_shor_preskill},
          {"bracket_h4", r.bracket_h4},
          {"rate_shor_preskill", r.rate_shor_preskill},
          {"rate_h4", r.rate_h4},
          {"p_con", r.p_con},
          {"sift_factor", r.sift_factor},
          {"abort_recommended", r.abort_recommended != 0}};
}

void print_key_rate(const qkd_key_rate_report& r) {
  std::printf("key rate (lambda in [%s, %s], worst %s)\n", format12(r.lambda_min).c_str(),
              format12(r.lambda_max).c_str(), format12(r.lambda_worst).c_str());
  std::printf("  e_b                    %s\n", format12(r.e_b).c_str());
  std::printf("  e_p                    %s\n", format12(r.e_p).c_str());
  std::printf("  sift_factor            %s\n", format12(r.sift_factor).c_str());
  std::printf("  bracket_shor_preskill  %s\n", format12(r.bracket_shor_preskill).c_str());
  std::printf("  bracket_h4             %s\n", format12(r.bracket_h4).c_str());
  std::printf("  rate_shor_preskill     %s\n", format12(r.rate_shor_preskill).c_str());
  std::printf("  rate_h4                %s\n", format12(r.rate_h4).c_str());
  if (r.abort_recommended) std::printf("  abort recommended: no positive key rate\n");
}

// ---------------------------------------------------------------------------
// analyze

struct Analysis {
  qkd_bell_diagnostics numeric{};
  qkd_bell_diagnostics closed{};
  qkd_error_relation relation{};
  qkd_key_rate_report rate{};
};

Analysis analyze_point(const qkd_params& p, const qkd_channel* ch, qkd_lambda_mode mode) {
  Analysis a;
  a.relation = relation_or_refuse(p);
  check(qkd_edp_numerical(&p, ch, &a.numeric, nullptr));
  check(qkd_edp_closed_form(&p, ch, &a.closed));
  check(qkd_key_rate(&p, mode, a.numeric.e_b, a.numeric.p_con, &a.rate), "key rate");
  return a;
}

int cmd_analyze(const Flags& f) {
  const RunConfig cfg = resolve(f);
  const qkd_params p = params_of(cfg);
  const ChannelPtr ch = channel_of(cfg);
  const Analysis a = analyze_point(p, ch.get(), lambda_of(cfg));
  const double deviation =
      std::max({std::abs(a.numeric.p_i - a.closed.p_i), std::abs(a.numeric.p_x - a.closed.p_x),
                std::abs(a.numeric.p_y - a.closed.p_y), std::abs(a.numeric.p_z - a.closed.p_z)});
  const char* kind = a.relation.kind == QKD_RELATION_EQUALITY ? "equality" : "upper_bound";
  if (f.json_out) {
    json out = {{"protocol", protocol_json(p)},
                {"channel", channel_json(ch.get())},
                {"lambda_mode", cfg.lambda_mode},
                {"bell_diagnostics", bell_json(a.numeric)},
                {"closed_form_max_deviation", deviation},
                {"error_relation",
                 {{"M", p.num_bases}, {"theta", p.theta}, {"slope", a.relation.slope}, {"kind", kind}}},
                {"key_rate_report", key_rate_json(a.rate)}};
    std::printf("%s\n", out.dump(2).c_str());
    return kExitOk;
  }
  std::printf("protocol  M=%d theta=%s sifting=%s\n", p.num_bases, format12(p.theta).c_str(),
              cfg.sifting.c_str());
  std::printf("channel   %s\n", qkd_channel_label(ch.get()));
  std::printf("bell diagnostics\n");
  const std::pair<const char*, double> rows[] = {
      {"p_i", a.numeric.p_i}, {"p_x", a.numeric.p_x}, {"p_y", a.numeric.p_y},
      {"p_z", a.numeric.p_z}, {"e_b", a.numeric.e_b}, {"e_p", a.numeric.e_p},
      {"n_prime", a.numeric.n_prime}, {"p_con", a.numeric.p_con}};
  for (const auto& [name, v] : rows) std::printf("  %-8s %s\n", name, format12(v).c_str());
  std::printf("  closed form max deviation %.3g\n", deviation);
  std::printf("error relation: e_p %s %s * e_b\n",
              a.relation.kind == QKD_RELATION_EQUALITY ? "=" : "<=",
              format12(a.relation.slope).c_str());
  print_key_rate(a.rate);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const Flags& f, const std::optional<std::uint64_t>& n,
                 const std::optional<std::uint64_t>& seed, const std::optional<double>& t) {
  RunConfig cfg = resolve(f);
  if (n) cfg.n = *n;
  if (seed) cfg.seed = *seed;
  if (t) cfg.test_fraction = *t;
  const qkd_params p = params_of(cfg);
  const ChannelPtr ch = channel_of(cfg);
  if (!cfg.n) die("missing --n (or simulation.n in --config)");
  if (!cfg.seed) die("missing --seed (or simulation.seed in --config)");
  const qkd_sim_config sc{*cfg.n, *cfg.seed, cfg.test_fraction, env_threads()};
  qkd_sim_comparison c{};
  check(qkd_estimate_vs_analytic(&p, ch.get(), &sc, &c), "simulate");
  const qkd_transcript_stats& s = c.stats;
  if (f.json_out) {
    json out = {
        {"protocol", protocol_json(p)},
        {"channel", channel_json(ch.get())},
        {"simulation", {{"n", sc.n}, {"seed", sc.seed}, {"test_fraction", sc.test_fraction}}},
        {"lambda_mode", cfg.lambda_mode},
        {"transcript_stats",
         {{"n_total", s.n_total},
          {"n_basis_matched", s.n_basis_matched},
          {"n_conclusive", s.n_conclusive},
          {"n_conclusive_errors", s.n_conclusive_errors},
          {"n_test", s.n_test},
          {"n_test_errors", s.n_test_errors},
          {"key_bits_remaining", s.key_bits_remaining},
          {"e_b_hat", s.e_b_hat},
          {"e_b_hat_std_error", s.e_b_hat_std_error},
          {"p_con_hat", s.p_con_hat},
          {"p_con_hat_std_error", s.p_con_hat_std_error},
          {"test_sample_warning", s.test_sample_warning != 0}}},
        {"e_b_analytic", c.e_b_analytic},
        {"p_con_analytic", c.p_con_analytic},
        {"z_e_b", c.z_e_b},
        {"z_p_con", c.z_p_con},
        {"z_sifting", c.z_sifting}};
    std::printf("%s\n", out.dump(2).c_str());
    return kExitOk;
  }
  std::printf("protocol  M=%d theta=%s\n", p.num_bases, format12(p.theta).c_str());
  std::printf("channel   %s\n", qkd_channel_label(ch.get()));
  std::printf("signals %llu, seed %llu, test fraction %s\n",
              static_cast<unsigned long long>(s.n_total), static_cast<unsigned long long>(sc.seed),
              format12(sc.test_fraction).c_str());
  std::printf("  basis matched       %llu\n", static_cast<unsigned long long>(s.n_basis_matched));
  std::printf("  conclusive          %llu\n", static_cast<unsigned long long>(s.n_conclusive));
  std::printf("  conclusive errors   %llu\n", static_cast<unsigned long long>(s.n_conclusive_errors));
  std::printf("  test bits           %llu (%llu errors)\n", static_cast<unsigned long long>(s.n_test),
              static_cast<unsigned long long>(s.n_test_errors));
  std::printf("  key bits remaining  %llu\n", static_cast<unsigned long long>(s.key_bits_remaining));
  std::printf("  e_b_hat    %s +- %s  (analytic %s, z = %.3f)\n", format12(s.e_b_hat).c_str(),
              format12(s.e_b_hat_std_error).c_str(), format12(c.e_b_analytic).c_str(), c.z_e_b);
  std::printf("  p_con_hat  %s +- %s  (analytic %s, z = %.3f)\n", format12(s.p_con_hat).c_str(),
              format12(s.p_con_hat_std_error).c_str(), format12(c.p_con_analytic).c_str(),
              c.z_p_con);
  std::printf("  sifting z = %.3f\n", c.z_sifting);
  if (s.test_sample_warning) std::printf("  warning: n * test_fraction < 1, no test bits drawn\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

// lo:hi:step (inclusive, angle tokens allowed) or a comma list.
std::vector<double> parse_grid(const std::string& text, bool angles, const std::string& what) {
  auto value = [&](const std::string& s) { return angles ? parse_angle(s) : parse_real(s, what); };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) die(what + " grid must be lo:hi:step");
    const double lo = value(parts[0]);
    const double hi = value(parts[1]);
    const double step = value(parts[2]);
    if (!(step > 0.0)) die(what + " grid step must be positive");
    if (hi < lo) die(what + " grid is empty (hi < lo)");
    const double count = std::floor((hi - lo) / step + 1e-9);
    if (count > 1e6) die(what + " grid has too many points");
    for (long i = 0; i <= static_cast<long>(count); ++i) out.push_back(lo + i * step);
  } else {
    for (const auto& s : split(text, ',')) {
      if (!s.empty()) out.push_back(value(s));
    }
  }
  if (out.empty()) die(what + " grid is empty");
  return out;
}

int cmd_sweep(const Flags& f, const std::string& theta_grid, const std::string& param_grid,
              const std::string& m_list, const std::string& out_path) {
  RunConfig cfg = resolve(f);
  std::vector<int> ms;
  if (!m_list.empty()) {
    for (const auto& s : split(m_list, ',')) {
      const double v = parse_real(s, "M");
      if (v != std::floor(v)) die("M must be an integer");
      ms.push_back(static_cast<int>(v));
    }
  } else if (cfg.num_bases) {
    ms.push_back(*cfg.num_bases);
  }
  if (ms.empty()) die("missing --M");
  std::vector<double> thetas;
  if (!theta_grid.empty()) {
    thetas = parse_grid(theta_grid, true, "theta");
  } else if (cfg.theta) {
    thetas.push_back(*cfg.theta);
  } else {
    die("missing --theta-grid or --theta");
  }
  // Without a parameter grid the channel is fixed; with one, --channel names
  // the family and each grid value becomes its parameter.
  std::vector<std::string> channels;
  if (!param_grid.empty()) {
    if (!cfg.channel_text || cfg.channel_text->find(':') != std::string::npos) {
      die("--param-grid needs --channel set to a family name (e.g. depolarizing)");
    }
    for (double v : parse_grid(param_grid, false, "param")) {
      channels.push_back(*cfg.channel_text + ":" + format12(v));
    }
  }
  if (out_path.empty()) die("missing --out");
  const qkd_lambda_mode mode = lambda_of(cfg);
  const qkd_sifting sifting = cfg.sifting == "basis_free" ? QKD_SIFT_BASIS_FREE : QKD_SIFT_GENERIC;

  std::string csv = "M,theta,channel,param,p_i,p_x,p_y,p_z,e_b,e_p,p_con,lambda_worst,rate_eq22,rate_eq23\n";
  auto emit = [&](int m, double theta, const qkd_channel* ch) {
    const qkd_params p{m, theta, sifting};
    check(qkd_params_validate(&p), "protocol");
    Analysis a;
    try {
      a = analyze_point(p, ch, mode);
    } catch (const CliError& e) {
      die("grid point M=" + std::to_string(m) + " theta=" + format12(theta) + ": " + e.message);
    }
    const double values[] = {a.numeric.p_i, a.numeric.p_x, a.numeric.p_y, a.numeric.p_z,
                             a.numeric.e_b, a.numeric.e_p, a.numeric.p_con, a.rate.lambda_worst,
                             a.rate.rate_shor_preskill, a.rate.rate_h4};
    csv += std::to_string(m) + "," + format12(theta) + "," + channel_family(ch) + "," +
           format12(qkd_channel_param(ch));
    for (double v : values) csv += "," + format12(v);
    csv += "\n";
  };
  std::vector<ChannelPtr> built;
  if (channels.empty()) {
    built.push_back(channel_of(cfg));
  } else {
    for (const auto& c : channels) built.push_back(parse_channel(c));
  }
  for (int m : ms) {
    for (double theta : thetas) {
      for (const auto& ch : built) emit(m, theta, ch.get());
    }
  }
  if (out_path == "-") {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) die("cannot write '" + out_path + "'");
    out << csv;
    if (!out) die("error writing '" + out_path + "'");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// keyrate, bound, verify

int cmd_keyrate(const Flags& f, double e_b, const std::optional<double>& p_con_opt) {
  const RunConfig cfg = resolve(f);
  const qkd_params p = params_of(cfg);
  relation_or_refuse(p);
  double p_con = 0.0;
  if (p_con_opt) {
    p_con = *p_con_opt;
  } else {
    ChannelPtr id = parse_channel("identity");
    check(qkd_conclusive_probability(&p, id.get(), &p_con, nullptr));
  }
  qkd_key_rate_report r{};
  check(qkd_key_rate(&p, lambda_of(cfg), e_b, p_con, &r), "key rate");
  if (f.json_out) {
    json out = {{"protocol", protocol_json(p)},
                {"lambda_mode", cfg.lambda_mode},
                {"key_rate_report", key_rate_json(r)}};
    std::printf("%s\n", out.dump(2).c_str());
    return kExitOk;
  }
  std::printf("protocol  M=%d theta=%s  p_con=%s\n", p.num_bases, format12(p.theta).c_str(),
              format12(p_con).c_str());
  print_key_rate(r);
  return kExitOk;
}

int cmd_bound(const std::string& theta_text, double e_b, const std::optional<double>& step,
              bool json_out) {
  if (theta_text.empty()) die("missing --theta");
  const double theta = parse_angle(theta_text);
  qkd_m2_bound b{};
  check(qkd_m2_bound_solve(theta, e_b, &b), "bound");
  std::optional<double> oracle;
  if (step) {
    double v = 0.0;
    check(qkd_m2_bound_oracle(theta, e_b, *step, &v), "oracle");
    oracle = v;
  }
  if (json_out) {
    json out = {{"theta", theta},
                {"e_b", e_b},
                {"m2_bound",
                 {{"e_p_max", b.e_p_max},
                  {"maximizer_ai2", b.maximizer_ai2},
                  {"maximizer_ax2", b.maximizer_ax2},
                  {"a", b.a},
                  {"b", b.b},
                  {"feasible", b.feasible != 0}}}};
    if (oracle) {
      out["oracle"] = {{"grid_step", *step}, {"e_p_max", *oracle}};
    }
    std::printf("%s\n", out.dump(2).c_str());
    return kExitOk;
  }
  std::printf("M = 2 phase error bound at theta=%s, e_b=%s\n", format12(theta).c_str(),
              format12(e_b).c_str());
  std::printf("  e_p_max     %s\n", format12(b.e_p_max).c_str());
  std::printf("  |a_i|^2     %s\n", format12(b.maximizer_ai2).c_str());
  std::printf("  |a_x|^2     %s\n", format12(b.maximizer_ax2).c_str());
  std::printf("  A, B        %s, %s\n", format12(b.a).c_str(), format12(b.b).c_str());
  if (oracle) {
    std::printf("  grid oracle %s (step %s, gap %.3g)\n", format12(*oracle).c_str(),
                format12(*step).c_str(), std::abs(*oracle - b.e_p_max));
  }
  return kExitOk;
}

int cmd_verify(int trials, std::uint64_t seed) {
  if (trials < 1) die("--trials must be >= 1");
  qkd_verify_report* report = nullptr;
  check(qkd_verify_run(trials, seed, &report), "verify");
  std::unique_ptr<qkd_verify_report, void (*)(qkd_verify_report*)> guard(report,
                                                                          qkd_verify_report_free);
  const std::size_t n = qkd_verify_count(report);
  for (std::size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    const char* failure = nullptr;
    int passed = 0;
    double dev = 0.0;
    double tol = 0.0;
    check(qkd_verify_suite(report, i, &name, &passed, &dev, &tol, &failure));
    std::printf("%s  %-38s max deviation %.3e  tolerance %.1e\n", passed ? "PASS" : "FAIL", name,
                dev, tol);
    if (!passed) {
      std::printf("      worst case: %s\n", failure);
      std::printf("      replay: qkdrot verify --trials %d --seed %llu\n", trials,
                  static_cast<unsigned long long>(seed));
    }
  }
  const bool ok = qkd_verify_all_passed(report) != 0;
  std::printf("%s: %zu suites, trials %d, seed %llu\n", ok ? "all passed" : "FAILED", n, trials,
              static_cast<unsigned long long>(seed));
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qkdrot: M-basis QKD protocol analysis, simulation and verification"};
  app.require_subcommand(1);

  Flags analyze_flags;
  auto* analyze = app.add_subcommand("analyze", "Bell diagnostics, error relation and key rate");
  add_common(analyze, analyze_flags, true);

  Flags sim_flags;
  std::optional<std::uint64_t> sim_n;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_t;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of the protocol");
  add_common(simulate, sim_flags, true);
  simulate->add_option("--n", sim_n, "number of signals");
  simulate->add_option("--seed", sim_seed, "random seed");
  simulate->add_option("--test-fraction", sim_t, "fraction of sifted bits spent on testing");

  Flags sweep_flags;
  std::string theta_grid;
  std::string param_grid;
  std::string m_list;
  std::string out_path;
  auto* sweep = app.add_subcommand("sweep", "CSV over theta and channel parameter grids");
  sweep->add_option("--config", sweep_flags.config, "RunConfigFile JSON");
  sweep->add_option("--M", m_list, "number of bases, or a comma list");
  sweep->add_option("--theta", sweep_flags.theta, "single angle");
  sweep->add_option("--theta-grid", theta_grid, "lo:hi:step or comma list");
  sweep->add_option("--channel", sweep_flags.channel, "channel, or family name with --param-grid");
  sweep->add_option("--param-grid", param_grid, "lo:hi:step or comma list");
  sweep->add_option("--sifting", sweep_flags.sifting, "generic | basis_free");
  sweep->add_option("--lambda-mode", sweep_flags.lambda_mode, "paper_range | pessimistic");
  sweep->add_option("--out", out_path, "output CSV path ('-' for stdout)");

  Flags key_flags;
  double key_e_b = 0.0;
  std::optional<double> key_p_con;
  auto* keyrate = app.add_subcommand("keyrate", "Key rate for an observed bit error rate");
  add_common(keyrate, key_flags, false);
  keyrate->add_option("--e-b", key_e_b, "observed bit error rate")->required();
  keyrate->add_option("--p-con", key_p_con, "conclusive probability (default: noiseless value)");

  std::string bound_theta;
  double bound_e_b = 0.0;
  std::optional<double> bound_step;
  bool bound_json = false;
  auto* bound = app.add_subcommand("bound", "M = 2 phase error bound");
  bound->add_option("--theta", bound_theta, "angle in radians or a pi token")->required();
  bound->add_option("--e-b", bound_e_b, "bit error rate")->required();
  bound->add_option("--oracle-step", bound_step, "also run the grid oracle with this step");
  bound->add_flag("--json", bound_json, "machine-readable output");

  int trials = 200;
  std::uint64_t verify_seed = 7;
  auto* verify = app.add_subcommand("verify", "Run every property suite");
  verify->add_option("--trials", trials, "random channels per suite");
  verify->add_option("--seed", verify_seed, "base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_flags);
    if (*simulate) return cmd_simulate(sim_flags, sim_n, sim_seed, sim_t);
    if (*sweep) {
      if (!m_list.empty() && m_list.find(',') == std::string::npos) {
        sweep_flags.num_bases = static_cast<int>(parse_real(m_list, "M"));
      }
      return cmd_sweep(sweep_flags, theta_grid, param_grid, m_list, out_path);
    }
    if (*keyrate) return cmd_keyrate(key_flags, key_e_b, key_p_con);
    if (*bound) return cmd_bound(bound_theta, bound_e_b, bound_step, bound_json);
    if (*verify) return cmd_verify(trials, verify_seed);
  } catch (const CliError& e) {
    std::fprintf(stderr, "qkdrot: %s\n", e.message.c_str());
    return kExitInvalid;
  }
  return kExitInvalid;
}
