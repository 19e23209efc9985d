#include "vfc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "vfc/error.hpp"

namespace vfc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, int line) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(value))
    throw ConfigError("expected a number, got '" + std::string(text) + "'", line);
  return value;
}

int parse_int(std::string_view text, int line) {
  text = trim(text);
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw ConfigError("expected an integer, got '" + std::string(text) + "'", line);
  return value;
}

std::vector<double> parse_list(std::string_view text, int line) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma), line));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(SystemConfig&, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto real = [](double SystemConfig::*field) {
      return [field](SystemConfig& c, std::string_view v, int l) {
        c.*field = parse_double(v, l);
      };
    };
    auto integer = [](int SystemConfig::*field) {
      return [field](SystemConfig& c, std::string_view v, int l) {
        c.*field = parse_int(v, l);
      };
    };
    auto dcf_real = [](double dcf::DcfParams::*field) {
      return [field](SystemConfig& c, std::string_view v, int l) {
        c.dcf.*field = parse_double(v, l);
      };
    };
    auto dcf_integer = [](int dcf::DcfParams::*field) {
      return [field](SystemConfig& c, std::string_view v, int l) {
        c.dcf.*field = parse_int(v, l);
      };
    };
    t["n_platoon"] = integer(&SystemConfig::n_platoon);
    t["f_platoon"] = [](SystemConfig& c, std::string_view v, int l) {
      c.f_platoon = parse_list(v, l);
    };
    t["f_ru"] = real(&SystemConfig::f_ru);
    t["k_max"] = integer(&SystemConfig::k_max);
    t["n_r"] = integer(&SystemConfig::n_r);
    t["lambda_p"] = real(&SystemConfig::lambda_p);
    t["lambda_v"] = real(&SystemConfig::lambda_v);
    t["mu_v"] = real(&SystemConfig::mu_v);
    t["d"] = real(&SystemConfig::d);
    t["e_l"] = real(&SystemConfig::e_l);
    t["eta"] = real(&SystemConfig::eta);
    t["zeta"] = real(&SystemConfig::zeta);
    t["alpha"] = real(&SystemConfig::alpha);
    t["epsilon"] = real(&SystemConfig::epsilon);
    t["dcf.w_min"] = dcf_integer(&dcf::DcfParams::w_min);
    t["dcf.m"] = dcf_integer(&dcf::DcfParams::m);
    t["dcf.t_idle"] = dcf_real(&dcf::DcfParams::t_idle);
    t["dcf.delta"] = dcf_real(&dcf::DcfParams::delta);
    t["dcf.difs"] = dcf_real(&dcf::DcfParams::difs);
    t["dcf.sifs"] = dcf_real(&dcf::DcfParams::sifs);
    t["dcf.header_bits"] = dcf_real(&dcf::DcfParams::header_bits);
    t["dcf.payload_bits"] = dcf_real(&dcf::DcfParams::payload_bits);
    t["dcf.ack_bits"] = dcf_real(&dcf::DcfParams::ack_bits);
    t["dcf.ack_timeout_bits"] = dcf_real(&dcf::DcfParams::ack_timeout_bits);
    t["dcf.bit_rate"] = dcf_real(&dcf::DcfParams::bit_rate);
    return t;
  }();
  return table;
}

}  // namespace

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (n_platoon < 1) fail("n_platoon must be >= 1");
  if (n_platoon > 16) fail("n_platoon must be <= 16");
  if (static_cast<int>(f_platoon.size()) != n_platoon)
    fail("f_platoon must list exactly n_platoon rates");
  if (!(f_ru > 0)) fail("f_ru must be > 0");
  for (double f : f_platoon)
    if (!(f > f_ru)) fail("every platoon rate must exceed f_ru");
  if (k_max < 1) fail("k_max must be >= 1");
  if (k_max > 64) fail("k_max must be <= 64");
  if (n_r < 1) fail("n_r must be >= 1");
  if (n_r > k_max) fail("n_r must not exceed k_max");
  if (!(lambda_p > 0) || !(lambda_v > 0) || !(mu_v > 0))
    fail("lambda_p, lambda_v and mu_v must be > 0");
  if (!(d > 0)) fail("d must be > 0");
  if (!(e_l > 0)) fail("e_l must be > 0");
  if (!(eta > 0) || !(zeta > 0)) fail("eta and zeta must be > 0");
  if (!(alpha > 0)) fail("alpha must be > 0");
  if (!(epsilon > 0)) fail("epsilon must be > 0");
  dcf.validate();
}

SystemConfig parse_config(std::istream& in) {
  SystemConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected 'key = value'", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    const auto it = setters().find(key);
    if (it == setters().end())
      throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    if (!seen.emplace(key).second)
      throw ConfigError("duplicate key '" + std::string(key) + "'", line_no);
    it->second(cfg, value, line_no);
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_config(std::ostream& out, const SystemConfig& cfg) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n_platoon = " << cfg.n_platoon << '\n';
  os << "f_platoon = ";
  for (std::size_t i = 0; i < cfg.f_platoon.size(); ++i)
    os << (i ? ", " : "") << cfg.f_platoon[i];
  os << '\n';
  os << "f_ru = " << cfg.f_ru << '\n'
     << "k_max = " << cfg.k_max << '\n'
     << "n_r = " << cfg.n_r << '\n'
     << "lambda_p = " << cfg.lambda_p << '\n'
     << "lambda_v = " << cfg.lambda_v << '\n'
     << "mu_v = " << cfg.mu_v << '\n'
     << "d = " << cfg.d << '\n'
     << "e_l = " << cfg.e_l << '\n'
     << "eta = " << cfg.eta << '\n'
     << "zeta = " << cfg.zeta << '\n'
     << "alpha = " << cfg.alpha << '\n'
     << "epsilon = " << cfg.epsilon << '\n'
     << "dcf.w_min = " << cfg.dcf.w_min << '\n'
     << "dcf.m = " << cfg.dcf.m << '\n'
     << "dcf.t_idle = " << cfg.dcf.t_idle << '\n'
     << "dcf.delta = " << cfg.dcf.delta << '\n'
     << "dcf.difs = " << cfg.dcf.difs << '\n'
     << "dcf.sifs = " << cfg.dcf.sifs << '\n'
     << "dcf.header_bits = " << cfg.dcf.header_bits << '\n'
     << "dcf.payload_bits = " << cfg.dcf.payload_bits << '\n'
     << "dcf.ack_bits = " << cfg.dcf.ack_bits << '\n'
     << "dcf.ack_timeout_bits = " << cfg.dcf.ack_timeout_bits << '\n'
     << "dcf.bit_rate = " << cfg.dcf.bit_rate << '\n';
  out << os.str();
}

}  // namespace vfc
