#include "htgd/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "htgd/errors.hpp"

namespace htgd::io {
namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view source, const std::string& what) {
  throw IoError(std::string(source) + ": " + what);
}

[[noreturn]] void fail_line(std::string_view source, std::size_t line, const std::string& what) {
  throw IoError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == sep) {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

template <class T>
bool parse_num(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Line and column of a byte offset, both 1-based.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    throw IoError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                  ": malformed JSON (" + e.what() + ")");
  }
}

Eigen::MatrixXd matrix_from(const json& j, std::string_view field, std::string_view source) {
  if (!j.is_array() || j.empty()) fail(source, std::string(field) + " must be a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = j.front().is_array() ? static_cast<Index>(j.front().size()) : 0;
  if (cols == 0) fail(source, std::string(field) + " rows must be non-empty arrays");
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) fail(source, std::string(field) + " is ragged");
    for (Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) fail(source, std::string(field) + " entries must be numbers");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

json matrix_to(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

// Checked field access for spec files.
class Fields {
 public:
  Fields(const json& j, std::string_view source, std::set<std::string> allowed) : j_(j), source_(source) {
    if (!j.is_object()) fail(source, "spec must be a JSON object");
    for (const auto& [key, _] : j.items())
      if (!allowed.count(key)) fail(source, "unknown key '" + key + "'");
  }
  bool has(const std::string& key) const { return j_.contains(key); }
  template <class T>
  T get(const std::string& key, T fallback) const {
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(source_, "key '" + key + "' has the wrong type");
    }
  }
  std::vector<Index> list(const std::string& key) const {
    if (!j_.contains(key)) fail(source_, "missing key '" + key + "'");
    const json& v = j_.at(key);
    if (v.is_number_integer()) return {v.get<Index>()};
    if (!v.is_array()) fail(source_, "key '" + key + "' must be an integer or an array of integers");
    std::vector<Index> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail(source_, "key '" + key + "' must hold integers");
      out.push_back(e.get<Index>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string_view source_;
};

SolverConfig solver_from(const Fields& f) {
  SolverConfig c;
  c.tol = f.get("tol", c.tol);
  c.max_iter = f.get("max_iter", c.max_iter);
  c.armijo.shrink = f.get("armijo_beta", c.armijo.shrink);
  c.armijo.sufficient = f.get("armijo_c", c.armijo.sufficient);
  c.armijo.growth = f.get("armijo_gamma", c.armijo.growth);
  c.armijo.max_backtracks = f.get("armijo_max_backtracks", c.armijo.max_backtracks);
  c.armijo.initial_step = f.get("armijo_eta0", c.armijo.initial_step);
  return c;
}

const std::set<std::string> kSolverKeys = {"tol", "max_iter", "armijo_beta", "armijo_c", "armijo_gamma",
                                           "armijo_max_backtracks", "armijo_eta0"};

std::set<std::string> with_solver_keys(std::set<std::string> keys) {
  keys.insert(kSolverKeys.begin(), kSolverKeys.end());
  return keys;
}

template <class Spec>
void validated(Spec& s, std::string_view source) {
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    fail(source, e.what());
  }
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return os.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string signal_csv(const Eigen::MatrixXcd& x, const std::vector<Index>* rows) {
  std::ostringstream os;
  os << "j,channel,re,im\n";
  auto emit = [&](Index j) {
    for (Index l = 0; l < x.cols(); ++l)
      os << j + 1 << ',' << l + 1 << ',' << num(x(j, l).real()) << ',' << num(x(j, l).imag()) << '\n';
  };
  if (rows) {
    for (Index j : *rows) {
      if (j < 0 || j >= x.rows()) throw_invalid("signal_csv: row index out of range");
      emit(j);
    }
  } else {
    for (Index j = 0; j < x.rows(); ++j) emit(j);
  }
  return os.str();
}

Eigen::MatrixXcd parse_signal_csv(std::string_view text, Index rows, std::string_view source) {
  struct Entry {
    Index j, l;
    std::complex<double> v;
  };
  std::vector<Entry> entries;
  std::set<std::pair<Index, Index>> seen;
  Index max_j = 0, max_l = 0;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    if (!header) {
      if (cells.size() != 4 || cells[0] != "j" || cells[1] != "channel" || cells[2] != "re" || cells[3] != "im")
        fail_line(source, line_no, "expected header 'j,channel,re,im'");
      header = true;
      continue;
    }
    if (cells.size() != 4) fail_line(source, line_no, "expected 4 fields");
    Index j = 0, l = 0;
    double re = 0, im = 0;
    if (!parse_num(cells[0], j) || !parse_num(cells[1], l) || !parse_num(cells[2], re) || !parse_num(cells[3], im))
      fail_line(source, line_no, "unparseable number");
    if (j < 1 || l < 1) fail_line(source, line_no, "j and channel are 1-based");
    if (rows >= 0 && j > rows) fail_line(source, line_no, "j exceeds " + std::to_string(rows));
    if (!seen.insert({j, l}).second) fail_line(source, line_no, "duplicate entry");
    max_j = std::max(max_j, j);
    max_l = std::max(max_l, l);
    entries.push_back({j - 1, l - 1, {re, im}});
  }
  if (!header) fail(source, "missing header");
  if (entries.empty()) fail(source, "no samples");
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(rows >= 0 ? rows : max_j, max_l);
  for (const auto& e : entries) x(e.j, e.l) = e.v;
  return x;
}

Eigen::MatrixXcd read_signal_csv(const fs::path& path, Index rows) {
  return parse_signal_csv(read_text(path), rows, path.string());
}

std::string mask_json(const SamplingMask& mask) {
  json j = json::array();
  for (Index i : mask.indices) j.push_back(i + 1);
  return j.dump() + "\n";
}

std::vector<Index> parse_mask_json(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  if (!j.is_array()) fail(source, "mask must be a JSON array of 1-based indices");
  std::vector<Index> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) fail(source, "mask entries must be integers");
    const Index i = v.get<Index>();
    if (i < 1) fail(source, "mask indices are 1-based");
    out.push_back(i - 1);
  }
  return out;
}

std::vector<Index> read_mask_json(const fs::path& path) { return parse_mask_json(read_text(path), path.string()); }

std::string model_json(const SpectralModel& model) {
  json j;
  j["freqs"] = std::vector<double>(model.freqs.data(), model.freqs.data() + model.freqs.size());
  j["amps"] = matrix_to(model.amps);
  j["phases"] = matrix_to(model.phases);
  j["is_ca"] = model.is_ca;
  return j.dump(2) + "\n";
}

SpectralModel parse_model_json(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  if (!j.is_object()) fail(source, "model must be a JSON object");
  for (const char* key : {"freqs", "amps", "phases", "is_ca"})
    if (!j.contains(key)) fail(source, std::string("missing key '") + key + "'");
  SpectralModel m;
  const json& f = j.at("freqs");
  if (!f.is_array() || f.empty()) fail(source, "freqs must be a non-empty array");
  m.freqs.resize(static_cast<Index>(f.size()));
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!f[k].is_number()) fail(source, "freqs entries must be numbers");
    m.freqs(static_cast<Index>(k)) = f[k].get<double>();
  }
  m.amps = matrix_from(j.at("amps"), "amps", source);
  m.phases = matrix_from(j.at("phases"), "phases", source);
  if (!j.at("is_ca").is_boolean()) fail(source, "is_ca must be a boolean");
  m.is_ca = j.at("is_ca").get<bool>();
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    fail(source, e.what());
  }
  return m;
}

SpectralModel read_model_json(const fs::path& path) { return parse_model_json(read_text(path), path.string()); }

std::string report_json(const SolverReport& rep, const ProblemDims& dims, Method method, const SolverConfig& cfg) {
  json j;
  j["method"] = std::string(to_string(method));
  j["dims"] = {{"N", dims.N}, {"L", dims.L}, {"K", dims.K}, {"M", dims.M}, {"internal_length", dims.length()}};
  j["config"] = {{"tol", cfg.tol},
                 {"max_iter", cfg.max_iter},
                 {"armijo_beta", cfg.armijo.shrink},
                 {"armijo_c", cfg.armijo.sufficient},
                 {"armijo_gamma", cfg.armijo.growth},
                 {"armijo_max_backtracks", cfg.armijo.max_backtracks},
                 {"armijo_eta0", cfg.armijo.initial_step},
                 {"seed", cfg.seed}};
  j["iterations"] = rep.iterations;
  j["stop_reason"] = std::string(to_string(rep.stop));
  if (!rep.message.empty()) j["message"] = rep.message;
  j["objective"] = rep.objective;
  j["step_sizes"] = rep.step_sizes;
  j["init_seconds"] = rep.init_seconds;
  j["total_seconds"] = rep.total_seconds;
  j["iteration_seconds"] = rep.iteration_seconds;
  if (rep.nmse) {
    j["nmse"] = *rep.nmse;
    j["success"] = rep.success();
  }
  return j.dump(2) + "\n";
}

std::string frequencies_json(const FrequencyEstimate& est) {
  json j = est.freqs;
  if (est.max_wrap_error) {
    json o;
    o["freqs"] = est.freqs;
    o["max_wrap_error"] = *est.max_wrap_error;
    if (est.pairing) o["pairing"] = *est.pairing;
    return o.dump(2) + "\n";
  }
  return j.dump() + "\n";
}

PhaseGridSpec parse_phase_grid_spec(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  const Fields f(j, source, with_solver_keys({"N", "L", "min_sep", "M", "K", "trials", "method", "is_ca", "seed", "threads"}));
  PhaseGridSpec s = PhaseGridSpec::default_grid();
  s.N = f.get<Index>("N", s.N);
  s.L = f.get<Index>("L", s.L);
  s.min_sep_multiplier = f.get("min_sep", s.min_sep_multiplier);
  if (f.has("M")) s.M_values = f.list("M");
  if (f.has("K")) s.K_values = f.list("K");
  s.trials = f.get("trials", s.trials);
  try {
    s.method = parse_method(f.get<std::string>("method", "mhtgd"));
  } catch (const InvalidArgument& e) {
    fail(source, e.what());
  }
  s.is_ca = f.get("is_ca", s.method == Method::chtgd);
  s.seed = f.get<std::uint64_t>("seed", s.seed);
  s.threads = f.get("threads", s.threads);
  s.solver = solver_from(f);
  validated(s, source);
  return s;
}

TimingSpec parse_timing_spec(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  const Fields f(j, source, with_solver_keys({"N", "L", "K", "trials", "cap_seconds", "min_sep", "method", "is_ca", "seed"}));
  TimingSpec s;
  s.N_values = f.list("N");
  s.L = f.get<Index>("L", s.L);
  s.K = f.get<Index>("K", s.K);
  s.trials = f.get("trials", s.trials);
  s.cap_seconds = f.get("cap_seconds", s.cap_seconds);
  s.min_sep_multiplier = f.get("min_sep", s.min_sep_multiplier);
  try {
    s.method = parse_method(f.get<std::string>("method", "mhtgd"));
  } catch (const InvalidArgument& e) {
    fail(source, e.what());
  }
  s.is_ca = f.get("is_ca", s.method == Method::chtgd);
  s.seed = f.get<std::uint64_t>("seed", s.seed);
  s.solver = solver_from(f);
  validated(s, source);
  return s;
}

}  // namespace htgd::io
