#include "unifilar/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>

#include "unifilar/error.hpp"

namespace unifilar::io {

namespace fs = std::filesystem;

namespace {

// Rethrows JSON library failures as malformed-file errors.
template <class Fn>
auto guarded(const std::string& what, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCategory::malformed_file, what + ": " + e.what());
  }
}

Json parse_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  return guarded("invalid JSON in " + path, [&] { return Json::parse(text); });
}

std::string mode_name(CellMode m) { return m == CellMode::exact ? "exact" : "bracket"; }

std::string estimator_name(EstimatorMode m) {
  return m == EstimatorMode::exact ? "exact" : "surrogate";
}

EstimatorMode estimator_from(const std::string& s) {
  if (s == "exact") return EstimatorMode::exact;
  if (s == "surrogate") return EstimatorMode::surrogate;
  fail(ErrorCategory::malformed_file, "unknown estimator mode '" + s + "'");
}

std::string no_spaces(std::string s) {
  for (auto& c : s)
    if (c == ' ' || c == '\t') c = '_';
  return s;
}

// "# tag vN key=value ..." -> key/value pairs after checking tag and version.
std::map<std::string, std::string> read_meta(const std::string& line, const std::string& tag) {
  std::istringstream in(line);
  std::string hash, got_tag, version;
  in >> hash >> got_tag >> version;
  require(hash == "#" && got_tag == tag, ErrorCategory::malformed_file,
          "expected a '# " + tag + "' header line");
  require(version == "v" + std::to_string(kFormatVersion), ErrorCategory::malformed_file,
          "unsupported " + tag + " version '" + version + "'");
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorCategory::malformed_file,
          "not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCategory::malformed_file, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCategory::invalid_input, "cannot write " + path);
  out << text;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---- models ----

Json model_to_json(const UnifilarModel& m) {
  Json tau = Json::array(), eps = Json::array();
  for (int y = 0; y < m.k(); ++y) {
    Json trow = Json::array(), erow = Json::array();
    for (int x = 0; x < m.symbols(); ++x) {
      trow.push_back(m.tau(y, static_cast<Symbol>(x)));
      erow.push_back(m.epsilon(y, static_cast<Symbol>(x)));
    }
    tau.push_back(trow);
    eps.push_back(erow);
  }
  return Json{{"version", kFormatVersion},
              {"alphabet_size", m.symbols()},
              {"k", m.k()},
              {"pi", std::vector<double>(m.pi().begin(), m.pi().end())},
              {"tau", tau},
              {"epsilon", eps},
              {"name", m.name()}};
}

UnifilarModel model_from_json(const Json& j) {
  // Hand-written models may omit the stamp; a wrong one is rejected.
  if (j.is_object() && j.contains("version"))
    require(j["version"] == kFormatVersion, ErrorCategory::malformed_file,
            "unsupported model version " + j["version"].dump());
  return guarded("invalid model document", [&] {
    const int a = j.at("alphabet_size").get<int>();
    const int k = j.at("k").get<int>();
    auto pi = j.at("pi").get<std::vector<double>>();
    const auto tau_rows = j.at("tau").get<std::vector<std::vector<int>>>();
    const auto eps_rows = j.at("epsilon").get<std::vector<std::vector<double>>>();
    require(static_cast<int>(pi.size()) == k && static_cast<int>(tau_rows.size()) == k &&
                static_cast<int>(eps_rows.size()) == k,
            ErrorCategory::invalid_input, "pi, tau and epsilon must have k rows");
    std::vector<State> tau;
    std::vector<double> eps;
    for (int y = 0; y < k; ++y) {
      require(static_cast<int>(tau_rows[y].size()) == a && static_cast<int>(eps_rows[y].size()) == a,
              ErrorCategory::invalid_input, "tau and epsilon rows must have alphabet_size entries");
      tau.insert(tau.end(), tau_rows[y].begin(), tau_rows[y].end());
      eps.insert(eps.end(), eps_rows[y].begin(), eps_rows[y].end());
    }
    return UnifilarModel(Alphabet(a), std::move(pi), std::move(tau), std::move(eps),
                         j.value("name", std::string()));
  });
}

UnifilarModel read_model_file(const std::string& path) { return model_from_json(parse_json_file(path)); }

void write_model_file(const std::string& path, const UnifilarModel& m) {
  write_text(path, model_to_json(m).dump(2) + "\n");
}

// ---- cache ----

Json cache_to_json(const ComplexityTable& table) {
  Json entries = Json::array();
  for (const auto& e : table.entries())
    entries.push_back({{"alphabet", e.alphabet},
                       {"n", e.n},
                       {"k", e.k},
                       {"mode", mode_name(e.mode)},
                       {"lo", e.lo},
                       {"hi", e.hi}});
  return Json{{"format", kCacheFormat}, {"version", kFormatVersion}, {"entries", entries}};
}

ComplexityTable cache_from_json(const Json& j) {
  return guarded("invalid cache document", [&] {
    require(j.at("format").get<std::string>() == kCacheFormat, ErrorCategory::malformed_file,
            "not a complexity cache");
    const int v = j.at("version").get<int>();
    require(v == kFormatVersion, ErrorCategory::malformed_file,
            "unsupported cache version " + std::to_string(v));
    ComplexityTable table;
    for (const auto& e : j.at("entries")) {
      ComplexityEntry c;
      c.alphabet = e.at("alphabet").get<int>();
      c.n = e.at("n").get<int>();
      c.k = e.at("k").get<int>();
      const auto mode = e.at("mode").get<std::string>();
      require(mode == "exact" || mode == "bracket", ErrorCategory::malformed_file,
              "unknown cache mode '" + mode + "'");
      c.mode = mode == "exact" ? CellMode::exact : CellMode::bracket;
      c.lo = e.at("lo").get<double>();
      c.hi = e.at("hi").get<double>();
      require(c.mode == CellMode::bracket || c.lo == c.hi, ErrorCategory::malformed_file,
              "exact cache entry with lo != hi");
      table.publish(c);
    }
    return table;
  });
}

ComplexityTable load_cache(const std::string& path) {
  if (path.empty() || !fs::exists(path)) return {};
  return cache_from_json(parse_json_file(path));
}

void save_cache(const std::string& path, const ComplexityTable& table) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    require(static_cast<bool>(out), ErrorCategory::invalid_input, "cannot write " + tmp);
    out << cache_to_json(table).dump(1) << "\n";
  }
  fs::rename(tmp, path);
}

// ---- symbols ----

SymbolString parse_symbols(const std::string& line, int alphabet_size) {
  SymbolString out;
  for (char c : line) {
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') continue;
    require(c >= '0' && c <= '9', ErrorCategory::malformed_file,
            std::string("invalid symbol character '") + c + "'");
    const int s = c - '0';
    require(s < alphabet_size, ErrorCategory::invalid_input,
            "symbol " + std::to_string(s) + " outside alphabet of size " +
                std::to_string(alphabet_size));
    out.push_back(static_cast<Symbol>(s));
  }
  return out;
}

std::string format_symbols(std::span<const Symbol> x) {
  std::string s(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] <= 9, ErrorCategory::invalid_input, "symbol file format holds symbols 0..9");
    s[i] = static_cast<char>('0' + x[i]);
  }
  return s;
}

std::vector<SymbolString> read_symbol_stream(std::istream& in, int alphabet_size) {
  std::vector<SymbolString> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_symbols(line, alphabet_size));
  }
  return out;
}

std::vector<SymbolString> read_symbol_file(const std::string& path, int alphabet_size) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCategory::malformed_file, "cannot open " + path);
  return read_symbol_stream(in, alphabet_size);
}

void write_symbol_file(const std::string& path, const std::vector<SymbolString>& lines,
                       const std::string& comment) {
  std::string text;
  if (!comment.empty()) text += "# " + comment + "\n";
  for (const auto& l : lines) text += format_symbols(l) + "\n";
  write_text(path, text);
}

// ---- series ----

void write_series_csv(std::ostream& out, const ScalingSeries& s) {
  out << "# unifilar-series v" << kFormatVersion << " quantity=" << no_spaces(s.quantity)
      << " process=" << no_spaces(s.process) << " mode=" << no_spaces(s.mode) << "\n";
  out << "n,value,stderr\n";
  for (const auto& p : s.points)
    out << format_double(p.n) << "," << format_double(p.value) << "," << format_double(p.std_error)
        << "\n";
}

ScalingSeries read_series_csv(std::istream& in) {
  std::string line;
  require(next_data_line(in, line), ErrorCategory::malformed_file, "empty series file");
  auto meta = read_meta(line, "unifilar-series");
  require(next_data_line(in, line) && line == "n,value,stderr", ErrorCategory::malformed_file,
          "series header must be n,value,stderr");
  ScalingSeries s{meta["quantity"], meta["process"], meta["mode"], {}};
  while (next_data_line(in, line)) {
    const auto cells = split_csv(line);
    require(cells.size() == 3, ErrorCategory::malformed_file, "series rows need 3 columns");
    s.points.push_back({parse_double(cells[0]), parse_double(cells[1]), parse_double(cells[2])});
  }
  s.validate();
  return s;
}

ScalingSeries read_series_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCategory::malformed_file, "cannot open " + path);
  return read_series_csv(in);
}

Json series_to_json(const ScalingSeries& s) {
  Json pts = Json::array();
  for (const auto& p : s.points) pts.push_back({{"n", p.n}, {"value", p.value}, {"stderr", p.std_error}});
  return Json{{"version", kFormatVersion},
              {"quantity", s.quantity},
              {"process", s.process},
              {"mode", s.mode},
              {"points", pts}};
}

ScalingSeries series_from_json(const Json& j) {
  return guarded("invalid series document", [&] {
    ScalingSeries s{j.at("quantity").get<std::string>(), j.at("process").get<std::string>(),
                    j.at("mode").get<std::string>(), {}};
    for (const auto& p : j.at("points"))
      s.points.push_back({p.at("n").get<double>(), p.at("value").get<double>(),
                          p.at("stderr").get<double>()});
    s.validate();
    return s;
  });
}

// ---- trial reports ----

void write_trial_csv(std::ostream& out, const TrialReport& r) {
  out << "# unifilar-trial-report v" << kFormatVersion << " process=" << no_spaces(r.process)
      << " true_order=" << (r.true_order ? std::to_string(*r.true_order) : "none")
      << " mode=" << estimator_name(r.mode) << "\n";
  out << "n,trials,freq_correct,freq_over,w_n,mean_estimate,indeterminate\n";
  for (const auto& row : r.rows)
    out << row.n << "," << row.trials << "," << format_double(row.freq_correct) << ","
        << format_double(row.freq_over) << "," << format_double(row.w_n) << ","
        << format_double(row.mean_estimate) << "," << format_double(row.indeterminate) << "\n";
}

TrialReport read_trial_csv(std::istream& in) {
  std::string line;
  require(next_data_line(in, line), ErrorCategory::malformed_file, "empty trial report");
  auto meta = read_meta(line, "unifilar-trial-report");
  require(next_data_line(in, line) &&
              line == "n,trials,freq_correct,freq_over,w_n,mean_estimate,indeterminate",
          ErrorCategory::malformed_file, "unexpected trial report header");
  TrialReport r;
  r.process = meta["process"];
  if (meta["true_order"] != "none" && !meta["true_order"].empty())
    r.true_order = static_cast<int>(parse_double(meta["true_order"]));
  r.mode = estimator_from(meta["mode"]);
  while (next_data_line(in, line)) {
    const auto c = split_csv(line);
    require(c.size() == 7, ErrorCategory::malformed_file, "trial rows need 7 columns");
    TrialRow row;
    row.n = static_cast<int>(parse_double(c[0]));
    row.trials = static_cast<int>(parse_double(c[1]));
    row.freq_correct = parse_double(c[2]);
    row.freq_over = parse_double(c[3]);
    row.w_n = parse_double(c[4]);
    row.mean_estimate = parse_double(c[5]);
    row.indeterminate = parse_double(c[6]);
    r.rows.push_back(row);
  }
  return r;
}

Json trial_to_json(const TrialReport& r) {
  Json rows = Json::array();
  auto num = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
  for (const auto& row : r.rows) {
    Json j{{"n", row.n},
           {"trials", row.trials},
           {"freq_correct", num(row.freq_correct)},
           {"freq_over", num(row.freq_over)},
           {"w_n", row.w_n},
           {"mean_estimate", row.mean_estimate},
           {"estimate_stderr", row.estimate_stderr},
           {"indeterminate", row.indeterminate},
           {"histogram", row.histogram}};
    if (r.true_order) {
      j["overestimation_bound_ok"] = row.overestimation_ok();
      j["unbiasedness_bound_ok"] = row.unbiasedness_ok(*r.true_order);
    }
    rows.push_back(j);
  }
  return Json{{"version", kFormatVersion},
              {"process", r.process},
              {"true_order", r.true_order ? Json(*r.true_order) : Json(nullptr)},
              {"true_order_declared_not_verified", true},
              {"mode", estimator_name(r.mode)},
              {"rows", rows}};
}

Json fit_to_json(const ExponentFit& f) {
  return Json{{"exponent", f.exponent}, {"intercept", f.intercept}, {"n_min", f.n_min},
              {"n_max", f.n_max},       {"residual", f.residual},   {"points", f.points}};
}

Json oracle_scaling_to_json(const OracleScalingReport& r) {
  return Json{{"version", kFormatVersion},
              {"theta", r.theta},
              {"target_beta", r.beta},
              {"series", {series_to_json(r.u_words), series_to_json(r.m_words),
                          series_to_json(r.u_facts)}},
              {"fits",
               {{"u_n", fit_to_json(r.u_fit)},
                {"m_n", fit_to_json(r.m_fit)},
                {"u_g", fit_to_json(r.facts_fit)}}}};
}

// ---- configs ----

Json config_to_json(const ExperimentConfig& c) {
  Json proc;
  switch (c.process.kind) {
    case ProcessKind::model:
      proc = {{"kind", "model"}, {"model", model_to_json(*c.process.model)}};
      break;
    case ProcessKind::oracle:
      proc = {{"kind", "oracle"}, {"theta", c.process.theta}};
      break;
    case ProcessKind::santa_fe:
      proc = {{"kind", "santa-fe"}, {"alpha", c.process.alpha}};
      break;
  }
  if (c.process.kind != ProcessKind::model) {
    proc["oracle_seed"] = c.process.oracle_seed;
    if (!c.process.oracle_file.empty()) proc["oracle_file"] = c.process.oracle_file;
  }
  return Json{{"version", kFormatVersion},
              {"process", proc},
              {"true_order", c.true_order ? Json(*c.true_order) : Json(nullptr)},
              {"n_grid", c.n_grid},
              {"trials", c.trials},
              {"seed", c.seed},
              {"mode", estimator_name(c.mode)},
              {"band", c.band},
              {"exact_inside_envelope", c.exact_inside_envelope},
              {"threads", c.threads},
              {"envelope",
               {{"enumeration_log2_strings", c.envelope.enumeration_log2_strings},
                {"bank_max_lanes", c.envelope.bank_max_lanes},
                {"bank_log2_work", c.envelope.bank_log2_work}}},
              {"fit_window", {c.fit_min, c.fit_max}},
              {"output", c.output}};
}

namespace {

ExperimentConfig config_from_json_at(const Json& j, const fs::path& base) {
  return guarded("invalid experiment config", [&] {
    ExperimentConfig c;
    const int v = j.value("version", kFormatVersion);
    require(v == kFormatVersion, ErrorCategory::malformed_file,
            "unsupported config version " + std::to_string(v));
    const Json& p = j.at("process");
    const auto kind = p.at("kind").get<std::string>();
    if (kind == "model") {
      c.process.kind = ProcessKind::model;
      if (p.contains("model_file")) {
        fs::path f = p.at("model_file").get<std::string>();
        if (f.is_relative()) f = base / f;
        c.process.model = std::make_shared<const UnifilarModel>(read_model_file(f.string()));
      } else {
        c.process.model = std::make_shared<const UnifilarModel>(model_from_json(p.at("model")));
      }
    } else if (kind == "oracle") {
      c.process.kind = ProcessKind::oracle;
      c.process.theta = p.at("theta").get<double>();
    } else if (kind == "santa-fe") {
      c.process.kind = ProcessKind::santa_fe;
      c.process.alpha = p.at("alpha").get<double>();
    } else {
      fail(ErrorCategory::malformed_file, "unknown process kind '" + kind + "'");
    }
    c.process.oracle_seed = p.value("oracle_seed", std::uint64_t{0});
    if (p.contains("oracle_file")) {
      fs::path f = p.at("oracle_file").get<std::string>();
      if (f.is_relative()) f = base / f;
      c.process.oracle_file = f.string();
    }
    if (j.contains("true_order") && !j.at("true_order").is_null())
      c.true_order = j.at("true_order").get<int>();
    c.n_grid = j.at("n_grid").get<std::vector<int>>();
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.mode = estimator_from(j.value("mode", std::string("exact")));
    c.band = j.value("band", c.band);
    c.exact_inside_envelope = j.value("exact_inside_envelope", c.exact_inside_envelope);
    c.threads = j.value("threads", c.threads);
    if (j.contains("envelope")) {
      const Json& e = j.at("envelope");
      c.envelope.enumeration_log2_strings =
          e.value("enumeration_log2_strings", c.envelope.enumeration_log2_strings);
      c.envelope.bank_max_lanes = e.value("bank_max_lanes", c.envelope.bank_max_lanes);
      c.envelope.bank_log2_work = e.value("bank_log2_work", c.envelope.bank_log2_work);
    }
    if (j.contains("fit_window")) {
      const auto w = j.at("fit_window").get<std::vector<double>>();
      require(w.size() == 2 && w[0] < w[1], ErrorCategory::malformed_file,
              "fit_window must be [n_min, n_max]");
      c.fit_min = w[0];
      c.fit_max = w[1];
    }
    c.output = j.value("output", std::string());
    c.validate();
    return c;
  });
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) { return config_from_json_at(j, fs::current_path()); }

ExperimentConfig read_config_file(const std::string& path) {
  return config_from_json_at(parse_json_file(path), fs::path(path).parent_path());
}

}  // namespace unifilar::io
