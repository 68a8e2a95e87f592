// Command-line front end. Every command writes JSON (default) or CSV to
// --output or stdout; failures print {"error": {...}} on stderr and exit with
// the category's status code.

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "unifilar/error.hpp"
#include "unifilar/io.hpp"
#include "unifilar/kernels.hpp"
#include "unifilar/random.hpp"

using namespace unifilar;
using io::Json;

namespace {

struct Common {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string cache;
  int band = 2;
  bool band_set = false;
  std::string format = "json";
  std::string output;
};

struct Inputs {
  std::string input;
  std::string text;
  int alphabet = 2;
};

std::vector<SymbolString> load_inputs(const Inputs& in) {
  if (!in.text.empty()) return {io::parse_symbols(in.text, in.alphabet)};
  require(!in.input.empty(), ErrorCategory::usage, "give --input FILE or --string TEXT");
  if (in.input == "-") return io::read_symbol_stream(std::cin, in.alphabet);
  return io::read_symbol_file(in.input, in.alphabet);
}

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--input,-i", in.input, "symbol file, one realization per line ('-' for stdin)");
  cmd->add_option("--string,-s", in.text, "a single realization given inline");
  cmd->add_option("--alphabet,-a", in.alphabet, "alphabet size")->check(CLI::Range(2, 10));
}

void emit(const Common& c, const std::string& text) { io::write_text(c.output, text); }

void emit_json(const Common& c, const Json& j) { emit(c, j.dump(2) + "\n"); }

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& cell : cells) s += (s.empty() ? "" : ",") + cell;
  return s + "\n";
}

std::string num(double v) { return io::format_double(v); }

Json automaton_json(const AutomatonSpec& a) {
  return Json{{"start", a.start}, {"tau", a.tau}};
}

Json nml_json(const NmlValue& v) {
  return Json{{"log2_lo", v.lo.value()}, {"log2_hi", v.hi.value()}, {"exact", v.exact()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unifilar HMM likelihoods, NML, Ryabko mixture and order estimation"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "master seed");
  app.add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cache", common.cache, "normalizer cache file (JSON)");
  app.add_option("--band", common.band, "orders computed exactly (K_max)")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { common.band_set = true; });
  app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output,-o", common.output, "output path (default stdout)");
  std::string isa;
  app.add_option("--isa", isa, "force a kernel instruction set")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw realizations from a model, Oracle or Santa Fe");
  std::string model_file;
  double theta = -1.0, alpha = -1.0;
  std::size_t n = 0;
  int count = 1;
  std::uint64_t oracle_seed = 0, k_max = 1u << 20;
  std::string oracle_file;
  sample_cmd->add_option("--model", model_file, "model JSON file");
  sample_cmd->add_option("--oracle", theta, "Oracle(theta)");
  sample_cmd->add_option("--santafe", alpha, "Santa Fe with Zipf exponent alpha");
  sample_cmd->add_option("--n", n, "length (pairs for Santa Fe)")->required();
  sample_cmd->add_option("--count", count, "number of realizations")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--oracle-seed", oracle_seed, "seed of the oracle bits");
  sample_cmd->add_option("--oracle-file", oracle_file, "ASCII 0/1 file of oracle bits");
  sample_cmd->add_option("--kmax", k_max, "Santa Fe truncation index");

  // ml / nml / mixture / estimate
  Inputs in;
  int order = 1;
  auto* ml_cmd = app.add_subcommand("ml", "exact maximum likelihood");
  add_inputs(ml_cmd, in);
  ml_cmd->add_option("--k", order, "hidden states")->required()->check(CLI::PositiveNumber);
  auto* nml_cmd = app.add_subcommand("nml", "normalized maximum likelihood");
  add_inputs(nml_cmd, in);
  nml_cmd->add_option("--k", order, "hidden states")->required()->check(CLI::PositiveNumber);
  auto* mix_cmd = app.add_subcommand("mixture", "Ryabko mixture with per-order terms");
  add_inputs(mix_cmd, in);
  auto* est_cmd = app.add_subcommand("estimate", "unifilar order estimate");
  add_inputs(est_cmd, in);
  std::string est_mode = "exact";
  est_cmd->add_option("--mode", est_mode, "exact or surrogate")
      ->check(CLI::IsMember({"exact", "surrogate"}));

  // complexity
  auto* cx_cmd = app.add_subcommand("complexity", "statistical complexity C(n|k)");
  int cx_n = 0, cx_alphabet = 2;
  cx_cmd->add_option("--n", cx_n, "length")->required()->check(CLI::NonNegativeNumber);
  cx_cmd->add_option("--k", order, "hidden states")->required()->check(CLI::PositiveNumber);
  cx_cmd->add_option("--alphabet,-a", cx_alphabet, "alphabet size")->check(CLI::Range(2, 256));

  // entropy
  auto* ent_cmd = app.add_subcommand("entropy", "entropy rate, block entropy, excess entropy");
  std::string what = "rate";
  int ent_n = 1;
  ent_cmd->add_option("--model", model_file, "model JSON file");
  ent_cmd->add_option("--oracle", theta, "closed forms of Oracle(theta)");
  ent_cmd->add_option("--what", what, "rate, block or excess")
      ->check(CLI::IsMember({"rate", "block", "excess"}));
  ent_cmd->add_option("--n", ent_n, "block length")->check(CLI::NonNegativeNumber);

  // parse
  auto* parse_cmd = app.add_subcommand("parse", "blocks, U_n, M_n and facts count of realizations");
  parse_cmd->add_option("--input,-i", in.input, "symbol file over {0,1,2}");
  parse_cmd->add_option("--string,-s", in.text, "a single realization given inline");
  parse_cmd->add_option("--oracle-seed", oracle_seed, "seed of the oracle bits");
  parse_cmd->add_option("--oracle-file", oracle_file, "ASCII 0/1 file of oracle bits");

  // experiments
  std::string config_file;
  int trials = 0;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config,-c", config_file, "experiment config JSON")->required();
    cmd->add_option("--trials", trials, "override the trial count")->check(CLI::PositiveNumber);
  };
  auto* cons_cmd = app.add_subcommand("consistency", "order estimator Monte Carlo");
  add_config(cons_cmd);
  auto* univ_cmd = app.add_subcommand("universality", "mixture code length gap to entropy rate");
  add_config(univ_cmd);
  auto* osc_cmd = app.add_subcommand("oracle-scaling", "U_n, M_n, U_g scaling and Hilberg fits");
  add_config(osc_cmd);
  auto* mi_cmd = app.add_subcommand("mi-scaling", "mixture mutual information scaling");
  add_config(mi_cmd);

  // hilberg-fit
  auto* fit_cmd = app.add_subcommand("hilberg-fit", "Hilberg exponent of a series CSV");
  std::string series_file;
  double fit_min = 1.0, fit_max = 1e300;
  bool use_j = false;
  fit_cmd->add_option("--input,-i", series_file, "series CSV (n,value,stderr)")->required();
  fit_cmd->add_option("--min", fit_min, "smallest n in the window");
  fit_cmd->add_option("--max", fit_max, "largest n in the window");
  fit_cmd->add_flag("--j", use_j, "fit J(n) = 2S(n) - S(2n) instead of S");

  // cache
  auto* cache_cmd = app.add_subcommand("cache", "normalizer cache");
  cache_cmd->require_subcommand(1);
  auto* build_cmd = cache_cmd->add_subcommand("build", "compute and store C(n|k) cells");
  int n_max = 10, k_cells = 0;
  build_cmd->add_option("--n-max", n_max, "largest n")->check(CLI::PositiveNumber);
  build_cmd->add_option("--k-max", k_cells, "largest k (default n-1)");
  build_cmd->add_option("--alphabet,-a", cx_alphabet, "alphabet size")->check(CLI::Range(2, 256));
  auto* inspect_cmd = cache_cmd->add_subcommand("inspect", "list cached cells");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      fail(ErrorCategory::usage, e.what());
    }
    if (!isa.empty())
      kernels::set_preferred_isa(isa == "avx2" ? kernels::Isa::avx2 : kernels::Isa::scalar);

    ComplexityTable table = io::load_cache(common.cache);
    const std::size_t cached_before = table.size();
    const bool csv = common.format == "csv";
    const ExactEnvelope env;

    if (sample_cmd->parsed()) {
      const int sources = !model_file.empty() + (theta >= 0) + (alpha >= 0);
      require(sources == 1, ErrorCategory::usage, "give exactly one of --model, --oracle, --santafe");
      const OracleSource src =
          oracle_file.empty() ? OracleSource::seeded(oracle_seed) : OracleSource::from_file(oracle_file);
      if (alpha >= 0) {
        SantaFeConfig cfg{alpha, k_max, 1e-3, src};
        std::string text = "# santa-fe alpha=" + num(alpha) + " k_max=" + std::to_string(k_max) +
                           " oracle=" + src.describe() + "\n";
        for (int c = 0; c < count; ++c) {
          for (const auto& p : santa_fe_sample(cfg, n, derive_seed(common.seed, c)))
            text += std::to_string(p.k) + " " + std::to_string(p.bit) + "\n";
          if (c + 1 < count) text += "#\n";
        }
        emit(common, text);
      } else {
        std::vector<SymbolString> lines;
        std::string comment;
        if (theta >= 0) {
          OracleConfig cfg{theta, src};
          for (int c = 0; c < count; ++c) lines.push_back(oracle_sample(cfg, n, derive_seed(common.seed, c)));
          comment = "oracle theta=" + num(theta) + " oracle=" + src.describe();
        } else {
          const auto model = io::read_model_file(model_file);
          for (int c = 0; c < count; ++c)
            lines.push_back(sample(model, n, derive_seed(common.seed, c)).first);
          comment = "model " + model.name();
        }
        io::write_symbol_file(common.output, lines, comment + " seed=" + std::to_string(common.seed));
      }
    } else if (ml_cmd->parsed()) {
      Json out = Json::array();
      std::string text = csv_line({"string", "k", "log2_ml"});
      for (const auto& x : load_inputs(in)) {
        const auto r = exact_log_ml(x, order, in.alphabet);
        out.push_back({{"string", io::format_symbols(x)},
                       {"k", order},
                       {"log2_ml", r.log_ml.value()},
                       {"ml", r.log_ml.prob()},
                       {"argmax", automaton_json(r.argmax)},
                       {"counts", r.counts.counts}});
        text += csv_line({io::format_symbols(x), std::to_string(order), num(r.log_ml.value())});
      }
      csv ? emit(common, text) : emit_json(common, out);
    } else if (nml_cmd->parsed()) {
      Json out = Json::array();
      std::string text = csv_line({"string", "k", "log2_nml_lo", "log2_nml_hi"});
      for (const auto& x : load_inputs(in)) {
        const auto v = log_nml(x, order, Alphabet(in.alphabet), table, common.band, env);
        Json j = nml_json(v);
        j["string"] = io::format_symbols(x);
        j["k"] = order;
        out.push_back(j);
        text += csv_line({io::format_symbols(x), std::to_string(order), num(v.lo.value()), num(v.hi.value())});
      }
      csv ? emit(common, text) : emit_json(common, out);
    } else if (mix_cmd->parsed()) {
      Json out = Json::array();
      std::string text = csv_line({"string", "log2_lo", "log2_hi"});
      for (const auto& x : load_inputs(in)) {
        const auto m = log_ryabko(x, Alphabet(in.alphabet), table, common.band, env, common.threads);
        Json orders = Json::array();
        for (const auto& c : m.orders)
          orders.push_back({{"k", c.k}, {"weight", c.weight}, {"nml", nml_json(c.nml)}});
        out.push_back({{"string", io::format_symbols(x)},
                       {"log2_lo", m.lo.value()},
                       {"log2_hi", m.hi.value()},
                       {"exact", m.exact()},
                       {"log2_tail", m.tail.value()},
                       {"orders", orders}});
        text += csv_line({io::format_symbols(x), num(m.lo.value()), num(m.hi.value())});
      }
      csv ? emit(common, text) : emit_json(common, out);
    } else if (est_cmd->parsed()) {
      Json out = Json::array();
      std::string text = csv_line({"string", "mode", "lo", "hi"});
      for (const auto& x : load_inputs(in)) {
        const auto e = est_mode == "exact"
                           ? order_estimate_exact(x, Alphabet(in.alphabet), table, common.band, env)
                           : order_estimate_surrogate(x, Alphabet(in.alphabet));
        Json j{{"string", io::format_symbols(x)},
               {"mode", est_mode},
               {"lo", e.lo},
               {"hi", e.hi},
               {"determinate", e.determinate()}};
        if (e.determinate()) j["order"] = e.lo;
        if (est_mode == "surrogate") j["lz78_bits"] = lz78_codelength(x, in.alphabet);
        out.push_back(j);
        text += csv_line({io::format_symbols(x), est_mode, std::to_string(e.lo), std::to_string(e.hi)});
      }
      csv ? emit(common, text) : emit_json(common, out);
    } else if (cx_cmd->parsed()) {
      const Alphabet a(cx_alphabet);
      const auto b = complexity(cx_n, order, a, table, common.band, env, common.threads);
      const std::string mode = b.exact() ? "exact" : "bracket";
      if (csv)
        emit(common, csv_line({"alphabet", "n", "k", "mode", "lo", "hi"}) +
                         csv_line({std::to_string(cx_alphabet), std::to_string(cx_n), std::to_string(order),
                                   mode, num(b.lo), num(b.hi)}));
      else
        emit_json(common, {{"alphabet", cx_alphabet}, {"n", cx_n}, {"k", order}, {"mode", mode},
                           {"lo", b.lo}, {"hi", b.hi}, {"band", common.band}});
    } else if (ent_cmd->parsed()) {
      if (theta >= 0) {
        emit_json(common, {{"theta", theta},
                           {"entropy_rate", oracle_entropy_rate(theta)},
                           {"state_entropy", oracle_state_entropy(theta)},
                           {"beta", oracle_beta(theta)}});
      } else {
        require(!model_file.empty(), ErrorCategory::usage, "give --model or --oracle");
        const auto model = io::read_model_file(model_file);
        Json j{{"model", model.name()}, {"what", what}};
        if (what == "rate") j["value"] = entropy_rate_unifilar(model);
        if (what == "block") {
          j["n"] = ent_n;
          j["value"] = exact_block_entropy(model, ent_n);
        }
        if (what == "excess") {
          j["n"] = ent_n;
          j["value"] = excess_entropy_partial(model, ent_n);
          j["upper_bound_log2_k"] = std::log2(static_cast<double>(model.k()));
        }
        emit_json(common, j);
      }
    } else if (parse_cmd->parsed()) {
      in.alphabet = 3;
      const OracleSource src =
          oracle_file.empty() ? OracleSource::seeded(oracle_seed) : OracleSource::from_file(oracle_file);
      Json out = Json::array();
      std::string text = csv_line({"string", "blocks", "u_n", "m_n", "facts"});
      for (const auto& x : load_inputs(in)) {
        const auto p = parse_blocks(x);
        Json blocks = Json::array();
        for (const auto& b : p.blocks) blocks.push_back({io::format_symbols(b.word), b.z});
        const auto u = u_n_statistic(p), m = m_n_statistic(p), f = facts_count(x, src);
        out.push_back({{"string", io::format_symbols(x)},
                       {"w0", io::format_symbols(p.w0)},
                       {"z0", p.z0 ? Json(*p.z0) : Json(nullptr)},
                       {"blocks", blocks},
                       {"remainder", io::format_symbols(p.remainder)},
                       {"u_n", u},
                       {"m_n", m},
                       {"facts", f}});
        text += csv_line({io::format_symbols(x), std::to_string(p.blocks.size()), std::to_string(u),
                          std::to_string(m), std::to_string(f)});
      }
      csv ? emit(common, text) : emit_json(common, out);
    } else if (cons_cmd->parsed() || univ_cmd->parsed() || osc_cmd->parsed() || mi_cmd->parsed()) {
      ExperimentConfig cfg = io::read_config_file(config_file);
      if (app.get_option("--seed")->count()) cfg.seed = common.seed;
      if (app.get_option("--threads")->count()) cfg.threads = common.threads;
      if (common.band_set) cfg.band = common.band;
      if (trials > 0) cfg.trials = trials;
      if (common.output.empty()) common.output = cfg.output;
      if (cons_cmd->parsed()) {
        const auto r = run_consistency(cfg, table);
        if (csv) {
          std::ostringstream ss;
          io::write_trial_csv(ss, r);
          emit(common, ss.str());
        } else {
          emit_json(common, io::trial_to_json(r));
        }
      } else if (osc_cmd->parsed()) {
        const auto r = run_oracle_scaling(cfg);
        if (csv) {
          std::ostringstream ss;
          ss << "# target_beta=" << num(r.beta) << " fit_u_n=" << num(r.u_fit.exponent)
             << " fit_m_n=" << num(r.m_fit.exponent) << " fit_u_g=" << num(r.facts_fit.exponent) << "\n";
          for (const auto* s : {&r.u_words, &r.m_words, &r.u_facts}) io::write_series_csv(ss, *s);
          emit(common, ss.str());
        } else {
          emit_json(common, io::oracle_scaling_to_json(r));
        }
      } else {
        const auto s = univ_cmd->parsed() ? run_universality(cfg, table) : run_mi_scaling(cfg, table);
        if (csv) {
          std::ostringstream ss;
          io::write_series_csv(ss, s);
          emit(common, ss.str());
        } else {
          emit_json(common, io::series_to_json(s));
        }
      }
    } else if (fit_cmd->parsed()) {
      auto s = io::read_series_file(series_file);
      std::vector<std::string> notices;
      if (use_j) s = j_function(s, &notices);
      for (const auto& msg : notices) std::cerr << "note: " << msg << "\n";
      const auto f = hilberg_exponent(s, fit_min, fit_max);
      Json j = io::fit_to_json(f);
      j["quantity"] = s.quantity;
      emit_json(common, j);
    } else if (build_cmd->parsed()) {
      const Alphabet a(cx_alphabet);
      for (int len = 1; len <= n_max; ++len)
        for (int k = 1; k < len && (k_cells == 0 || k <= k_cells); ++k)
          complexity(len, k, a, table, common.band, env, common.threads);
      require(!common.cache.empty(), ErrorCategory::usage, "cache build needs --cache PATH");
      emit_json(common, {{"cells", table.size()}, {"cache", common.cache}});
    } else if (inspect_cmd->parsed()) {
      if (csv) {
        std::string text = csv_line({"alphabet", "n", "k", "mode", "lo", "hi"});
        for (const auto& e : table.entries())
          text += csv_line({std::to_string(e.alphabet), std::to_string(e.n), std::to_string(e.k),
                            e.mode == CellMode::exact ? "exact" : "bracket", num(e.lo), num(e.hi)});
        emit(common, text);
      } else {
        emit_json(common, io::cache_to_json(table));
      }
    }

    if (!common.cache.empty() && table.size() != cached_before) io::save_cache(common.cache, table);
    return 0;
  } catch (const Error& e) {
    std::cerr << Json{{"error", {{"category", std::string(category_name(e.category()))}, {"message", e.what()}}}}.dump()
              << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", {{"category", "invariant"}, {"message", e.what()}}}}.dump() << "\n";
    return static_cast<int>(ErrorCategory::invariant);
  }
}
