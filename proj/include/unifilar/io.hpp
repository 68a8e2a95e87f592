#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "unifilar/experiments.hpp"

namespace unifilar::io {

using Json = nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kCacheFormat = "unifilar-complexity-cache";

// Model files: {alphabet_size, k, pi, tau, epsilon, name}; states 0-based.
Json model_to_json(const UnifilarModel& m);
UnifilarModel model_from_json(const Json& j);
UnifilarModel read_model_file(const std::string& path);
void write_model_file(const std::string& path, const UnifilarModel& m);

// Normalizer cache.
Json cache_to_json(const ComplexityTable& table);
ComplexityTable cache_from_json(const Json& j);
/// A missing file yields an empty table; a malformed one is an error.
ComplexityTable load_cache(const std::string& path);
/// Written to a temporary file and renamed into place.
void save_cache(const std::string& path, const ComplexityTable& table);

// Symbol files: one realization per line, '0'..'9', '#' starts a comment.
SymbolString parse_symbols(const std::string& line, int alphabet_size = 10);
std::string format_symbols(std::span<const Symbol> x);
std::vector<SymbolString> read_symbol_file(const std::string& path, int alphabet_size = 10);
std::vector<SymbolString> read_symbol_stream(std::istream& in, int alphabet_size = 10);
void write_symbol_file(const std::string& path, const std::vector<SymbolString>& lines,
                       const std::string& comment = {});

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// Scaling series: '#' metadata line, then n,value,stderr.
void write_series_csv(std::ostream& out, const ScalingSeries& s);
ScalingSeries read_series_csv(std::istream& in);
ScalingSeries read_series_file(const std::string& path);
Json series_to_json(const ScalingSeries& s);
ScalingSeries series_from_json(const Json& j);

// Trial reports: '#' metadata line, then
// n,trials,freq_correct,freq_over,w_n,mean_estimate,indeterminate.
void write_trial_csv(std::ostream& out, const TrialReport& r);
TrialReport read_trial_csv(std::istream& in);
Json trial_to_json(const TrialReport& r);

Json fit_to_json(const ExponentFit& f);
Json oracle_scaling_to_json(const OracleScalingReport& r);

// Experiment configs mirror ExperimentConfig field for field.
Json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig read_config_file(const std::string& path);

std::string read_text_file(const std::string& path);
/// Writes `text` to `path`, or to stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace unifilar::io
