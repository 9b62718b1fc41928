#pragma once

#include "tracecause/estimators.hpp"
#include "tracecause/experiments.hpp"
#include "tracecause/sampling.hpp"
#include "tracecause/theory.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace tracecause {

using Json = nlohmann::ordered_json;

// %.17g, enough digits for an exact double round trip.
std::string format_double(double v);

// Header x1..xn,y1..ym, one observation per row.
void write_sample_csv(std::ostream& out, const SampleSet& data);
void write_sample_csv(const std::filesystem::path& path, const SampleSet& data);

// Columns are assigned to X or Y by their header prefix. Malformed input
// throws Parse with the 1-based line number in the message.
SampleSet read_sample_csv(std::istream& in);
SampleSet read_sample_csv(const std::filesystem::path& path);

// FNV-1a over the raw bytes of U, Lambda, A and Sigma, as 16 hex digits.
std::string realization_hash(const ModelRealization& model);

Json to_json(const SpectrumSpec& spec);
SpectrumSpec spectrum_from_json(const Json& j);
Json to_json(const CausalModelSpec& spec);
CausalModelSpec model_spec_from_json(const Json& j);

Json to_json(const DeltaScore& score);
Json to_json(const CausalVerdict& verdict);
Json to_json(const ConcentrationBound& bound);
Json to_json(const BiasInterval& interval);
Json to_json(const ConcentrationReport& report);
Json to_json(const BiasReport& report);
Json to_json(const SweepResult& result);

// Columns: grid_value, accuracy, stderr, inconclusive, mean_delta_xy, mean_delta_yx.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace tracecause
