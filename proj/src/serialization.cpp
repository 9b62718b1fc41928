#include "tracecause/serialization.hpp"

#include "tracecause/errors.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace tracecause {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sample_csv(std::ostream& out, const SampleSet& data) {
  validate(data);
  const Eigen::Index n = data.x.cols();
  const Eigen::Index m = data.y.cols();
  for (Eigen::Index j = 0; j < n; ++j) out << (j ? "," : "") << 'x' << (j + 1);
  for (Eigen::Index j = 0; j < m; ++j) out << ",y" << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.count(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out << (j ? "," : "") << format_double(data.x(i, j));
    for (Eigen::Index j = 0; j < m; ++j) out << ',' << format_double(data.y(i, j));
    out << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_sample_csv(const std::filesystem::path& path, const SampleSet& data) {
  std::ostringstream buf;
  write_sample_csv(buf, data);
  write_text_file(path, buf.str());
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << "CSV line " << line << ": " << what;
  throw Error(ErrorCode::Parse, msg.str());
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

SampleSet read_sample_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_error(1, "missing header row");
  ++line_no;

  // Column k goes to X (true) or Y (false).
  std::vector<bool> is_x;
  Eigen::Index n = 0, m = 0;
  for (std::string_view cell : split_commas(line)) {
    cell = trim(cell);
    if (cell.size() < 2 || (cell[0] != 'x' && cell[0] != 'y')) {
      parse_error(line_no, "header cell '" + std::string(cell) + "' is not x<k> or y<k>");
    }
    const bool x = cell[0] == 'x';
    if (!x && n == 0) parse_error(line_no, "y columns before any x column");
    if (x && m > 0) parse_error(line_no, "x column after y columns");
    is_x.push_back(x);
    (x ? n : m) += 1;
  }
  if (n == 0 || m == 0) parse_error(line_no, "header needs at least one x and one y column");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != is_x.size()) {
      std::ostringstream msg;
      msg << "expected " << is_x.size() << " fields, found " << cells.size();
      parse_error(line_no, msg.str());
    }
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::string_view cell = trim(cells[k]);
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), row[k]);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        parse_error(line_no, "field " + std::to_string(k + 1) + " ('" + std::string(cell) +
                                 "') is not a number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) parse_error(line_no, "no observations");

  SampleSet data;
  const auto t = static_cast<Eigen::Index>(rows.size());
  data.x.resize(t, n);
  data.y.resize(t, m);
  for (Eigen::Index i = 0; i < t; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) data.x(i, j) = row[static_cast<std::size_t>(j)];
    for (Eigen::Index j = 0; j < m; ++j) data.y(i, j) = row[static_cast<std::size_t>(n + j)];
  }
  return data;
}

SampleSet read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  return read_sample_csv(in);
}

std::string realization_hash(const ModelRealization& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const double* data, Eigen::Index count) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  feed(model.u.data(), model.u.size());
  feed(model.lambda.data(), model.lambda.size());
  feed(model.a.data(), model.a.size());
  feed(model.sigma.data(), model.sigma.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::Parse, "matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorCode::Parse, "ragged matrix rows");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

const char* spectrum_kind_name(SpectrumSpec::Kind k) {
  switch (k) {
    case SpectrumSpec::Kind::PowerLaw: return "power_law";
    case SpectrumSpec::Kind::Uniform: return "uniform";
    case SpectrumSpec::Kind::Explicit: return "explicit";
  }
  return "unknown";
}

}  // namespace

Json to_json(const SpectrumSpec& spec) {
  Json j;
  j["kind"] = spectrum_kind_name(spec.kind);
  j["dimension"] = spec.dimension;
  switch (spec.kind) {
    case SpectrumSpec::Kind::PowerLaw: j["exponent"] = spec.exponent; break;
    case SpectrumSpec::Kind::Uniform: j["lo"] = spec.lo; j["hi"] = spec.hi; break;
    case SpectrumSpec::Kind::Explicit: j["values"] = spec.values; break;
  }
  j["normalize"] = spec.normalize;
  return j;
}

SpectrumSpec spectrum_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    SpectrumSpec s;
    if (kind == "power_law") {
      s = SpectrumSpec::power_law(j.at("dimension").get<std::size_t>(), j.at("exponent").get<double>());
    } else if (kind == "uniform") {
      s = SpectrumSpec::uniform(j.at("dimension").get<std::size_t>(), j.at("lo").get<double>(),
                                j.at("hi").get<double>());
    } else if (kind == "explicit") {
      s = SpectrumSpec::explicit_values(j.at("values").get<std::vector<double>>());
    } else {
      throw Error(ErrorCode::Parse, "unknown spectrum kind '" + kind + "'");
    }
    s.normalize = j.value("normalize", false);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("spectrum JSON: ") + e.what());
  }
}

Json to_json(const CausalModelSpec& spec) {
  Json j;
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["sample_count"] = spec.sample_count;
  j["noise_scale"] = spec.noise_scale;
  j["spectrum"] = to_json(spec.spectrum);
  Json law;
  if (spec.structural_law.kind == StructuralLaw::Kind::GaussianIID) {
    law["kind"] = "gaussian_iid";
    law["variance"] = spec.structural_law.variance;
  } else {
    law["kind"] = "explicit";
    law["matrix"] = matrix_to_json(spec.structural_law.matrix);
  }
  j["structural_law"] = law;
  j["mean"] = std::vector<double>(spec.mean.data(), spec.mean.data() + spec.mean.size());
  return j;
}

CausalModelSpec model_spec_from_json(const Json& j) {
  try {
    CausalModelSpec s;
    s.n = j.at("n").get<std::size_t>();
    s.m = j.at("m").get<std::size_t>();
    s.sample_count = j.at("sample_count").get<std::size_t>();
    s.noise_scale = j.at("noise_scale").get<double>();
    s.spectrum = spectrum_from_json(j.at("spectrum"));
    const Json& law = j.at("structural_law");
    const std::string kind = law.at("kind").get<std::string>();
    if (kind == "gaussian_iid") {
      s.structural_law = StructuralLaw::gaussian(law.at("variance").get<double>());
    } else if (kind == "explicit") {
      s.structural_law = StructuralLaw::explicit_matrix(matrix_from_json(law.at("matrix")));
    } else {
      throw Error(ErrorCode::Parse, "unknown structural law '" + kind + "'");
    }
    const auto mean = j.value("mean", std::vector<double>{});
    if (!mean.empty()) s.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("model spec JSON: ") + e.what());
  }
}

Json to_json(const DeltaScore& score) {
  Json j;
  j["variant"] = to_string(score.variant.kind);
  j["direction"] = to_string(score.direction);
  j["numerator"] = score.numerator;
  j["denominator"] = score.denominator;
  j["value"] = score.value;
  if (score.variant.kind == DeltaVariant::Kind::Ridge) j["lambda"] = score.variant.lambda;
  if (score.variant.kind == DeltaVariant::Kind::PMoment) {
    j["p"] = score.variant.p;
    j["mc_samples"] = score.variant.mc_samples;
  }
  if (score.mc_std_err) j["mc_std_err"] = *score.mc_std_err;
  if (score.rank) j["rank"] = *score.rank;
  return j;
}

Json to_json(const CausalVerdict& verdict) {
  Json j;
  j["verdict"] = to_string(verdict.verdict);
  j["xi"] = verdict.xi;
  j["score_xy"] = verdict.score_xy ? to_json(*verdict.score_xy) : Json();
  j["score_yx"] = verdict.score_yx ? to_json(*verdict.score_yx) : Json();
  if (verdict.reason) {
    j["reason"] = to_string(*verdict.reason);
    j["detail"] = verdict.detail;
  }
  return j;
}

Json to_json(const ConcentrationBound& bound) {
  Json j;
  j["theorem"] = to_string(bound.theorem);
  j["p"] = bound.p;
  j["epsilon"] = bound.epsilon;
  j["bound"] = bound.bound;
  j["operator_norm_bound"] = bound.operator_norm_bound;
  j["relaxed_bound"] = bound.relaxed_bound;
  j["failure_probability"] = bound.failure_probability;
  j["beta"] = std::vector<double>(bound.beta.data(), bound.beta.data() + bound.beta.size());
  j["gamma"] = std::vector<double>(bound.gamma.data(), bound.gamma.data() + bound.gamma.size());
  return j;
}

Json to_json(const BiasInterval& interval) {
  Json j;
  j["target"] = to_string(interval.target);
  j["lower"] = interval.lower;
  j["upper"] = interval.upper;
  j["lambda_prime"] = interval.lambda_prime;
  j["c"] = interval.c;
  j["sigma2"] = interval.sigma2;
  j["a_frob_sq"] = interval.a_frob_sq;
  j["p_n"] = interval.p_n;
  j["resolvent_trace"] = interval.resolvent_trace;
  j["asymptotic_term_omitted"] = interval.asymptotic_term_omitted;
  return j;
}

namespace {

Json pairs_to_json(const std::vector<std::pair<double, double>>& v, const char* k1, const char* k2) {
  Json arr = Json::array();
  for (const auto& [a, b] : v) arr.push_back(Json{{k1, a}, {k2, b}});
  return arr;
}

Json to_json(const BiasCheck& b) {
  return Json{{"mean", b.mean}, {"std_err", b.std_err}, {"lower", b.lower},
              {"upper", b.upper}, {"contained", b.contained}};
}

}  // namespace

Json to_json(const ConcentrationReport& r) {
  Json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["p"] = r.p;
  j["trials"] = r.trials;
  j["reference"] = r.reference;
  j["reference_std_err"] = r.reference_std_err;
  j["sample_mean"] = r.sample_mean;
  j["sample_std"] = r.sample_std;
  j["mean_std_err"] = r.mean_std_err;
  j["mean_within_3se"] = r.mean_within_3se;
  j["deviations"] = Json{{"mean", r.deviations.mean},
                         {"std", r.deviations.std},
                         {"max", r.deviations.max},
                         {"quantiles", pairs_to_json(r.deviations.quantiles, "level", "value")}};
  j["bound_curve"] = pairs_to_json(r.bound_curve, "epsilon", "bound");
  j["operator_norm_curve"] = pairs_to_json(r.operator_norm_curve, "epsilon", "bound");
  return j;
}

Json to_json(const BiasReport& r) {
  Json j;
  j["n"] = r.n;
  j["m"] = r.m;
  j["sample_count"] = r.sample_count;
  j["trials"] = r.trials;
  j["c"] = r.c;
  j["lambda_prime"] = r.lambda_prime;
  j["sigma2"] = r.sigma2;
  j["lambda_mode"] = r.lambda_mode == LambdaMode::UniformRandom ? "uniform" : "fixed";
  j["p_n"] = r.p_n;
  j["frobenius"] = to_json(r.frobenius);
  j["numerator"] = to_json(r.numerator);
  j["plugin_bound"] = r.plugin_bound;
  j["within_plugin_bound"] = r.within_plugin_bound;
  j["asymptotic_term_omitted"] = true;
  return j;
}

Json to_json(const SweepResult& r) {
  Json j;
  j["axis"] = to_string(r.axis);
  j["estimator"] = r.estimator;
  j["seed"] = r.seed;
  j["trials_per_point"] = r.trials_per_point;
  j["grid"] = r.grid;
  j["accuracy"] = r.accuracy;
  j["std_err"] = r.std_err;
  j["inconclusive"] = r.inconclusive;
  j["mean_delta_xy"] = r.mean_delta_xy;
  j["mean_delta_yx"] = r.mean_delta_yx;
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "grid_value,accuracy,stderr,inconclusive,mean_delta_xy,mean_delta_yx\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    out << format_double(r.grid[i]) << ',' << format_double(r.accuracy[i]) << ','
        << format_double(r.std_err[i]) << ',' << format_double(r.inconclusive[i]) << ','
        << format_double(r.mean_delta_xy[i]) << ',' << format_double(r.mean_delta_yx[i]) << '\n';
  }
}

}  // namespace tracecause
