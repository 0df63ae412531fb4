#include "lupi_occ/model_io.hpp"

#include <charconv>
#include <sstream>

#include "lupi_occ/csv.hpp"
#include "lupi_occ/errors.hpp"
#include "lupi_occ/io.hpp"

namespace lupi_occ {

namespace {

constexpr const char* kMagic = "lupi_occ-model";

[[noreturn]] void parse_fail(const std::string& what, std::size_t line) {
  throw FormatError("model parse error: " + what + " (line " + std::to_string(line) + ")");
}

void write_numbers(std::ostringstream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << format_number(values[i]);
  }
  out << '\n';
}

void write_points(std::ostringstream& out, const char* key, const PointSet& points) {
  out << key << ' ' << points.size() << ' ' << points.front().size() << '\n';
  for (const auto& p : points) write_numbers(out, p.values());
}

void write_kernel(std::ostringstream& out, const char* key, const KernelParams& k) {
  out << key << " gaussian " << format_number(k.width()) << '\n';
}

// Line-oriented reader: every record is "key value..." on one line, with
// bulk numeric rows following their header line.
class Reader {
 public:
  explicit Reader(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines_.push_back(line);
    }
  }

  std::size_t line_no() const noexcept { return pos_ + 1; }
  bool at_end() const noexcept { return pos_ >= lines_.size(); }

  std::vector<std::string> tokens() {
    if (at_end()) parse_fail("unexpected end of file", line_no());
    std::istringstream in(lines_[pos_++]);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
  }

  std::string raw_line() {
    if (at_end()) parse_fail("unexpected end of file", line_no());
    return lines_[pos_++];
  }

  std::vector<std::string> expect(const std::string& key, std::size_t arity) {
    const std::size_t at = line_no();
    auto t = tokens();
    if (t.empty() || t[0] != key) parse_fail("expected '" + key + "'", at);
    if (t.size() != arity + 1) {
      parse_fail("'" + key + "' expects " + std::to_string(arity) + " value(s)", at);
    }
    t.erase(t.begin());
    return t;
  }

  double number(const std::string& token) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      parse_fail("bad number '" + token + "'", pos_);
    }
    return v;
  }

  std::uint64_t integer(const std::string& token) const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      parse_fail("bad integer '" + token + "'", pos_);
    }
    return v;
  }

  std::vector<double> number_row(std::size_t expected) {
    const std::size_t at = line_no();
    const auto t = tokens();
    if (t.size() != expected) {
      parse_fail("expected " + std::to_string(expected) + " numbers, found " +
                     std::to_string(t.size()),
                 at);
    }
    std::vector<double> out;
    out.reserve(t.size());
    for (const auto& s : t) out.push_back(number(s));
    return out;
  }

  double scalar(const std::string& key) { return number(expect(key, 1)[0]); }

  KernelParams kernel(const std::string& key) {
    const auto t = expect(key, 2);
    if (t[0] != "gaussian") parse_fail("unknown kernel '" + t[0] + "'", pos_);
    return KernelParams::gaussian(number(t[1]));
  }

  PointSet points(const std::string& key) {
    const auto t = expect(key, 2);
    const std::size_t n = integer(t[0]);
    const std::size_t d = integer(t[1]);
    if (n == 0 || d == 0) parse_fail("'" + key + "' must be non-empty", pos_);
    PointSet out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(number_row(d));
    return out;
  }

  Vector vector(const std::string& key) {
    const std::size_t n = integer(expect(key, 1)[0]);
    return Vector(number_row(n));
  }

 private:
  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

const KocModel& decision_model(const AnyModel& model) noexcept {
  if (const auto* plus = std::get_if<KocPlusModel>(&model)) return plus->decision();
  return std::get<KocModel>(model);
}

std::string serialize_model(const ModelFile& file) {
  const bool plus = std::holds_alternative<KocPlusModel>(file.model);
  const KocModel& m = decision_model(file.model);
  std::ostringstream out;
  out << kMagic << ' ' << kModelFormatVersion << '\n';
  out << "library_version " << LUPI_OCC_VERSION << '\n';
  out << "method " << (plus ? "kocplus" : "koc") << '\n';
  out << "seed " << file.seed << '\n';
  out << "target_class " << file.target_class << '\n';
  out << "features " << file.feature_names.size() << '\n';
  for (const auto& name : file.feature_names) {
    if (name.find('\n') != std::string::npos) throw InputError("feature name contains a newline");
    out << name << '\n';
  }
  if (file.standardizer) {
    out << "standardizer " << file.standardizer->means().size() << '\n';
    write_numbers(out, file.standardizer->means());
    write_numbers(out, file.standardizer->scales());
  } else {
    out << "standardizer 0\n";
  }
  write_kernel(out, "kernel", m.kernel());
  out << "r " << format_number(m.r()) << '\n';
  out << "c " << format_number(m.c()) << '\n';
  out << "eta " << format_number(m.eta()) << '\n';
  out << "theta " << format_number(m.theta()) << '\n';
  write_points(out, "points", m.train_points());
  out << "weights " << m.weights().size() << '\n';
  write_numbers(out, m.weights().values());
  if (plus) {
    const auto& p = std::get<KocPlusModel>(file.model);
    out << "mu " << format_number(p.mu()) << '\n';
    write_kernel(out, "priv_kernel", p.priv_kernel());
    write_points(out, "priv_points", p.priv_points());
    out << "correction_weights " << p.correction_weights().size() << '\n';
    write_numbers(out, p.correction_weights().values());
  }
  out << "end\n";
  return out.str();
}

ModelFile parse_model(const std::string& text) {
  Reader in(text);
  try {
    {
      const auto t = in.tokens();
      if (t.size() != 2 || t[0] != kMagic) parse_fail("not a lupi_occ model file", 1);
      if (in.integer(t[1]) != static_cast<std::uint64_t>(kModelFormatVersion)) {
        parse_fail("unsupported format version " + t[1], 1);
      }
    }
    in.expect("library_version", 1);
    const std::string method = in.expect("method", 1)[0];
    if (method != "koc" && method != "kocplus") parse_fail("unknown method '" + method + "'", 3);

    const std::uint64_t seed = in.integer(in.expect("seed", 1)[0]);
    int target_class = 0;
    {
      const std::string t = in.expect("target_class", 1)[0];
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), target_class);
      if (ec != std::errc() || ptr != t.data() + t.size()) parse_fail("bad target class", 5);
    }
    std::vector<std::string> feature_names;
    const std::size_t n_names = in.integer(in.expect("features", 1)[0]);
    for (std::size_t i = 0; i < n_names; ++i) feature_names.push_back(in.raw_line());
    std::optional<Standardizer> standardizer;
    const std::size_t n_std = in.integer(in.expect("standardizer", 1)[0]);
    if (n_std > 0) {
      auto means = in.number_row(n_std);
      auto scales = in.number_row(n_std);
      standardizer = Standardizer::from_parts(std::move(means), std::move(scales));
    }

    const KernelParams kernel = in.kernel("kernel");
    const double r = in.scalar("r");
    const double c = in.scalar("c");
    const double eta = in.scalar("eta");
    const double theta = in.scalar("theta");
    PointSet points = in.points("points");
    Vector weights = in.vector("weights");
    if (standardizer && standardizer->means().size() != points.front().size()) {
      parse_fail("standardizer dimension does not match the training points", in.line_no());
    }
    KocModel decision = KocModel::restore(std::move(points), kernel, std::move(weights), c, eta, r,
                                          theta);
    auto model = [&]() -> AnyModel {
      if (method == "koc") return std::move(decision);
      const double mu = in.scalar("mu");
      const KernelParams priv_kernel = in.kernel("priv_kernel");
      PointSet priv_points = in.points("priv_points");
      Vector w_star = in.vector("correction_weights");
      return KocPlusModel::restore(std::move(decision), std::move(priv_points), priv_kernel, mu,
                                   std::move(w_star));
    }();
    ModelFile file{std::move(model), seed, target_class, std::move(feature_names),
                   std::move(standardizer)};
    in.expect("end", 0);
    while (!in.at_end()) {
      if (!in.tokens().empty()) parse_fail("trailing content after 'end'", in.line_no() - 1);
    }
    return file;
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("model parse error: ") + e.what());
  }
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  write_text_file_atomic(path, serialize_model(file));
}

ModelFile load_model(const std::filesystem::path& path) { return parse_model(read_text_file(path)); }

std::vector<Label> predict_labels(const ModelFile& file, const PointSet& raw_points) {
  const KocModel& m = decision_model(file.model);
  return classify(predict_scores(file, raw_points), m.theta(), m.r());
}

Vector predict_scores(const ModelFile& file, const PointSet& raw_points) {
  const PointSet pts = file.standardizer ? file.standardizer->apply(raw_points) : raw_points;
  return predict_scores(decision_model(file.model), pts);
}

}  // namespace lupi_occ
