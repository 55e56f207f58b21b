#include "projfol/fractal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace projfol {

Eigen::VectorXd Similarity::apply(const Eigen::VectorXd& x) const {
  if (rotation.size() == 0) return ratio * x + offset;
  return ratio * (rotation * x) + offset;
}

void IfsSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("IFS: chart dimension must be positive");
  if (maps.empty()) throw std::invalid_argument("IFS: no maps");
  for (const Similarity& f : maps) {
    if (!(f.ratio > 0.0 && f.ratio < 1.0)) throw std::invalid_argument("IFS: ratios must lie in (0, 1)");
    if (f.offset.size() != dim) throw std::invalid_argument("IFS: offset has the wrong dimension");
    if (f.rotation.size() != 0) {
      if (f.rotation.rows() != dim || f.rotation.cols() != dim) {
        throw std::invalid_argument("IFS: rotation has the wrong shape");
      }
      const Eigen::MatrixXd gram = f.rotation.transpose() * f.rotation;
      if (!gram.isApprox(Eigen::MatrixXd::Identity(dim, dim), 1e-9)) {
        throw std::invalid_argument("IFS: rotation is not orthogonal");
      }
    }
  }
  if (!weights.empty()) {
    if (weights.size() != maps.size()) throw std::invalid_argument("IFS: one weight per map is required");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("IFS: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("IFS: weights must sum to 1");
  }
  if (box_lo.size() != dim || box_hi.size() != dim) throw std::invalid_argument("IFS: witness box has the wrong dimension");
  if (((box_hi - box_lo).array() <= 0.0).any()) throw std::invalid_argument("IFS: witness box is empty");
  if (similarity_dimension(*this) > dim + 1e-9) throw std::invalid_argument("IFS: similarity dimension exceeds the chart dimension");
}

namespace {

Eigen::VectorXd corner(const IfsSpec& spec, unsigned bits) {
  Eigen::VectorXd c(spec.dim);
  for (int i = 0; i < spec.dim; ++i) c[i] = (bits >> i) & 1u ? spec.box_hi[i] : spec.box_lo[i];
  return c;
}

}  // namespace

bool IfsSpec::satisfies_open_set_condition() const {
  constexpr double tol = 1e-12;
  if (dim > 16) throw std::invalid_argument("IFS: open set check limited to 16 dimensions");
  const unsigned corners = 1u << dim;
  std::vector<Eigen::VectorXd> lo, hi;
  for (const Similarity& f : maps) {
    Eigen::VectorXd a = Eigen::VectorXd::Constant(dim, INFINITY);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(dim, -INFINITY);
    for (unsigned c = 0; c < corners; ++c) {
      const Eigen::VectorXd y = f.apply(corner(*this, c));
      if (((y - box_lo).array() < -tol).any() || ((y - box_hi).array() > tol).any()) return false;
      a = a.cwiseMin(y);
      b = b.cwiseMax(y);
    }
    lo.push_back(a);
    hi.push_back(b);
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (std::size_t j = i + 1; j < maps.size(); ++j) {
      bool separated = false;
      for (int d = 0; d < dim && !separated; ++d) {
        separated = std::min(hi[i][d], hi[j][d]) - std::max(lo[i][d], lo[j][d]) <= tol;
      }
      if (!separated) return false;
    }
  }
  return true;
}

std::vector<double> IfsSpec::effective_weights() const {
  if (!weights.empty()) return weights;
  const double s = similarity_dimension(*this);
  std::vector<double> w;
  for (const Similarity& f : maps) w.push_back(std::pow(f.ratio, s));
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

std::uint64_t IfsSpec::content_hash() const {
  const std::string text = to_json(*this).dump();
  return fnv1a(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

double similarity_dimension(const IfsSpec& spec) {
  auto excess = [&](double s) {
    double sum = 0.0;
    for (const Similarity& f : spec.maps) sum += std::pow(f.ratio, s);
    return sum - 1.0;
  };
  if (excess(0.0) <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) > 0.0) hi *= 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

IfsSpec grid_spec(std::string name, int dim, double ratio, const std::vector<std::vector<double>>& offsets) {
  IfsSpec spec;
  spec.name = std::move(name);
  spec.dim = dim;
  for (const auto& o : offsets) {
    Similarity f;
    f.ratio = ratio;
    f.offset = Eigen::Map<const Eigen::VectorXd>(o.data(), dim);
    spec.maps.push_back(f);
  }
  spec.box_lo = Eigen::VectorXd::Zero(dim);
  spec.box_hi = Eigen::VectorXd::Ones(dim);
  return spec;
}

}  // namespace

IfsSpec middle_cantor(double ratio) {
  if (!(ratio > 0.0 && ratio < 0.5)) throw std::invalid_argument("middle Cantor set needs a ratio in (0, 1/2)");
  std::ostringstream name;
  name << "cantor-alpha:" << ratio;
  return grid_spec(name.str(), 1, ratio, {{0.0}, {1.0 - ratio}});
}

IfsSpec cantor_set() {
  IfsSpec spec = middle_cantor(1.0 / 3.0);
  spec.name = "cantor";
  return spec;
}

IfsSpec cantor_product() {
  const double t = 2.0 / 3.0;
  return grid_spec("cantor-product", 2, 1.0 / 3.0, {{0, 0}, {t, 0}, {0, t}, {t, t}});
}

IfsSpec four_corner_set() {
  return grid_spec("four-corner", 2, 0.25, {{0, 0}, {0.75, 0}, {0, 0.75}, {0.75, 0.75}});
}

IfsSpec unit_square() { return grid_spec("square", 2, 0.5, {{0, 0}, {0.5, 0}, {0, 0.5}, {0.5, 0.5}}); }

IfsSpec menger_sponge() {
  std::vector<std::vector<double>> offsets;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        if ((i == 1) + (j == 1) + (k == 1) >= 2) continue;
        offsets.push_back({i / 3.0, j / 3.0, k / 3.0});
      }
  return grid_spec("menger", 3, 1.0 / 3.0, offsets);
}

std::optional<IfsSpec> preset(const std::string& name) {
  if (name == "cantor") return cantor_set();
  if (name == "cantor-product") return cantor_product();
  if (name == "four-corner") return four_corner_set();
  if (name == "square") return unit_square();
  if (name == "menger") return menger_sponge();
  const std::string prefix = "cantor-alpha:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string arg = name.substr(prefix.size());
    double r = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), r);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) return std::nullopt;
    return middle_cantor(r);
  }
  return std::nullopt;
}

int default_depth(const IfsSpec& spec) {
  double r = 0.0;
  for (const Similarity& f : spec.maps) r = std::max(r, f.ratio);
  const int resolution = static_cast<int>(std::ceil(std::log(1e-12) / std::log(r)));
  // At least 2^52 addresses, so distinct samples practically never coincide.
  const double maps = static_cast<double>(std::max<std::size_t>(spec.maps.size(), 2));
  const int entropy = static_cast<int>(std::ceil(52.0 * std::log(2.0) / std::log(maps)));
  return std::max({1, resolution, entropy});
}

Eigen::MatrixXd generic_frame(int target, int source, std::uint64_t seed) {
  if (source > target) throw std::invalid_argument("generic_frame: source exceeds target dimension");
  Rng rng(seed, 0x6672616d65ull);
  Eigen::MatrixXd g(target, source);
  for (int j = 0; j < source; ++j)
    for (int i = 0; i < target; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(target, source);
}

nlohmann::json to_json(const IfsSpec& spec) {
  using nlohmann::json;
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json maps = json::array();
  for (const Similarity& f : spec.maps) {
    json m = {{"ratio", f.ratio}, {"offset", vec(f.offset)}};
    if (f.rotation.size() != 0) {
      json rows = json::array();
      for (Eigen::Index i = 0; i < f.rotation.rows(); ++i) rows.push_back(vec(f.rotation.row(i).transpose()));
      m["rotation"] = rows;
    }
    maps.push_back(m);
  }
  json j = {{"name", spec.name}, {"dim", spec.dim}, {"maps", maps}, {"box", {{"lo", vec(spec.box_lo)}, {"hi", vec(spec.box_hi)}}}};
  if (!spec.weights.empty()) j["weights"] = spec.weights;
  return j;
}

IfsSpec ifs_from_json(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  IfsSpec spec;
  spec.name = j.value("name", std::string("custom"));
  spec.dim = j.at("dim").get<int>();
  for (const auto& m : j.at("maps")) {
    Similarity f;
    f.ratio = m.at("ratio").get<double>();
    f.offset = vec(m.at("offset"));
    if (m.contains("rotation")) {
      const auto& rows = m.at("rotation");
      f.rotation.resize(static_cast<Eigen::Index>(rows.size()), spec.dim);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Eigen::VectorXd row = vec(rows[i]);
        if (row.size() != spec.dim) throw std::invalid_argument("IFS: rotation row has the wrong length");
        f.rotation.row(static_cast<Eigen::Index>(i)) = row.transpose();
      }
    }
    spec.maps.push_back(f);
  }
  if (j.contains("weights")) spec.weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("box")) {
    spec.box_lo = vec(j.at("box").at("lo"));
    spec.box_hi = vec(j.at("box").at("hi"));
  } else {
    spec.box_lo = Eigen::VectorXd::Zero(spec.dim);
    spec.box_hi = Eigen::VectorXd::Ones(spec.dim);
  }
  spec.validate();
  return spec;
}

ChartMeasure ifs_attractor_sample(Rng& rng, const IfsSpec& spec, int depth, std::size_t count, SamplingMode mode) {
  if (depth < 1) throw std::invalid_argument("ifs_attractor_sample: depth must be at least 1");
  const std::vector<double> w = spec.effective_weights();
  std::vector<double> cumulative(w.size());
  std::partial_sum(w.begin(), w.end(), cumulative.begin());
  auto pick = [&] {
    const double u = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(w.size()) - 1));
  };
  const Eigen::VectorXd start = 0.5 * (spec.box_lo + spec.box_hi);

  ChartMeasure out;
  out.points.reserve(count);
  if (mode == SamplingMode::Address) {
    std::vector<std::size_t> address(static_cast<std::size_t>(depth));
    for (std::size_t p = 0; p < count; ++p) {
      for (auto& a : address) a = pick();
      Eigen::VectorXd x = start;
      for (auto it = address.rbegin(); it != address.rend(); ++it) x = spec.maps[*it].apply(x);
      out.points.push_back(std::move(x));
    }
  } else {
    Eigen::VectorXd x = start;
    for (int i = 0; i < 100; ++i) x = spec.maps[pick()].apply(x);
    for (std::size_t p = 0; p < count; ++p) {
      x = spec.maps[pick()].apply(x);
      out.points.push_back(x);
    }
  }
  out.weights.assign(count, count ? 1.0 / static_cast<double>(count) : 0.0);
  return out;
}

ChartMeasure affine_image(const ChartMeasure& m, const Eigen::MatrixXd& linear, const Eigen::VectorXd& shift) {
  ChartMeasure out;
  out.weights = m.weights;
  out.points.reserve(m.size());
  for (const Eigen::VectorXd& x : m.points) out.points.push_back(shift + linear * x);
  return out;
}

int Chart::chart_dim() const {
  if (kind == ChartKind::Affine) return field.delta() * n;
  return field.is_real() ? n - 1 : 2 * n - 1;
}

ProjectivePoint Chart::map(const Eigen::VectorXd& x) const {
  if (x.size() != chart_dim()) throw GeometryError("chart: point has the wrong dimension");
  if (kind == ChartKind::Stereographic) return stereographic_to_sphere(x, field);
  Vector z(n);
  for (int j = 0; j < n; ++j) z[j] = field.is_real() ? Scalar(x[j]) : Scalar(x[2 * j], x[2 * j + 1]);
  return affine_chart(z, field);
}

std::string Chart::name() const { return kind == ChartKind::Affine ? "affine" : "stereographic"; }

ProjectiveMeasure push_measure(const ChartMeasure& m, const Chart& chart) {
  ProjectiveMeasure out;
  out.weights = m.weights;
  out.points.reserve(m.size());
  for (const Eigen::VectorXd& x : m.points) out.points.push_back(chart.map(x));
  return out;
}

namespace {

void write_header(std::ostream& out, const CloudHeader& h) {
  out << "# chart=" << h.chart << "\n# field=" << h.field << "\n# n=" << h.n << "\n# seed=" << h.seed
      << "\n# spec_hash=" << h.spec_hash << '\n';
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t comma = std::min(line.find(',', pos), line.size());
    double v = 0.0;
    const char* first = line.data() + pos;
    const char* last = line.data() + comma;
    while (first < last && *first == ' ') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw std::runtime_error("point cloud CSV: bad number in '" + line + "'");
    values.push_back(v);
    pos = comma + 1;
  }
  return values;
}

}  // namespace

void write_point_cloud_csv(std::ostream& out, const ChartMeasure& m, const CloudHeader& header) {
  write_header(out, header);
  const int dim = m.size() ? static_cast<int>(m.points.front().size()) : 0;
  out << "weight";
  for (int i = 0; i < dim; ++i) out << ",x" << i;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t p = 0; p < m.size(); ++p) {
    out << m.weights[p];
    for (int i = 0; i < dim; ++i) out << ',' << m.points[p][i];
    out << '\n';
  }
  out.precision(old_precision);
}

void write_point_cloud_csv(std::ostream& out, const ProjectiveMeasure& m, const CloudHeader& header) {
  write_header(out, header);
  const int dim = m.size() ? m.points.front().ambient_dim() : 0;
  out << "weight";
  for (int i = 0; i < dim; ++i) out << ",re" << i << ",im" << i;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t p = 0; p < m.size(); ++p) {
    out << m.weights[p];
    for (int i = 0; i < dim; ++i) out << ',' << m.points[p].rep()[i].real() << ',' << m.points[p].rep()[i].imag();
    out << '\n';
  }
  out.precision(old_precision);
}

ChartMeasure read_point_cloud_csv(std::istream& in, CloudHeader* header) {
  ChartMeasure m;
  std::string line;
  std::optional<Eigen::Index> dim;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!header) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      if (key == "chart") header->chart = value;
      else if (key == "field") header->field = value;
      else if (key == "n") header->n = std::stoi(value);
      else if (key == "seed") header->seed = std::stoull(value);
      else if (key == "spec_hash") header->spec_hash = value;
      continue;
    }
    if (line.rfind("weight", 0) == 0) continue;
    const std::vector<double> row = parse_row(line);
    if (row.size() < 2) throw std::runtime_error("point cloud CSV: row without coordinates");
    const auto d = static_cast<Eigen::Index>(row.size() - 1);
    if (dim && *dim != d) throw std::runtime_error("point cloud CSV: ragged rows");
    dim = d;
    m.weights.push_back(row[0]);
    m.points.emplace_back(Eigen::Map<const Eigen::VectorXd>(row.data() + 1, d));
  }
  return m;
}

}  // namespace projfol
