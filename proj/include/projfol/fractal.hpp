#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "projfol/projective.hpp"
#include "projfol/sampling.hpp"

namespace projfol {

/// x -> ratio * rotation * x + offset on R^m.
struct Similarity {
  double ratio = 0.5;
  Eigen::VectorXd offset;
  Eigen::MatrixXd rotation;  // empty means identity

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

/// Iterated function system of similarities on the chart R^m.
struct IfsSpec {
  std::string name;
  int dim = 1;
  std::vector<Similarity> maps;
  /// Empty means natural weights r_i^s.
  std::vector<double> weights;
  /// Open-set-condition witness box [lo, hi].
  Eigen::VectorXd box_lo;
  Eigen::VectorXd box_hi;

  /// Throws std::invalid_argument on malformed specs (bad ratios, weights,
  /// dimensions, or similarity dimension above m).
  void validate() const;
  /// Checks that every map sends the witness box into itself (corners) and
  /// that the image boxes have pairwise disjoint interiors.
  bool satisfies_open_set_condition() const;
  std::vector<double> effective_weights() const;
  std::uint64_t content_hash() const;
};

/// Root of sum r_i^s = 1, by bisection to 1e-12.
double similarity_dimension(const IfsSpec& spec);

// Preset families; each attractor lies in [0, 1]^m before placement.
IfsSpec middle_cantor(double ratio);  // two maps of the given ratio
IfsSpec cantor_set();                 // middle thirds
IfsSpec cantor_product();             // middle thirds squared
IfsSpec four_corner_set();            // ratio 1/4, dimension 1
IfsSpec unit_square();                // four maps of ratio 1/2, dimension 2
IfsSpec menger_sponge();              // twenty maps of ratio 1/3

/// Looks up a preset by name: cantor, cantor-product, four-corner, square,
/// menger, cantor-alpha:<ratio>.
std::optional<IfsSpec> preset(const std::string& name);

/// Smallest depth whose largest cylinder has diameter factor below 1e-12 and
/// which offers at least 2^52 distinct addresses.
int default_depth(const IfsSpec& spec);

/// Deterministic generic orthonormal frame (target x source).
Eigen::MatrixXd generic_frame(int target, int source, std::uint64_t seed);

nlohmann::json to_json(const IfsSpec& spec);
IfsSpec ifs_from_json(const nlohmann::json& j);

template <class Point>
struct EmpiricalMeasure {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  /// Sum of weights is 1 within 1e-12 and every weight is nonnegative.
  bool is_normalized() const {
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) return false;
      sum += w;
    }
    return weights.size() == points.size() && std::abs(sum - 1.0) <= 1e-12;
  }
};

using ChartMeasure = EmpiricalMeasure<Eigen::VectorXd>;
using ProjectiveMeasure = EmpiricalMeasure<ProjectivePoint>;

enum class SamplingMode {
  /// Independent random addresses of the given depth (i.i.d. samples).
  Address,
  /// One chaos-game orbit after a burn-in of 100 steps.
  ChaosGame,
};

/// Samples `count` points of the self-similar measure with the spec's
/// weights; every point receives weight 1/count.
ChartMeasure ifs_attractor_sample(Rng& rng, const IfsSpec& spec, int depth, std::size_t count,
                                  SamplingMode mode = SamplingMode::Address);

/// x -> shift + linear * x applied to every point; weights are kept.
ChartMeasure affine_image(const ChartMeasure& m, const Eigen::MatrixXd& linear, const Eigen::VectorXd& shift);

enum class ChartKind { Affine, Stereographic };

/// Chart from R^m onto P^n_K (affine) or onto the sphere S of P^n_K
/// (stereographic). For K = C consecutive real coordinates pair into complex
/// ones.
struct Chart {
  ChartKind kind = ChartKind::Affine;
  Field field;
  int n = 2;

  /// Real dimension m of the chart domain.
  int chart_dim() const;
  ProjectivePoint map(const Eigen::VectorXd& x) const;
  std::string name() const;
};

ProjectiveMeasure push_measure(const ChartMeasure& m, const Chart& chart);

struct CloudHeader {
  std::string chart = "none";
  std::string field = "R";
  int n = 0;
  std::uint64_t seed = 0;
  std::string spec_hash;
};

/// CSV with `#`-prefixed key=value header lines, then rows weight,x0,x1,...
void write_point_cloud_csv(std::ostream& out, const ChartMeasure& m, const CloudHeader& header);
ChartMeasure read_point_cloud_csv(std::istream& in, CloudHeader* header = nullptr);

/// Same layout for projective clouds; columns are re/im pairs of the unit
/// representative.
void write_point_cloud_csv(std::ostream& out, const ProjectiveMeasure& m, const CloudHeader& header);

}  // namespace projfol
