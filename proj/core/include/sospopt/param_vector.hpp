#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace sospopt {

/// One named, shaped slice of a flat parameter vector. Matrix segments are
/// stored column-major, matching Eigen's default layout.
struct Segment {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 1;

  Eigen::Index size() const { return rows * cols; }
};

struct SegmentSpec {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 1;
};

/// Flat real vector with named, shaped segments; the universal optimizer
/// state. Segments are laid out back to back, so they are disjoint and cover
/// the vector exactly by construction.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(const std::vector<SegmentSpec>& specs);

  /// Single unnamed-segment vector (segment name "x").
  static ParamVector flat(const Eigen::VectorXd& values,
                          const std::string& name = "x");

  Eigen::Index dim() const { return data_.size(); }
  const Eigen::VectorXd& data() const { return data_; }
  Eigen::VectorXd& data() { return data_; }

  bool has_segment(const std::string& name) const;
  const Segment& segment(const std::string& name) const;
  const std::vector<Segment>& segments() const { return segments_; }

  Eigen::Map<Eigen::MatrixXd> matrix(const std::string& name);
  Eigen::Map<const Eigen::MatrixXd> matrix(const std::string& name) const;
  Eigen::Map<Eigen::VectorXd> vector(const std::string& name);
  Eigen::Map<const Eigen::VectorXd> vector(const std::string& name) const;

  void set_matrix(const std::string& name, const Eigen::MatrixXd& value);
  void set_vector(const std::string& name, const Eigen::VectorXd& value);

 private:
  Eigen::VectorXd data_;
  std::vector<Segment> segments_;
};

}  // namespace sospopt
