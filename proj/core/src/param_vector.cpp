#include "sospopt/param_vector.hpp"

#include <stdexcept>

namespace sospopt {

ParamVector::ParamVector(const std::vector<SegmentSpec>& specs) {
  Eigen::Index offset = 0;
  segments_.reserve(specs.size());
  for (const auto& s : specs) {
    if (s.name.empty()) throw std::invalid_argument("segment name must be non-empty");
    if (s.rows < 0 || s.cols < 0)
      throw std::invalid_argument("segment shape must be nonnegative: " + s.name);
    if (has_segment(s.name))
      throw std::invalid_argument("duplicate segment name: " + s.name);
    segments_.push_back(Segment{s.name, offset, s.rows, s.cols});
    offset += s.rows * s.cols;
  }
  data_ = Eigen::VectorXd::Zero(offset);
}

ParamVector ParamVector::flat(const Eigen::VectorXd& values, const std::string& name) {
  ParamVector p({{name, values.size(), 1}});
  p.data_ = values;
  return p;
}

bool ParamVector::has_segment(const std::string& name) const {
  for (const auto& s : segments_)
    if (s.name == name) return true;
  return false;
}

const Segment& ParamVector::segment(const std::string& name) const {
  for (const auto& s : segments_)
    if (s.name == name) return s;
  throw std::invalid_argument("no such segment: " + name);
}

Eigen::Map<Eigen::MatrixXd> ParamVector::matrix(const std::string& name) {
  const Segment& s = segment(name);
  return {data_.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<const Eigen::MatrixXd> ParamVector::matrix(const std::string& name) const {
  const Segment& s = segment(name);
  return {data_.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<Eigen::VectorXd> ParamVector::vector(const std::string& name) {
  const Segment& s = segment(name);
  return {data_.data() + s.offset, s.size()};
}

Eigen::Map<const Eigen::VectorXd> ParamVector::vector(const std::string& name) const {
  const Segment& s = segment(name);
  return {data_.data() + s.offset, s.size()};
}

void ParamVector::set_matrix(const std::string& name, const Eigen::MatrixXd& value) {
  auto view = matrix(name);
  if (value.rows() != view.rows() || value.cols() != view.cols())
    throw std::invalid_argument("shape mismatch writing segment: " + name);
  view = value;
}

void ParamVector::set_vector(const std::string& name, const Eigen::VectorXd& value) {
  auto view = vector(name);
  if (value.size() != view.size())
    throw std::invalid_argument("shape mismatch writing segment: " + name);
  view = value;
}

}  // namespace sospopt
