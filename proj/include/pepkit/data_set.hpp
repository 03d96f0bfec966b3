#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"

namespace pepkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One oracle answer: point, (sub)gradient, function value.
struct DataTriple {
  std::string id;
  Vector x;
  Vector g;
  double f = 0.0;
};

// Value and gradient returned by a first-order oracle.
struct FunctionValue {
  double value = 0.0;
  Vector gradient;
};

// Finite set of triples sharing one dimension, with unique ids.
class DataSet {
 public:
  explicit DataSet(int dimension = 1);
  DataSet(int dimension, std::vector<DataTriple> triples);

  void add(DataTriple t);

  int dimension() const { return d_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const DataTriple& operator[](std::size_t i) const { return triples_[i]; }
  const std::vector<DataTriple>& triples() const { return triples_; }
  auto begin() const { return triples_.begin(); }
  auto end() const { return triples_.end(); }

  // Index of the triple with the given id, or -1.
  int find(const std::string& id) const;

  nlohmann::json to_json() const;
  static DataSet from_json(const nlohmann::json& j);

 private:
  int d_;
  std::vector<DataTriple> triples_;
};

nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

}  // namespace pepkit
