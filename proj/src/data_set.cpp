#include "pepkit/data_set.hpp"

#include "pepkit/error.hpp"

namespace pepkit {

DataSet::DataSet(int dimension) : d_(dimension) {
  if (dimension < 1) throw InvalidArgument("dimension must be at least 1");
}

DataSet::DataSet(int dimension, std::vector<DataTriple> triples)
    : DataSet(dimension) {
  for (auto& t : triples) add(std::move(t));
}

void DataSet::add(DataTriple t) {
  if (t.x.size() != d_ || t.g.size() != d_)
    throw InvalidArgument("triple '" + t.id + "' has dimension " +
                          std::to_string(t.x.size()) + "/" +
                          std::to_string(t.g.size()) + ", expected " +
                          std::to_string(d_));
  if (find(t.id) >= 0) throw InvalidArgument("duplicate triple id '" + t.id + "'");
  triples_.push_back(std::move(t));
}

int DataSet::find(const std::string& id) const {
  for (std::size_t i = 0; i < triples_.size(); ++i)
    if (triples_[i].id == id) return static_cast<int>(i);
  return -1;
}

nlohmann::json vector_to_json(const Vector& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from_json(const nlohmann::json& j) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  auto values = j.get<std::vector<double>>();
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

nlohmann::json DataSet::to_json() const {
  nlohmann::json out;
  out["d"] = d_;
  out["triples"] = nlohmann::json::array();
  for (const auto& t : triples_)
    out["triples"].push_back(
        {{"id", t.id}, {"x", vector_to_json(t.x)}, {"g", vector_to_json(t.g)}, {"f", t.f}});
  return out;
}

DataSet DataSet::from_json(const nlohmann::json& j) {
  try {
    DataSet set(j.at("d").get<int>());
    int counter = 0;
    for (const auto& item : j.at("triples")) {
      DataTriple t;
      if (item.contains("id"))
        t.id = item["id"].is_string() ? item["id"].get<std::string>()
                                      : item["id"].dump();
      else
        t.id = std::to_string(counter);
      t.x = vector_from_json(item.at("x"));
      t.g = vector_from_json(item.at("g"));
      t.f = item.at("f").get<double>();
      set.add(std::move(t));
      ++counter;
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed data set: ") + e.what());
  }
}

}  // namespace pepkit
