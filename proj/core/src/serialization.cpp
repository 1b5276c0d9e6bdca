#include "chainzono/serialization.hpp"

#include "chainzono/error.hpp"

namespace chainzono {

namespace {

Json row_major(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Eigen::MatrixXd matrix_from_row_major(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols) {
    throw InvalidArgument("zonotope record: matrix has wrong element count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j.at(i * cols + k).get<double>();
  return m;
}

}  // namespace

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json to_json(const Zonotope& Z) {
  Json j;
  j["n"] = Z.dim();
  j["n_g"] = Z.num_generators();
  j["n_c"] = Z.num_constraints();
  j["G"] = row_major(Z.G());
  j["c"] = vector_to_json(Z.c());
  j["A"] = row_major(Z.A());
  j["b"] = vector_to_json(Z.b());
  j["lo"] = vector_to_json(Z.xi_lo());
  j["hi"] = vector_to_json(Z.xi_hi());
  return j;
}

Zonotope zonotope_from_json(const Json& j) {
  const auto n = j.at("n").get<Eigen::Index>();
  const auto ng = j.at("n_g").get<Eigen::Index>();
  const auto nc = j.at("n_c").get<Eigen::Index>();
  return make_zonotope(matrix_from_row_major(j.at("G"), n, ng), vector_from_json(j.at("c")),
                       matrix_from_row_major(j.at("A"), nc, ng), vector_from_json(j.at("b")),
                       vector_from_json(j.at("lo")), vector_from_json(j.at("hi")));
}

Json to_json(const IntervalHull& hull) {
  Json j;
  j["lo"] = vector_to_json(hull.lo);
  j["hi"] = vector_to_json(hull.hi);
  return j;
}

}  // namespace chainzono
