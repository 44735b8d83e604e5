#include "gnl/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace gnl {

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("model json: matrix must be a nested array");
  const auto rows = j.size();
  const auto cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw std::invalid_argument("model json: ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          j[i][c].get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Eigen::MatrixXd> matrices_from_json(const nlohmann::json& j) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(matrix_from_json(e));
  return out;
}

}  // namespace

nlohmann::json model_to_json(const CoeffModel& m) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int k = 0; k < m.size(); ++k) coeffs.push_back(matrix_to_json(m.coeff(k)));
  return nlohmann::json{{"coeffs", std::move(coeffs)}};
}

CoeffModel model_from_json(const nlohmann::json& j) {
  if (j.contains("coeffs")) return build_model(matrices_from_json(j["coeffs"]));
  if (!j.contains("generator"))
    throw std::invalid_argument(
        "model json: expected 'coeffs' or 'generator' form");

  GenParams p;
  if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("params")) {
    const auto& q = j["params"];
    if (q.contains("d")) p.d = q["d"].get<int>();
    if (q.contains("dim")) p.dim = q["dim"].get<int>();
    if (q.contains("r")) p.r = q["r"].get<int>();
    if (q.contains("d1")) p.d1 = q["d1"].get<int>();
    if (q.contains("seed")) p.seed = q["seed"].get<std::uint64_t>();
    if (q.contains("cells")) {
      for (const auto& cell : q["cells"]) {
        std::vector<std::pair<int, int>> c;
        for (const auto& pos : cell) {
          if (!pos.is_array() || pos.size() != 2)
            throw std::invalid_argument("model json: cell position not a pair");
          c.emplace_back(pos[0].get<int>(), pos[1].get<int>());
        }
        p.cells.push_back(std::move(c));
      }
    }
    if (q.contains("covariances"))
      p.covariances = matrices_from_json(q["covariances"]);
    if (q.contains("blocks")) p.blocks = matrices_from_json(q["blocks"]);
  }
  return gen_named(j["generator"].get<std::string>(), p);
}

CoeffModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path.string());
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

void save_model_file(const CoeffModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::invalid_argument("cannot write model file: " + path.string());
  out << model_to_json(m).dump(2) << '\n';
}

}  // namespace gnl
