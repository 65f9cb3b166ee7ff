#include "fdia/system_io.hpp"

#include <fstream>
#include <json.hpp>

namespace fdia {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& node, const std::string& name) {
  if (!node.is_array()) {
    throw ConfigError("matrix '" + name + "' must be a nested array");
  }
  if (node.empty()) return Matrix::Zero(0, 0);

  // A flat numeric array is accepted as a column vector.
  if (node.front().is_number()) {
    Matrix out(static_cast<Eigen::Index>(node.size()), 1);
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (!node[i].is_number()) {
        throw ConfigError("matrix '" + name + "' mixes rows and scalars");
      }
      out(static_cast<Eigen::Index>(i), 0) = node[i].get<double>();
    }
    return out;
  }

  const std::size_t cols = node.front().size();
  Matrix out(static_cast<Eigen::Index>(node.size()),
             static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < node.size(); ++i) {
    const json& row = node[i];
    if (!row.is_array() || row.size() != cols) {
      throw ConfigError("matrix '" + name + "' has ragged rows");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number()) {
        throw ConfigError("matrix '" + name + "' contains a non-numeric entry");
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[j].get<double>();
    }
  }
  return out;
}

std::optional<Matrix> maybe_matrix(const json& parent, const std::string& key,
                                   const std::string& scope) {
  if (!parent.contains(key) || parent.at(key).is_null()) return std::nullopt;
  return parse_matrix(parent.at(key), scope + "." + key);
}

Matrix matrix_or_zero(const std::optional<Matrix>& m, Eigen::Index rows,
                      Eigen::Index cols) {
  return m.has_value() ? *m : Matrix::Zero(rows, cols);
}

/// Selection matrices may come as a diagonal vector or a full matrix.
Matrix parse_selection(const std::optional<Matrix>& m, Eigen::Index dim,
                       const std::string& name) {
  if (!m.has_value()) return Matrix::Zero(dim, dim);
  if (m->cols() == 1 && m->rows() == dim) {
    Matrix out = Matrix::Zero(dim, dim);
    out.diagonal() = m->col(0);
    return out;
  }
  if (m->rows() == dim && m->cols() == dim) return *m;
  throw ConfigError("attack." + name + " must have " + std::to_string(dim) +
                    " diagonal entries");
}

}  // namespace

SystemConfig load_system_config(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("top level must be a JSON object");
  if (!root.contains("plant")) throw ConfigError("missing 'plant' section");
  if (!root.contains("horizon")) throw ConfigError("missing 'horizon'");

  SystemConfig config;

  // Plant: A, B, C required to fix the interconnection dimensions.
  const json& plant = root.at("plant");
  const auto A = maybe_matrix(plant, "A", "plant");
  if (!A.has_value()) throw ConfigError("plant.A is required");
  const Eigen::Index n_x = A->rows();
  const auto B = maybe_matrix(plant, "B", "plant");
  const auto C = maybe_matrix(plant, "C", "plant");
  const Eigen::Index n_u = B.has_value() ? B->cols() : 0;
  const Eigen::Index n_m = C.has_value() ? C->rows() : 0;
  const auto C_J = maybe_matrix(plant, "C_J", "plant");
  const auto D_J = maybe_matrix(plant, "D_J", "plant");
  const Eigen::Index n_p =
      C_J.has_value() ? C_J->rows() : (D_J.has_value() ? D_J->rows() : 0);

  try {
    config.plant = Plant(*A, matrix_or_zero(B, n_x, n_u),
                         matrix_or_zero(C, n_m, n_x),
                         matrix_or_zero(C_J, n_p, n_x),
                         matrix_or_zero(D_J, n_p, n_u));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("plant: ") + e.what());
  }

  // Controller: everything optional, defaults to a zero static law.
  const json ctrl = root.value("controller", json::object());
  const auto A_c = maybe_matrix(ctrl, "A_c", "controller");
  const auto B_c = maybe_matrix(ctrl, "B_c", "controller");
  const auto C_c = maybe_matrix(ctrl, "C_c", "controller");
  const auto D_c = maybe_matrix(ctrl, "D_c", "controller");
  const Eigen::Index n_z = A_c.has_value()
                               ? A_c->rows()
                               : (B_c.has_value()
                                      ? B_c->rows()
                                      : (C_c.has_value() ? C_c->cols() : 0));
  try {
    config.controller = StateSpaceSystem(
        matrix_or_zero(A_c, n_z, n_z), matrix_or_zero(B_c, n_z, n_m),
        matrix_or_zero(C_c, n_u, n_z), matrix_or_zero(D_c, n_u, n_m));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("controller: ") + e.what());
  }

  // Detector: same defaulting scheme.
  const json det = root.value("detector", json::object());
  const auto A_e = maybe_matrix(det, "A_e", "detector");
  const auto B_e = maybe_matrix(det, "B_e", "detector");
  const auto K_e = maybe_matrix(det, "K_e", "detector");
  const auto C_e = maybe_matrix(det, "C_e", "detector");
  const auto D_e = maybe_matrix(det, "D_e", "detector");
  const auto E_e = maybe_matrix(det, "E_e", "detector");
  const Eigen::Index n_s =
      A_e.has_value()
          ? A_e->rows()
          : (B_e.has_value() ? B_e->rows()
                             : (K_e.has_value() ? K_e->rows()
                                                : (C_e.has_value() ? C_e->cols()
                                                                   : 0)));
  const Eigen::Index n_r =
      C_e.has_value() ? C_e->rows()
                      : (D_e.has_value() ? D_e->rows()
                                         : (E_e.has_value() ? E_e->rows() : 0));
  try {
    config.detector = Detector(
        matrix_or_zero(A_e, n_s, n_s), matrix_or_zero(B_e, n_s, n_u),
        matrix_or_zero(K_e, n_s, n_m), matrix_or_zero(C_e, n_r, n_s),
        matrix_or_zero(D_e, n_r, n_u), matrix_or_zero(E_e, n_r, n_m));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("detector: ") + e.what());
  }

  const json attack = root.value("attack", json::object());
  config.gamma_u =
      parse_selection(maybe_matrix(attack, "gamma_u", "attack"), n_u, "gamma_u");
  config.gamma_y =
      parse_selection(maybe_matrix(attack, "gamma_y", "attack"), n_m, "gamma_y");

  if (!root.at("horizon").is_number_integer()) {
    throw ConfigError("'horizon' must be an integer");
  }
  config.horizon = root.at("horizon").get<int>();
  if (config.horizon < 1) throw ConfigError("'horizon' must be >= 1");

  if (root.contains("sampling_time") && !root.at("sampling_time").is_null()) {
    const double ts = root.at("sampling_time").get<double>();
    if (ts <= 0.0) throw ConfigError("'sampling_time' must be positive");
    config.sampling_time = ts;
  }
  config.eps_r = root.value("eps_r", 1.0);
  if (config.eps_r <= 0.0) throw ConfigError("'eps_r' must be positive");

  return config;
}

SystemConfig load_system_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open system description: " + path);
  return load_system_config(in);
}

ClosedLoopSystem build_closed_loop(const SystemConfig& config,
                                   std::optional<int> horizon_override) {
  Plant plant = config.plant;
  if (config.sampling_time.has_value()) {
    const auto [A_d, B_d] =
        zoh_discretize(plant.A, plant.B, *config.sampling_time);
    plant.A = A_d;
    plant.B = B_d;
  }

  const int horizon = horizon_override.value_or(config.horizon);
  try {
    const AttackChannel channel(config.gamma_u, config.gamma_y);
    return assemble_closed_loop(plant, config.controller, config.detector,
                                channel, horizon, config.eps_r);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace fdia
