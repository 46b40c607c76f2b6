#include "nullctl/config.hpp"

#include "nullctl/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace nullctl {

using nlohmann::json;

namespace {

Rational read_rational(const json& v, const std::string& where) {
  if (v.is_string()) return parse_decimal(v.get<std::string>());
  if (v.is_number()) return parse_decimal(v.dump());
  throw SpecError(where + ": expected a decimal string");
}

std::vector<Rational> read_vector(const json& doc, const char* key, std::size_t expected, bool required) {
  if (!doc.contains(key)) {
    if (required) throw SpecError(std::string("missing key '") + key + "'");
    return std::vector<Rational>(expected, Rational(0));
  }
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw SpecError(std::string("'") + key + "' must be an array");
  if (expected != 0 && arr.size() != expected) {
    throw SpecError(std::string("'") + key + "' must have " + std::to_string(expected) + " entries");
  }
  std::vector<Rational> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    out.push_back(read_rational(arr[k], std::string(key) + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Matrix<Rational> read_matrix(const json& doc, const char* key, std::size_t rows, std::size_t cols, bool required) {
  if (!doc.contains(key)) {
    if (required) throw SpecError(std::string("missing key '") + key + "'");
    return Matrix<Rational>(rows, cols, Rational(0));
  }
  const json& arr = doc.at(key);
  if (!arr.is_array() || arr.size() != rows) {
    throw SpecError(std::string("'") + key + "' must have one row per class");
  }
  Matrix<Rational> out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!arr[i].is_array() || arr[i].size() != cols) {
      throw SpecError(std::string("'") + key + "' row " + std::to_string(i + 1) + " must have one entry per station");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out(i, j) = read_rational(arr[i][j], std::string(key) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return out;
}

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(to_double(r));
  return out;
}

}  // namespace

NetworkSpec parse_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("config must be a JSON object");

  NetworkSpec spec;
  spec.lambda = read_vector(doc, "lambda", 0, true);
  spec.nu = read_vector(doc, "nu", 0, true);
  spec.class_count = spec.lambda.size();
  spec.station_count = spec.nu.size();
  const std::size_t I = spec.class_count;
  const std::size_t J = spec.station_count;
  if (doc.contains("classes") && doc.at("classes").get<std::size_t>() != I) {
    throw SpecError("'classes' disagrees with the length of 'lambda'");
  }
  if (doc.contains("stations") && doc.at("stations").get<std::size_t>() != J) {
    throw SpecError("'stations' disagrees with the length of 'nu'");
  }
  spec.mu = read_matrix(doc, "mu", I, J, true);
  spec.lambda_hat = to_doubles(read_vector(doc, "lambda_hat", I, false));
  spec.mu_hat = read_matrix(doc, "mu_hat", I, J, false).map<double>([](const Rational& r) { return to_double(r); });
  spec.x0_hat = to_doubles(read_vector(doc, "x0_hat", I, false));

  if (doc.contains("interarrival")) {
    const json& laws = doc.at("interarrival");
    if (!laws.is_array() || laws.size() != I) throw SpecError("'interarrival' must have one entry per class");
    for (const auto& law : laws) spec.interarrival_law.push_back(InterarrivalLaw::parse(law.get<std::string>()));
  } else {
    spec.interarrival_law.assign(I, InterarrivalLaw::exponential());
  }
  if (doc.contains("scv")) {
    spec.scv = to_doubles(read_vector(doc, "scv", I, true));
  } else {
    for (const auto& law : spec.interarrival_law) spec.scv.push_back(law.scv());
  }
  return spec;
}

NetworkSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string dump_spec(const NetworkSpec& spec) {
  auto str_vec = [](const auto& v) {
    json arr = json::array();
    for (const auto& x : v) {
      if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Rational>) {
        arr.push_back(to_string(x));
      } else {
        std::ostringstream os;
        os.precision(17);
        os << x;
        arr.push_back(os.str());
      }
    }
    return arr;
  };
  auto str_mat = [&](const auto& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::vector<std::decay_t<decltype(m(0, 0))>> row;
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(str_vec(row));
    }
    return rows;
  };
  json doc;
  doc["lambda"] = str_vec(spec.lambda);
  doc["mu"] = str_mat(spec.mu);
  doc["nu"] = str_vec(spec.nu);
  doc["lambda_hat"] = str_vec(spec.lambda_hat);
  doc["mu_hat"] = str_mat(spec.mu_hat);
  doc["x0_hat"] = str_vec(spec.x0_hat);
  doc["scv"] = str_vec(spec.scv);
  json laws = json::array();
  for (const auto& law : spec.interarrival_law) laws.push_back(law.describe());
  doc["interarrival"] = laws;
  return doc.dump(2);
}

}  // namespace nullctl
