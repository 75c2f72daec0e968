#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qsens/error.hpp"
#include "qsens/states.hpp"

namespace qsens {

ComplexMatrix parse_matrix_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j.contains("re")) {
    throw Error(Errc::InvalidArgument, "matrix JSON needs \"dim\" and \"re\"");
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "dim" && key != "re" && key != "im") {
      throw Error(Errc::InvalidArgument, "unknown key \"" + key + "\" in matrix JSON");
    }
  }
  if (!j["dim"].is_number_integer()) throw Error(Errc::InvalidArgument, "\"dim\" must be an integer");
  const auto dim = j["dim"].get<long long>();
  if (dim < 1 || dim > static_cast<long long>(kMaxDim)) {
    throw Error(Errc::DimensionMismatch, "\"dim\" = " + std::to_string(dim));
  }
  const auto n = static_cast<std::size_t>(dim);

  ComplexMatrix m(n);
  auto read_part = [&](const char* key, bool imaginary) {
    const auto& rows = j[key];
    if (!rows.is_array() || rows.size() != n) {
      throw Error(Errc::DimensionMismatch, std::string("\"") + key + "\" must have " + std::to_string(n) + " rows");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!rows[i].is_array() || rows[i].size() != n) {
        throw Error(Errc::DimensionMismatch, std::string("\"") + key + "\" row " + std::to_string(i) +
                                                 " must have " + std::to_string(n) + " entries");
      }
      for (std::size_t k = 0; k < n; ++k) {
        if (!rows[i][k].is_number()) throw Error(Errc::InvalidArgument, "non-numeric matrix entry");
        const double x = rows[i][k].get<double>();
        if (imaginary) {
          m(i, k).imag(x);
        } else {
          m(i, k).real(x);
        }
      }
    }
  };
  read_part("re", false);
  if (j.contains("im")) read_part("im", true);
  return m;
}

std::string matrix_to_json(const ComplexMatrix& m, int precision) {
  std::ostringstream os;
  os.precision(precision);
  auto part = [&](bool imaginary) {
    os << '[';
    for (std::size_t i = 0; i < m.dim(); ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t k = 0; k < m.dim(); ++k) {
        os << (k ? ", " : "") << (imaginary ? m(i, k).imag() : m(i, k).real());
      }
      os << ']';
    }
    os << ']';
  };
  os << "{\"dim\": " << m.dim() << ", \"re\": ";
  part(false);
  os << ", \"im\": ";
  part(true);
  os << '}';
  return os.str();
}

DensityMatrix read_density_matrix_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return DensityMatrix(parse_matrix_json(buf.str()));
}

}  // namespace qsens
