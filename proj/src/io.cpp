#include "tcid/io.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tcid {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::size_t parse_count(std::string_view value, std::size_t line) {
  std::size_t out = 0;
  if (value.empty()) throw ParseError("empty header value", line);
  for (char c : value) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError("header value '" + std::string(value) + "' is not a count", line);
    }
    out = out * 10 + static_cast<std::size_t>(c - '0');
  }
  return out;
}

struct Header {
  std::optional<std::size_t> dim;
  std::optional<std::size_t> count;
};

Header parse_header(std::string_view body, std::size_t line) {
  Header h;
  std::istringstream tokens{std::string(body)};
  std::string token;
  while (tokens >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = token.substr(0, eq);
    const std::string_view value = std::string_view(token).substr(eq + 1);
    if (key == "dim") h.dim = parse_count(value, line);
    if (key == "count") h.count = parse_count(value, line);
  }
  return h;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_double(v(i)));
  return out;
}

}  // namespace

std::vector<Vector> read_observations(std::istream& in) {
  std::vector<Vector> out;
  Header header;
  bool seen_data = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (!seen_data && !header.dim && !header.count) {
        header = parse_header(line.substr(1), line_no);
      }
      continue;
    }
    seen_data = true;
    std::vector<Real> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::string_view field =
          line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      try {
        fields.push_back(parse_real(field));
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const std::size_t width = header.dim ? *header.dim : (out.empty() ? fields.size() : static_cast<std::size_t>(out.front().size()));
    if (fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Vector v(static_cast<Eigen::Index>(fields.size()));
    for (std::size_t i = 0; i < fields.size(); ++i) v(static_cast<Eigen::Index>(i)) = fields[i];
    out.push_back(std::move(v));
  }
  if (in.bad()) throw IoError("read failure");
  if (header.dim && *header.dim == 0) throw ParseError("header declares dim=0", 1);
  if (header.count && *header.count != out.size()) {
    throw ParseError("header declares count=" + std::to_string(*header.count) + " but " +
                         std::to_string(out.size()) + " observations follow",
                     line_no);
  }
  if (out.empty()) throw ParseError("no observations", line_no);
  return out;
}

std::vector<Vector> read_observations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_observations(in);
}

void write_observations(std::ostream& out, const std::vector<Vector>& observations,
                        unsigned digits) {
  if (observations.empty()) throw ContractViolation("no observations to write");
  out << "# dim=" << observations.front().size() << " count=" << observations.size() << '\n';
  for (const auto& v : observations) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) out << ',';
      out << format_real(v(i), digits);
    }
    out << '\n';
  }
}

void write_observations_file(const std::string& path, const std::vector<Vector>& observations,
                             unsigned digits) {
  std::ostringstream text;
  write_observations(text, observations, digits);
  write_text_file(path, text.str());
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_double(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a non-empty array", 0);
  if (j.front().is_array()) {
    const std::size_t cols = j.front().size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
      if (!j[r].is_array() || j[r].size() != cols) throw ParseError("ragged matrix rows", 0);
      for (std::size_t c = 0; c < cols; ++c) {
        if (!j[r][c].is_number()) throw ParseError("non-numeric matrix entry", 0);
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
      }
    }
    return m;
  }
  std::size_t n = 0;
  while (n * n < j.size()) ++n;
  if (n * n != j.size()) throw ParseError("flat matrix length is not a perfect square", 0);
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("non-numeric matrix entry", 0);
    m(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = j[i].get<double>();
  }
  return m;
}

Json result_to_json(const Identification& id) {
  const auto& r = id.result;
  Json out;
  out["dim"] = r.lattice.ambient_dim();
  out["num_observations"] = r.num_observations;
  out["determinant"] = to_double(r.determinant);
  out["steps"] = r.steps_estimate ? vector_to_json(*r.steps_estimate) : Json(nullptr);
  out["transform"] = r.transform_estimate ? matrix_to_json(*r.transform_estimate) : Json(nullptr);
  out["orthogonal_decomposition_ok"] = r.orthogonal_decomposition_ok;
  if (id.match) {
    const auto& m = *id.match;
    Json match;
    match["kind"] = m.known ? std::string(to_string(m.best.kind)) : std::string("unknown");
    match["closest"] = std::string(to_string(m.best.kind));
    match["max_abs_error"] = m.max_abs_error;
    match["signed_permutation"] = m.signed_permutation;
    Json candidates = Json::array();
    for (const auto& c : m.candidates) {
      candidates.push_back({{"kind", std::string(to_string(c.spec.kind))},
                            {"max_abs_error", c.max_abs_error}});
    }
    match["candidates"] = std::move(candidates);
    out["dictionary_match"] = std::move(match);
  } else {
    out["dictionary_match"] = nullptr;
  }
  out["diagnostics"] = {{"swap_count", r.swap_count},
                        {"max_membership_residual", to_double(r.max_membership_residual)}};
  // Columns of the identified basis, one per row.
  out["basis"] = matrix_to_json(r.lattice.columns().transpose());
  return out;
}

Json rank_deficiency_to_json(const RankDeficiencyError& e) {
  Json out;
  out["error"] = "rank_deficiency";
  out["message"] = e.what();
  out["dim"] = e.ambient_dim();
  out["rank"] = e.rank();
  out["unidentifiable_dimensions"] = e.deficiency();
  out["unreached_directions"] = e.unreached_directions();
  return out;
}

Json truth_to_json(const GroundTruth& t) {
  Json out;
  out["transform_kind"] = std::string(to_string(t.transform.kind));
  out["transform_seed"] = t.transform.seed;
  out["dim"] = t.transform.size;
  out["transform"] = matrix_to_json(t.transform_matrix);
  out["steps"] = vector_to_json(t.steps);
  out["source"] = {{"correlation", t.source.correlation},
                   {"variance", t.source.variance},
                   {"seed", t.source.seed}};
  out["count"] = t.count;
  out["seed"] = t.seed;
  return out;
}

GroundTruth truth_from_json(const Json& j) {
  try {
    GroundTruth t;
    t.transform.kind = parse_transform_kind(j.at("transform_kind").get<std::string>());
    t.transform.seed = j.at("transform_seed").get<std::uint64_t>();
    t.transform.size = j.at("dim").get<std::size_t>();
    t.transform_matrix = matrix_from_json(j.at("transform"));
    const auto& steps = j.at("steps");
    t.steps.resize(static_cast<Eigen::Index>(steps.size()));
    for (std::size_t i = 0; i < steps.size(); ++i) {
      t.steps(static_cast<Eigen::Index>(i)) = steps[i].get<double>();
    }
    const auto& src = j.at("source");
    t.source.correlation = src.at("correlation").get<double>();
    t.source.variance = src.at("variance").get<double>();
    t.source.seed = src.at("seed").get<std::uint64_t>();
    t.count = j.at("count").get<std::size_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("ground-truth document: ") + e.what(), 0);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': " + e.what(), 0);
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace tcid
