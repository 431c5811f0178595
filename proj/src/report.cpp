#include "semiweight/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace semiweight {

Generator generator_from_json(const Json& j) {
  if (!j.contains("mu") || !j.contains("A") || !j.contains("kind"))
    throw ValidationError("generator json needs fields mu, A, kind",
                          {{"MissingField", "mu/A/kind"}});
  const auto& jmu = j.at("mu");
  Vec mu(jmu.size());
  for (size_t i = 0; i < jmu.size(); ++i) mu[static_cast<int>(i)] = jmu.at(i).get<double>();
  const auto& ja = j.at("A");
  const int n = static_cast<int>(ja.size());
  Mat a(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = ja.at(static_cast<size_t>(r));
    if (static_cast<int>(row.size()) != n)
      throw ValidationError("generator matrix must be square", {{"NotSquare", ""}});
    for (int c = 0; c < n; ++c) a(r, c) = row.at(static_cast<size_t>(c)).get<double>();
  }
  const std::string kind = j.at("kind").get<std::string>();
  GeneratorKind k;
  if (kind == "markovian") {
    k = GeneratorKind::markovian;
  } else if (kind == "submarkovian") {
    k = GeneratorKind::submarkovian;
  } else {
    throw ValidationError("kind must be markovian or submarkovian",
                          {{"BadKind", kind}});
  }
  return build_generator(make_space(mu), a, k);
}

Generator load_generator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  in >> j;
  return generator_from_json(j);
}

Weight weight_from_json(const Json& j) {
  Vec w(j.size());
  for (size_t i = 0; i < j.size(); ++i) w[static_cast<int>(i)] = j.at(i).get<double>();
  return make_weight(w);
}

Weight load_weight(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  in >> j;
  return weight_from_json(j);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string matrix_to_csv(const Mat& m) {
  std::ostringstream os;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) os << ",";
      os << format_double(m(r, c));
    }
    os << "\n";
  }
  return os.str();
}

uint64_t content_hash(const std::string& text) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace semiweight
