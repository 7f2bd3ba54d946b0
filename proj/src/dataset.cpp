#include "edl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

#include "edl/common.hpp"
#include "edl/dirichlet.hpp"
#include "edl/sampling.hpp"

namespace edl {

std::vector<std::vector<double>> blob_centers(int num_classes, int dim, double scale) {
  if (num_classes < 2) throw std::invalid_argument("blob_centers: need at least 2 classes");
  if (dim < num_classes - 1) {
    throw std::invalid_argument("blob_centers: a regular simplex with " +
                                std::to_string(num_classes) + " vertices needs dim >= " +
                                std::to_string(num_classes - 1));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("blob_centers: scale must be positive and finite");
  }
  // unit vectors with pairwise inner product -1/(k-1), built row by row
  const int k = num_classes;
  std::vector<std::vector<double>> v(k, std::vector<double>(dim, 0.0));
  const double target_dot = -1.0 / (k - 1);
  v[0][0] = 1.0;
  for (int i = 1; i < k; ++i) {
    for (int j = 0; j < i && j < k - 1; ++j) {
      double dot = 0.0;
      for (int m = 0; m < j; ++m) dot += v[i][m] * v[j][m];
      v[i][j] = (target_dot - dot) / v[j][j];
    }
    if (i < k - 1) {
      double norm2 = 0.0;
      for (int m = 0; m < i; ++m) norm2 += v[i][m] * v[i][m];
      v[i][i] = std::sqrt(1.0 - norm2);
    }
  }
  for (auto& center : v) {
    for (double& c : center) c *= scale;
  }
  return v;
}

Dataset make_blobs(int n_per_class, int num_classes, int dim, double centers_scale,
                   double noise_sigma, double overlap_fraction, std::uint64_t seed, Split split) {
  if (n_per_class < 1) throw std::invalid_argument("make_blobs: n_per_class must be >= 1");
  if (dim < 2) throw std::invalid_argument("make_blobs: dim must be >= 2");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("make_blobs: noise_sigma must be finite and >= 0");
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction <= 1.0)) {
    throw std::invalid_argument("make_blobs: overlap_fraction must lie in [0, 1]");
  }
  const auto centers = blob_centers(num_classes, dim, centers_scale);

  RngEngine rng(seed);
  Dataset data;
  data.dim = dim;
  data.num_classes = num_classes;
  data.split = split;
  const std::size_t n = static_cast<std::size_t>(n_per_class) * num_classes;
  data.features.resize(n * dim);
  data.labels.resize(n);
  std::size_t row = 0;
  for (int c = 0; c < num_classes; ++c) {
    for (int j = 0; j < n_per_class; ++j, ++row) {
      double* x = data.features.data() + row * dim;
      for (int d = 0; d < dim; ++d) x[d] = centers[c][d] + noise_sigma * normal01(rng);
      data.labels[row] = c;
    }
  }

  const std::size_t n_overlap =
      static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(n)));
  if (n_overlap > 0) {
    const DirichletParams uniform(std::vector<double>(num_classes, 1.0));
    const auto order = shuffled_indices(n, rng);
    for (std::size_t i = 0; i < n_overlap; ++i) {
      const std::size_t r = order[i];
      const ProbabilityVector w = sample(uniform, rng);
      double* x = data.features.data() + r * dim;
      for (int d = 0; d < dim; ++d) {
        double acc = 0.0;
        for (int c = 0; c < num_classes; ++c) acc += w[c] * centers[c][d];
        x[d] = acc + noise_sigma * normal01(rng);
      }
      int label = static_cast<int>(uniform01(rng) * num_classes);
      if (label >= num_classes) label = num_classes - 1;
      data.labels[r] = label;
    }
  }
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ostringstream out;
  for (int d = 0; d < data.dim; ++d) out << 'f' << d << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    for (int d = 0; d < data.dim; ++d) out << format_double(x[d]) << ',';
    out << data.labels[i] << '\n';
  }
  write_text_file(path, out.str());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double_strict(const std::string& tok, int line_no) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty() || !std::isfinite(v)) {
    throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                             ": bad feature value '" + tok + "'");
  }
  return v;
}

int parse_label_strict(const std::string& tok, int line_no) {
  if (tok.empty()) throw std::runtime_error("load_csv: line " + std::to_string(line_no) +
                                            ": empty label");
  const char* begin = tok.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end != begin + tok.size()) {
    throw std::runtime_error("load_csv: line " + std::to_string(line_no) + ": bad label '" + tok +
                             "'");
  }
  if (v < 0) {
    throw std::runtime_error("load_csv: line " + std::to_string(line_no) + ": label " + tok +
                             " out of range, labels must be >= 0");
  }
  return static_cast<int>(v);
}

}

Dataset load_csv(const std::string& path, Split split) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: " + path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  if (header.size() < 2 || header.back() != "label") {
    throw std::runtime_error("load_csv: line 1: header must end with 'label'");
  }
  const int dim = static_cast<int>(header.size()) - 1;
  for (int d = 0; d < dim; ++d) {
    if (header[d] != "f" + std::to_string(d)) {
      throw std::runtime_error("load_csv: line 1: expected column 'f" + std::to_string(d) +
                               "', got '" + header[d] + "'");
    }
  }

  Dataset data;
  data.dim = dim;
  data.split = split;
  int line_no = 1;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tokens = split_line(line);
    if (tokens.size() != header.size()) {
      throw std::runtime_error("load_csv: line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " columns, got " +
                               std::to_string(tokens.size()));
    }
    for (int d = 0; d < dim; ++d) {
      data.features.push_back(parse_double_strict(tokens[d], line_no));
    }
    const int label = parse_label_strict(tokens.back(), line_no);
    max_label = std::max(max_label, label);
    data.labels.push_back(label);
  }
  if (data.labels.empty()) throw std::runtime_error("load_csv: " + path + " has no data rows");
  data.num_classes = max_label + 1;
  return data;
}

}
