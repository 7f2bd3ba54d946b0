#pragma once

#include <string>

namespace edl {

// Compensated summation. Keeps batch means reproducible regardless of
// how the surrounding loop is restructured.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}
