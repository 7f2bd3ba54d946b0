#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace edl {

enum class Split { Train, Val, Test };

// Row-major feature matrix with integer labels in [0, num_classes).
struct Dataset {
  int dim = 0;
  int num_classes = 0;
  Split split = Split::Train;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

// Cluster centers on a regular simplex with circumradius `scale`, padded to
// `dim` coordinates. Requires dim >= num_classes - 1.
std::vector<std::vector<double>> blob_centers(int num_classes, int dim, double scale);

// Isotropic Gaussian blobs, one per class, n_per_class points each, then a
// fraction overlap_fraction of all points resampled uniformly inside the
// convex hull of the centers with uniformly random labels.
Dataset make_blobs(int n_per_class, int num_classes, int dim, double centers_scale,
                   double noise_sigma, double overlap_fraction, std::uint64_t seed,
                   Split split = Split::Train);

// Header f0,...,f{d-1},label; features at full precision; labels integer.
void save_csv(const Dataset& data, const std::string& path);
Dataset load_csv(const std::string& path, Split split = Split::Test);

}
