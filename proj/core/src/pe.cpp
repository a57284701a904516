#include "adaptrack/pe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "adaptrack/csv.hpp"
#include "adaptrack/errors.hpp"
#include "adaptrack/linalg.hpp"

namespace adaptrack {

double PEReport::min_eig() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& w : windows) {
    lo = std::min(lo, w.min_eig);
  }
  return lo;
}

void PEReport::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("PEReport::write_csv: cannot open " + path);
  }
  out << "window_start,min_eig\n";
  for (const auto& w : windows) {
    out << g17(w.t_start) << ',' << g17(w.min_eig) << '\n';
  }
}

PEReport pe_check(const std::vector<Vec>& samples, double dt, double window, double alpha,
                  double stride) {
  if (!(dt > 0.0) || !(window > 0.0)) {
    throw Error("pe_check: dt and window must be positive");
  }
  if (stride <= 0.0) {
    stride = window / 4.0;
  }
  const std::size_t per_window = static_cast<std::size_t>(std::llround(window / dt));
  if (per_window < 10) {
    throw InsufficientData("pe_check: window spans fewer than 10 samples");
  }
  if (samples.size() < per_window + 1) {
    throw InsufficientData("pe_check: log shorter than one window");
  }
  const std::size_t stride_samples =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(stride / dt)));

  const Eigen::Index dim = samples.front().size();
  PEReport report;
  report.window = window;
  report.alpha = alpha;

  for (std::size_t start = 0; start + per_window < samples.size(); start += stride_samples) {
    Mat gram = Mat::Zero(dim, dim);
    for (std::size_t k = start; k <= start + per_window; ++k) {
      const Vec& phi = samples[k];
      if (phi.size() != dim) {
        throw DimensionMismatch("pe_check: inconsistent sample dimension");
      }
      const double weight = (k == start || k == start + per_window) ? 0.5 : 1.0;
      gram.noalias() += (weight * dt) * (phi * phi.transpose());
    }
    report.windows.push_back(
        PEWindow{static_cast<double>(start) * dt, min_eig_sym(symmetrize(gram))});
  }
  return report;
}

}  // namespace adaptrack
