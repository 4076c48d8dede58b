#pragma once

#include <string>
#include <vector>

namespace toricflow {

struct DecayFit {
  double lambda = 0.0;  // decay rate of the fitted exp(-lambda t)
  double r2 = 0.0;      // goodness of the log-linear fit
  int samples_used = 0;
};

/// Least-squares slope of log Ca(t) over the final half of the series.
/// Needs >= 10 samples, all energies positive.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& ca);

/// Pull one column out of a series CSV by header name.
std::vector<double> csv_column(const std::string& csv, const std::string& name);

}  // namespace toricflow
