#include "toricflow/decay.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace toricflow {

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& ca) {
  if (t.size() != ca.size())
    throw std::invalid_argument("fit_decay: time/energy size mismatch");
  if (t.size() < 10)
    throw std::invalid_argument("fit_decay: need at least 10 samples");
  for (double v : ca)
    if (!(v > 0.0))
      throw std::invalid_argument("fit_decay: energies must be positive");
  const size_t start = t.size() / 2;
  const size_t m = t.size() - start;
  double st = 0.0, sy = 0.0;
  for (size_t i = start; i < t.size(); ++i) {
    st += t[i];
    sy += std::log(ca[i]);
  }
  const double mt = st / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = start; i < t.size(); ++i) {
    const double dx = t[i] - mt;
    const double dy = std::log(ca[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit_decay: degenerate time axis");
  DecayFit fit;
  fit.samples_used = static_cast<int>(m);
  const double slope = sxy / sxx;
  fit.lambda = -slope;
  const double ss_res = syy - sxy * sxy / sxx;
  fit.r2 = syy > 1e-30 ? 1.0 - ss_res / syy : 1.0;  // flat series: exact fit
  return fit;
}

std::vector<double> csv_column(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string header;
  if (!std::getline(in, header))
    throw std::invalid_argument("csv: empty input");
  int col = -1, idx = 0;
  std::istringstream hs(header);
  std::string cell;
  while (std::getline(hs, cell, ',')) {
    if (cell == name) col = idx;
    ++idx;
  }
  if (col < 0) throw std::invalid_argument("csv: no column named '" + name + "'");
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int c = 0;
    std::string v;
    while (std::getline(ls, v, ',')) {
      if (c == col) {
        try {
          out.push_back(std::stod(v));
        } catch (const std::exception&) {
          throw std::invalid_argument("csv: non-numeric cell '" + v +
                                      "' in column '" + name + "'");
        }
        break;
      }
      ++c;
    }
  }
  return out;
}

}  // namespace toricflow
