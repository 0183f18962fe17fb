#include <cmath>
#include <sstream>

#include "greedy/estimators.hpp"

namespace greedy {

Diagnostic moment_property_check(const std::vector<MarkedRealization>& batch,
                                 const std::vector<std::pair<Window, Window>>& box_pairs, double C,
                                 MomentMode mode) {
  if (batch.size() < 2) throw InvalidInput("moment check needs at least two realizations");
  if (box_pairs.empty()) throw InvalidInput("moment check needs box pairs");
  if (!(C > 0.0)) throw InvalidInput("C must be positive");
  Diagnostic d;
  d.name = mode == MomentMode::factorization ? "moment_factorization" : "moment_upper_bound";
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < box_pairs.size(); ++i) {
    const auto& [b1, b2] = box_pairs[i];
    const MomentEstimate m1 = estimate_factorial_moment(batch, {b1}, 1);
    const MomentEstimate m2 = estimate_factorial_moment(batch, {b2}, 1);
    const MomentEstimate mm = estimate_factorial_moment(batch, {b1, b2}, 2);
    const double c2 = C * C;
    const double product = c2 * m1.mean * m2.mean;
    const double sigma = std::sqrt(mm.std_error * mm.std_error +
                                   std::pow(c2 * m2.mean * m1.std_error, 2) +
                                   std::pow(c2 * m1.mean * m2.std_error, 2));
    const double margin = mode == MomentMode::factorization
                              ? 3.0 * sigma - std::abs(mm.mean - product)
                              : product + 3.0 * sigma - mm.mean;
    std::ostringstream label;
    label << "pair " << i;
    d.add(label.str(), margin);
    rows.push_back({{"pair", i},
                    {"second_moment", mm.mean},
                    {"product", product},
                    {"sigma", sigma},
                    {"margin", margin}});
  }
  d.details["rows"] = rows;
  d.details["C"] = C;
  d.details["replicas"] = batch.size();
  return d;
}

MarkedRealization sample_doubled_poisson(double lambda, const Window& w, double jitter,
                                         std::uint64_t seed) {
  MarkedRealization base =
      sample_poisson_marked(lambda, MarkDistribution::constant_mass(1.0), w, seed);
  Engine rng = make_engine(splitmix64(seed ^ 0xd1b54a32d192ed03ULL));
  MarkedRealization out = base;
  for (const auto& a : base.atoms) {
    Point z = a.loc;
    for (double& c : z) c += jitter * (2.0 * uniform01(rng) - 1.0);
    if (w.contains(z)) out.atoms.push_back({std::move(z), 1.0});
  }
  return out;
}

}  // namespace greedy
