#include "mptsim/service.hpp"

#include <cmath>
#include <stdexcept>

namespace mptsim {

void ArrivalModel::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("arrival rate lambda must be > 0");
  }
}

void SizeModel::validate() const {
  if (!(mean_size > 0.0) || !std::isfinite(mean_size)) {
    throw std::invalid_argument("mean service size must be > 0");
  }
}

std::uint64_t sample_arrival_count(const ArrivalModel& model, Rng& rng) {
  return rng.poisson(model.lambda);
}

double sample_size(const SizeModel& model, Rng& rng) {
  if (model.distribution == SizeDistribution::kConstant) return model.mean_size;
  return rng.uniform(0.5 * model.mean_size, 1.5 * model.mean_size);
}

std::vector<Service> spawn_services(RouteCache& routes, std::uint64_t count, Mode mode,
                                    const SizeModel& size_model, Rng& rng,
                                    std::uint64_t next_id, std::uint64_t tick) {
  const auto leaves = routes.topology().leaves();
  if (leaves.size() < 2) throw std::invalid_argument("need at least 2 leaf nodes");

  std::vector<Service> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Service s;
    s.id = next_id + i;
    s.birth_tick = tick;
    s.src = leaves[rng.uniform_int(0, leaves.size() - 1)].id;
    do {
      s.dst = leaves[rng.uniform_int(0, leaves.size() - 1)].id;
    } while (s.dst == s.src);
    s.initial_size = sample_size(size_model, rng);
    s.residual = s.initial_size;
    s.assignment = routes.get(s.src, s.dst, mode);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mptsim
