#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mptsim/rng.hpp"
#include "mptsim/routing.hpp"
#include "mptsim/topology.hpp"

namespace mptsim {

/// Poisson(lambda) new services per tick.
struct ArrivalModel {
  double lambda = 300.0;
  void validate() const;
};

enum class SizeDistribution : std::uint8_t { kUniform, kConstant };

/// Uniform on [0.5 mean, 1.5 mean); kConstant always yields the mean.
struct SizeModel {
  double mean_size = 10.0;
  SizeDistribution distribution = SizeDistribution::kUniform;
  void validate() const;
};

struct Service {
  std::uint64_t id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double initial_size = 0.0;
  double residual = 0.0;
  std::shared_ptr<const PathAssignment> assignment;
  std::uint64_t birth_tick = 0;
};

std::uint64_t sample_arrival_count(const ArrivalModel& model, Rng& rng);
double sample_size(const SizeModel& model, Rng& rng);

/// Draws `count` services with uniform leaf endpoints (dst redrawn on
/// collision with src) and sizes from `size_model`, routed through
/// `routes`. Ids run consecutively from `next_id`. Draw order per service:
/// src, dst (redraws), size; the mode never changes what is drawn.
std::vector<Service> spawn_services(RouteCache& routes, std::uint64_t count, Mode mode,
                                    const SizeModel& size_model, Rng& rng,
                                    std::uint64_t next_id, std::uint64_t tick);

}  // namespace mptsim
