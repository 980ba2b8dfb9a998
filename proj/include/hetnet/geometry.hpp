#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hetnet/config.hpp"
#include "hetnet/random.hpp"

namespace hetnet {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline double pathloss(const PathlossModel& model, Position x) {
  return model(std::hypot(x.x, x.y));
}

enum class DeviceKind { BS, SCA, MUE, SUE };
enum class Group { Red, Blue, None };

inline const char* to_string(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::BS: return "BS";
    case DeviceKind::SCA: return "SCA";
    case DeviceKind::MUE: return "MUE";
    case DeviceKind::SUE: return "SUE";
  }
  return "?";
}

inline const char* to_string(Group group) {
  switch (group) {
    case Group::Red: return "RED";
    case Group::Blue: return "BLUE";
    case Group::None: return "NONE";
  }
  return "?";
}

inline Group other(Group g) { return g == Group::Red ? Group::Blue : Group::Red; }

struct Device {
  int id = 0;
  DeviceKind kind = DeviceKind::MUE;
  Position pos;
  Group group = Group::None;
  int serving_sca = -1;  // index into NetworkGeometry::scas, -1 if none
};

/// Node positions and the red/blue partition of one deployment snapshot.
struct NetworkGeometry {
  int n_antennas = 0;
  Device bs{0, DeviceKind::BS, {}, Group::None, -1};
  std::vector<Device> scas;
  std::vector<Device> mues;
  std::vector<Device> sues;  // sues[i] belongs to scas[i]

  std::size_t count(const std::vector<Device>& v, Group g) const {
    std::size_t n = 0;
    for (const auto& d : v) n += d.group == g;
    return n;
  }
  /// |M_g| + |S_g| for the group served by the BS in the band.
  std::size_t served_count(Group g = Group::Red) const { return count(mues, g) + count(scas, g); }
  /// Number of SCAs the BS must null in the band.
  std::size_t nulled_count(Group g = Group::Red) const { return count(scas, other(g)); }
  double c(Group g = Group::Red) const {
    return static_cast<double>(served_count(g)) / n_antennas;
  }
  double c_s(Group g = Group::Red) const {
    return static_cast<double>(nulled_count(g)) / n_antennas;
  }
};

/// Index of the SCA nearest to p, -1 when there are none.
inline int nearest_sca(const NetworkGeometry& geom, Position p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < geom.scas.size(); ++i) {
    const double d = distance(p, geom.scas[i].pos);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

/// Square SCA grid centred on the BS with checkerboard colouring; MUEs uniform
/// inside each SCA's Voronoi cell (clipped to the macro cell); one SUE per SCA
/// uniform in the small-cell disc.
inline NetworkGeometry build_network(const ScenarioConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  NetworkGeometry geom;
  geom.n_antennas = cfg.n_antennas;
  Rng rng = make_rng(seed, Stream::Geometry, 0);

  const int side = cfg.sca_grid_side();
  const double half_cell = 0.5 * cfg.cell_side_m;
  const double pitch = cfg.sca_pitch_m;
  int next_id = 1;

  struct Box {
    double x0, x1, y0, y1;
  };
  std::vector<Box> regions;
  auto coord = [&](int i) { return (i - 0.5 * (side - 1)) * pitch; };
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      Device sca;
      sca.id = next_id++;
      sca.kind = DeviceKind::SCA;
      sca.pos = {coord(i), coord(j)};
      sca.group = (i + j) % 2 == 0 ? Group::Red : Group::Blue;
      geom.scas.push_back(sca);
      regions.push_back({i == 0 ? -half_cell : coord(i) - 0.5 * pitch,
                         i == side - 1 ? half_cell : coord(i) + 0.5 * pitch,
                         j == 0 ? -half_cell : coord(j) - 0.5 * pitch,
                         j == side - 1 ? half_cell : coord(j) + 0.5 * pitch});
    }
  }

  if (cfg.n_sca == 0) {
    for (int m = 0; m < cfg.n_mue; ++m) {
      Device mue;
      mue.id = next_id++;
      mue.pos = {uniform(rng, -half_cell, half_cell), uniform(rng, -half_cell, half_cell)};
      mue.group = Group::Red;
      geom.mues.push_back(mue);
    }
  } else {
    const int per_sca = cfg.n_mue / cfg.n_sca;
    for (std::size_t s = 0; s < geom.scas.size(); ++s) {
      const Box& box = regions[s];
      for (int m = 0; m < per_sca; ++m) {
        Device mue;
        mue.id = next_id++;
        mue.pos = {uniform(rng, box.x0, box.x1), uniform(rng, box.y0, box.y1)};
        mue.group = geom.scas[s].group;
        mue.serving_sca = -1;
        geom.mues.push_back(mue);
      }
    }
  }

  for (std::size_t s = 0; s < geom.scas.size(); ++s) {
    const double r = cfg.small_cell_radius_m * std::sqrt(uniform(rng, 0.0, 1.0));
    const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    Device sue;
    sue.id = next_id++;
    sue.kind = DeviceKind::SUE;
    sue.pos = {geom.scas[s].pos.x + r * std::cos(phi), geom.scas[s].pos.y + r * std::sin(phi)};
    sue.group = geom.scas[s].group;
    sue.serving_sca = static_cast<int>(s);
    geom.sues.push_back(sue);
  }

  const double load = geom.c() + geom.c_s();
  if (!(load < 1.0)) {
    throw InvalidArgument("build_network: c + c_S = " + std::to_string(load) +
                          " must be < 1 (too many served/nulled devices for the antenna count)");
  }
  return geom;
}

}  // namespace hetnet
