#pragma once

#include <string>
#include <vector>

#include "hetnet/config.hpp"
#include "hetnet/geometry.hpp"
#include "hetnet/special_functions.hpp"
#include "hetnet/units.hpp"

namespace hetnet {

enum class Architecture { HetnetWireless, HetnetWired, MassiveMimo };

inline const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::HetnetWireless: return "hetnet";
    case Architecture::HetnetWired: return "wired";
    case Architecture::MassiveMimo: return "mmimo";
  }
  return "?";
}

inline Architecture parse_architecture(const std::string& s) {
  if (s == "hetnet") return Architecture::HetnetWireless;
  if (s == "wired") return Architecture::HetnetWired;
  if (s == "mmimo") return Architecture::MassiveMimo;
  throw InvalidArgument("unknown architecture '" + s + "' (expected hetnet, wired or mmimo)");
}

/// A device served by the BS beam in the band (UL receiver / DL precoder target).
struct ServedDevice {
  int device_id = 0;
  DeviceKind kind = DeviceKind::MUE;
  Position pos;
  double gain = 0.0;  // BS <-> device average attenuation
  double tau_sq = 0.0;
  double rate_bps_hz = 0.0;
  double target_sinr = 0.0;
};

/// An SCA the BS must null, together with the SUE it serves in the band.
struct SmallCellLink {
  int sca_id = 0;
  int sue_id = 0;
  Position sca_pos;
  Position sue_pos;
  double backhaul_gain = 0.0;  // BS <-> SCA
  double access_gain = 0.0;    // SCA <-> SUE
  double rate = 0.0;           // ergodic rate target of the SUE
  double target_sinr = 0.0;    // mean SINR meeting that ergodic rate
  std::vector<double> cross_gain;  // served device k -> this SUE
};

/// Everything the band-level solvers need for one geometry and architecture.
struct BandLayout {
  Architecture arch = Architecture::HetnetWireless;
  Group band = Group::Red;
  int n_antennas = 0;
  double noise_w = 0.0;
  std::vector<ServedDevice> served;
  std::vector<SmallCellLink> links;

  std::size_t K() const { return served.size(); }
  std::size_t S() const { return links.size(); }
  double c() const { return static_cast<double>(K()) / n_antennas; }
  double c_s() const { return static_cast<double>(S()) / n_antennas; }
  std::size_t count(DeviceKind kind) const {
    std::size_t n = 0;
    for (const auto& d : served) n += d.kind == kind;
    return n;
  }
};

/// Served and nulled sets of one band for the requested architecture.
///
/// HetnetWireless: the BS serves M_g and S_g and nulls the other-colour SCAs.
/// HetnetWired: the BS serves M_g only; every SCA serves its SUE over the wire-fed
///   small-cell tier in both bands, so the BS nulls all SCAs.
/// MassiveMimo: no SCAs; the BS serves M_g and every SUE directly with a
///   deterministic SINR target and perfect CSI.
inline BandLayout build_architecture(Architecture arch, const NetworkGeometry& geom,
                                     const ScenarioConfig& cfg, double mue_tau_sq,
                                     Group band = Group::Red) {
  require(mue_tau_sq >= 0.0 && mue_tau_sq < 1.0, "build_architecture: tau^2 must be in [0, 1)");
  const PathlossModel model = cfg.pathloss();
  BandLayout layout;
  layout.arch = arch;
  layout.band = band;
  layout.n_antennas = geom.n_antennas;
  layout.noise_w = cfg.noise_w();

  const double mue_gamma = units::sinr_for_rate(cfg.mue_rate_bps_hz);
  for (const auto& m : geom.mues) {
    if (m.group != band) continue;
    layout.served.push_back({m.id, DeviceKind::MUE, m.pos, pathloss(model, m.pos), mue_tau_sq,
                             cfg.mue_rate_bps_hz, mue_gamma});
  }

  const double sca_gamma = units::sinr_for_rate(cfg.sca_backhaul_rate_bps_hz);
  const double sue_gamma = invert_ergodic_rate(cfg.sue_rate_bps_hz, cfg.sue_rate_map);
  auto add_link = [&](std::size_t s) {
    const Device& sca = geom.scas[s];
    const Device& sue = geom.sues[s];
    SmallCellLink link;
    link.sca_id = sca.id;
    link.sue_id = sue.id;
    link.sca_pos = sca.pos;
    link.sue_pos = sue.pos;
    link.backhaul_gain = pathloss(model, sca.pos);
    link.access_gain = model(distance(sca.pos, sue.pos));
    link.rate = cfg.sue_rate_bps_hz;
    link.target_sinr = sue_gamma;
    layout.links.push_back(std::move(link));
  };

  switch (arch) {
    case Architecture::HetnetWireless:
      for (std::size_t s = 0; s < geom.scas.size(); ++s) {
        const Device& sca = geom.scas[s];
        if (sca.group == band) {
          layout.served.push_back({sca.id, DeviceKind::SCA, sca.pos, pathloss(model, sca.pos), 0.0,
                                   cfg.sca_backhaul_rate_bps_hz, sca_gamma});
        } else {
          add_link(s);
        }
      }
      break;
    case Architecture::HetnetWired:
      for (std::size_t s = 0; s < geom.scas.size(); ++s) add_link(s);
      break;
    case Architecture::MassiveMimo: {
      const double direct_gamma = units::sinr_for_rate(cfg.sue_rate_bps_hz);
      for (const auto& sue : geom.sues) {
        layout.served.push_back({sue.id, DeviceKind::SUE, sue.pos, pathloss(model, sue.pos), 0.0,
                                 cfg.sue_rate_bps_hz, direct_gamma});
      }
      break;
    }
  }

  for (auto& link : layout.links) {
    link.cross_gain.reserve(layout.served.size());
    for (const auto& d : layout.served) link.cross_gain.push_back(model(distance(d.pos, link.sue_pos)));
  }

  const double load = layout.c() + layout.c_s();
  if (!(load < 1.0)) {
    throw InvalidArgument("build_architecture: c + c_S = " + std::to_string(load) + " must be < 1");
  }
  return layout;
}

}  // namespace hetnet
