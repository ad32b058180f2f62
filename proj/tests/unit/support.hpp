#pragma once

#include <conform/conform.hpp>

#include <string>
#include <vector>

namespace testsupport {

inline conform::Requirement req(const std::string& id,
                                conform::json params = conform::json::object()) {
  return conform::json{{"id", id}, {"params", std::move(params)}}
      .get<conform::Requirement>();
}

inline std::vector<conform::Requirement> all_requirements() {
  std::vector<conform::Requirement> out;
  for (const char* id : {"DAC", "DEVICE_MATCHING", "MAC", "CARRIER_OUTPUT",
                         "MEMORY_CLEAN", "MODULE_ISOLATION", "IDENT_AUTH",
                         "INTEGRITY"})
    out.push_back(req(id));
  return out;
}

inline conform::SutSpec full_claims_sut(conform::SimulatorConfig cfg = {}) {
  conform::SutSpec spec;
  spec.simulator = std::move(cfg);
  for (const auto& r : all_requirements()) spec.claims.insert(r.id);
  return spec;
}

inline std::unique_ptr<conform::Simulator> sim(conform::DefectSet d = {},
                                               std::uint64_t seed = 7) {
  return conform::create_sut({}, std::move(d), seed);
}

}  // namespace testsupport
