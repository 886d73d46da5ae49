#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "fbs/harness/config.h"
#include "fbs/harness/report.h"

namespace fbs::harness {

// Independent 64-bit seed for (scenario, purpose), derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t scenario, std::uint64_t purpose);

enum Purpose : std::uint64_t {
  kReplicas = 0,
  kVerify,
  kMomentMc,
  kScalingFirst,
  kScalingSecondAnchored,
  kScalingSecondCentred,
  kOscillation,
  kMaxLocalTime,
  kTail,
  kBoxDimension,
  kLilCap,
};

struct RunOptions {
  bool write_artifacts = true;
  std::ostream* progress = nullptr;  // one line per stage when set
};

// Runs every scenario and, when asked, writes report.json, timing.json and the
// per-scenario CSV artifacts under out_dir. Workers change wall time only.
RunReport run(const RunConfig& cfg, const std::string& out_dir, const RunOptions& opt = {});

ScenarioReport run_scenario(const ExperimentConfig& c, std::uint64_t master_seed, std::size_t index, int workers,
                            const std::string& out_dir, const RunOptions& opt);

}  // namespace fbs::harness
