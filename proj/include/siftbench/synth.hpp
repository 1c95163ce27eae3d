#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <utility>
#include <vector>

#include "siftbench/image.hpp"

namespace siftbench {

enum class MotifFamily {
  Chevron,
  DiagonalTwill,
  SymmetricDiamond,
  RepetitiveTile,
  NonGeometric,
};

std::string family_label(MotifFamily family);
MotifFamily parse_family(const std::string& text);

/// Deterministic two-tone motif description. Samples take the values
/// 0.5 +- contrast/2; period is the pattern repeat in pixels (measured along
/// the crossing diagonal for the diagonal families).
struct MotifSpec {
  MotifFamily family = MotifFamily::Chevron;
  int width = 800;
  int height = 355;
  int period = 32;
  double contrast = 0.8;
  int border_rows = 2;  // outer twill frame rows (4 px each)
  uint64_t seed = 0;

  void validate() const;
  bool operator==(const MotifSpec&) const = default;
};

/// Renders the family's pattern, framed by border_rows rows of alternating
/// twill. Deterministic in the seed.
Image generate_motif(const MotifSpec& spec);

/// The seven default benchmark classes: chevron, diagonal twill, symmetric
/// diamond, two repetitive-tile seeds and two non-geometric seeds, all at
/// 800x355 / contrast 0.8.
std::vector<std::pair<std::string, MotifSpec>> default_benchmark_classes();

nlohmann::json motif_spec_to_json(const MotifSpec& spec);
MotifSpec motif_spec_from_json(const nlohmann::json& j);

}  // namespace siftbench
