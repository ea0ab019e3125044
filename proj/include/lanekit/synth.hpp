// Deterministic synthetic lane scenes covering the shape families the
// modeling comparison cares about: forward straights, U-turn arcs, closed
// loops, Y-shaped forks and lateral crossings.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lanekit/frame_io.hpp"

namespace lanekit {

enum class SceneKind { kStraight, kUShape, kClosedLoop, kYShape, kLateral };

SceneKind scene_kind_from_string(const std::string& name);
std::string to_string(SceneKind kind);

// Front camera used for synthetic frames: 1920x1080, f = 1000 px, mounted
// 1.6 m above the ego origin looking along +Y.
CameraRig<double> default_front_rig();

// One scene frame; identical (kind, noise_sigma, seed) inputs produce
// identical output. The seed also varies scene geometry (arc radius, leg
// length) so different seeds give genuinely different scenes.
io::LaneFileFrame synth_scene(SceneKind kind, double noise_sigma, std::uint64_t seed);

// A batch of frames; kind "mixed" cycles through all scene kinds.
std::vector<io::LaneFileFrame> synth_frames(int count, const std::string& kind,
                                            double noise_sigma, std::uint64_t seed);

}  // namespace lanekit
