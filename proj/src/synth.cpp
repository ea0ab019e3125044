#include "lanekit/synth.hpp"

#include <cmath>

namespace lanekit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Deterministic RNG with explicit uniform/gaussian conversions so the same
// seed produces the same scene on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}

  double uniform() {
    // splitmix64 step
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t state_;
};

void add_noise(Pointsd& pts, double sigma, Rng& rng) {
  if (sigma <= 0.0) return;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    pts(i, 0) += sigma * rng.gaussian();
    pts(i, 2) += sigma * rng.gaussian();
  }
}

io::LaneRecord make_record(Pointsd pts, int class_id) {
  io::LaneRecord rec;
  rec.points = std::move(pts);
  rec.class_id = class_id;
  return rec;
}

Pointsd straight_lane(double x0, double y0, double y1, int n) {
  Pointsd pts(n, 3);
  for (int i = 0; i < n; ++i) {
    const double y = y0 + (y1 - y0) * i / (n - 1);
    pts.row(i) << x0, y, 0.005 * y;
  }
  return pts;
}

std::vector<io::LaneRecord> straight_scene(Rng&) {
  std::vector<io::LaneRecord> lanes;
  lanes.push_back(make_record(straight_lane(-3.5, 5.0, 95.0, 48), 0));
  lanes.push_back(make_record(straight_lane(0.0, 5.0, 95.0, 48), 1));
  lanes.push_back(make_record(straight_lane(3.5, 5.0, 95.0, 48), 2));
  return lanes;
}

// U-turn arc centered ahead of the vehicle. The seed varies radius and
// angular span so distinct seeds give distinct geometry.
std::vector<io::LaneRecord> u_shape_scene(std::uint64_t seed) {
  const double radius = 7.0 + static_cast<double>(seed % 3);
  const double span = kPi * (1.0 + 0.1 * static_cast<double>((seed / 3) % 3));
  const double cy = 22.0;
  const int n = 120;
  Pointsd pts(n, 3);
  for (int i = 0; i < n; ++i) {
    const double theta = (kPi / 2.0 + span / 2.0) - span * i / (n - 1);
    pts.row(i) << radius * std::cos(theta), cy + radius * std::sin(theta), 0.0;
  }
  return {make_record(std::move(pts), 1)};
}

std::vector<io::LaneRecord> closed_loop_scene(std::uint64_t seed) {
  const double radius = 5.0 + static_cast<double>(seed % 2);
  const double cx = 6.0, cy = 20.0;
  const int n = 100;
  Pointsd pts(n + 1, 3);
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * kPi * i / n;
    pts.row(i) << cx + radius * std::cos(theta), cy + radius * std::sin(theta), 0.0;
  }
  pts.row(n) = pts.row(0);  // close the loop
  return {make_record(std::move(pts), 2)};
}

// Fork drawn as one polyline: stem, left branch, retrace, right branch.
std::vector<io::LaneRecord> y_shape_scene(std::uint64_t) {
  std::vector<Vec3d> pts;
  for (int i = 0; i <= 13; ++i) pts.emplace_back(0.0, 5.0 + i, 0.0);  // stem up to (0,18)
  for (int k = 1; k <= 14; ++k) pts.emplace_back(-6.0 * k / 14.0, 18.0 + k, 0.0);
  for (int k = 13; k >= 0; --k) pts.emplace_back(-6.0 * k / 14.0, 18.0 + k, 0.0);
  for (int k = 1; k <= 14; ++k) pts.emplace_back(6.0 * k / 14.0, 18.0 + k, 0.0);
  Pointsd m(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) = pts[i].transpose();
  return {make_record(std::move(m), 1)};
}

std::vector<io::LaneRecord> lateral_scene(std::uint64_t) {
  const int n = 40;
  Pointsd pts(n, 3);
  for (int i = 0; i < n; ++i) pts.row(i) << -12.0 + 24.0 * i / (n - 1), 20.0, 0.0;
  return {make_record(std::move(pts), 0)};
}

}  // namespace

SceneKind scene_kind_from_string(const std::string& name) {
  if (name == "straight") return SceneKind::kStraight;
  if (name == "u_shape") return SceneKind::kUShape;
  if (name == "closed_loop") return SceneKind::kClosedLoop;
  if (name == "y_shape") return SceneKind::kYShape;
  if (name == "lateral") return SceneKind::kLateral;
  throw InvalidConfig("unknown scene kind '" + name + "'");
}

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kStraight: return "straight";
    case SceneKind::kUShape: return "u_shape";
    case SceneKind::kClosedLoop: return "closed_loop";
    case SceneKind::kYShape: return "y_shape";
    case SceneKind::kLateral: return "lateral";
  }
  throw InvalidConfig("invalid scene kind");
}

CameraRig<double> default_front_rig() {
  CameraRig<double> rig;
  rig.intrinsic << 1000.0, 0.0, 960.0,  //
      0.0, 1000.0, 540.0,               //
      0.0, 0.0, 1.0;
  // Camera 1.6 m above the ego origin looking along +Y: x_cam = x,
  // y_cam = 1.6 - z, z_cam = y.
  rig.extrinsic << 1.0, 0.0, 0.0, 0.0,  //
      0.0, 0.0, -1.0, 1.6,              //
      0.0, 1.0, 0.0, 0.0,               //
      0.0, 0.0, 0.0, 1.0;
  rig.image_h = 1080;
  rig.image_w = 1920;
  return rig;
}

io::LaneFileFrame synth_scene(SceneKind kind, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw InvalidConfig("synth_scene: negative noise sigma");
  Rng rng(seed);
  io::LaneFileFrame frame;
  frame.frame_id = to_string(kind) + "_" + std::to_string(seed);
  switch (kind) {
    case SceneKind::kStraight: frame.lanes = straight_scene(rng); break;
    case SceneKind::kUShape: frame.lanes = u_shape_scene(seed); break;
    case SceneKind::kClosedLoop: frame.lanes = closed_loop_scene(seed); break;
    case SceneKind::kYShape: frame.lanes = y_shape_scene(seed); break;
    case SceneKind::kLateral: frame.lanes = lateral_scene(seed); break;
  }
  for (auto& lane : frame.lanes) add_noise(lane.points, noise_sigma, rng);
  frame.camera = default_front_rig();
  return frame;
}

std::vector<io::LaneFileFrame> synth_frames(int count, const std::string& kind,
                                            double noise_sigma, std::uint64_t seed) {
  if (count < 0) throw InvalidConfig("synth_frames: negative count");
  static const SceneKind kCycle[] = {SceneKind::kStraight, SceneKind::kUShape,
                                     SceneKind::kClosedLoop, SceneKind::kYShape,
                                     SceneKind::kLateral};
  const bool mixed = (kind == "mixed");
  const SceneKind fixed = mixed ? SceneKind::kStraight : scene_kind_from_string(kind);
  std::vector<io::LaneFileFrame> frames;
  frames.reserve(count);
  for (int i = 0; i < count; ++i) {
    const SceneKind k = mixed ? kCycle[i % 5] : fixed;
    io::LaneFileFrame frame = synth_scene(k, noise_sigma, seed + static_cast<std::uint64_t>(i));
    char idx[16];
    std::snprintf(idx, sizeof(idx), "%04d", i);
    frame.frame_id = std::string(idx) + "_" + to_string(k);
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace lanekit
