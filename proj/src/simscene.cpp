#include "darcnn/simscene.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "darcnn/error.hpp"
#include "darcnn/geom.hpp"
#include "darcnn/rng.hpp"

namespace darcnn {

namespace {

constexpr double kCrowdedPartnerIou = 0.5;
constexpr double kHeadAspect = 1.2;
constexpr double kHeadBand = 0.3;
constexpr int kGroupAttempts = 400;
constexpr int kSceneRestarts = 25;
constexpr int kJitterAttempts = 16;

void check(bool ok, const std::string& what) {
  if (!ok) {
    throw ConfigError(what);
  }
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Box box_from_center(double cx, double cy, double w, double h) {
  return Box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

bool inside(const Box& b, const ImageSize& image) {
  return b.x1 >= 0.0 && b.y1 >= 0.0 && b.x2 <= image.width && b.y2 <= image.height;
}

// Head in the top band of the body.
Box place_head(const Box& body, const SceneConfig& cfg, Rng& rng) {
  const double hw = body.width() * rng.uniform(cfg.head_ratio_min, cfg.head_ratio_max);
  const double hh = std::min(hw * kHeadAspect, body.height());
  const double x1 = rng.uniform(body.x1, body.x2 - hw);
  const double y1 = body.y1 + rng.uniform(0.0, std::max(0.0, kHeadBand * body.height() - hh));
  return Box{x1, y1, x1 + hw, y1 + hh};
}

Box random_body(const SceneConfig& cfg, Rng& rng) {
  const double w = rng.uniform(cfg.body_w_min, cfg.body_w_max);
  const double h = w * rng.uniform(cfg.body_aspect_min, cfg.body_aspect_max);
  const double x1 = rng.uniform(0.0, cfg.image_w - w);
  const double y1 = rng.uniform(0.0, cfg.image_h - h);
  return Box{x1, y1, x1 + w, y1 + h};
}

// A body overlapping `seed` with IoU > 0.5, or nothing if the draw fails.
std::optional<Box> partner_body(const Box& seed, const ImageSize& image, Rng& rng) {
  const double w = seed.width() * std::exp(rng.uniform(-0.1, 0.1));
  const double h = seed.height() * std::exp(rng.uniform(-0.1, 0.1));
  const double cx = seed.center_x() + rng.uniform(-0.2, 0.2) * seed.width();
  const double cy = seed.center_y() + rng.uniform(-0.1, 0.1) * seed.height();
  const Box b = box_from_center(cx, cy, w, h);
  if (!inside(b, image) || iou(b, seed) <= kCrowdedPartnerIou) {
    return std::nullopt;
  }
  return b;
}

std::vector<int> group_sizes(const SceneConfig& cfg) {
  const int n = cfg.n_persons;
  const double target = cfg.crowd_intensity * n;
  int crowded = static_cast<int>(std::lround(target));
  if (crowded == 1) {
    crowded = target >= 1.0 ? 2 : 0;
  }
  crowded = std::min(crowded, n);
  if (crowded == 1) {
    crowded = 0;
  }

  std::vector<int> sizes;
  int left = crowded;
  while (left > 0) {
    const int size = (left == 3) ? 3 : 2;
    sizes.push_back(size);
    left -= size;
  }
  for (int i = crowded; i < n; ++i) {
    sizes.push_back(1);
  }
  return sizes;
}

std::optional<std::vector<Box>> place_group(int size, const std::vector<Box>& placed,
                                            const SceneConfig& cfg, Rng& rng) {
  const ImageSize image{cfg.image_w, cfg.image_h};
  for (int attempt = 0; attempt < kGroupAttempts; ++attempt) {
    std::vector<Box> group{random_body(cfg, rng)};
    while (static_cast<int>(group.size()) < size) {
      auto partner = partner_body(group[rng.below(group.size())], image, rng);
      if (!partner) {
        break;
      }
      group.push_back(*partner);
    }
    if (static_cast<int>(group.size()) < size) {
      continue;
    }
    const bool isolated = std::all_of(group.begin(), group.end(), [&](const Box& b) {
      return std::all_of(placed.begin(), placed.end(),
                         [&](const Box& p) { return iou(b, p) <= kCrowdedPartnerIou; });
    });
    if (isolated) {
      return group;
    }
  }
  return std::nullopt;
}

Box jitter(const Box& box, double sigma, const ImageSize& image, Rng& rng) {
  if (sigma == 0.0) {
    return box;
  }
  for (int attempt = 0; attempt < kJitterAttempts; ++attempt) {
    const double cx = box.center_x() + sigma * box.width() * rng.normal();
    const double cy = box.center_y() + sigma * box.height() * rng.normal();
    const double w = box.width() * std::exp(sigma * rng.normal());
    const double h = box.height() * std::exp(sigma * rng.normal());
    const Box out = clip(box_from_center(cx, cy, w, h), image);
    if (out.valid() && out.width() >= 1.0 && out.height() >= 1.0) {
      return out;
    }
  }
  return box;
}

double draw_score(double mean, double std, Rng& rng) { return sigmoid(mean + std * rng.normal()); }

// Largest fraction of person i's body area covered by a single other body.
double occluded_share(std::span<const GtPair> persons, std::size_t i) {
  const Box& b = persons[i].body;
  double share = 0.0;
  for (std::size_t j = 0; j < persons.size(); ++j) {
    if (j == i) {
      continue;
    }
    const Box& o = persons[j].body;
    const double iw = std::min(b.x2, o.x2) - std::max(b.x1, o.x1);
    const double ih = std::min(b.y2, o.y2) - std::max(b.y1, o.y1);
    if (iw > 0.0 && ih > 0.0) {
      share = std::max(share, iw * ih / b.area());
    }
  }
  return share;
}

// The upper part of a body, as a detector firing on a partially visible person.
Box partial_body(const Box& body, Rng& rng) {
  const double keep = rng.uniform(0.3, 0.55);
  const double dx = rng.uniform(-0.1, 0.1) * body.width();
  return Box{body.x1 + dx, body.y1, body.x2 + dx, body.y1 + keep * body.height()};
}

// Default body geometry scaled down until it fits the image.
SceneConfig background_shape(const ImageSize& image) {
  SceneConfig shape;
  shape.image_w = image.width;
  shape.image_h = image.height;
  const double scale = std::min({1.0, image.width / shape.body_w_max,
                                 image.height / (shape.body_w_max * shape.body_aspect_max)});
  shape.body_w_min *= scale;
  shape.body_w_max *= scale;
  return shape;
}

}  // namespace

void SceneConfig::validate() const {
  check(std::isfinite(image_w) && image_w > 0.0 && std::isfinite(image_h) && image_h > 0.0,
        "scene config: image size must be positive");
  check(n_persons >= 0, "scene config: n_persons must be >= 0");
  check(is_probability(crowd_intensity), "scene config: crowd_intensity must lie in [0, 1]");
  check(body_w_min > 0.0 && body_w_min <= body_w_max,
        "scene config: need 0 < body_w_min <= body_w_max");
  check(body_aspect_min > 0.0 && body_aspect_min <= body_aspect_max,
        "scene config: need 0 < body_aspect_min <= body_aspect_max");
  check(head_ratio_min > 0.0 && head_ratio_min <= head_ratio_max && head_ratio_max <= 1.0,
        "scene config: need 0 < head_ratio_min <= head_ratio_max <= 1");
  check(body_w_max <= image_w && body_w_max * body_aspect_max <= image_h,
        "scene config: largest body does not fit in the image");
}

void DetectorNoise::validate() const {
  for (double j : {head_jitter, body_jitter, principal_jitter, attached_jitter}) {
    check(std::isfinite(j) && j >= 0.0, "detector noise: jitter must be >= 0");
  }
  check(is_probability(head_miss_prob) && is_probability(body_miss_prob),
        "detector noise: miss probabilities must lie in [0, 1]");
  check(is_probability(fp_duplicate_fraction),
        "detector noise: fp_duplicate_fraction must lie in [0, 1]");
  check(std::isfinite(fp_per_image) && fp_per_image >= 0.0 && fp_per_image <= 500.0,
        "detector noise: fp_per_image must lie in [0, 500]");
  for (double s : {head_tp_score_std, head_fp_score_std, body_tp_score_std, body_fp_score_std}) {
    check(std::isfinite(s) && s >= 0.0, "detector noise: score std must be >= 0");
  }
  check(std::isfinite(occlusion_body_score_penalty) && occlusion_body_score_penalty >= 0.0,
        "detector noise: occlusion_body_score_penalty must be >= 0");
  check(proposals_per_person >= 0 && background_proposals >= 0,
        "detector noise: proposal counts must be >= 0");
}

double crowding_fraction(std::span<const GtPair> persons) {
  if (persons.empty()) {
    return 0.0;
  }
  std::size_t crowded = 0;
  for (std::size_t i = 0; i < persons.size(); ++i) {
    for (std::size_t j = 0; j < persons.size(); ++j) {
      if (i != j && iou(persons[i].body, persons[j].body) > kCrowdedPartnerIou) {
        ++crowded;
        break;
      }
    }
  }
  return static_cast<double>(crowded) / static_cast<double>(persons.size());
}

Scene generate_scene(const SceneConfig& cfg, const std::string& image_id) {
  cfg.validate();
  Scene scene;
  scene.image_id = image_id;
  scene.image = ImageSize{cfg.image_w, cfg.image_h};

  Rng rng(cfg.seed);
  const std::vector<int> sizes = group_sizes(cfg);
  for (int restart = 0; restart < kSceneRestarts; ++restart) {
    std::vector<Box> bodies;
    bool ok = true;
    for (int size : sizes) {
      auto group = place_group(size, bodies, cfg, rng);
      if (!group) {
        ok = false;
        break;
      }
      bodies.insert(bodies.end(), group->begin(), group->end());
    }
    if (!ok) {
      continue;
    }
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      scene.persons.push_back(
          GtPair{place_head(bodies[i], cfg, rng), bodies[i], static_cast<PersonId>(i)});
    }
    return scene;
  }
  throw GenerationError("generate_scene: could not place " + std::to_string(cfg.n_persons) +
                        " persons after " + std::to_string(kSceneRestarts) + " restarts");
}

std::vector<DetectionPair> simulate_detections(const Scene& scene, const DetectorNoise& noise) {
  noise.validate();
  Rng rng = Rng(noise.seed).split(0);
  const ImageSize& image = scene.image;
  std::vector<DetectionPair> out;

  for (std::size_t i = 0; i < scene.persons.size(); ++i) {
    const GtPair& gt = scene.persons[i];
    const double body_tp_mean =
        noise.body_tp_score_mean -
        noise.occlusion_body_score_penalty * occluded_share(scene.persons, i);
    const bool head_missed = rng.bernoulli(noise.head_miss_prob);
    const bool body_missed = rng.bernoulli(noise.body_miss_prob);
    if (head_missed && body_missed) {
      continue;
    }
    DetectionPair det;
    det.head = jitter(gt.head, noise.head_jitter * (head_missed ? 4.0 : 1.0), image, rng);
    det.body = jitter(gt.body, noise.body_jitter * (body_missed ? 4.0 : 1.0), image, rng);
    det.head_score = head_missed
                         ? draw_score(noise.head_fp_score_mean, noise.head_fp_score_std, rng)
                         : draw_score(noise.head_tp_score_mean, noise.head_tp_score_std, rng);
    det.body_score = body_missed
                         ? draw_score(noise.body_fp_score_mean, noise.body_fp_score_std, rng)
                         : draw_score(body_tp_mean, noise.body_tp_score_std, rng);
    out.push_back(det);
  }

  const int n_fp = rng.poisson(noise.fp_per_image);
  const SceneConfig shape = background_shape(image);
  for (int i = 0; i < n_fp; ++i) {
    DetectionPair fp;
    if (!scene.persons.empty() && rng.bernoulli(noise.fp_duplicate_fraction)) {
      const GtPair& gt = scene.persons[rng.below(scene.persons.size())];
      fp.head = jitter(gt.head, noise.head_jitter, image, rng);
      fp.body = clip(jitter(partial_body(gt.body, rng), noise.body_jitter, image, rng), image);
      if (!fp.body.valid()) {
        fp.body = gt.body;
      }
      fp.head_score = draw_score(noise.dup_score_mean, noise.head_fp_score_std, rng);
      fp.body_score = draw_score(noise.dup_score_mean, noise.body_fp_score_std, rng);
    } else {
      const Box body = random_body(shape, rng);
      fp.body = body;
      fp.head = place_head(body, shape, rng);
      fp.head_score = draw_score(noise.head_fp_score_mean, noise.head_fp_score_std, rng);
      fp.body_score = draw_score(noise.body_fp_score_mean, noise.body_fp_score_std, rng);
    }
    out.push_back(fp);
  }
  return out;
}

std::vector<PairedProposal> simulate_branch_proposals(const Scene& scene,
                                                      const DetectorNoise& noise, Part principal) {
  noise.validate();
  Rng rng = Rng(noise.seed).split(principal == Part::head ? 1 : 2);
  const ImageSize& image = scene.image;
  const Branch branch = branch_for(principal);
  const double head_sigma =
      principal == Part::head ? noise.principal_jitter : noise.attached_jitter;
  const double body_sigma =
      principal == Part::body ? noise.principal_jitter : noise.attached_jitter;

  std::vector<PairedProposal> out;
  for (const GtPair& gt : scene.persons) {
    for (int k = 0; k < noise.proposals_per_person; ++k) {
      PairedProposal p;
      p.head = jitter(gt.head, head_sigma, image, rng);
      p.body = jitter(gt.body, body_sigma, image, rng);
      p.score = rng.uniform(0.5, 1.0);
      p.principal = principal;
      p.source_branch = branch;
      out.push_back(p);
    }
  }

  const SceneConfig shape = background_shape(image);
  for (int k = 0; k < noise.background_proposals; ++k) {
    PairedProposal p;
    p.body = random_body(shape, rng);
    p.head = place_head(p.body, shape, rng);
    p.score = rng.uniform(0.0, 0.5);
    p.principal = principal;
    p.source_branch = branch;
    out.push_back(p);
  }
  return out;
}

}  // namespace darcnn
