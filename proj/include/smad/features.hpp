// Copyright 2026 The smad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Per-image pipeline up to the three concatenated feature vectors.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "smad/bsif_bank.hpp"
#include "smad/descriptors.hpp"
#include "smad/error.hpp"
#include "smad/imaging.hpp"
#include "smad/scalespace.hpp"

namespace smad {

/// The pinned default BSIF bank (8 filters, 11x11).
inline const FilterBank& builtin_bsif_bank() {
  static const FilterBank bank = [] {
    FilterBank fb;
    fb.count = 8;
    fb.size = 11;
    fb.taps = {
#include "smad/bsif_default_bank.inc"
    };
    fb.validate(8, 11);
    return fb;
  }();
  return bank;
}

/// Everything that changes feature values. Trained models are only valid for
/// the configuration they were trained under.
struct DescriptorConfig {
  int working_size = 320;
  double crop_fraction = 1.0;
  int pyramid_levels = 3;
  int lbp_radius = 1;
  int hog_cell = 8;
  int hog_bins = 9;
  double hog_clip = 0.2;
  int bsif_size = 11;
  int bsif_bits = 8;
  std::string bsif_bank = "builtin";  // or a path to a bank file

  HogParams hog_params() const { return {hog_cell, hog_bins, hog_clip, 1e-6}; }
  int sub_image_count() const { return kNumChannels * pyramid_levels; }

  void validate() const {
    require(working_size >= 8, Errc::config, "descriptor.working_size must be >= 8");
    require(crop_fraction > 0.0 && crop_fraction <= 1.0, Errc::config, "descriptor.crop_fraction must be in (0,1]");
    require(pyramid_levels >= 1 && pyramid_levels <= 6, Errc::config, "descriptor.pyramid_levels must be in [1,6]");
    require((working_size >> (pyramid_levels - 1)) >= 2 * hog_cell, Errc::config,
            "descriptor.working_size too small: deepest level must hold 2x2 HoG cells");
    require(working_size >= (1 << pyramid_levels), Errc::config, "descriptor.working_size too small for the pyramid");
    require(lbp_radius >= 1 && lbp_radius <= 4, Errc::config, "descriptor.lbp_radius must be in [1,4]");
    require(hog_cell >= 2, Errc::config, "descriptor.hog_cell must be >= 2");
    require(hog_bins >= 2 && hog_bins <= 36, Errc::config, "descriptor.hog_bins must be in [2,36]");
    require(hog_clip > 0.0 && hog_clip <= 1.0, Errc::config, "descriptor.hog_clip must be in (0,1]");
    require(bsif_size >= 3 && (bsif_size & 1), Errc::config, "descriptor.bsif_size must be odd and >= 3");
    require(bsif_bits >= 1 && bsif_bits <= 12, Errc::config, "descriptor.bsif_bits must be in [1,12]");
  }
};

/// Dimensions of each sub-image at the configured working size.
inline std::vector<Dims> level_dims(const DescriptorConfig& cfg) {
  std::vector<Dims> out;
  int s = cfg.working_size;
  for (int l = 0; l < cfg.pyramid_levels; ++l) {
    out.push_back({s, s});
    s = (s + 1) / 2;
  }
  return out;
}

struct FeatureVector {
  FeatureType type = FeatureType::Lbp;
  std::vector<double> values;
  std::size_t dim() const { return values.size(); }
};

struct FeatureSet {
  FeatureVector lbp{FeatureType::Lbp, {}};
  FeatureVector hog{FeatureType::Hog, {}};
  FeatureVector bsif{FeatureType::Bsif, {}};
  std::string source_id;

  const FeatureVector& operator[](FeatureType t) const {
    switch (t) {
      case FeatureType::Lbp: return lbp;
      case FeatureType::Hog: return hog;
      case FeatureType::Bsif: return bsif;
    }
    fail(Errc::invalid, "unknown feature type");
  }
  FeatureVector& operator[](FeatureType t) { return const_cast<FeatureVector&>(std::as_const(*this)[t]); }
};

struct DimsRow {
  int k = 0;  // 1-based sub-image index
  std::string label;
  Dims dims;
  std::size_t lbp = 0, hog = 0, bsif = 0;
};

/// Fixed per-sub-image layout of the three concatenated vectors.
inline std::vector<DimsRow> describe_dims(const DescriptorConfig& cfg) {
  cfg.validate();
  std::vector<DimsRow> rows;
  auto lv = level_dims(cfg);
  ScaleSpaceStack proto;
  proto.levels = cfg.pyramid_levels;
  for (int k = 0; k < cfg.sub_image_count(); ++k) {
    DimsRow r;
    r.k = k + 1;
    r.label = proto.label(k);
    r.dims = lv[k % cfg.pyramid_levels];
    r.lbp = 256;
    r.hog = hog_layout(r.dims, cfg.hog_params()).dims;
    r.bsif = std::size_t(1) << cfg.bsif_bits;
    rows.push_back(r);
  }
  return rows;
}

struct FeatureDims {
  std::size_t lbp = 0, hog = 0, bsif = 0;
  std::size_t operator[](FeatureType t) const {
    return t == FeatureType::Lbp ? lbp : t == FeatureType::Hog ? hog : bsif;
  }
};

inline FeatureDims feature_dims(const DescriptorConfig& cfg) {
  FeatureDims d;
  for (const auto& r : describe_dims(cfg)) {
    d.lbp += r.lbp;
    d.hog += r.hog;
    d.bsif += r.bsif;
  }
  return d;
}

/// Concatenates per-sub-image fragments in canonical k order.
inline FeatureSet extract_feature_set(const ScaleSpaceStack& stack, const DescriptorConfig& cfg,
                                      const FilterBank& bank) {
  require(int(stack.sub_images.size()) == cfg.sub_image_count(), Errc::invalid,
          "extract_feature_set: expected " + std::to_string(cfg.sub_image_count()) + " sub-images, got " +
              std::to_string(stack.sub_images.size()));
  FeatureSet fs;
  fs.source_id = stack.source_id;
  const auto hp = cfg.hog_params();
  for (const auto& plane : stack.sub_images) {
    auto l = lbp_histogram(plane, cfg.lbp_radius);
    fs.lbp.values.insert(fs.lbp.values.end(), l.begin(), l.end());
    auto h = hog_descriptor(plane, hp);
    fs.hog.values.insert(fs.hog.values.end(), h.begin(), h.end());
    auto b = bsif_histogram(plane, bank);
    fs.bsif.values.insert(fs.bsif.values.end(), b.begin(), b.end());
  }
  return fs;
}

/// Image file -> FeatureSet under one fixed descriptor configuration.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(DescriptorConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.bsif_bank == "builtin") {
      bank_ = std::make_shared<FilterBank>(builtin_bsif_bank());
    } else {
      bank_ = std::make_shared<FilterBank>(FilterBank::load(cfg_.bsif_bank));
    }
    bank_->validate(cfg_.bsif_bits, cfg_.bsif_size);
  }

  const DescriptorConfig& config() const { return cfg_; }
  const FilterBank& bank() const { return *bank_; }

  /// Canonical text of every setting that affects feature values.
  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "smad-descriptor/1;size=" << cfg_.working_size << ";crop=" << cfg_.crop_fraction
       << ";resize=bilinear;color=hsv-hexcone+ycbcr-bt601-full;hue_achromatic=0"
       << ";pyramid=laplacian-binomial5-reflect101;levels=" << cfg_.pyramid_levels << ";lbp=8," << cfg_.lbp_radius
       << ";hog=" << cfg_.hog_bins << "bins," << cfg_.hog_cell << "px,2x2,l2hys" << cfg_.hog_clip
       << ";bsif=" << cfg_.bsif_size << "x" << cfg_.bsif_bits << ":" << std::hex << bank_->checksum();
    return os.str();
  }
  std::uint64_t hash() const { return fnv1a64(canonical()); }

  RgbImage prepare(const RgbImage& rgb) const {
    return resize_bilinear(center_crop(rgb, cfg_.crop_fraction), {cfg_.working_size, cfg_.working_size});
  }

  FeatureSet extract(const RgbImage& rgb, std::string source_id = {}) const {
    auto cs = decompose_color_spaces(prepare(rgb), std::move(source_id));
    return extract_feature_set(build_scale_space_stack(cs, cfg_.pyramid_levels), cfg_, *bank_);
  }

  FeatureSet extract_file(const std::filesystem::path& path) const {
    return extract(load_image(path), path.string());
  }

 private:
  DescriptorConfig cfg_;
  std::shared_ptr<const FilterBank> bank_;
};

}  // namespace smad
