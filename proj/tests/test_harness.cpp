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

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "smad/smad.hpp"
#include "test_util.hpp"

namespace smad {
namespace {

namespace fs = std::filesystem;

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

const char* kHeader = "path,label,medium,post,compressed,partition,subject_id\n";

// ---------------------------------------------------------------------------
// Manifest

TEST(Manifest, ParsesRowsAndQuotedFields) {
  std::istringstream in(std::string(kHeader) +
                        "a.png,bonafide,digital,before,no,train,s1\n"
                        "\"b,c.png\",morph,ps1,after,yes,test,s2+s3\r\n");
  auto m = parse_manifest(in, "/data");
  ASSERT_EQ(m.rows.size(), 2u);
  EXPECT_EQ(m.rows[1].path, "b,c.png");
  EXPECT_EQ(m.rows[1].label, Label::Morph);
  EXPECT_EQ(m.rows[1].medium, Medium::Ps1);
  EXPECT_EQ(m.rows[1].post, Post::After);
  EXPECT_TRUE(m.rows[1].compressed);
  EXPECT_EQ(m.resolve(m.rows[0]), fs::path("/data/a.png"));
  EXPECT_EQ(contributing_subjects("s2+s3"), (std::vector<std::string>{"s2", "s3"}));

  std::ostringstream out;
  write_manifest(out, m);
  std::istringstream again(out.str());
  auto m2 = parse_manifest(again, "/data");
  EXPECT_EQ(m2.rows[1].path, "b,c.png");
  EXPECT_EQ(m2.rows[1].subject_id, "s2+s3");
}

TEST(Manifest, TableThreeCounts) {
  // Per medium: training 689 bona fide + 517 morphs, testing 583 bona fide + 554 morphs.
  std::ostringstream text;
  text << kHeader;
  int id = 0;
  for (const char* medium : {"digital", "ps1", "ps2"})
    for (auto [part, nb, nm] : {std::tuple{"train", 689, 517}, std::tuple{"test", 583, 554}}) {
      std::string prefix = std::string(part) == "train" ? "tr" : "te";
      for (int i = 0; i < nb; ++i)
        text << medium << "/" << part << "/bf" << i << ".png,bonafide," << medium << ",before,no," << part << ","
             << prefix << (i % 50) << "\n";
      for (int i = 0; i < nm; ++i)
        text << medium << "/" << part << "/mo" << i << ".png,morph," << medium << ",before,no," << part << ","
             << prefix << (i % 50) << "+" << prefix << ((i + 7) % 50) << "\n";
      ++id;
    }
  std::istringstream in(text.str());
  auto s = parse_manifest(in, ".").summary();
  for (auto m : kMedia) {
    EXPECT_EQ(s.count(Partition::Train, m, Label::BonaFide), 689u);
    EXPECT_EQ(s.count(Partition::Train, m, Label::Morph), 517u);
    EXPECT_EQ(s.count(Partition::Test, m, Label::BonaFide), 583u);
    EXPECT_EQ(s.count(Partition::Test, m, Label::Morph), 554u);
  }
  EXPECT_EQ(s.rows, 3u * (689 + 517 + 583 + 554));
  EXPECT_EQ(s.train_subjects, 50u);
  EXPECT_EQ(s.test_subjects, 50u);
  std::ostringstream printed;
  print_summary(printed, s);
  EXPECT_NE(printed.str().find("689"), std::string::npos);
}

TEST(Manifest, LeakageNamesTheSubject) {
  std::istringstream in(std::string(kHeader) +
                        "a.png,bonafide,digital,before,no,train,alice\n"
                        "b.png,morph,digital,before,no,test,bob+alice\n");
  auto msg = test::error_message_of([&] { parse_manifest(in, "."); });
  EXPECT_NE(msg.find("alice"), std::string::npos);
  std::istringstream again(std::string(kHeader) +
                           "a.png,bonafide,digital,before,no,train,alice\n"
                           "b.png,morph,digital,before,no,test,bob+alice\n");
  EXPECT_EQ(test::error_code_of([&] { parse_manifest(again, "."); }), Errc::leakage);
}

TEST(Manifest, FormatErrors) {
  auto code = [](const std::string& text) {
    std::istringstream in(text);
    return test::error_code_of([&] { parse_manifest(in, "."); });
  };
  EXPECT_EQ(code(""), Errc::format);
  EXPECT_EQ(code("path,label\n"), Errc::format);
  EXPECT_EQ(code(std::string(kHeader) + "a.png,bonafide,digital,before,no,train\n"), Errc::format);
  EXPECT_EQ(code(std::string(kHeader) + "a.png,bonafide,film,before,no,train,s1\n"), Errc::format);
  EXPECT_EQ(code(std::string(kHeader) + "a.png,bonafide,digital,before,no,train,s1\n"
                                        "a.png,morph,digital,before,no,train,s2\n"),
            Errc::format);
  EXPECT_EQ(code(kHeader), Errc::format);  // header only
}

TEST(Manifest, LoadChecksFiles) {
  auto dir = test::scratch_dir("manifest_load");
  std::ofstream(dir / "m.csv") << kHeader << "missing.png,bonafide,digital,before,no,train,s1\n";
  EXPECT_EQ(test::error_code_of([&] { load_manifest(dir / "m.csv"); }), Errc::io);
  EXPECT_NO_THROW(load_manifest(dir / "m.csv", false));
  EXPECT_EQ(test::error_code_of([&] { load_manifest(dir / "nope.csv"); }), Errc::io);
  std::ofstream(dir / "empty.csv").close();
  EXPECT_EQ(test::error_code_of([&] { load_manifest(dir / "empty.csv"); }), Errc::format);
}

// ---------------------------------------------------------------------------
// Protocols

ExperimentSpec spec_of(Protocol p, const std::string& train, const std::string& test) {
  return {p, parse_selector(train), parse_selector(test)};
}

TEST(Protocol, IntraCrossMediumRejected) {
  auto s = spec_of(Protocol::Intra, "medium=digital,post=before", "medium=ps1,post=before");
  EXPECT_EQ(test::error_code_of([&] { validate_protocol(s); }), Errc::protocol);
}

TEST(Protocol, RulesPerProtocol) {
  auto ok = [](Protocol p, const char* a, const char* b) {
    try {
      validate_protocol(spec_of(p, a, b));
      return true;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::protocol);
      return false;
    }
  };
  EXPECT_TRUE(ok(Protocol::Intra, "medium=ps1,post=after", "medium=ps1,post=after"));
  EXPECT_FALSE(ok(Protocol::Intra, "medium=ps1,post=after", "medium=ps1,post=before"));
  EXPECT_FALSE(ok(Protocol::Intra, "medium=ps1,post=after,compressed=no", "medium=ps1,post=after,compressed=yes"));
  EXPECT_FALSE(ok(Protocol::Intra, "medium=ps1", "medium=ps1"));
  EXPECT_TRUE(ok(Protocol::InterMedium, "medium=ps1,post=before", "medium=ps2,post=before"));
  EXPECT_FALSE(ok(Protocol::InterMedium, "medium=ps1,post=before", "medium=ps1,post=before"));
  EXPECT_FALSE(ok(Protocol::InterMedium, "medium=ps1,post=before", "medium=ps2,post=after"));
  EXPECT_TRUE(ok(Protocol::InterMediumVariedPost, "medium=ps1,post=after", "medium=ps2,post=before"));
  EXPECT_FALSE(ok(Protocol::InterMediumVariedPost, "medium=ps1,post=after", "medium=ps2,post=after"));
}

TEST(Protocol, NamesAndSelectors) {
  EXPECT_EQ(parse_protocol("inter-medium"), Protocol::InterMedium);
  EXPECT_EQ(parse_protocol("inter_medium_varied_post"), Protocol::InterMediumVariedPost);
  EXPECT_EQ(to_string(Protocol::Intra), "intra");
  auto s = parse_selector("medium=ps2, post=after,compressed=yes");
  EXPECT_EQ(s.str(), "medium=ps2,post=after,compressed=yes");
  EXPECT_EQ(Selector{}.str(), "*");
  EXPECT_EQ(test::error_code_of([] { parse_selector("medium=film"); }), Errc::config);
  EXPECT_EQ(test::error_code_of([] { parse_selector("colour=red"); }), Errc::config);
  EXPECT_EQ(test::error_code_of([] { parse_selector("medium=ps1,medium=ps2"); }), Errc::config);
}

TEST(Protocol, EnumeratesSixtyLegalCells) {
  auto cells = enumerate_protocol_cells();
  EXPECT_EQ(cells.size(), 60u);
  std::map<std::string, int> per_table;
  std::set<std::string> labels;
  for (const auto& c : cells) {
    EXPECT_NO_THROW(validate_protocol(c.spec)) << c.spec.label();
    ++per_table[c.table];
    labels.insert(c.spec.label());
  }
  EXPECT_EQ(labels.size(), 60u);
  EXPECT_EQ(per_table["exp1"], 12);
  EXPECT_EQ(per_table["exp2-before"], 12);
  EXPECT_EQ(per_table["exp2-after"], 12);
  EXPECT_EQ(per_table["exp3-after-before"], 12);
  EXPECT_EQ(per_table["exp3-before-after"], 12);
}

TEST(Protocol, SelectRowsChecksClassesAndSubjects) {
  std::istringstream in(std::string(kHeader) +
                        "a.png,bonafide,digital,before,no,train,s1\n"
                        "b.png,morph,digital,before,no,train,s2+s3\n"
                        "c.png,bonafide,digital,before,no,test,s4\n"
                        "d.png,morph,digital,before,no,test,s5+s6\n"
                        "e.png,bonafide,ps1,before,no,test,s7\n");
  auto m = parse_manifest(in, ".");
  auto sel = select_rows(m, spec_of(Protocol::Intra, "medium=digital,post=before", "medium=digital,post=before"));
  EXPECT_EQ(sel.train, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(sel.test, (std::vector<std::size_t>{2, 3}));
  auto bad = spec_of(Protocol::InterMedium, "medium=digital,post=before", "medium=ps1,post=before");
  EXPECT_EQ(test::error_code_of([&] { select_rows(m, bad); }), Errc::invalid);  // ps1 test side has no morphs
}

// ---------------------------------------------------------------------------
// Synthetic data

TEST(Synth, TenPerClassGivesTwentyFiles) {
  auto dir = test::scratch_dir("synth10");
  SynthOptions opt;
  opt.n_per_class = 10;
  opt.size = 64;
  auto m = generate_synthetic_dataset(dir, opt);
  EXPECT_EQ(m.rows.size(), 20u);
  auto loaded = load_manifest(dir / "manifest.csv");
  EXPECT_EQ(loaded.rows.size(), 20u);
  std::size_t images = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png") ++images;
  EXPECT_EQ(images, 20u);
  auto s = loaded.summary();
  EXPECT_EQ(s.count(Partition::Train, Medium::Digital, Label::BonaFide) +
                s.count(Partition::Test, Medium::Digital, Label::BonaFide),
            10u);
  for (const auto& r : loaded.rows) {
    if (r.label == Label::Morph) {
      EXPECT_EQ(contributing_subjects(r.subject_id).size(), 2u);
    }
  }
}

TEST(Synth, SameSeedSameBytes) {
  auto a = test::scratch_dir("synth_a"), b = test::scratch_dir("synth_b"), c = test::scratch_dir("synth_c");
  SynthOptions opt;
  opt.n_per_class = 4;
  opt.size = 64;
  opt.compression = {false, true};
  auto ma = generate_synthetic_dataset(a, opt);
  generate_synthetic_dataset(b, opt);
  opt.seed = 8;
  generate_synthetic_dataset(c, opt);
  EXPECT_EQ(read_bytes(a / "manifest.csv"), read_bytes(b / "manifest.csv"));
  bool any_differs = false;
  for (const auto& r : ma.rows) {
    EXPECT_EQ(read_bytes(a / r.path), read_bytes(b / r.path)) << r.path;
    any_differs |= read_bytes(a / r.path) != read_bytes(c / r.path);
  }
  EXPECT_TRUE(any_differs);
}

TEST(Synth, InvalidOptionsRejected) {
  SynthOptions opt;
  opt.n_per_class = 1;
  EXPECT_EQ(test::error_code_of([&] { opt.validate(); }), Errc::config);
  opt = {};
  opt.ghost_amplitude = 1.5;
  EXPECT_EQ(test::error_code_of([&] { opt.validate(); }), Errc::config);
}

TEST(Synth, GhostingDoublesAStepEdge) {
  RgbImage img{ImagePlane(64, 8), ImagePlane(64, 8), ImagePlane(64, 8)};
  for (ImagePlane* p : {&img.r, &img.g, &img.b})
    for (int y = 0; y < 8; ++y)
      for (int x = 32; x < 64; ++x) p->at(x, y) = 1.0;
  synth::apply_ghosting(img, ImagePlane(64, 8, 1.0), 0.5, 6.0, 0.0);
  for (int x = 0; x < 64; ++x) {
    double want = x < 32 ? 0.0 : x < 38 ? 0.5 : 1.0;
    EXPECT_DOUBLE_EQ(img.g.at(x, 4), want) << "x=" << x;
  }
}

// Fraction of pixels where the ghosted and ghost-free renderings of the same sample differ.
double changed_fraction(const RgbImage& a, const RgbImage& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.r.data.size(); ++i)
    n += std::abs(a.r.data[i] - b.r.data[i]) + std::abs(a.g.data[i] - b.g.data[i]) +
             std::abs(a.b.data[i] - b.b.data[i]) >
         3.0 / 255;
  return double(n) / double(a.r.data.size());
}

TEST(Synth, GhostingIsLocalizedAndMorphOnly) {
  auto with = test::scratch_dir("synth_ghost"), without = test::scratch_dir("synth_noghost");
  SynthOptions opt;
  opt.n_per_class = 8;
  opt.size = 128;
  auto m = generate_synthetic_dataset(with, opt);
  opt.ghost_amplitude = 0.0;
  auto m0 = generate_synthetic_dataset(without, opt);
  ASSERT_EQ(m.rows.size(), m0.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    auto a = load_image(m.resolve(m.rows[i])), b = load_image(m0.resolve(m0.rows[i]));
    double f = changed_fraction(a, b);
    if (m.rows[i].label == Label::BonaFide) {
      EXPECT_EQ(f, 0.0) << m.rows[i].path;
    } else {
      EXPECT_GT(f, 0.01) << m.rows[i].path;
      EXPECT_LT(f, 0.5) << m.rows[i].path;
    }
  }
}

// ---------------------------------------------------------------------------
// Development split

TEST(DevSplit, StratifiedDeterministicDisjoint) {
  std::vector<Label> labels;
  for (int i = 0; i < 50; ++i) labels.push_back(i < 30 ? Label::BonaFide : Label::Morph);
  auto a = stratified_dev_split(labels, 0.2, 5);
  auto b = stratified_dev_split(labels, 0.2, 5);
  EXPECT_EQ(a.dev, b.dev);
  std::size_t dev_morph = 0;
  for (auto i : a.dev) dev_morph += labels[i] == Label::Morph;
  EXPECT_EQ(a.dev.size(), 10u);
  EXPECT_EQ(dev_morph, 4u);
  std::set<std::size_t> all(a.fit.begin(), a.fit.end());
  for (auto i : a.dev) EXPECT_TRUE(all.insert(i).second);
  EXPECT_EQ(all.size(), 50u);
  EXPECT_NE(stratified_dev_split(labels, 0.2, 6).dev, a.dev);
  std::vector<Label> tiny{Label::BonaFide, Label::Morph, Label::Morph};
  EXPECT_EQ(test::error_code_of([&] { stratified_dev_split(tiny, 0.2, 1); }), Errc::invalid);
}

// ---------------------------------------------------------------------------
// Config

TEST(Config, TomlLikeText) {
  auto c = parse_config(
      "# comment\n"
      "seed = 9\n"
      "workers = 2\n"
      "[descriptor]\n"
      "working_size = 128\n"
      "crop_fraction = 0.9\n"
      "bsif_bank = \"builtin\"\n"
      "[svm]\n"
      "c = 2.5\n"
      "[fusion]\n"
      "replicates = 7\n"
      "resample = false\n"
      "rule = \"inverse_eer\"\n");
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.workers, 2);
  EXPECT_EQ(c.descriptor.working_size, 128);
  EXPECT_DOUBLE_EQ(c.descriptor.crop_fraction, 0.9);
  EXPECT_DOUBLE_EQ(c.train.svm.c, 2.5);
  EXPECT_EQ(c.train.replicates, 7);
  EXPECT_FALSE(c.train.resample);
  EXPECT_EQ(c.train.rule, WeightRule::InverseEer);
}

TEST(Config, JsonRoundTrip) {
  Config c;
  c.train.seed = 77;
  c.descriptor.lbp_radius = 2;
  auto back = parse_config(to_json(c).dump());
  EXPECT_EQ(back.train.seed, 77u);
  EXPECT_EQ(back.descriptor.lbp_radius, 2);
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
}

TEST(Config, SchemaErrors) {
  auto code = [](const std::string& text) { return test::error_code_of([&] { parse_config(text); }); };
  EXPECT_EQ(code("foo = 1\n"), Errc::config);
  EXPECT_EQ(code("[svm]\ngamma = 1\n"), Errc::config);
  EXPECT_EQ(code("[svm]\nc = \"big\"\n"), Errc::config);
  EXPECT_EQ(code("[svm]\nc = -1\n"), Errc::config);
  EXPECT_EQ(code("[descriptor]\nworking_size = 12.5\n"), Errc::config);
  EXPECT_EQ(code("[fusion]\nrule = \"max\"\n"), Errc::config);
  EXPECT_EQ(code("seed\n"), Errc::config);
  EXPECT_EQ(code("{\"seed\": \"x\"}"), Errc::config);
  EXPECT_EQ(test::error_code_of([] { load_config("/nonexistent/cfg.toml"); }), Errc::io);
}

// ---------------------------------------------------------------------------
// Pipeline pieces over a small synthetic set

class SmallSet : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(test::scratch_dir("small_set"));
    SynthOptions opt;
    opt.n_per_class = 12;
    opt.size = 64;
    manifest_ = new DatasetManifest(generate_synthetic_dataset(*dir_, opt));
    cfg_ = new Config();
    cfg_->descriptor.working_size = 64;
    cfg_->train.replicates = 10;
    FeatureExtractor ex(cfg_->descriptor);
    std::vector<fs::path> paths;
    for (const auto& r : manifest_->rows) paths.push_back(manifest_->resolve(r));
    sets_ = new std::vector<FeatureSet>(extract_all(ex, paths, 1));
  }
  static void TearDownTestSuite() {
    delete sets_;
    delete cfg_;
    delete manifest_;
    delete dir_;
  }
  static Selector train_sel() { return parse_selector("medium=digital,post=before,compressed=no"); }

  static fs::path* dir_;
  static DatasetManifest* manifest_;
  static Config* cfg_;
  static std::vector<FeatureSet>* sets_;
};
fs::path* SmallSet::dir_ = nullptr;
DatasetManifest* SmallSet::manifest_ = nullptr;
Config* SmallSet::cfg_ = nullptr;
std::vector<FeatureSet>* SmallSet::sets_ = nullptr;

TEST_F(SmallSet, ParallelExtractionMatchesSequential) {
  FeatureExtractor ex(cfg_->descriptor);
  std::vector<fs::path> paths;
  for (const auto& r : manifest_->rows) paths.push_back(manifest_->resolve(r));
  auto par = extract_all(ex, paths, 3);
  ASSERT_EQ(par.size(), sets_->size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    EXPECT_EQ(par[i].source_id, (*sets_)[i].source_id);
    EXPECT_EQ(par[i].hog.values, (*sets_)[i].hog.values);
  }
  paths.insert(paths.begin() + 2, *dir_ / "missing.png");
  EXPECT_EQ(test::error_code_of([&] { extract_all(ex, paths, 2); }), Errc::io);
}

TEST_F(SmallSet, BundleRoundTrip) {
  auto det = train_on_manifest(*manifest_, train_sel(), *cfg_, std::nullopt);
  auto path = *dir_ / "bundle.bin";
  save_bundle(det, path);
  auto [loaded, ex] = load_bundle_with_extractor(path);
  EXPECT_EQ(loaded.train_selector, det.train_selector);
  EXPECT_EQ(loaded.fusion.threshold, det.fusion.threshold);
  for (const auto& fs : *sets_) {
    EXPECT_NEAR(loaded.score(fs), det.score(fs), 1e-12);
    auto a = loaded.raw_scores(fs), b = det.raw_scores(fs);
    for (auto f : kFeatureTypes)
      for (auto c : kClassifierKinds) EXPECT_NEAR(a.at(f, c), b.at(f, c), 1e-12);
  }
}

TEST_F(SmallSet, BundleErrors) {
  auto det = train_on_manifest(*manifest_, train_sel(), *cfg_, std::nullopt);
  auto path = *dir_ / "bundle_err.bin";
  save_bundle(det, path);

  auto truncated = *dir_ / "truncated.bin";
  fs::copy_file(path, truncated, fs::copy_options::overwrite_existing);
  fs::resize_file(truncated, fs::file_size(path) / 2);
  EXPECT_EQ(test::error_code_of([&] { load_bundle(truncated); }), Errc::checksum);

  auto flipped = *dir_ / "flipped.bin";
  fs::copy_file(path, flipped, fs::copy_options::overwrite_existing);
  {
    std::fstream f(flipped, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(100);
    f.put('\x5a');
  }
  EXPECT_EQ(test::error_code_of([&] { load_bundle(flipped); }), Errc::checksum);

  auto future = *dir_ / "future.bin";
  {
    BinaryWriter w(future);
    w.put_raw(kBundleMagic, sizeof kBundleMagic);
    w.put<std::uint32_t>(kBundleVersion + 1);
    w.commit();
  }
  EXPECT_EQ(test::error_code_of([&] { load_bundle(future); }), Errc::version);

  DescriptorConfig other = cfg_->descriptor;
  other.lbp_radius = 2;
  auto loaded = load_bundle(path);
  EXPECT_EQ(test::error_code_of([&] { check_descriptor(loaded, FeatureExtractor(other)); }), Errc::mismatch);
  EXPECT_EQ(test::error_code_of([&] { load_bundle(*dir_ / "absent.bin"); }), Errc::io);
}

TEST_F(SmallSet, FeatureCacheRoundTrip) {
  FeatureExtractor ex(cfg_->descriptor);
  auto cache = *dir_ / "cache";
  save_feature_cache(cache, *manifest_, *sets_, ex);
  auto back = load_feature_cache(cache, *manifest_, ex);
  ASSERT_EQ(back.size(), sets_->size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].lbp.values, (*sets_)[i].lbp.values);
    EXPECT_EQ(back[i].hog.values, (*sets_)[i].hog.values);
    EXPECT_EQ(back[i].bsif.values, (*sets_)[i].bsif.values);
  }
  DescriptorConfig other = cfg_->descriptor;
  other.hog_bins = 8;
  EXPECT_EQ(test::error_code_of([&] { load_feature_cache(cache, *manifest_, FeatureExtractor(other)); }),
            Errc::mismatch);
  std::vector<std::size_t> rows{0, 3, 5};
  auto via = features_for_rows(*manifest_, rows, ex, 1, cache);
  for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_EQ(via[k].lbp.values, (*sets_)[rows[k]].lbp.values);
}

TEST_F(SmallSet, ExperimentReportIsDeterministicAndSubjectDisjoint) {
  auto spec = spec_of(Protocol::Intra, "medium=digital,post=before,compressed=no",
                      "medium=digital,post=before,compressed=no");
  auto sel = select_rows(*manifest_, spec);
  std::set<std::string> train_subjects;
  for (auto i : sel.train)
    for (auto& s : contributing_subjects(manifest_->rows[i].subject_id)) train_subjects.insert(s);
  for (auto i : sel.test)
    for (auto& s : contributing_subjects(manifest_->rows[i].subject_id)) EXPECT_FALSE(train_subjects.count(s));

  auto a = run_experiment(*manifest_, spec, *cfg_);
  auto b = run_experiment(*manifest_, spec, *cfg_);
  EXPECT_EQ(a.report_json.dump(2), b.report_json.dump(2));
  EXPECT_EQ(a.report_json["format"], "smad-report/1");
  EXPECT_EQ(a.scores.size(), sel.test.size());

  auto runs = *dir_ / "runs";
  auto run_dir = write_run_dir(runs, a, spec, *cfg_, *dir_ / "manifest.csv");
  for (const char* f : {"report.json", "det.csv", "bundle.bin", "config.json"}) EXPECT_TRUE(fs::exists(run_dir / f));
  EXPECT_EQ(read_bytes(run_dir / "report.json"), a.report_json.dump(2) + "\n");
}

}  // namespace
}  // namespace smad
