#include <gtest/gtest.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "hazemix/alignment.hpp"
#include "hazemix/errors.hpp"
#include "hazemix/pipeline.hpp"
#include "hazemix/sidecar.hpp"

using namespace hazemix;
using namespace hazemix::fixture;
using nlohmann::json;

namespace {

json read_json(const fs::path& p) { return json::parse(read_bytes(p)); }

RunConfig base_config(const fs::path& out, std::uint64_t seed = 7) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.samples_per_pair = 2;
    cfg.output_dir = out;
    return cfg;
}

}  // namespace

TEST(DiscoverPairs, MatchesHazyAndGtByIdAndSorts) {
    const auto dir = scratch_dir("discover");
    write_source_dataset(dir, 3, 1, 8);
    save_image(RgbImage(8, 8), dir / "orphan_hazy.png");
    save_image(RgbImage(8, 8), dir / "notes_GT.jpg.txt");
    const auto m = discover_pairs(dir);
    ASSERT_EQ(m.pairs.size(), 3u);
    EXPECT_EQ(m.pairs[0].id, "scene0");
    EXPECT_EQ(m.pairs[2].id, "scene2");
    EXPECT_EQ(m.pairs[1].hazy.filename(), "scene1_hazy.png");
    EXPECT_EQ(m.pairs[1].clean.filename(), "scene1_GT.png");
    EXPECT_THROW(discover_pairs(dir / "missing"), IoError);
}

TEST(PairsFile, ResolvesRelativePathsAndRejectsDuplicates) {
    const auto dir = scratch_dir("pairsfile");
    write_source_dataset(dir, 2, 2, 8);
    write_file_atomic(dir / "pairs.json", json{{"version", 1},
                                               {"pairs", {{{"id", "a"}, {"hazy", "scene0_hazy.png"}, {"clean", "scene0_GT.png"}},
                                                          {{"id", "b"}, {"hazy", "scene1_hazy.png"}, {"clean", "scene1_GT.png"}}}}}
                                              .dump());
    const auto m = read_pairs_file(dir / "pairs.json");
    ASSERT_EQ(m.pairs.size(), 2u);
    EXPECT_EQ(m.pairs[1].hazy, dir / "scene1_hazy.png");

    write_file_atomic(dir / "dup.json", json{{"version", 1},
                                             {"pairs", {{{"id", "a"}, {"hazy", "x"}, {"clean", "y"}},
                                                        {{"id", "a"}, {"hazy", "x"}, {"clean", "y"}}}}}
                                            .dump());
    EXPECT_THROW(read_pairs_file(dir / "dup.json"), ValidationError);
    write_file_atomic(dir / "bad.json", "{not json");
    EXPECT_ANY_THROW(read_pairs_file(dir / "bad.json"));
}

TEST(RunMode, ParsesNames) {
    EXPECT_EQ(parse_run_mode("adapt"), RunMode::Adapt);
    EXPECT_EQ(parse_run_mode("generalize"), RunMode::Generalize);
    EXPECT_EQ(parse_run_mode("scalar-ablation"), RunMode::ScalarAblation);
    EXPECT_THROW(parse_run_mode("bogus"), ValidationError);
    EXPECT_EQ(to_string(RunMode::ScalarAblation), "scalar-ablation");
}

TEST(TargetImages, CacheIsReused) {
    const auto dir = scratch_dir("targets_cache");
    write_target_dataset(dir, 3, 3, 8);
    const auto first = load_target_images(dir);
    ASSERT_EQ(first.size(), 3u);
    EXPECT_TRUE(fs::exists(cache_path_for(dir / "target0.png")));
    const auto second = load_target_images(dir);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(first.histograms()[i].bins(), second.histograms()[i].bins());
    }
    EXPECT_EQ(first.source_ids(), (std::vector<std::string>{"target0.png", "target1.png", "target2.png"}));
}

TEST(RunAugment, DeterministicAcrossRunsAndThreadCounts) {
    const auto src = scratch_dir("det_src");
    const auto tgt = scratch_dir("det_tgt");
    write_source_dataset(src, 5, 4);
    write_target_dataset(tgt, 4, 5);
    const auto source = discover_pairs(src);
    const auto target = load_target_images(tgt);

    auto cfg = base_config(scratch_dir("det_out1"));
    cfg.threads = 1;
    const auto summary = run_augment(source, target, cfg);
    EXPECT_EQ(summary.pairs, 5u);
    EXPECT_EQ(summary.samples, 10u);
    cfg.output_dir = scratch_dir("det_out8");
    cfg.threads = 8;
    run_augment(source, target, cfg);
    EXPECT_EQ(tree_contents(fs::path(HAZEMIX_TEST_TMP) / "det_out1"),
              tree_contents(fs::path(HAZEMIX_TEST_TMP) / "det_out8"));

    cfg.output_dir = scratch_dir("det_out_seed");
    cfg.seed = 8;
    run_augment(source, target, cfg);
    EXPECT_NE(read_bytes(fs::path(HAZEMIX_TEST_TMP) / "det_out1" / "scene0_damix0.png"),
              read_bytes(cfg.output_dir / "scene0_damix0.png"));
}

TEST(RunAugment, ManifestReplaysEverySample) {
    const auto src = scratch_dir("replay_src");
    const auto tgt = scratch_dir("replay_tgt");
    write_source_dataset(src, 3, 6);
    write_target_dataset(tgt, 3, 7);
    const auto source = discover_pairs(src);
    const auto target = load_target_images(tgt);
    const auto out = scratch_dir("replay_out");
    run_augment(source, target, base_config(out));

    const auto manifest = read_json(out / "run_manifest.json");
    EXPECT_EQ(manifest["version"], 1);
    EXPECT_EQ(manifest["mode"], "adapt");
    EXPECT_EQ(manifest["seed"], 7);
    EXPECT_EQ(manifest["target_domain"].size(), 3u);
    const auto saved_domain = load_target_domain(out / "target_domain");
    ASSERT_EQ(manifest["pairs"].size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& rec = manifest["pairs"][i];
        const auto& pair = source.pairs[i];
        EXPECT_EQ(rec["id"], pair.id);
        EXPECT_EQ(load_image(out / rec["gt_file"].get<std::string>()), load_image(pair.clean));
        const auto hazy = load_image(pair.hazy);
        const auto clean = load_image(pair.clean);
        const AtmosphericLight light{rec["airlight"].get<Rgb>()};
        for (const auto& s : rec["samples"]) {
            const SimplexWeights theta(s["theta"].get<std::vector<double>>());
            const auto target_density = interpolate_target(saved_domain, theta);
            const auto replay = damix(hazy, clean, light, target_density);
            const auto written = load_image(out / s["file"].get<std::string>());
            EXPECT_EQ(replay.image, written);
            const double recomputed = wasserstein(estimate_density(to_brightness(written)), target_density);
            EXPECT_NEAR(recomputed, s["residual_distance"].get<double>(), 2.0 / kDefaultQuantileGrid);
            EXPECT_LE(s["residual_distance"].get<double>(), s["initial_distance"].get<double>());
        }
    }
}

TEST(RunAugment, SelfTargetLeavesImagesUnchanged) {
    const auto src = scratch_dir("self_src");
    write_source_dataset(src, 1, 9);
    const auto source = discover_pairs(src);
    const auto hazy = load_image(source.pairs[0].hazy);
    const auto domain = build_target_domain({to_brightness(hazy)});
    const auto out = scratch_dir("self_out");
    run_augment(source, domain, base_config(out));
    const auto result = load_image(out / "scene0_damix0.png");
    for (std::size_t i = 0; i < result.data().size(); ++i) {
        EXPECT_LE(std::abs(int(result.data()[i]) - int(hazy.data()[i])), 1);
    }
}

TEST(RunAugment, GeneralizeAndScalarModes) {
    const auto src = scratch_dir("modes_src");
    const auto tgt = scratch_dir("modes_tgt");
    write_source_dataset(src, 2, 10);
    write_target_dataset(tgt, 3, 11);
    const auto source = discover_pairs(src);

    auto cfg = base_config(scratch_dir("modes_gen"));
    cfg.mode = RunMode::Generalize;
    cfg.control_points = 5;
    run_augment(source, std::nullopt, cfg);
    auto manifest = read_json(cfg.output_dir / "run_manifest.json");
    EXPECT_EQ(manifest["mode"], "generalize");
    const auto cps = manifest["pairs"][0]["samples"][0]["control_points"].get<std::vector<double>>();
    ASSERT_EQ(cps.size(), 5u);
    EXPECT_TRUE(std::is_sorted(cps.begin(), cps.end()));
    EXPECT_TRUE(manifest["target_domain"].is_null());

    cfg = base_config(scratch_dir("modes_scalar"));
    cfg.mode = RunMode::ScalarAblation;
    run_augment(source, load_target_images(tgt), cfg);
    manifest = read_json(cfg.output_dir / "run_manifest.json");
    const auto& s = manifest["pairs"][1]["samples"][1];
    EXPECT_TRUE(s.contains("lambda"));
    EXPECT_TRUE(s["mix_mode"] == "thinner" || s["mix_mode"] == "thicker");
    EXPECT_TRUE(fs::exists(cfg.output_dir / "scene1_damix1.png"));

    cfg.mode = RunMode::Adapt;
    EXPECT_THROW(run_augment(source, std::nullopt, cfg), ValidationError);
}

TEST(RunAugment, SubsetOracleAndDebugOutputs) {
    const auto src = scratch_dir("extra_src");
    const auto tgt = scratch_dir("extra_tgt");
    write_source_dataset(src, 1, 12, 16);
    write_target_dataset(tgt, 4, 13, 16);
    auto cfg = base_config(scratch_dir("extra_out"));
    cfg.subset_k = 2;
    cfg.oracle = true;
    cfg.debug = true;
    run_augment(discover_pairs(src), load_target_images(tgt), cfg);
    const auto manifest = read_json(cfg.output_dir / "run_manifest.json");
    const auto& s = manifest["pairs"][0]["samples"][0];
    const auto theta = s["theta"].get<std::vector<double>>();
    EXPECT_EQ(std::count_if(theta.begin(), theta.end(), [](double v) { return v > 0.0; }), 2);
    EXPECT_TRUE(s["oracle_objective"].is_number());
    const auto dbg = cfg.output_dir / "debug";
    const auto alpha = load_pfm(dbg / "scene0_damix0_alpha.pfm");
    EXPECT_EQ(alpha.width, 16);
    EXPECT_NO_THROW(read_histogram_sidecar(dbg / "scene0_damix0_target.json"));
    EXPECT_NO_THROW(read_histogram_sidecar(dbg / "scene0_damix0_achieved.json"));
}

TEST(RunAugment, ValidatesConfigAndInputs) {
    const auto src = scratch_dir("val_src");
    write_source_dataset(src, 1, 14, 8);
    save_image(RgbImage(9, 8), src / "bad_hazy.png");
    save_image(RgbImage(8, 8), src / "bad_GT.png");
    const auto domain = build_target_domain({BrightnessImage(4, 4, 100)});
    auto cfg = base_config(scratch_dir("val_out"));
    EXPECT_THROW(run_augment(discover_pairs(src), domain, cfg), ValidationError);
    cfg.samples_per_pair = 0;
    EXPECT_THROW(run_augment({}, domain, cfg), ValidationError);
    cfg = base_config(scratch_dir("val_out2"));
    cfg.p = 0.5;
    EXPECT_THROW(run_augment({}, domain, cfg), ValidationError);
}

TEST(ResolveThreads, HonorsEnvironment) {
    EXPECT_EQ(resolve_threads(3), 3u);
    ::setenv("HAZEMIX_THREADS", "2", 1);
    EXPECT_EQ(resolve_threads(0), 2u);
    ::unsetenv("HAZEMIX_THREADS");
    EXPECT_GE(resolve_threads(0), 1u);
}

TEST(Cli, SubcommandsAndExitCodes) {
    const auto dir = scratch_dir("cli");
    save_image(RgbImage(8, 8, Rgb{255, 255, 255}), dir / "white.png");
    save_image(RgbImage(8, 8, Rgb{0, 0, 0}), dir / "black.png");
    save_image(RgbImage(8, 8, Rgb{10, 20, 30}), dir / "clean.png");
    save_image(RgbImage(9, 8, Rgb{10, 20, 30}), dir / "wide.png");
    const std::string d = "\"" + dir.string() + "\"";

    auto r = run_cli("airlight " + d + "/white.png");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.output, "255,255,255\n");
    EXPECT_EQ(run_cli("airlight " + d + "/white.png --patch 2").exit_code, 3);
    EXPECT_EQ(run_cli("airlight " + d + "/missing.png").exit_code, 2);

    r = run_cli("distance " + d + "/white.png " + d + "/white.png");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_DOUBLE_EQ(std::stod(r.output), 0.0);
    r = run_cli("distance " + d + "/white.png " + d + "/black.png");
    EXPECT_DOUBLE_EQ(std::stod(r.output), 255.0);

    EXPECT_EQ(run_cli("density " + d + "/white.png --json " + d + "/white.json").exit_code, 0);
    const auto h = read_histogram_sidecar(dir / "white.json");
    EXPECT_DOUBLE_EQ(h[255], 1.0);
    EXPECT_EQ(h.pixel_count(), 64u);

    write_file_atomic(dir / "junk.png", "definitely not an image");
    EXPECT_EQ(run_cli("density " + d + "/junk.png").exit_code, 2);

    EXPECT_EQ(run_cli("synth --clean " + d + "/clean.png --airlight 200,210,220 --t 1 --out " + d + "/t1.png").exit_code, 0);
    EXPECT_EQ(load_image(dir / "t1.png"), load_image(dir / "clean.png"));
    EXPECT_EQ(run_cli("synth --clean " + d + "/clean.png --airlight 200,210,220 --t 0 --out " + d + "/t0.png").exit_code, 0);
    EXPECT_EQ(load_image(dir / "t0.png"), RgbImage(8, 8, Rgb{200, 210, 220}));
    EXPECT_EQ(run_cli("synth --clean " + d + "/clean.png --airlight 200,210,220 --depth ramp --beta 1 --out " + d + "/ramp.png").exit_code, 0);
    EXPECT_TRUE(fs::exists(dir / "ramp.png"));
    EXPECT_EQ(run_cli("synth --clean " + d + "/clean.png --airlight 200,210,220 --t 1.5 --out " + d + "/bad.png").exit_code, 3);

    EXPECT_EQ(run_cli("frobnicate").exit_code, 3);
    EXPECT_EQ(run_cli("--help").exit_code, 0);
}

TEST(Cli, AugmentErrorsAndSuccess) {
    const auto src = scratch_dir("cli_src");
    const auto tgt = scratch_dir("cli_tgt");
    const auto empty = scratch_dir("cli_empty");
    write_source_dataset(src, 2, 15, 12);
    write_target_dataset(tgt, 2, 16, 12);
    const auto out = fs::path(HAZEMIX_TEST_TMP) / "cli_out";
    fs::remove_all(out);
    const std::string base = "augment --source \"" + src.string() + "\" --out \"" + out.string() + "\" --seed 3";

    EXPECT_EQ(run_cli(base + " --target \"" + empty.string() + "\"").exit_code, 3);
    EXPECT_EQ(run_cli(base).exit_code, 3);  // adapt needs a target
    EXPECT_EQ(run_cli(base + " --target \"" + tgt.string() + "\" --mode nope").exit_code, 3);
    EXPECT_EQ(run_cli(base + " --target \"" + (tgt / "missing").string() + "\"").exit_code, 2);

    const auto r = run_cli(base + " --target \"" + tgt.string() + "\" --samples-per-pair 2");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_TRUE(fs::exists(out / "scene1_damix1.png"));
    EXPECT_TRUE(fs::exists(out / "scene1_GT.png"));
    EXPECT_TRUE(fs::exists(out / "run_manifest.json"));

    save_image(RgbImage(13, 12), src / "odd_hazy.png");
    save_image(RgbImage(12, 12), src / "odd_GT.png");
    EXPECT_EQ(run_cli(base + " --target \"" + tgt.string() + "\"").exit_code, 3);
}
