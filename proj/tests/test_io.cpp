#include "fnmr/experiment.hpp"
#include "fnmr/io.hpp"
#include "fnmr/svg.hpp"
#include "fnmr/synthdata.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace fnmr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fnmr_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 3.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("dataset CSV") {
  SUBCASE("well-formed file") {
    const fs::path p = scratch("ok.csv");
    write_text(p, "0,0.25,0.75,1\n1,2,3,4\n5,6,7,8\n9,10,11,12\n");
    const FunctionalDataset d = load_dataset_csv(p);
    CHECK(d.size() == 3);
    CHECK(d.grid_size() == 4);
    CHECK(d.provenance == "external");
    CHECK(d.values(2, 3) == 12.0);
  }
  SUBCASE("without grid row") {
    const fs::path p = scratch("nogrid.csv");
    write_text(p, "1,2,3\n4,5,6\n7,8,9\n");
    const FunctionalDataset d = load_dataset_csv(p, false);
    CHECK(d.size() == 3);
    CHECK(d.grid(2) == 1.0);
  }
  SUBCASE("non-numeric cell names line and column") {
    const fs::path p = scratch("bad.csv");
    write_text(p, "0,0.5,1\n1,2,3\n4,x,6\n7,8,9\n");
    const std::string msg = error_of([&] { load_dataset_csv(p); });
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
  SUBCASE("ragged rows") {
    const fs::path p = scratch("ragged.csv");
    write_text(p, "0,0.5,1\n1,2,3\n4,5\n7,8,9\n");
    CHECK(error_of([&] { load_dataset_csv(p); }).find("line 3") != std::string::npos);
  }
  SUBCASE("duplicate grid values") {
    const fs::path p = scratch("dup.csv");
    write_text(p, "0,0.5,0.5\n1,2,3\n4,5,6\n7,8,9\n");
    CHECK(error_of([&] { load_dataset_csv(p); }).find("line 1") != std::string::npos);
  }
  SUBCASE("round trip of a generated setting") {
    const GeneratedData g = generate_setting(find_setting("p2-l"), 40, 30, 3);
    const fs::path p = scratch("gen.csv");
    save_dataset_csv(p, g.data);
    const FunctionalDataset back = load_dataset_csv(p);
    CHECK((back.values - g.data.values).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((back.grid - g.data.grid).cwiseAbs().maxCoeff() <= 1e-15);
    const fs::path pp = scratch("gen_params.csv");
    save_params_csv(pp, g.params);
    const ParamSample ps = load_params_csv(pp);
    CHECK(ps.values == g.params.values);
    CHECK(ps.active_params == g.params.active_params);
  }
  CHECK_THROWS_AS(load_dataset_csv(scratch("missing.csv")), Error);
}

TEST_CASE("distance CSV") {
  const DistanceMatrix d = pairwise_direct(oracle::random_points(7, 2, 4));
  const fs::path p = scratch("d.csv");
  save_distance_csv(p, d);
  CHECK(load_distance_csv(p).d == d.d);
  write_text(p, "0,1\n2,0\n");
  CHECK_THROWS_AS(load_distance_csv(p), Error);
  write_text(p, "0,1,2\n1,0,1\n");
  CHECK_THROWS_AS(load_distance_csv(p), Error);
}

TEST_CASE("scatter SVG") {
  Embedding one;
  one.coords = Matrix::Zero(1, 2);
  const std::string s = scatter_svg(one.coords, Vector::Zero(1));
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.find("</svg>") != std::string::npos);
  std::size_t circles = 0;
  for (auto pos = s.find("<circle"); pos != std::string::npos; pos = s.find("<circle", pos + 1)) ++circles;
  CHECK(circles == 1);

  Embedding e;
  e.coords = oracle::random_points(50, 3, 2);
  const Vector color = e.coords.col(0);
  const auto files = render_scatter_svg(e, color, scratch("plot.svg"));
  REQUIRE(files.size() == 2);
  CHECK(files[1].filename() == "plot_13.svg");
  const std::string first = read_text(files[0]);
  render_scatter_svg(e, color, scratch("plot.svg"));
  CHECK(read_text(files[0]) == first);

  CHECK(color_ramp(0.0) == std::array<int, 3>{68, 1, 84});
  CHECK(color_ramp(1.0) == std::array<int, 3>{253, 231, 37});
  CHECK(color_ramp(-4.0) == color_ramp(0.0));

  Embedding flat;
  flat.coords = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(render_scatter_svg(flat, Vector::Zero(3), scratch("flat.svg")), Error);
}

TEST_CASE("experiment config") {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "settings": ["a1-l", "a3-hx"], "n": 120, "methods": ["mds", "isomap"],
    "metrics": "geo", "grids": {"isomap": {"k": [5, 10]}}
  })");
  const ExperimentConfig cfg = config_from_json(j);
  CHECK(cfg.settings.size() == 2);
  CHECK(cfg.n == 120);
  CHECK(cfg.m == 100);
  CHECK(cfg.metrics == std::vector<Metric>{Metric::geodesic});
  CHECK(cfg.grid_overrides.at(Method::isomap).at("k") == std::vector<double>{5, 10});
  cfg.validate();
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"bogus": 1})")), Error);
  ExperimentConfig bad = cfg;
  bad.settings = {"zz"};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.spaces = {Space::embedding};
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_FALSE(to_json(cfg).contains("workers"));
  CHECK_FALSE(to_json(cfg).contains("output_dir"));
}

TEST_CASE("experiment run, records and determinism") {
  ExperimentConfig cfg;
  cfg.settings = {"a1-l"};
  cfg.n = 40;
  cfg.m = 20;
  cfg.methods = {Method::isomap};
  cfg.metrics = {Metric::geodesic};
  cfg.spaces = {Space::parameter};
  cfg.grid_overrides[Method::isomap] = {{"k", {4, 8}}, {"ndim", {2}}};
  cfg.output_dir = scratch("exp_a");
  fs::remove_all(cfg.output_dir);
  const auto recs = run_experiment(cfg);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].ok);
  CHECK(recs[0].reports.size() == 4);
  CHECK(recs[0].best.has_value());
  for (const auto& [name, rel] : recs[0].artifacts) CHECK(fs::exists(cfg.output_dir / rel));

  const auto loaded = load_experiment(cfg.output_dir);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].tuning.best_score == recs[0].tuning.best_score);
  CHECK(loaded[0].tuning.best_hyper == recs[0].tuning.best_hyper);
  CHECK(loaded[0].report(Space::function, Metric::direct)->auc ==
        recs[0].report(Space::function, Metric::direct)->auc);

  ExperimentConfig again = cfg;
  again.workers = 3;
  again.output_dir = scratch("exp_b");
  fs::remove_all(again.output_dir);
  run_experiment(again);
  for (const auto& entry : fs::recursive_directory_iterator(cfg.output_dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), cfg.output_dir);
    CHECK_MESSAGE(read_text(entry.path()) == read_text(again.output_dir / rel), rel.string());
  }

  ExperimentConfig broken = cfg;
  broken.output_dir = scratch("exp_c");
  broken.grid_overrides[Method::isomap] = {{"k", {100}}};
  const auto failed = run_experiment(broken);
  REQUIRE(failed.size() == 1);
  CHECK_FALSE(failed[0].ok);
  CHECK_FALSE(failed[0].error.empty());
}

TEST_CASE("delta report") {
  std::vector<ExperimentRecord> recs;
  auto add = [&](const std::string& s, Method m, Space sp, Metric mt, double score) {
    ExperimentRecord r;
    r.setting = s;
    r.method = m;
    r.space = sp;
    r.metric = mt;
    r.ok = true;
    r.tuning.best_score = score;
    recs.push_back(r);
  };
  const std::vector<double> ps = {0.9, 0.8, 0.7, 0.6}, fs_ = {0.5, 0.6, 0.7, 0.8};
  for (std::size_t i = 0; i < 4; ++i) {
    add(delta_settings()[i], Method::isomap, Space::parameter, Metric::direct, ps[i]);
    add(delta_settings()[i], Method::isomap, Space::function, Metric::direct, fs_[i]);
    add(delta_settings()[i], Method::tsne, Space::parameter, Metric::direct, 0.5);
    add(delta_settings()[i], Method::tsne, Space::function, Metric::direct, 0.5);
  }
  recs.pop_back();  // tsne a3-tp function-space cell missing
  add("a3-sr", Method::isomap, Space::parameter, Metric::direct, 0.0);
  const auto rows = delta_report(recs, Metric::direct);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == Method::isomap);
  REQUIRE(rows[0].delta.has_value());
  CHECK(*rows[0].delta == doctest::Approx(std::abs(3.0 / 4.0 - 2.6 / 4.0)));
  CHECK_FALSE(rows[1].delta.has_value());
  CHECK(rows[1].missing == std::vector<std::string>{"a3-tp/fs"});
}
