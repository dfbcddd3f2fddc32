#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "dioph/json_io.hpp"
#include "dioph/linalg.hpp"

using namespace dioph;

namespace {

std::string cli_path() {
  const char* bin = std::getenv("DIOPH_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "DIOPH_CLI must point at the built binary");
  return bin;
}

int run_cli(const std::string& args, std::string* stdout_text = nullptr) {
  std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  if (stdout_text) *stdout_text = out;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path write_temp(const std::string& name, const Json& content) {
  auto dir = std::filesystem::temp_directory_path() / "dioph-cli-tests";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream out(path);
  out << content.dump();
  return path;
}

const Json kFermatJson = matrix_to_json(QMatrix{{1, -2, 1, 0}, {1, -1, 0, 1}});
const Json kSchurJson = matrix_to_json(QMatrix{{1, 1, -1}});

}  // namespace

TEST_CASE("help exits cleanly") {
  std::string out;
  CHECK(run_cli("--help", &out) == 0);
  CHECK(out.find("analyze") != std::string::npos);
}

TEST_CASE("json round-trips for the wire types") {
  QMatrix m{{1, -2, 1, 0}, {1, -1, 0, 1}};
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  QMatrix empty(0, 3);
  CHECK(matrix_from_json(matrix_to_json(empty)) == empty);
  // Bare strings and integers are accepted for entries.
  Json loose{{"rows", 1}, {"cols", 2}, {"entries", Json::array({"3", Json::array({"1", "2"})})}};
  QMatrix parsed = matrix_from_json(loose);
  CHECK(parsed.at(0, 0) == 3);
  CHECK(parsed.at(0, 1) == make_rat(1, 2));

  RrefResult r = rref(m);
  Transform t2 = transform_from_json(transform_to_json(r.transform));
  CHECK(t2 == r.transform);

  auto cert = check_columns_condition(m);
  REQUIRE(cert.has_value());
  ColumnsCertificate c2 = columns_certificate_from_json(columns_certificate_to_json(*cert));
  CHECK(c2.blocks == cert->blocks);
  CHECK(validate_columns_certificate(m, c2));

  Weights w{{3, make_rat(1, 2)}, {-1, Rat(2)}};
  Weights w2 = weights_from_json(weights_to_json(w));
  CHECK(w2 == w);
}

TEST_CASE("analyze reports the fermat verdict") {
  auto path = write_temp("fermat.json", kFermatJson);
  std::string out;
  REQUIRE(run_cli("analyze --k 2 " + path.string(), &out) == 0);
  Json report = Json::parse(out);
  const Json& res = report["result"];
  CHECK(res["columnsCondition"]["holds"] == true);
  CHECK(res["columnsCondition"]["certificate"]["blocks"][0] == Json::array({1, 2, 3}));
  CHECK(res["columnsCondition"]["certificate"]["blocks"][1] == Json::array({4}));
  CHECK(res["conditionI"]["holds"] == false);
  CHECK(res["conditionI"]["failures"][0]["d"] == 1);
  CHECK(res["conditionI"]["failures"][0]["q"] == 3);
  CHECK(res["conditionI"]["failures"][0]["threshold"] == 5);
  CHECK(res["verdict"].get<std::string>().find("undecided") == 0);
}

TEST_CASE("count matches the schur example") {
  auto path = write_temp("schur.json", kSchurJson);
  std::string out;
  REQUIRE(run_cli("count --k 1 --N 5 " + path.string(), &out) == 0);
  Json report = Json::parse(out);
  CHECK(report["result"]["counts"]["total"] == "10");
  CHECK(report["result"]["counts"]["trivial"] == "2");
  CHECK(report["result"]["counts"]["nontrivial"] == "8");
}

TEST_CASE("reports round-trip and identical runs agree byte for byte") {
  auto path = write_temp("fermat.json", kFermatJson);
  std::string first, second;
  REQUIRE(run_cli("analyze --k 2 " + path.string(), &first) == 0);
  REQUIRE(run_cli("analyze --k 2 " + path.string(), &second) == 0);
  Json a = Json::parse(first), b = Json::parse(second);
  CHECK(Json::parse(a.dump()) == a);  // serialization round-trips
  CHECK(a["request"].dump() == b["request"].dump());
  CHECK(a["result"].dump() == b["result"].dump());
  CHECK(a["toolVersion"] == b["toolVersion"]);
}

TEST_CASE("exit codes") {
  SUBCASE("missing input file") {
    CHECK(run_cli("analyze --k 2 /nonexistent/input.json") == 2);
  }
  SUBCASE("unknown subcommand") {
    CHECK(run_cli("frobnicate") == 2);
  }
  SUBCASE("malformed json") {
    CHECK(run_cli("analyze --k 2 --json 'not-json'") == 2);
  }
  SUBCASE("budget exceeded") {
    QMatrix wide(1, 13);
    auto path = write_temp("wide.json", matrix_to_json(wide));
    CHECK(run_cli("columns " + path.string()) == 3);
  }
  SUBCASE("injected internal fault") {
    auto path = write_temp("fermat.json", kFermatJson);
    CHECK(run_cli("--inject-fault analyze --k 2 " + path.string()) == 4);
  }
  SUBCASE("randomized subcommands demand a seed") {
    auto path = write_temp("five.json", matrix_to_json(QMatrix{{1, 1, 1, 1, -4}}));
    CHECK(run_cli("density --k 2 --N 10 --delta 1 --trials 1 " + path.string()) == 2);
    CHECK(run_cli("density --k 2 --N 10 --delta 1 --trials 1 --seed 7 " + path.string()) == 0);
  }
}

TEST_CASE("wtrick parameters") {
  std::string out;
  REQUIRE(run_cli("wtrick --k 2 --w 3 --N 100", &out) == 0);
  Json report = Json::parse(out);
  CHECK(report["result"]["params"]["W"] == "72");
  CHECK(report["result"]["params"]["kwRoot"] == "12");
  CHECK(run_cli("wtrick --k 2 --w 3 --N 100 --xi 2") == 2);
}

TEST_CASE("bohr membership via the cli") {
  Json spec{{"h", 1}, {"phases", Json::array({Json::array({"1", "3"})})},
            {"rho", Json::array({"1", "10"})}};
  auto path = write_temp("bohr.json", spec);
  std::string out;
  REQUIRE(run_cli("bohr --N 12 --m0-cap 50 " + path.string(), &out) == 0);
  Json report = Json::parse(out);
  CHECK(report["result"]["members"] == Json::array({3, 6, 9, 12}));
  CHECK(report["result"]["syndeticity"]["m0"] == 3);
}

TEST_CASE("normal form and partition subcommands") {
  auto path = write_temp("row.json", matrix_to_json(QMatrix{{1, 1, -1}}));
  std::string out;
  REQUIRE(run_cli("normal-form " + path.string(), &out) == 0);
  Json nf = Json::parse(out)["result"]["normalForm"];
  CHECK(nf["n"] == 1);
  CHECK(nf["s"] == 2);
  CHECK(nf["t"] == 1);
  CHECK(nf["m"] == 0);
  // The emitted transform replays against the input matrix.
  Transform t = transform_from_json(nf["transform"]);
  QMatrix replayed = apply_transform(t, QMatrix{{1, 1, -1}});
  CHECK(replayed.at(0, 0) == 1);
  CHECK(replayed.at(0, 1) == -1);
  CHECK(replayed.at(0, 2) == 1);

  auto path2 = write_temp("blocks.json", matrix_to_json(QMatrix{{1, 0, 1, 0}, {0, 1, 0, 1}}));
  REQUIRE(run_cli("partition --k 2 " + path2.string(), &out) == 0);
  CHECK(Json::parse(out)["result"]["partition"]["blocks"] ==
        Json::array({Json::array({1, 2}), Json::array({3, 4})}));
}

TEST_CASE("moments and mean-value subcommands") {
  std::string out;
  REQUIRE(run_cli("moments --k 2 --t 2 --N 5", &out) == 0);
  Json report = Json::parse(out);
  CHECK(report["result"]["convolution"] == "45");
  CHECK(report["result"]["equal"] == true);

  REQUIRE(run_cli("mean-value --k 2 --t 2 --series 10,20,40", &out) == 0);
  Json fit = Json::parse(out)["result"]["fit"];
  CHECK(fit["slope"].get<double>() > 1.8);
  CHECK(fit["slope"].get<double>() < 2.8);
}

TEST_CASE("syndetic subcommand") {
  Json spec{{"kind", "multiples"}, {"m", 3}};
  auto path = write_temp("mult3.json", spec);
  std::string out;
  REQUIRE(run_cli("syndetic --M 3 --N 50 " + path.string(), &out) == 0);
  Json res = Json::parse(out)["result"];
  CHECK(res["syndetic"] == true);
  CHECK(res["density"]["pass"] == true);
}

TEST_CASE("coloring subcommand emits run-length colors") {
  auto path = write_temp("schur.json", kSchurJson);
  std::string out;
  REQUIRE(run_cli("coloring --k 1 --N 4 --r 2 " + path.string(), &out) == 0);
  Json res = Json::parse(out)["result"];
  CHECK(res["found"] == true);
  CHECK(res["coloring"]["colors"] == "1x1,2x2,1x1");
  REQUIRE(run_cli("coloring --k 1 --N 5 --r 2 " + path.string(), &out) == 0);
  CHECK(Json::parse(out)["result"]["found"] == false);
}

TEST_CASE("transfer subcommand") {
  Json instance{{"A", matrix_to_json(QMatrix{{1, 1, -2}})},
                {"B", matrix_to_json(QMatrix(1, 0))},
                {"C", matrix_to_json(QMatrix(0, 0))},
                {"k", 2},
                {"w", 1},
                {"N", 30},
                {"setA", Json{{"kind", "multiples"}, {"m", 1}}},
                {"setS", Json{{"kind", "multiples"}, {"m", 1}}}};
  auto path = write_temp("transfer.json", instance);
  std::string out;
  REQUIRE(run_cli("transfer " + path.string(), &out) == 0);
  Json res = Json::parse(out)["result"]["transfer"];
  CHECK(res["pass"] == true);
  CHECK(res["injective"] == true);
}

TEST_CASE("psi subcommand") {
  Json weights = Json::array();
  Json box = Json::array();
  for (long x = 1; x <= 30; ++x) box.push_back(Json::array({Json(x), Json::array({"1", "1"})}));
  weights.push_back(box);
  weights.push_back(box);
  Json instance{{"A", matrix_to_json(QMatrix{{1, -1}})},
                {"B", matrix_to_json(QMatrix{{2}})},
                {"k", 2},
                {"y", Json::array({"3"})},
                {"bSet", Json::array()},
                {"weights", weights}};
  auto path = write_temp("psi.json", instance);
  std::string out;
  REQUIRE(run_cli("psi " + path.string(), &out) == 0);
  CHECK(Json::parse(out)["result"]["value"] == Json::array({"12", "1"}));
}
