// File formats.

#include "catch_amalgamated.hpp"

#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "ucpc/algorithms.hpp"
#include "ucpc/io.hpp"
#include "ucpc/random_objects.hpp"

using namespace ucpc;
using json = nlohmann::json;

namespace {

io::DeterministicData parse(const std::string& text, io::LabelMode mode = io::LabelMode::automatic) {
    std::istringstream in(text);
    return io::parse_csv(in, mode);
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("number formatting round-trips", "[io]") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 123456789.123456789}) {
        REQUIRE(io::parse_double(io::format_double(x)) == x);
    }
    REQUIRE(io::parse_double(" 2.5 ") == 2.5);
    REQUIRE(io::parse_double("+1e3") == 1000.0);
    REQUIRE_FALSE(io::parse_double("abc").has_value());
    REQUIRE_FALSE(io::parse_double("1.2.3").has_value());
    REQUIRE_FALSE(io::parse_double("").has_value());
    REQUIRE_FALSE(io::parse_double("nan").has_value());
}

TEST_CASE("CSV with header and labels", "[io][csv]") {
    const auto d = parse("a,b,class\n1,2,x\n3.5,-4,y\n\n5,6,x\n");
    REQUIRE(d.header == std::vector<std::string>{"a", "b", "class"});
    REQUIRE(d.points == std::vector<Vector>{{1, 2}, {3.5, -4}, {5, 6}});
    REQUIRE(d.labels == Labels{"x", "y", "x"});
    // Round trip through the writer.
    REQUIRE(parse(io::format_csv(d)).points == d.points);
}

TEST_CASE("CSV label modes", "[io][csv]") {
    const auto plain = parse("1,2,3\n4,5,6\n");
    REQUIRE_FALSE(plain.labels.has_value());
    REQUIRE(plain.points.front().size() == 3);

    const auto numeric_labels = parse("1,2,0\n4,5,1\n", io::LabelMode::last_column);
    REQUIRE(numeric_labels.labels == Labels{"0", "1"});
    REQUIRE(numeric_labels.points.front().size() == 2);

    REQUIRE_THROWS_AS(parse("1,2,x\n", io::LabelMode::none), data_error);
}

TEST_CASE("CSV errors name the row and column", "[io][csv][errors]") {
    const std::string msg = message_of([] { parse("1,2\n3,oops\n"); });
    REQUIRE(msg.find("row 2") != std::string::npos);
    REQUIRE(msg.find("column 2") != std::string::npos);
    REQUIRE(msg.find("oops") != std::string::npos);
    REQUIRE_THROWS_AS(parse("1,2\n3,oops\n"), data_error);
    REQUIRE_THROWS_AS(parse("1,2\n3\n"), data_error);
    REQUIRE_THROWS_AS(parse("a,b\n"), data_error);
    REQUIRE_THROWS_AS(parse(""), data_error);
    REQUIRE_THROWS_AS(parse("a,b\n1,2,3\n"), data_error);
}

TEST_CASE("CSV to point-mass dataset", "[io][csv]") {
    const Dataset d = io::to_dataset(parse("1,2,x\n3,4,y\n"));
    REQUIRE(d.size() == 2);
    REQUIRE(d[1].id() == "1");
    REQUIRE(d[1].moments().mu == Vector{3, 4});
    REQUIRE(d[1].moments().total_var == 0.0);
    REQUIRE(d.labels() == Labels{"x", "y"});
}

TEST_CASE("dataset JSON round trip", "[io][json]") {
    Rng rng = make_rng(1);
    auto objs = random_objects(rng, 40, 3);
    objs.push_back(UncertainObject::point("p", {1.0, 2.0, 3.0}));
    Labels labels;
    for (std::size_t i = 0; i < objs.size(); ++i) labels.push_back("c" + std::to_string(i % 3));
    const Dataset d(objs, labels);
    const Dataset back = io::dataset_from_json(json::parse(io::dataset_to_json(d).dump()));
    REQUIRE(back.size() == d.size());
    REQUIRE(back.labels() == d.labels());
    for (std::size_t i = 0; i < d.size(); ++i) {
        REQUIRE(back[i].id() == d[i].id());
        REQUIRE(back[i].pdf().index() == d[i].pdf().index());
        REQUIRE(back[i].moments().mu == d[i].moments().mu);
        REQUIRE(back[i].moments().mu2 == d[i].moments().mu2);
        REQUIRE(back[i].region() == d[i].region());
    }
}

TEST_CASE("dataset JSON validation", "[io][json][errors]") {
    auto load = [](const std::string& text) { return io::dataset_from_json(json::parse(text)); };
    REQUIRE_NOTHROW(load(R"({"m":1,"objects":[{"id":"a","pdf":{"kind":"uniform","lo":[0],"hi":[1]}}]})"));
    REQUIRE_THROWS_AS(load(R"({"objects":[]})"), data_error);
    REQUIRE_THROWS_AS(load(R"({"m":1,"objects":[]})"), data_error);
    REQUIRE_THROWS_AS(load(R"({"m":2,"objects":[{"id":"a","pdf":{"kind":"uniform","lo":[0],"hi":[1]}}]})"),
                      data_error);
    REQUIRE_THROWS_AS(load(R"({"m":1,"objects":[{"id":"a","pdf":{"kind":"cauchy","lo":[0],"hi":[1]}}]})"),
                      data_error);
    REQUIRE_THROWS_AS(load(R"({"m":1,"objects":[{"id":"a","pdf":{"kind":"uniform","lo":[2],"hi":[1]}}]})"),
                      data_error);
    REQUIRE_THROWS_AS(
        load(R"({"m":1,"objects":[{"id":"a","pdf":{"kind":"normal","mean":[0],"stddev":[-1],"lo":[0],"hi":[1]}}]})"),
        data_error);
    REQUIRE_THROWS_AS(
        load(R"({"m":1,"objects":[{"id":"a","pdf":{"kind":"empirical","points":[[0],[1]],"weights":[0.3,0.3]}}]})"),
        data_error);
    REQUIRE_THROWS_AS(
        load(R"({"m":1,"objects":[{"id":"a","pdf":{"kind":"uniform","lo":[0],"hi":[1]}}],"labels":["x","y"]})"),
        data_error);
    const std::string msg = message_of([&] {
        load(R"({"m":1,"objects":[{"id":"a","pdf":{"kind":"uniform","lo":[0],"hi":[1]}},{"id":"b","pdf":{}}]})");
    });
    REQUIRE(msg.find("object 1") != std::string::npos);
}

TEST_CASE("assignment files", "[io][assignment]") {
    Rng rng = make_rng(2);
    const Dataset d(random_objects(rng, 20, 2));
    ClusterConfig cfg;
    cfg.k = 3;
    const Clustering c = ucpc::ucpc(d, cfg);
    const json j = io::assignment_to_json(d, c, "ucpc", 0);
    REQUIRE(j.at("assignment").size() == 20);
    REQUIRE(j.at("trace").size() == c.trace.size());

    const io::AssignmentFile a = io::assignment_from_json(json::parse(j.dump()));
    REQUIRE(a.algo == "ucpc");
    REQUIRE(a.k == 3);
    REQUIRE(a.objective == c.objective);
    REQUIRE(io::align_assignment(d, a) == c.assignment);

    // Order of rows does not matter; ids do.
    io::AssignmentFile shuffled = a;
    std::reverse(shuffled.ids.begin(), shuffled.ids.end());
    std::reverse(shuffled.clusters.begin(), shuffled.clusters.end());
    REQUIRE(io::align_assignment(d, shuffled) == c.assignment);

    io::AssignmentFile wrong = a;
    wrong.ids[0] = "nope";
    REQUIRE_THROWS_AS(io::align_assignment(d, wrong), data_error);
    io::AssignmentFile dup = a;
    dup.ids[1] = dup.ids[0];
    REQUIRE_THROWS_AS(io::align_assignment(d, dup), data_error);
    io::AssignmentFile short_file = a;
    short_file.ids.pop_back();
    short_file.clusters.pop_back();
    REQUIRE_THROWS_AS(io::align_assignment(d, short_file), data_error);
    REQUIRE_THROWS_AS(io::assignment_from_json(json::parse(R"({"k":2,"assignment":[{"id":"0","cluster":2}]})")),
                      data_error);
}

TEST_CASE("metrics rows", "[io][metrics]") {
    io::MetricsRow row;
    row.dataset = "iris";
    row.algo = "ucpc";
    row.k = 3;
    row.seed = 7;
    row.report.intra = 0.25;
    row.report.inter = 0.75;
    row.report.quality_q = 0.5;
    row.report.wall_time_ms = 1.5;
    REQUIRE(io::format_metrics_row(row) == "iris,ucpc,3,7,,0.25,0.75,0.5,,1.5");
    row.report.f_measure = 1.0;
    row.report.theta = -0.125;
    REQUIRE(io::format_metrics_row(row) == "iris,ucpc,3,7,1,0.25,0.75,0.5,-0.125,1.5");
    const json j = io::report_to_json(row);
    REQUIRE(j.at("f") == 1.0);
    REQUIRE(j.at("normalization") == "max-pairwise-expected-distance");
}

TEST_CASE("digests", "[io]") {
    REQUIRE(io::digest("") == "fnv1a64:cbf29ce484222325");
    REQUIRE(io::digest("a") == "fnv1a64:af63dc4c8601ec8c");
    REQUIRE(io::digest("abc") != io::digest("abd"));
}

TEST_CASE("files", "[io]") {
    const auto dir = std::filesystem::temp_directory_path() / "ucpc_test_io";
    std::filesystem::create_directories(dir);
    const std::string csv = (dir / "d.csv").string();
    io::write_file(csv, "x,y,label\n0,1,a\n2,3,b\n");
    const Dataset d = io::load_dataset(csv);
    REQUIRE(d.size() == 2);
    REQUIRE(d.labels() == Labels{"a", "b"});
    const std::string js = (dir / "d.json").string();
    io::write_file(js, io::dataset_to_json(d).dump());
    REQUIRE(io::load_dataset(js)[1].moments().mu == Vector{2, 3});
    io::write_file(js, "{not json");
    REQUIRE_THROWS_AS(io::load_dataset(js), data_error);
    REQUIRE_THROWS_AS(io::load_dataset((dir / "missing.json").string()), data_error);
    std::filesystem::remove_all(dir);
}
