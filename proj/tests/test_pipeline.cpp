#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tabula/csv.hpp"
#include "tabula/pipeline.hpp"
#include "test_util.hpp"

using namespace tabula;

namespace {

Frame dict_fixture() {
  return Frame::from_dict({
      {"ID", {CellValue(1), CellValue(2), CellValue(3)}},
      {"City", {CellValue("Sarajevo"), CellValue("Seattle"), CellValue("Berlin")}},
      {"Zip Code", {CellValue(71000), CellValue(98101), CellValue(10115)}},
      {"State", {CellValue("BiH"), CellValue("USA"), CellValue("GER")}},
      {"IsHome", {CellValue(true), CellValue(false), CellValue(false)}},
      {"Values", {CellValue(3.14), CellValue(3.21), CellValue(4.55)}},
  });
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

PipelineSpec make_spec(const std::string& source, const std::string& pipe,
                       const std::string& out,
                       OutputFormat format = OutputFormat::Csv) {
  PipelineSpec spec;
  spec.source = source;
  spec.steps = parse_steps(pipe);
  spec.out_path = out;
  spec.format = format;
  return spec;
}

}  // namespace

TEST_CASE("parse_filter evaluates fixture predicates") {
  const Frame f = dict_fixture();
  const Schema schema = schema_of(f);

  SUBCASE("ID > 1 keeps rows 1 and 2") {
    const auto expr = parse_filter("ID > 1", schema);
    const Frame kept = filter(f, filter_predicate(expr, f));
    CHECK(kept.row_count() == 2);
    CHECK(kept.cell_at(0, "ID") == CellValue(2));
    CHECK(kept.cell_at(1, "ID") == CellValue(3));
  }

  SUBCASE("conjunction keeps row 0") {
    const auto expr =
        parse_filter("State == \"BiH\" and IsHome == true", schema);
    const Frame kept = filter(f, filter_predicate(expr, f));
    CHECK(kept.row_count() == 1);
    CHECK(kept.cell_at(0, "City") == CellValue("Sarajevo"));
  }

  SUBCASE("back-quoted names allow spaces") {
    const auto expr = parse_filter("`Zip Code` >= 71000", schema);
    const Frame kept = filter(f, filter_predicate(expr, f));
    CHECK(kept.row_count() == 2);
  }

  SUBCASE("contains on a string column") {
    const auto expr = parse_filter("City contains \"ea\"", schema);
    const Frame kept = filter(f, filter_predicate(expr, f));
    CHECK(kept.row_count() == 1);
    CHECK(kept.cell_at(0, "City") == CellValue("Seattle"));
  }
}

TEST_CASE("parse_filter reports the offset of a syntax error") {
  const Schema schema = schema_of(dict_fixture());
  try {
    parse_filter("ID >", schema);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("offset 4") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_filter("ID 5", schema), ParseError);
  CHECK_THROWS_AS(parse_filter("ID == 1 or ID == 2", schema), ParseError);
}

TEST_CASE("parse_filter rejects unknown columns and bad literals") {
  const Schema schema = schema_of(dict_fixture());
  CHECK_THROWS_AS(parse_filter("nope == 1", schema), LookupError);
  CHECK_THROWS_AS(parse_filter("ID == x", schema), TypeError);
  CHECK_THROWS_AS(parse_filter("ID contains \"x\"", schema), TypeError);
}

TEST_CASE("missing cells fail every filter clause") {
  const Frame f = Frame::from_dict(
      {{"a", {CellValue(1), CellValue::missing(), CellValue(3)}}});
  const auto expr = parse_filter("a != 1", schema_of(f));
  const Frame kept = filter(f, filter_predicate(expr, f));
  CHECK(kept.row_count() == 1);
  CHECK(kept.cell_at(0, "a") == CellValue(3));
}

TEST_CASE("parse_steps splits on pipes and parses key=value args") {
  const auto steps = parse_steps("head 5 | sort by=City:desc | stl period=12");
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].name == "head");
  CHECK(steps[0].rest == "5");
  CHECK(steps[1].kv.at("by") == "City:desc");
  CHECK(steps[2].kv.at("period") == "12");
  CHECK(steps[2].number == 3);
}

TEST_CASE("parse_steps keeps spaces inside values") {
  const auto steps = parse_steps("select cols=Zip Code,State");
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].kv.at("cols") == "Zip Code,State");
}

TEST_CASE("parse_steps_config ignores comments and blank lines") {
  std::istringstream config(
      "# keep the first rows\n"
      "head 5\n"
      "\n"
      "sort by=ID  # order by key\n");
  const auto steps = parse_steps_config(config);
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].name == "head");
  CHECK(steps[1].name == "sort");
}

TEST_CASE("run_pipeline head writes a csv with the same header") {
  TempFile src("tabula_pipe_src.csv");
  TempFile out("tabula_pipe_out.csv");
  to_csv_file(src.path, dict_fixture());

  std::ostringstream diag;
  const int status =
      run_pipeline(make_spec(src.path, "head 2", out.path), diag);
  CHECK(status == 0);
  CHECK(diag.str().empty());
  const Frame result = from_csv_file(out.path);
  CHECK(result.row_count() == 2);
  CHECK(result.column_names() == dict_fixture().column_names());
}

TEST_CASE("run_pipeline stl emits the five-column component table") {
  TempFile src("tabula_pipe_stl.csv");
  TempFile out("tabula_pipe_stl_out.csv");
  std::vector<CellValue> v;
  for (std::size_t t = 0; t < 48; ++t)
    v.emplace_back(std::sin(2 * M_PI * static_cast<double>(t) / 12.0) +
                   0.05 * static_cast<double>(t));
  to_csv_file(src.path, Frame::from_dict({{"y", v}}));

  std::ostringstream diag;
  const int status =
      run_pipeline(make_spec(src.path, "stl period=12", out.path), diag);
  CHECK(status == 0);
  const Frame result = from_csv_file(out.path);
  CHECK(result.column_names() ==
        std::vector<std::string>{"label", "observed", "trend", "seasonal",
                                 "remainder"});
  CHECK(result.row_count() == 48);
}

TEST_CASE("run_pipeline names the failing step in its diagnostic") {
  TempFile src("tabula_pipe_bad.csv");
  TempFile out("tabula_pipe_bad_out.csv");
  to_csv_file(src.path, dict_fixture());

  std::ostringstream diag;
  const int status =
      run_pipeline(make_spec(src.path, "filter nope == 1", out.path), diag);
  CHECK(status == 1);
  CHECK(diag.str().find("step 1 (filter)") != std::string::npos);
  CHECK(diag.str().find("lookup error") != std::string::npos);
  CHECK(diag.str().find("nope") != std::string::npos);
  CHECK(slurp(out.path).empty());  // nothing was written
}

TEST_CASE("dry run accepts a valid pipeline and rejects schema violations") {
  TempFile src("tabula_pipe_dry.csv");
  to_csv_file(src.path, dict_fixture());

  std::ostringstream diag;
  CHECK(dry_run_pipeline(make_spec(src.path, "head 2 | select cols=ID,City",
                                   "/tmp/tabula_dry_out.csv"),
                         diag) == 0);
  CHECK(dry_run_pipeline(make_spec(src.path, "select cols=ID | sort by=City",
                                   "/tmp/tabula_dry_out.csv"),
                         diag) == 2);
  CHECK(diag.str().find("step 2 (sort)") != std::string::npos);
}

TEST_CASE("dry run catches type-level errors when explicit types are given") {
  TempFile src("tabula_pipe_dry_types.csv");
  to_csv_file(src.path, dict_fixture());
  PipelineSpec spec = make_spec(src.path, "filter ID == true", "/tmp/x.csv");
  spec.options.explicit_types =
      std::vector<ColType>{ColType::I32, ColType::STR, ColType::I32,
                           ColType::STR, ColType::I2, ColType::DD};
  std::ostringstream diag;
  CHECK(dry_run_pipeline(spec, diag) == 2);
  CHECK(diag.str().find("type error") != std::string::npos);
}

TEST_CASE("analysis steps must come last") {
  TempFile src("tabula_pipe_last.csv");
  to_csv_file(src.path, dict_fixture());
  std::ostringstream diag;
  CHECK(dry_run_pipeline(
            make_spec(src.path, "describe | head 2", "/tmp/x.csv"), diag) == 2);
  CHECK(diag.str().find("must be the last step") != std::string::npos);
}

TEST_CASE("pipeline output is byte-identical across runs") {
  TempFile src("tabula_pipe_det.csv");
  TempFile out1("tabula_pipe_det1.csv");
  TempFile out2("tabula_pipe_det2.csv");
  to_csv_file(src.path, dict_fixture());

  const std::string pipe = "sort by=City | head 2";
  std::ostringstream diag;
  REQUIRE(run_pipeline(make_spec(src.path, pipe, out1.path), diag) == 0);
  REQUIRE(run_pipeline(make_spec(src.path, pipe, out2.path), diag) == 0);
  CHECK(slurp(out1.path) == slurp(out2.path));
  CHECK(!slurp(out1.path).empty());
}

TEST_CASE("json and csv outputs contain the same values") {
  TempFile src("tabula_pipe_json.csv");
  TempFile outc("tabula_pipe_json_out.csv");
  TempFile outj("tabula_pipe_json_out.json");
  to_csv_file(src.path, dict_fixture());

  std::ostringstream diag;
  REQUIRE(run_pipeline(make_spec(src.path, "head 3", outc.path), diag) == 0);
  REQUIRE(run_pipeline(make_spec(src.path, "head 3", outj.path,
                                 OutputFormat::Json),
                       diag) == 0);

  const Frame from_c = from_csv_file(outc.path);
  const auto parsed = nlohmann::json::parse(slurp(outj.path));
  REQUIRE(parsed.is_array());
  REQUIRE(parsed.size() == from_c.row_count());
  for (std::size_t r = 0; r < from_c.row_count(); ++r) {
    const auto& obj = parsed[r];
    CHECK(obj.at("ID").get<int>() ==
          from_c.cell_at(r, "ID").get<std::int32_t>());
    CHECK(obj.at("City").get<std::string>() ==
          from_c.cell_at(r, "City").get<std::string>());
    CHECK(obj.at("IsHome").get<bool>() ==
          from_c.cell_at(r, "IsHome").get<bool>());
    CHECK(obj.at("Values").get<double>() ==
          doctest::Approx(from_c.cell_at(r, "Values").as_double()));
  }
}

TEST_CASE("json output writes missing as null") {
  TempFile src("tabula_pipe_null.csv");
  TempFile out("tabula_pipe_null.json");
  to_csv_file(src.path,
              Frame::from_dict({{"a", {CellValue(1), CellValue::missing()}}}));
  std::ostringstream diag;
  REQUIRE(run_pipeline(make_spec(src.path, "", out.path, OutputFormat::Json),
                       diag) == 0);
  const auto parsed = nlohmann::json::parse(slurp(out.path));
  CHECK(parsed[1].at("a").is_null());
}

TEST_CASE("groupby aggregate and join steps run end to end") {
  TempFile src("tabula_pipe_group.csv");
  TempFile other("tabula_pipe_join.csv");
  TempFile out("tabula_pipe_group_out.csv");
  to_csv_file(src.path, Frame::from_dict({
                            {"k", {CellValue("a"), CellValue("a"), CellValue("b")}},
                            {"v", {CellValue(1), CellValue(2), CellValue(10)}},
                        }));
  to_csv_file(other.path, Frame::from_dict({
                              {"k", {CellValue("a"), CellValue("b")}},
                              {"name", {CellValue("alpha"), CellValue("beta")}},
                          }));

  std::ostringstream diag;
  const int status = run_pipeline(
      make_spec(src.path,
                "groupby by=k agg=v:sum | join with=" + other.path +
                    " on=k kind=left | sort by=k",
                out.path),
      diag);
  REQUIRE(status == 0);
  const Frame result = from_csv_file(out.path);
  CHECK(result.column_names() ==
        std::vector<std::string>{"k", "v_sum", "name"});
  CHECK(result.cell_at(0, "v_sum") == CellValue(3));
  CHECK(result.cell_at(1, "name") == CellValue("beta"));
}

TEST_CASE("fillna and dropna steps") {
  TempFile src("tabula_pipe_na.csv");
  TempFile out("tabula_pipe_na_out.csv");
  to_csv_file(src.path, Frame::from_dict({
                            {"a", {CellValue(1), CellValue::missing(), CellValue(3)}},
                            {"b", {CellValue::missing(), CellValue(5), CellValue(6)}},
                        }));
  std::ostringstream diag;
  REQUIRE(run_pipeline(make_spec(src.path,
                                 "fillna col=a strategy=mean | dropna how=any",
                                 out.path),
                       diag) == 0);
  const Frame result = from_csv_file(out.path);
  CHECK(result.row_count() == 2);  // row 0 still has b missing
  CHECK(result.cell_at(0, "a").as_double() == 2.0);
}

TEST_CASE("ma analysis emits label, observed and the average") {
  TempFile src("tabula_pipe_ma.csv");
  TempFile out("tabula_pipe_ma_out.csv");
  to_csv_file(src.path, Frame::from_dict({{"y", {CellValue(1.0), CellValue(2.0),
                                                 CellValue(3.0), CellValue(4.0)}}}));
  std::ostringstream diag;
  REQUIRE(run_pipeline(make_spec(src.path, "ma window=2", out.path), diag) == 0);
  const Frame result = from_csv_file(out.path);
  CHECK(result.column_names() ==
        std::vector<std::string>{"label", "observed", "y_ma"});
  CHECK(result.row_count() == 3);
  CHECK(result.cell_at(0, "y_ma") == CellValue(1.5));
  CHECK(result.cell_at(0, "observed").as_double() == 2.0);
}

TEST_CASE("describe analysis lists numeric columns") {
  TempFile src("tabula_pipe_desc.csv");
  TempFile out("tabula_pipe_desc_out.csv");
  to_csv_file(src.path, dict_fixture());
  std::ostringstream diag;
  REQUIRE(run_pipeline(make_spec(src.path, "describe", out.path), diag) == 0);
  const Frame result = from_csv_file(out.path);
  CHECK(result.row_count() == 3);  // ID, Zip Code, Values
  CHECK(result.cell_at(0, "column") == CellValue("ID"));
  CHECK(result.cell_at(0, "count").as_double() == 3);
}

TEST_CASE("ssa analysis emits one column per group") {
  TempFile src("tabula_pipe_ssa.csv");
  TempFile out("tabula_pipe_ssa_out.csv");
  std::vector<CellValue> v;
  for (std::size_t t = 0; t < 60; ++t)
    v.emplace_back(0.2 * static_cast<double>(t) +
                   std::sin(2 * M_PI * static_cast<double>(t) / 10.0));
  to_csv_file(src.path, Frame::from_dict({{"y", v}}));
  std::ostringstream diag;
  REQUIRE(run_pipeline(
              make_spec(src.path, "ssa window=20 groups=0,1;2,3", out.path),
              diag) == 0);
  const Frame result = from_csv_file(out.path);
  CHECK(result.column_names() ==
        std::vector<std::string>{"label", "observed", "group_0", "group_1"});
  CHECK(result.row_count() == 60);
}

TEST_CASE("failed pipelines leave no partial output file") {
  TempFile src("tabula_pipe_atomic.csv");
  const std::string out = "/tmp/tabula_pipe_atomic_out.csv";
  std::remove(out.c_str());
  to_csv_file(src.path, dict_fixture());

  std::ostringstream diag;
  // head succeeds, then stl fails at runtime (series too short)
  const int status =
      run_pipeline(make_spec(src.path, "stl period=12", out), diag);
  CHECK(status == 1);
  std::ifstream probe(out);
  CHECK(!probe.good());  // no file at the output path
}

TEST_CASE("load failures are reported against the load stage") {
  std::ostringstream diag;
  const int status = run_pipeline(
      make_spec("/nonexistent/input.csv", "head 1", "/tmp/x.csv"), diag);
  CHECK(status == 1);
  CHECK(diag.str().find("load:") != std::string::npos);
}

TEST_CASE("source_schema sees explicit types") {
  TempFile src("tabula_pipe_schema.csv");
  to_csv_file(src.path, dict_fixture());
  PipelineSpec spec = make_spec(src.path, "", "/tmp/x.csv");
  Schema schema = source_schema(spec);
  REQUIRE(schema.size() == 6);
  CHECK(schema[0].name == "ID");
  CHECK(!schema[0].type.has_value());

  spec.options.explicit_types =
      std::vector<ColType>{ColType::I32, ColType::STR, ColType::I32,
                           ColType::STR, ColType::I2, ColType::DD};
  schema = source_schema(spec);
  CHECK(schema[0].type == ColType::I32);
}
