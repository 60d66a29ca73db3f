#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tabula/pipeline.hpp"

namespace {

// Exit codes: 0 success, 1 pipeline error, 2 argument/usage error.
constexpr int kUsageError = 2;

std::optional<std::vector<tabula::ColType>> parse_types(
    const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  std::vector<tabula::ColType> types;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t next = spec.find(',', pos);
    if (next == std::string::npos) next = spec.size();
    const std::string token = spec.substr(pos, next - pos);
    const auto t = tabula::col_type_from_name(token);
    if (!t) {
      std::cerr << "error: unknown column type \"" << token
                << "\" (expected I2, I32, I64, F32, DD, STR, IN or DT)\n";
      std::exit(kUsageError);
    }
    types.push_back(*t);
    pos = next + 1;
  }
  return types;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "tabula - load a CSV table, transform it through a pipeline of steps "
      "and write the result as CSV or JSON"};
  app.get_formatter()->column_width(28);

  std::string source;
  std::string sep = ",";
  std::string types_spec;
  bool no_header = false;
  std::string pipe_text;
  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  bool dry_run = false;

  app.add_option("--source", source, "input CSV path or http(s) URL")
      ->required();
  app.add_option("--sep", sep, "field separator (single character)");
  app.add_option("--types", types_spec,
                 "explicit column types, e.g. I32,STR,DD (skips inference)");
  app.add_flag("--no-header", no_header,
               "input has no header row; columns are named C0..Cn-1");
  app.add_option("--pipe", pipe_text,
                 "pipeline steps separated by '|', e.g. \"head 5 | sort "
                 "by=City\"");
  app.add_option("--config", config_path,
                 "file with one pipeline step per line ('#' comments)");
  app.add_option("--out", out_path, "output path");
  app.add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--dry-run", dry_run,
               "validate the pipeline against the schema and exit without "
               "reading data rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kUsageError;
  }

  if (sep.size() != 1) {
    std::cerr << "error: --sep must be a single character\n";
    return kUsageError;
  }
  if (!pipe_text.empty() && !config_path.empty()) {
    std::cerr << "error: give either --pipe or --config, not both\n";
    return kUsageError;
  }
  if (!dry_run && out_path.empty()) {
    std::cerr << "error: --out is required\n";
    return kUsageError;
  }

  tabula::PipelineSpec spec;
  spec.source = source;
  spec.options.separator = sep[0];
  spec.options.has_header = !no_header;
  spec.options.explicit_types = parse_types(types_spec);
  spec.out_path = out_path;
  spec.format = format == "json" ? tabula::OutputFormat::Json
                                 : tabula::OutputFormat::Csv;

  try {
    if (!config_path.empty()) {
      std::ifstream config(config_path);
      if (!config) {
        std::cerr << "error: cannot open config \"" << config_path << "\"\n";
        return kUsageError;
      }
      spec.steps = tabula::parse_steps_config(config);
    } else {
      spec.steps = tabula::parse_steps(pipe_text);
    }
  } catch (const tabula::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return kUsageError;
  }

  if (dry_run) {
    const int status = tabula::dry_run_pipeline(spec, std::cerr);
    if (status == 0) std::cout << "pipeline ok\n";
    return status;
  }
  return tabula::run_pipeline(spec, std::cerr);
}
