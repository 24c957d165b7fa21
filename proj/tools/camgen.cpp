// Copyright 2026 The camgen authors
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

// camgen command line: fit CAM traffic models from traces, generate
// synthetic streams, validate them and inspect model files.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "camgen/camgen.hpp"

namespace {

using namespace camgen;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitArgs {
  std::string trace_path;
  std::string out_path;
  int order = 1;
  std::string mode = "complete";
  std::string sizes_csv;
  std::string intervals_csv;
  std::string preset_name;
  std::string label;
  bool auto_sizes = false;
  double snap_tolerance = 30.0;
  int hist_bin = 10;
  double min_peak_prob = 0.05;
};

struct GenerateArgs {
  std::string model_path;
  std::string size_model_path;
  std::string interval_model_path;
  std::string out_path;
  std::uint64_t count = 0;
  double duration_s = 0.0;
  bool have_count = false;
  bool have_duration = false;
  std::optional<std::uint64_t> seed;
  bool emit_symbols = false;
};

struct ValidateArgs {
  std::string model_path;
  std::string reference_path;
  std::string generated_path;
  std::string report_path;
  int lags = 15;
  std::string kl_base = "e";
  double smooth = 0.0;
};

struct InfoArgs {
  std::string model_path;
  std::string preset_name;
};

struct ImportArgs {
  std::string transitions_path;
  std::string initial_path;
  std::string out_path;
  int order = 1;
  std::string mode = "complete";
  std::string sizes_csv;
  std::string intervals_csv;
  std::string preset_name;
  double jitter = -1.0;
  std::string label;
};

SizeSet resolve_sizes(const std::string& csv, const std::string& preset_name,
                      bool auto_sizes, const std::vector<CamEvent>* events,
                      int hist_bin, double min_peak_prob) {
  if (!csv.empty())
    return SizeSet::of(camgen::detail::parse_int_csv(csv, "--sizes"));
  if (auto_sizes) {
    if (events == nullptr) throw UsageError("--auto-sizes needs a trace");
    return detect_size_bins(*events, hist_bin, min_peak_prob);
  }
  if (!preset_name.empty()) return SizeSet::of(preset(preset_name).size_bytes);
  throw UsageError("one of --sizes, --auto-sizes or --preset is required");
}

IntervalSet resolve_intervals(const std::string& csv) {
  if (!csv.empty())
    return IntervalSet::of(camgen::detail::parse_int_csv(csv, "--intervals"));
  return IntervalSet::standard();
}

void print_model_summary(const Model& model, std::ostream& out) {
  const ModelSpec& spec = model.spec;
  out << "mode\t" << to_string(spec.mode) << '\n';
  out << "m\t" << spec.order << '\n';
  if (!model.label.empty()) out << "label\t" << model.label << '\n';
  if (spec.models_sizes())
    out << "sizes\t" << camgen::detail::join_csv(spec.sizes.bytes()) << '\n';
  if (spec.models_intervals())
    out << "intervals\t" << camgen::detail::join_csv(spec.intervals.ms()) << '\n';
  out << "alphabet\t" << spec.alphabet_size() << '\n';
  out << "transition_rows\t" << model.transitions.entry_count() << '\n';
  out << "transition_contexts\t" << model.transitions.context_count() << '\n';
  out << "initial_contexts\t" << model.initial.size() << '\n';
  out << "dead_end_contexts\t" << model.dead_end_context_count() << '\n';
  if (spec.models_intervals())
    out << "jitter_std_ms\t" << camgen::detail::format_g9(spec.jitter_std_ms) << '\n';
}

int run_fit(const FitArgs& args) {
  const ModelMode mode = mode_from_string(args.mode);
  auto events = read_trace_file(args.trace_path);

  ModelSpec spec;
  switch (mode) {
    case ModelMode::Complete:
      spec = ModelSpec::complete(
          resolve_sizes(args.sizes_csv, args.preset_name, args.auto_sizes, &events,
                        args.hist_bin, args.min_peak_prob),
          resolve_intervals(args.intervals_csv), args.order);
      break;
    case ModelMode::SizeOnly:
      if (!args.intervals_csv.empty())
        throw UsageError("--intervals has no effect in size mode");
      spec = ModelSpec::size_only(
          resolve_sizes(args.sizes_csv, args.preset_name, args.auto_sizes, &events,
                        args.hist_bin, args.min_peak_prob),
          args.order);
      break;
    case ModelMode::IntervalOnly:
      if (!args.sizes_csv.empty() || args.auto_sizes)
        throw UsageError("size bins have no effect in interval mode");
      spec = ModelSpec::interval_only(resolve_intervals(args.intervals_csv), args.order);
      break;
  }

  QuantizeOptions qopt;
  qopt.size_snap_tolerance_bytes = args.snap_tolerance;
  auto qt = quantize(events, spec, qopt);
  auto result = fit(qt);
  result.model.label = !args.label.empty() ? args.label : args.preset_name;
  write_model_file(result.model, args.out_path);

  std::cout << "trace_events\t" << qt.source_events << '\n';
  std::cout << "symbols\t" << qt.symbol_count() << '\n';
  std::cout << "dropped\t" << qt.dropped << '\n';
  std::cout << "clamped\t" << qt.clamped << '\n';
  std::cout << "splits\t" << qt.splits << '\n';
  print_model_summary(result.model, std::cout);
  std::cout << "model\t" << args.out_path << '\n';
  return 0;
}

int run_generate(const GenerateArgs& args) {
  const bool separate =
      !args.size_model_path.empty() || !args.interval_model_path.empty();
  if (separate && !args.model_path.empty())
    throw UsageError("pass either --model or the two separate model paths");
  if (separate && (args.size_model_path.empty() || args.interval_model_path.empty()))
    throw UsageError("separate generation needs --size-model and --interval-model");
  if (!separate && args.model_path.empty())
    throw UsageError("--model (or --size-model/--interval-model) is required");
  if (args.have_count == args.have_duration)
    throw UsageError("pass exactly one of --count or --duration");
  if (separate && args.have_duration)
    throw UsageError("--duration is only supported for complete models");
  if (separate && args.emit_symbols)
    throw UsageError("--emit-symbols is only supported for complete models");

  std::uint64_t seed;
  if (args.seed) {
    seed = *args.seed;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed\t" << seed << '\n';
  }

  std::vector<CamEvent> events;
  std::vector<Symbol> symbols;
  if (separate) {
    Model size_model = read_model_file(args.size_model_path);
    Model interval_model = read_model_file(args.interval_model_path);
    events = generate_separate(size_model, interval_model, args.count, seed);
  } else {
    Model model = read_model_file(args.model_path);
    GeneratedStream stream =
        args.have_count
            ? generate_stream(model, args.count, seed)
            : generate_stream_for_duration(model, args.duration_s * 1000.0, seed);
    events = std::move(stream.events);
    symbols = std::move(stream.symbols);
  }

  if (args.emit_symbols) {
    write_trace_file(events, args.out_path, symbols);
  } else {
    write_trace_file(events, args.out_path);
  }
  std::cout << "events\t" << events.size() << '\n';
  std::cout << "trace\t" << args.out_path << '\n';
  return 0;
}

int run_validate(const ValidateArgs& args) {
  Model model = read_model_file(args.model_path);
  auto reference = read_trace_file(args.reference_path);
  auto generated = read_trace_file(args.generated_path);

  ValidationOptions options;
  options.max_lag = args.lags;
  options.kl_smoothing = args.smooth;
  if (args.kl_base == "2") {
    options.kl_log_base = 2.0;
  } else if (args.kl_base != "e") {
    throw UsageError("--kl-base must be e or 2");
  }

  auto report = validate(model.spec, reference, generated, options);
  write_report_files(report, args.report_path);
  std::cout << "kl_divergence\t" << camgen::detail::format_metric(report.kl) << '\n';
  std::cout << "total_variation\t" << camgen::detail::format_metric(report.tv) << '\n';
  std::cout << "report\t" << args.report_path << '\n';
  std::cout << "report_json\t" << args.report_path << ".json" << '\n';
  return 0;
}

int run_info(const InfoArgs& args) {
  if (args.model_path.empty() == args.preset_name.empty())
    throw UsageError("pass exactly one of --model or --preset");
  if (!args.model_path.empty()) {
    Model model = read_model_file(args.model_path);
    print_model_summary(model, std::cout);
    return 0;
  }
  const Preset& p = preset(args.preset_name);
  auto spec = preset_spec(p, ModelMode::Complete, 1);
  std::cout << "preset\t" << p.name << '\n';
  std::cout << "oem\t" << p.oem << '\n';
  std::cout << "scenario\t" << p.scenario << '\n';
  std::cout << "sizes\t" << camgen::detail::join_csv(spec.sizes.bytes()) << '\n';
  std::cout << "intervals\t" << camgen::detail::join_csv(spec.intervals.ms()) << '\n';
  std::cout << "alphabet\t" << spec.alphabet_size() << '\n';
  std::cout << "jitter_std_ms\t" << camgen::detail::format_g9(p.jitter_std_ms) << '\n';
  return 0;
}

int run_import(const ImportArgs& args) {
  const ModelMode mode = mode_from_string(args.mode);

  SizeSet sizes;
  IntervalSet intervals;
  double jitter = args.jitter;
  if (mode != ModelMode::IntervalOnly) {
    if (!args.sizes_csv.empty()) {
      sizes = SizeSet::of(camgen::detail::parse_int_csv(args.sizes_csv, "--sizes"));
    } else if (!args.preset_name.empty()) {
      sizes = SizeSet::of(preset(args.preset_name).size_bytes);
    } else {
      throw UsageError("--sizes or --preset is required for this mode");
    }
  }
  if (mode != ModelMode::SizeOnly) {
    intervals = resolve_intervals(args.intervals_csv);
    if (jitter < 0.0)
      jitter = args.preset_name.empty() ? 0.0 : preset(args.preset_name).jitter_std_ms;
  } else {
    jitter = 0.0;
  }

  ModelSpec spec;
  switch (mode) {
    case ModelMode::Complete:
      spec = ModelSpec::complete(std::move(sizes), std::move(intervals), args.order,
                                 jitter);
      break;
    case ModelMode::SizeOnly:
      spec = ModelSpec::size_only(std::move(sizes), args.order);
      break;
    case ModelMode::IntervalOnly:
      spec = ModelSpec::interval_only(std::move(intervals), args.order, jitter);
      break;
  }

  std::ifstream transitions(args.transitions_path, std::ios::binary);
  if (!transitions)
    throw Error("cannot open matrix file '" + args.transitions_path + "'");
  std::ifstream initial;
  std::istream* initial_ptr = nullptr;
  if (!args.initial_path.empty()) {
    initial.open(args.initial_path, std::ios::binary);
    if (!initial) throw Error("cannot open initial file '" + args.initial_path + "'");
    initial_ptr = &initial;
  }
  Model model = import_plain_matrix(transitions, initial_ptr, spec, args.label);
  write_model_file(model, args.out_path);
  print_model_summary(model, std::cout);
  std::cout << "model\t" << args.out_path << '\n';
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Markov-source traffic models for V2X cooperative awareness messages"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand(
      "fit", "Fit a model from a trace CSV and write a model file");
  fit_cmd->add_option("--trace", fit_args.trace_path, "Input trace CSV")->required();
  fit_cmd->add_option("--m", fit_args.order, "Markov order m")
      ->required()
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--mode", fit_args.mode, "complete|size|interval")
      ->check(CLI::IsMember({"complete", "size", "interval"}));
  fit_cmd->add_option("--out", fit_args.out_path, "Output model file")->required();
  fit_cmd->add_option("--sizes", fit_args.sizes_csv, "Size bins, bytes (e.g. 200,300)");
  fit_cmd->add_flag("--auto-sizes", fit_args.auto_sizes,
                    "Detect size bins from the trace histogram");
  fit_cmd->add_option("--intervals", fit_args.intervals_csv,
                      "Interval bins, ms (default 100..1000 step 100)");
  fit_cmd->add_option("--preset", fit_args.preset_name, "Named parameter preset")
      ->check(CLI::IsMember(preset_names()));
  fit_cmd->add_option("--snap-tolerance", fit_args.snap_tolerance,
                      "Size snap tolerance, bytes (default 30)");
  fit_cmd->add_option("--hist-bin", fit_args.hist_bin,
                      "Histogram bin for --auto-sizes, bytes (default 10)");
  fit_cmd->add_option("--min-peak-prob", fit_args.min_peak_prob,
                      "Peak mass threshold for --auto-sizes (default 0.05)");
  fit_cmd->add_option("--label", fit_args.label, "Label stored in the model file");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand(
      "generate", "Generate a synthetic CAM trace from a model file");
  gen_cmd->add_option("--model", gen_args.model_path, "Complete model file");
  gen_cmd->add_option("--size-model", gen_args.size_model_path, "Size-only model file");
  gen_cmd->add_option("--interval-model", gen_args.interval_model_path,
                      "Interval-only model file");
  auto* count_opt = gen_cmd->add_option("--count", gen_args.count, "Number of CAMs");
  auto* duration_opt =
      gen_cmd->add_option("--duration", gen_args.duration_s, "Duration in seconds");
  auto* seed_opt = gen_cmd->add_option("--seed", gen_args.seed,
                                       "64-bit seed (default: system entropy)");
  gen_cmd->add_option("--out", gen_args.out_path, "Output trace CSV")->required();
  gen_cmd->add_flag("--emit-symbols", gen_args.emit_symbols,
                    "Append the symbol column to the trace");

  ValidateArgs val_args;
  auto* val_cmd = app.add_subcommand(
      "validate", "Compare a generated trace against a reference trace");
  val_cmd->add_option("--model", val_args.model_path, "Model file")->required();
  val_cmd->add_option("--reference", val_args.reference_path, "Reference trace CSV")
      ->required();
  val_cmd->add_option("--generated", val_args.generated_path, "Generated trace CSV")
      ->required();
  val_cmd->add_option("--lags", val_args.lags, "Correlation lag range (default 15)")
      ->check(CLI::PositiveNumber);
  val_cmd->add_option("--kl-base", val_args.kl_base, "KL logarithm base: e or 2");
  val_cmd->add_option("--smooth", val_args.smooth,
                      "Epsilon smoothing for KL (default off)");
  val_cmd->add_option("--report", val_args.report_path,
                      "Report path (text; .json is written alongside)")
      ->required();

  InfoArgs info_args;
  auto* info_cmd =
      app.add_subcommand("info", "Summarize a model file or a named preset");
  info_cmd->add_option("--model", info_args.model_path, "Model file");
  info_cmd->add_option("--preset", info_args.preset_name, "Preset name")
      ->check(CLI::IsMember(preset_names()));

  ImportArgs import_args;
  auto* import_cmd = app.add_subcommand(
      "import", "Build a model file from header-less plain-text matrices");
  import_cmd->add_option("--transitions", import_args.transitions_path,
                         "Matrix rows: m context symbols, next symbol, probability")
      ->required();
  import_cmd->add_option("--initial", import_args.initial_path,
                         "Initial rows: m context symbols, probability");
  import_cmd->add_option("--m", import_args.order, "Markov order m")
      ->required()
      ->check(CLI::PositiveNumber);
  import_cmd->add_option("--mode", import_args.mode, "complete|size|interval")
      ->check(CLI::IsMember({"complete", "size", "interval"}));
  import_cmd->add_option("--sizes", import_args.sizes_csv, "Size bins, bytes");
  import_cmd->add_option("--intervals", import_args.intervals_csv, "Interval bins, ms");
  import_cmd->add_option("--preset", import_args.preset_name, "Named parameter preset")
      ->check(CLI::IsMember(preset_names()));
  import_cmd->add_option("--jitter", import_args.jitter, "Jitter sigma, ms");
  import_cmd->add_option("--label", import_args.label, "Label stored in the model file");
  import_cmd->add_option("--out", import_args.out_path, "Output model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  gen_args.have_count = count_opt->count() > 0;
  gen_args.have_duration = duration_opt->count() > 0;
  if (seed_opt->count() == 0) gen_args.seed.reset();

  if (fit_cmd->parsed()) return run_fit(fit_args);
  if (gen_cmd->parsed()) return run_generate(gen_args);
  if (val_cmd->parsed()) return run_validate(val_args);
  if (info_cmd->parsed()) return run_info(info_args);
  if (import_cmd->parsed()) return run_import(import_args);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (...) {
    std::cerr << "error: unknown failure\n";
    return 2;
  }
}
