// mag: patient-level MSI/MSS aggregation toolkit.
//
// Subcommands: validate, featurize, synth, train, predict, compare.
// Machine-readable output goes to stdout, human-readable tables and
// warnings to stderr. Every command is a pure function of its input files
// and flags; reruns produce byte-identical outputs.
//
// Exit codes: 0 success, 2 input/validation error, 3 training/evaluation
// error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mag/mag.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTraining = 3;

int exit_code_for(mag::ErrorKind kind) {
  switch (kind) {
    case mag::ErrorKind::single_class:
    case mag::ErrorKind::empty_class:
    case mag::ErrorKind::empty_validation:
    case mag::ErrorKind::all_candidates_failed:
    case mag::ErrorKind::non_convergence:
    case mag::ErrorKind::missing_class:
      return kExitTraining;
    default:
      return kExitInput;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    throw mag::Error(mag::ErrorKind::invalid_argument,
                     "cannot open '" + path + "' for reading");
  }
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) {
    throw mag::Error(mag::ErrorKind::invalid_argument,
                     "cannot open '" + path + "' for writing");
  }
  return out;
}

std::vector<mag::PatchPrediction> read_predictions(const std::string& path) {
  auto in = open_input(path);
  try {
    return mag::parse_predictions(in);
  } catch (const mag::Error& err) {
    throw mag::Error(err.kind(), path + ": " + err.what());
  }
}

std::map<std::string, mag::ClassLabel> read_labels(const std::string& path) {
  auto in = open_input(path);
  try {
    return mag::parse_labels(in);
  } catch (const mag::Error& err) {
    throw mag::Error(err.kind(), path + ": " + err.what());
  }
}

// Lenient mode keeps unlabeled records; drop_unlabeled additionally removes
// them (used by train, which cannot consume unlabeled patients).
std::vector<mag::PatientRecord> load_records(const std::string& pred_path,
                                             const std::string& labels_path,
                                             bool strict, bool drop_unlabeled) {
  const auto preds = read_predictions(pred_path);
  const auto labels =
      labels_path.empty() ? std::map<std::string, mag::ClassLabel>{}
                          : read_labels(labels_path);
  auto records = mag::group_by_patient(preds, labels, strict);
  if (drop_unlabeled) {
    std::vector<mag::PatientRecord> kept;
    for (auto& record : records) {
      if (record.label().has_value()) {
        kept.push_back(std::move(record));
      } else {
        std::cerr << "warning: ignoring unlabeled patient '"
                  << record.patient_id() << "'\n";
      }
    }
    records = std::move(kept);
  }
  return records;
}

struct GridFlags {
  std::vector<double> c_values = {0.1, 1.0, 10.0, 100.0};
  std::vector<double> gamma_values = {0.1, 1.0, 10.0};
  std::vector<std::string> kernels = {"linear", "rbf"};
};

mag::HyperGrid make_grid(const GridFlags& flags) {
  std::vector<mag::KernelSpec::Kind> kinds;
  for (const auto& name : flags.kernels) {
    if (name == "linear") {
      kinds.push_back(mag::KernelSpec::Kind::linear);
    } else if (name == "rbf") {
      kinds.push_back(mag::KernelSpec::Kind::rbf);
    } else {
      throw mag::Error(mag::ErrorKind::invalid_argument,
                       "--kernel accepts 'linear' and 'rbf', got '" + name + "'");
    }
  }
  return mag::HyperGrid(flags.c_values, flags.gamma_values, kinds);
}

mag::SplitRatios make_ratios(const std::vector<double>& values) {
  if (values.size() != 3) {
    throw mag::Error(mag::ErrorKind::invalid_argument,
                     "--ratios expects exactly three values T,V,S");
  }
  return mag::SplitRatios(values[0], values[1], values[2]);
}

void check_threshold(double value, const char* flag) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw mag::Error(mag::ErrorKind::invalid_argument,
                     std::string(flag) + " must lie in [0,1]");
  }
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const std::string& pred_path, const std::string& labels_path,
                 bool strict) {
  const auto records = load_records(pred_path, labels_path, strict, false);
  std::size_t patches = 0;
  std::size_t msimut = 0;
  std::size_t mss = 0;
  std::size_t unlabeled = 0;
  std::vector<std::size_t> per_patient;
  per_patient.reserve(records.size());
  for (const auto& record : records) {
    patches += record.patch_count();
    per_patient.push_back(record.patch_count());
    if (!record.label().has_value()) {
      ++unlabeled;
    } else if (*record.label() == mag::ClassLabel::MSIMUT) {
      ++msimut;
    } else {
      ++mss;
    }
  }
  std::sort(per_patient.begin(), per_patient.end());
  double median = 0.0;
  if (!per_patient.empty()) {
    const std::size_t mid = per_patient.size() / 2;
    median = per_patient.size() % 2 == 1
                 ? static_cast<double>(per_patient[mid])
                 : (static_cast<double>(per_patient[mid - 1]) +
                    static_cast<double>(per_patient[mid])) /
                       2.0;
  }
  std::cout << "patients:           " << records.size() << '\n'
            << "patches:            " << patches << '\n'
            << "MSIMUT patients:    " << msimut << '\n'
            << "MSS patients:       " << mss << '\n'
            << "unlabeled patients: " << unlabeled << '\n';
  if (!per_patient.empty()) {
    std::cout << "patches/patient:    min " << per_patient.front() << "  median "
              << mag::detail::format_shortest(median) << "  max "
              << per_patient.back() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// featurize
// ---------------------------------------------------------------------------

int cmd_featurize(const std::string& pred_path, const std::string& labels_path,
                  std::size_t bins, bool strict, const std::string& out_path) {
  const auto records = load_records(pred_path, labels_path, strict, false);
  if (out_path.empty()) {
    mag::write_features_csv(std::cout, records, bins);
  } else {
    auto out = open_output(out_path);
    mag::write_features_csv(out, records, bins);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthFlags {
  std::string scenario = "equal-mean";
  std::uint64_t seed = 42;
  std::size_t n_msi = 60;
  std::size_t n_mss = 60;
  std::size_t patches_min = 100;
  std::size_t patches_max = 300;
  double msi_alpha = 0.5;
  double msi_beta = 0.5;
  double mss_alpha = 5.0;
  double mss_beta = 5.0;
  std::string out_predictions = "predictions.csv";
  std::string out_labels = "labels.csv";
};

int cmd_synth(const SynthFlags& flags) {
  std::optional<mag::CohortSpec> spec;
  if (flags.scenario == "equal-mean") {
    spec = mag::equal_mean_scenario(flags.seed);
  } else if (flags.scenario == "separable") {
    spec = mag::separable_scenario(flags.seed);
  } else if (flags.scenario == "custom") {
    spec = mag::CohortSpec(flags.n_msi, flags.n_mss, flags.patches_min,
                           flags.patches_max,
                           mag::BetaParams{flags.msi_alpha, flags.msi_beta},
                           mag::BetaParams{flags.mss_alpha, flags.mss_beta},
                           flags.seed);
  } else {
    throw mag::Error(mag::ErrorKind::invalid_argument,
                     "--scenario accepts equal-mean, separable or custom");
  }
  const auto records = mag::generate_cohort(*spec);
  {
    auto out = open_output(flags.out_predictions);
    mag::write_predictions_csv(out, records);
  }
  {
    auto out = open_output(flags.out_labels);
    mag::write_labels_csv(out, records);
  }
  std::cerr << "wrote " << flags.out_predictions << " and " << flags.out_labels
            << " (" << records.size() << " patients)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainFlags {
  std::string pred_path;
  std::string labels_path;
  std::size_t bins = 10;
  std::uint64_t seed = 42;
  std::vector<double> ratios = {0.5, 0.2, 0.3};
  GridFlags grid;
  bool strict = false;
  std::string out = "model.json";
  std::string manifest_out;
};

void write_manifest(const std::string& path, const mag::SplitAssignment& split) {
  auto out = open_output(path);
  out << "patient_id,split\n";
  std::map<std::string, const char*> rows;
  for (const auto& id : split.train()) rows[id] = "train";
  for (const auto& id : split.val()) rows[id] = "val";
  for (const auto& id : split.test()) rows[id] = "test";
  for (const auto& [id, name] : rows) out << id << ',' << name << '\n';
}

int cmd_train(const TrainFlags& flags) {
  const auto ratios = make_ratios(flags.ratios);
  const auto grid = make_grid(flags.grid);
  const auto records =
      load_records(flags.pred_path, flags.labels_path, flags.strict, true);

  const auto split = mag::split_patients(records, ratios, flags.seed);
  std::vector<mag::PatientRecord> train_set;
  std::vector<mag::PatientRecord> val_set;
  for (const auto& record : records) {
    if (split.train().count(record.patient_id())) {
      train_set.push_back(record);
    } else if (split.val().count(record.patient_id())) {
      val_set.push_back(record);
    }
  }

  std::vector<std::string> warnings;
  const mag::MagModel model =
      mag::mag_train(train_set, val_set, grid, flags.bins, flags.seed, &warnings);
  for (const auto& warning : warnings) std::cerr << "warning: " << warning << '\n';

  const std::string manifest_path =
      flags.manifest_out.empty() ? flags.out + ".manifest.csv" : flags.manifest_out;
  nlohmann::json trained_on = {{"patients", records.size()},
                               {"train", train_set.size()},
                               {"val", val_set.size()},
                               {"test", split.test().size()},
                               {"seed", flags.seed},
                               {"ratios", flags.ratios}};
  mag::save_model(model, flags.out, trained_on);
  write_manifest(manifest_path, split);

  nlohmann::json summary = {
      {"kernel", mag::kernel_name(model.selected().kernel)},
      {"c", model.selected().c},
      {"validation_bacc", model.validation_bacc()},
      {"model", flags.out},
      {"manifest", manifest_path}};
  if (model.selected().kernel == mag::KernelSpec::Kind::rbf) {
    summary["gamma"] = model.selected().gamma;
  }
  std::cout << summary.dump(2) << '\n';
  std::cerr << "selected " << mag::kernel_name(model.selected().kernel)
            << " kernel, c=" << model.selected().c;
  if (model.selected().kernel == mag::KernelSpec::Kind::rbf) {
    std::cerr << ", gamma=" << model.selected().gamma;
  }
  std::cerr << "; validation BACC "
            << mag::detail::format_shortest(model.validation_bacc()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

int cmd_predict(const std::string& pred_path, const std::string& model_path,
                const std::string& out_path) {
  const auto model = mag::load_model(model_path);
  const auto records = load_records(pred_path, "", false, false);
  std::ostringstream body;
  body << "patient_id,decision_value,predicted_label\n";
  for (const auto& record : records) {
    const auto [label, value] = mag::mag_predict(model, record);
    body << record.patient_id() << ',' << mag::detail::format_shortest(value)
         << ',' << mag::label_name(label) << '\n';
  }
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    auto out = open_output(out_path);
    out << body.str();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

std::set<std::string> read_manifest_test_ids(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!mag::detail::read_line(in, line) || line != "patient_id,split") {
    throw mag::Error(mag::ErrorKind::malformed_row,
                     path + ": line 1: header must be exactly 'patient_id,split'");
  }
  std::set<std::string> test_ids;
  std::set<std::string> all_ids;
  std::size_t line_no = 1;
  while (mag::detail::read_line(in, line)) {
    ++line_no;
    const auto fields = mag::detail::split_fields(line);
    if (fields.size() != 2 || fields[0].empty()) {
      throw mag::Error(mag::ErrorKind::malformed_row,
                       path + ": line " + std::to_string(line_no) +
                           ": expected 'patient_id,split'");
    }
    const std::string id(fields[0]);
    if (!all_ids.insert(id).second) {
      throw mag::Error(mag::ErrorKind::duplicate_patient,
                       path + ": line " + std::to_string(line_no) +
                           ": duplicate patient '" + id + "'");
    }
    if (fields[1] == "test") {
      test_ids.insert(id);
    } else if (fields[1] != "train" && fields[1] != "val") {
      throw mag::Error(mag::ErrorKind::malformed_row,
                       path + ": line " + std::to_string(line_no) +
                           ": unknown split '" + std::string(fields[1]) + "'");
    }
  }
  return test_ids;
}

int cmd_compare(const std::string& pred_path, const std::string& labels_path,
                const std::string& model_path, const std::string& manifest_path,
                double patch_threshold, double patient_threshold) {
  check_threshold(patch_threshold, "--patch-threshold");
  check_threshold(patient_threshold, "--patient-threshold");
  const auto model = mag::load_model(model_path);
  const auto records = load_records(pred_path, labels_path, false, false);
  const auto test_ids = read_manifest_test_ids(manifest_path);

  std::vector<mag::PatientRecord> test_set;
  std::set<std::string> present;
  for (const auto& record : records) present.insert(record.patient_id());
  for (const auto& id : test_ids) {
    if (!present.count(id)) {
      throw mag::Error(mag::ErrorKind::invalid_argument,
                       "manifest references patient '" + id +
                           "' absent from the predictions");
    }
  }
  for (const auto& record : records) {
    if (test_ids.count(record.patient_id())) test_set.push_back(record);
  }

  const mag::EvalReport report =
      mag::compare(test_set, model, patch_threshold, patient_threshold);
  std::cout << mag::report_to_json(report).dump(2) << '\n';
  std::cerr << mag::render_report_table(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patient-level MSI/MSS aggregation toolkit"};
  app.require_subcommand(1);

  // validate
  std::string v_pred;
  std::string v_labels;
  bool v_strict = false;
  auto* validate = app.add_subcommand(
      "validate", "check a predictions/labels file pair and print a summary");
  validate->add_option("predictions", v_pred, "predictions CSV")->required();
  validate->add_option("labels", v_labels, "labels CSV")->required();
  validate->add_flag("--strict-labels", v_strict,
                     "fail when a patient has predictions but no label");

  // featurize
  std::string f_pred;
  std::string f_labels;
  std::size_t f_bins = 10;
  bool f_strict = false;
  std::string f_out;
  auto* featurize = app.add_subcommand(
      "featurize", "export per-patient histogram features as CSV");
  featurize->add_option("predictions", f_pred, "predictions CSV")->required();
  featurize->add_option("labels", f_labels, "labels CSV (optional)");
  featurize->add_option("--bins", f_bins, "histogram bin count")
      ->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  featurize->add_flag("--strict-labels", f_strict,
                      "fail when a patient has predictions but no label");
  featurize->add_option("--out", f_out, "output path (default: stdout)");

  // synth
  SynthFlags s_flags;
  auto* synth = app.add_subcommand(
      "synth", "generate a seeded synthetic cohort as predictions+labels CSVs");
  synth->add_option("--scenario", s_flags.scenario,
                    "equal-mean, separable or custom");
  synth->add_option("--seed", s_flags.seed, "generator seed");
  synth->add_option("--n-msi", s_flags.n_msi, "custom: MSIMUT patient count");
  synth->add_option("--n-mss", s_flags.n_mss, "custom: MSS patient count");
  synth->add_option("--patches-min", s_flags.patches_min,
                    "custom: minimum patches per patient");
  synth->add_option("--patches-max", s_flags.patches_max,
                    "custom: maximum patches per patient");
  synth->add_option("--msi-alpha", s_flags.msi_alpha, "custom: MSIMUT Beta alpha");
  synth->add_option("--msi-beta", s_flags.msi_beta, "custom: MSIMUT Beta beta");
  synth->add_option("--mss-alpha", s_flags.mss_alpha, "custom: MSS Beta alpha");
  synth->add_option("--mss-beta", s_flags.mss_beta, "custom: MSS Beta beta");
  synth->add_option("--out-predictions", s_flags.out_predictions,
                    "predictions CSV path");
  synth->add_option("--out-labels", s_flags.out_labels, "labels CSV path");

  // train
  TrainFlags t_flags;
  auto* train = app.add_subcommand(
      "train", "split patients, grid-search the SVM and persist the model");
  train->add_option("predictions", t_flags.pred_path, "predictions CSV")->required();
  train->add_option("labels", t_flags.labels_path, "labels CSV")->required();
  train->add_option("--bins", t_flags.bins, "histogram bin count")
      ->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  train->add_option("--seed", t_flags.seed, "split seed");
  train->add_option("--ratios", t_flags.ratios, "train,val,test ratios")
      ->delimiter(',');
  train->add_option("--grid-c", t_flags.grid.c_values, "grid C values")
      ->delimiter(',');
  train->add_option("--grid-gamma", t_flags.grid.gamma_values, "grid gamma values")
      ->delimiter(',');
  train->add_option("--kernel", t_flags.grid.kernels,
                    "kernels to search (linear,rbf)")
      ->delimiter(',');
  train->add_flag("--strict-labels", t_flags.strict,
                  "fail when a patient has predictions but no label");
  train->add_option("--out", t_flags.out, "model output path");
  train->add_option("--manifest-out", t_flags.manifest_out,
                    "split manifest path (default: <out>.manifest.csv)");

  // predict
  std::string p_pred;
  std::string p_model;
  std::string p_out;
  auto* predict = app.add_subcommand(
      "predict", "apply a trained model to a predictions CSV");
  predict->add_option("predictions", p_pred, "predictions CSV")->required();
  predict->add_option("--model", p_model, "model JSON path")->required();
  predict->add_option("--out", p_out, "output path (default: stdout)");

  // compare
  std::string c_pred;
  std::string c_labels;
  std::string c_model;
  std::string c_manifest;
  double c_patch_threshold = 0.5;
  double c_patient_threshold = 0.5;
  auto* compare = app.add_subcommand(
      "compare", "evaluate counting, averaging and MAg on the manifest's test split");
  compare->add_option("predictions", c_pred, "predictions CSV")->required();
  compare->add_option("labels", c_labels, "labels CSV")->required();
  compare->add_option("--model", c_model, "model JSON path")->required();
  compare->add_option("--manifest", c_manifest, "split manifest path")->required();
  compare->add_option("--patch-threshold", c_patch_threshold,
                      "patch-level MSI threshold for counting");
  compare->add_option("--patient-threshold", c_patient_threshold,
                      "patient-level decision threshold for the baselines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (validate->parsed()) return cmd_validate(v_pred, v_labels, v_strict);
    if (featurize->parsed()) {
      return cmd_featurize(f_pred, f_labels, f_bins, f_strict, f_out);
    }
    if (synth->parsed()) return cmd_synth(s_flags);
    if (train->parsed()) return cmd_train(t_flags);
    if (predict->parsed()) return cmd_predict(p_pred, p_model, p_out);
    if (compare->parsed()) {
      return cmd_compare(c_pred, c_labels, c_model, c_manifest,
                         c_patch_threshold, c_patient_threshold);
    }
  } catch (const mag::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code_for(err.kind());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}
