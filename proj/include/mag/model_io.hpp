// JSON persistence for trained models. The document is self-describing:
//
//   format_version        1
//   kernel                {"kind": "linear"|"rbf", "gamma": <rbf only>}
//   c, bias, dim          training C, bias term, feature dimension
//   support_vectors       array of arrays
//   coefs                 signed dual coefficients (alpha_i * y_i)
//   bins                  feature bin count
//   selected_hyperparams  {"kernel", "c", "gamma" (rbf only)}
//   validation_bacc       BACC of the winning grid point on validation
//   trained_on            free-form metadata supplied by the caller
//
// Doubles are serialized in shortest round-trip form, so a load reproduces
// decision values bitwise.

#ifndef MAG_MODEL_IO_HPP
#define MAG_MODEL_IO_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mag/aggregate.hpp"
#include "mag/domain.hpp"
#include "mag/svm.hpp"

namespace mag {

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const MagModel& model,
                                    nlohmann::json trained_on = nlohmann::json::object()) {
  const SvmModel& svm = model.svm();
  nlohmann::json kernel = {{"kind", kernel_name(svm.kernel().kind)}};
  if (svm.kernel().kind == KernelSpec::Kind::rbf) {
    kernel["gamma"] = svm.kernel().gamma;
  }
  nlohmann::json selected = {{"kernel", kernel_name(model.selected().kernel)},
                             {"c", model.selected().c}};
  if (model.selected().kernel == KernelSpec::Kind::rbf) {
    selected["gamma"] = model.selected().gamma;
  }
  return nlohmann::json{{"format_version", kModelFormatVersion},
                        {"kernel", kernel},
                        {"c", svm.c()},
                        {"bias", svm.bias()},
                        {"dim", svm.dim()},
                        {"support_vectors", svm.support_vectors()},
                        {"coefs", svm.coefs()},
                        {"bins", model.bin_count()},
                        {"selected_hyperparams", selected},
                        {"validation_bacc", model.validation_bacc()},
                        {"trained_on", std::move(trained_on)}};
}

namespace detail {

inline KernelSpec kernel_from_json(const nlohmann::json& doc) {
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "linear") return KernelSpec::linear();
  require(kind == "rbf", ErrorKind::invalid_argument,
          "model: unknown kernel kind '" + kind + "'");
  return KernelSpec::rbf(doc.at("gamma").get<double>());
}

}  // namespace detail

inline MagModel model_from_json(const nlohmann::json& doc) {
  detail::require(doc.value("format_version", -1) == kModelFormatVersion,
                  ErrorKind::invalid_argument,
                  "model: unsupported format_version");
  const KernelSpec kernel = detail::kernel_from_json(doc.at("kernel"));
  SvmModel svm(kernel,
               doc.at("support_vectors").get<std::vector<std::vector<double>>>(),
               doc.at("coefs").get<std::vector<double>>(),
               doc.at("bias").get<double>(), doc.at("c").get<double>());
  detail::require(svm.dim() == doc.at("dim").get<std::size_t>(),
                  ErrorKind::dimension_mismatch,
                  "model: dim field does not match the support vectors");

  const auto& sel = doc.at("selected_hyperparams");
  SelectedHyperparams selected;
  selected.kernel = sel.at("kernel").get<std::string>() == "linear"
                        ? KernelSpec::Kind::linear
                        : KernelSpec::Kind::rbf;
  selected.c = sel.at("c").get<double>();
  selected.gamma = selected.kernel == KernelSpec::Kind::rbf
                       ? sel.at("gamma").get<double>()
                       : 0.0;
  return MagModel(std::move(svm), doc.at("bins").get<std::size_t>(), selected,
                  doc.at("validation_bacc").get<double>());
}

inline void save_model(const MagModel& model, const std::filesystem::path& path,
                       nlohmann::json trained_on = nlohmann::json::object()) {
  std::ofstream out(path, std::ios::binary);
  detail::require(out.good(), ErrorKind::invalid_argument,
                  "save_model: cannot open '" + path.string() + "' for writing");
  out << model_to_json(model, std::move(trained_on)).dump(2) << '\n';
  detail::require(out.good(), ErrorKind::invalid_argument,
                  "save_model: write to '" + path.string() + "' failed");
}

inline MagModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(in.good(), ErrorKind::invalid_argument,
                  "load_model: cannot open '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& err) {
    throw Error(ErrorKind::invalid_argument,
                "load_model: '" + path.string() + "' is not valid JSON: " +
                    err.what());
  }
  try {
    return model_from_json(doc);
  } catch (const nlohmann::json::exception& err) {
    throw Error(ErrorKind::invalid_argument,
                "load_model: '" + path.string() + "' misses required fields: " +
                    err.what());
  }
}

}  // namespace mag

#endif  // MAG_MODEL_IO_HPP
